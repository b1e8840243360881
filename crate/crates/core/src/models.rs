//! Built-in model library.
//!
//! Every model is a speed measure in natural scale; [`ModelSpec`] is the
//! `[model]` table of an experiment config.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{ChainReference, GaussianReference, ReferenceSampler};
use crate::error::{Error, Result};
use crate::measure::{BoundaryKind, Density, SelfSimilarMeasure, SpeedMeasure, StateSpace};
use crate::scale::ScaleFactorScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Inaccessible,
    Absorbing,
}

impl From<Kind> for BoundaryKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Inaccessible => BoundaryKind::Inaccessible,
            Kind::Absorbing => BoundaryKind::Absorbing,
        }
    }
}

fn neg_inf() -> f64 {
    f64::NEG_INFINITY
}

fn pos_inf() -> f64 {
    f64::INFINITY
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

/// Density ids accepted by the `custom` model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "density", rename_all = "snake_case")]
pub enum DensitySpec {
    /// `c`.
    Constant {
        #[serde(default = "two")]
        c: f64,
    },
    /// `2 / (k1 (1 + x²))`.
    #[serde(rename = "rational_1px2")]
    Rational1px2 {
        #[serde(default = "one")]
        k1: f64,
    },
    /// `2 / η(x)²` for `dY = η(Y) dW` with `η = eta_left` below `switch`
    /// and `eta_right` above it.
    SdeEta {
        eta_left: f64,
        eta_right: f64,
        #[serde(default)]
        switch: f64,
    },
}

impl DensitySpec {
    pub fn build(&self) -> Result<Density> {
        match *self {
            Self::Constant { c } => {
                positive("c", c)?;
                Ok(Density::constant(c))
            }
            Self::Rational1px2 { k1 } => {
                positive("k1", k1)?;
                Ok(Density::from_fn(format!("rational_1px2(k1 = {k1})"), move |x| 2.0 / (k1 * (1.0 + x * x)), vec![]))
            }
            Self::SdeEta { eta_left, eta_right, switch } => {
                positive("eta_left", eta_left)?;
                positive("eta_right", eta_right)?;
                finite("switch", switch)?;
                let (dl, dr) = (2.0 / (eta_left * eta_left), 2.0 / (eta_right * eta_right));
                Ok(Density::from_fn(
                    format!("sde_eta({eta_left}, {eta_right}, switch = {switch})"),
                    move |x| if x < switch { dl } else { dr },
                    vec![switch],
                ))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `m = 2·dx` on ℝ.
    Brownian,
    /// `m = (2/σ²)·dx` on ℝ.
    ScaledBrownian { sigma: f64 },
    /// `m = 2·dx + ρ·δ_site` on ℝ.
    StickyBrownian {
        #[serde(default = "two")]
        rho: f64,
        #[serde(default)]
        site: f64,
    },
    /// `m = 2·dx + mass·(Cantor measure on [0, 1])` on ℝ.
    CantorSlowed {
        #[serde(default = "one")]
        mass: f64,
    },
    /// `m = 2·dx` on `[0, ∞)`, absorbed at 0.
    AbsorbingHalfline,
    Custom {
        #[serde(default = "neg_inf")]
        left: f64,
        #[serde(default = "pos_inf")]
        right: f64,
        #[serde(default)]
        left_kind: Kind,
        #[serde(default)]
        right_kind: Kind,
        #[serde(flatten)]
        density: DensitySpec,
        /// `[position, weight]` pairs.
        #[serde(default)]
        atoms: Vec<[f64; 2]>,
        /// Mass of a Cantor component on `[0, 1]`; 0 for none.
        #[serde(default)]
        cantor_mass: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Configuration(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Configuration(format!("{name} must be finite, got {v}")))
    }
}

impl ModelSpec {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Brownian => "brownian",
            Self::ScaledBrownian { .. } => "scaled_brownian",
            Self::StickyBrownian { .. } => "sticky_brownian",
            Self::CantorSlowed { .. } => "cantor_slowed",
            Self::AbsorbingHalfline => "absorbing_halfline",
            Self::Custom { .. } => "custom",
        }
    }

    /// Parses a `[model]` table, rejecting keys the model does not use.
    pub fn from_table(table: &toml::Table) -> Result<Self> {
        let id = table
            .get("id")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Configuration("model table needs a string `id`".into()))?;
        let allowed: &[&str] = match id {
            "brownian" | "absorbing_halfline" => &[],
            "scaled_brownian" => &["sigma"],
            "sticky_brownian" => &["rho", "site"],
            "cantor_slowed" => &["mass"],
            "custom" => &[
                "left",
                "right",
                "left_kind",
                "right_kind",
                "density",
                "c",
                "k1",
                "eta_left",
                "eta_right",
                "switch",
                "atoms",
                "cantor_mass",
            ],
            other => return Err(Error::Configuration(format!("unknown model id `{other}`"))),
        };
        if let Some(k) = table.keys().find(|k| *k != "id" && !allowed.contains(&k.as_str())) {
            return Err(Error::Configuration(format!("unknown key `{k}` for model `{id}`")));
        }
        table
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Configuration(format!("model `{id}`: {}", e.message())))
    }

    pub fn build(&self) -> Result<SpeedMeasure> {
        match self {
            Self::Brownian => SpeedMeasure::lebesgue(2.0),
            Self::ScaledBrownian { sigma } => {
                positive("sigma", *sigma)?;
                SpeedMeasure::lebesgue(2.0 / (sigma * sigma))
            }
            Self::StickyBrownian { rho, site } => {
                positive("rho", *rho)?;
                finite("site", *site)?;
                SpeedMeasure::builder(StateSpace::real_line()).density(Density::constant(2.0)).atom(*site, *rho).build()
            }
            Self::CantorSlowed { mass } => {
                positive("mass", *mass)?;
                SpeedMeasure::builder(StateSpace::real_line())
                    .density(Density::constant(2.0))
                    .singular(SelfSimilarMeasure::cantor(*mass)?)
                    .build()
            }
            Self::AbsorbingHalfline => SpeedMeasure::builder(StateSpace::new(
                0.0,
                f64::INFINITY,
                BoundaryKind::Absorbing,
                BoundaryKind::Inaccessible,
            )?)
            .density(Density::constant(2.0))
            .build(),
            Self::Custom { left, right, left_kind, right_kind, density, atoms, cantor_mass } => {
                let space = StateSpace::new(*left, *right, (*left_kind).into(), (*right_kind).into())?;
                let mut b = SpeedMeasure::builder(space).density(density.build()?);
                for [x, w] in atoms {
                    b = b.atom(*x, *w);
                }
                if *cantor_mass != 0.0 {
                    b = b.singular(SelfSimilarMeasure::cantor(*cantor_mass)?);
                }
                b.build()
            }
        }
    }

    /// EMCEL scheme with the default tolerance policy.
    pub fn scheme(&self, h_max: f64) -> Result<ScaleFactorScheme> {
        ScaleFactorScheme::emcel_default(Arc::new(self.build()?), h_max)
    }

    /// Exact law of `Y_T` where available, otherwise the chain at `h_ref`.
    pub fn reference(
        &self,
        scheme: Arc<ScaleFactorScheme>,
        y0: f64,
        horizon: f64,
        h_ref: f64,
    ) -> Box<dyn ReferenceSampler> {
        match scheme.measure().brownian_constant() {
            Some(c) => Box::new(GaussianReference::for_lebesgue(c, y0, horizon)),
            None => Box::new(ChainReference { scheme, h_ref, y0, horizon }),
        }
    }
}

/// `(id, parameters, description)` for every registry entry, in a fixed order.
pub const MODEL_REGISTRY: &[(&str, &str, &str)] = &[
    ("brownian", "", "m = 2 dx on the real line (standard Brownian motion)"),
    ("scaled_brownian", "sigma > 0", "m = (2/sigma^2) dx on the real line"),
    ("sticky_brownian", "rho > 0 (default 2), site (default 0)", "m = 2 dx + rho delta_site"),
    ("cantor_slowed", "mass > 0 (default 1)", "m = 2 dx + mass * Cantor measure on [0, 1]"),
    ("absorbing_halfline", "", "m = 2 dx on [0, inf), absorbed at 0"),
    (
        "custom",
        "left, right, left_kind, right_kind, density = constant{c} | rational_1px2{k1} | \
         sde_eta{eta_left, eta_right, switch}, atoms = [[x, w], ...], cantor_mass",
        "user-assembled speed measure from the density registry",
    ),
];

pub fn list_models() -> String {
    let mut out = String::new();
    for (id, params, desc) in MODEL_REGISTRY {
        out.push_str(id);
        if !params.is_empty() {
            out.push_str(&format!("({params})"));
        }
        out.push_str(&format!("\n    {desc}\n"));
    }
    out
}
