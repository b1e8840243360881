//! Speed measures of general diffusions in natural scale.
//!
//! A [`SpeedMeasure`] is the sum of an absolutely continuous part (a
//! density callable with declared break points), finitely many atoms and
//! finitely many self-similar singular parts. It is the single source of
//! truth for the triangle integral
//!
//! ```text
//! G(y, a) = ½ ∫_{(y−a, y+a)} (a − |u − y|) m(du),
//! ```
//!
//! the expected time the diffusion started at `y` needs to leave
//! `(y − a, y + a)`.

mod condition;
pub mod quadrature;
mod selfsimilar;

use std::fmt;
use std::sync::Arc;

pub use condition::{audit_grid, check_condition_c, ConditionCReport, DEFAULT_AUDIT_POINTS};
pub use selfsimilar::{AffineBranch, SelfSimilarMeasure};

use crate::error::{ensure_arg, Error, Result};
use quadrature::integrate_with_breaks;

/// Default absolute tolerance of the density quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

/// Behaviour of the process at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// Never reached in finite time; the point does not belong to `I`.
    Inaccessible,
    /// Reached in finite time, after which the process stays there.
    Absorbing,
}

/// The state space `I` with interior `(left, right)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpace {
    left: f64,
    right: f64,
    left_kind: BoundaryKind,
    right_kind: BoundaryKind,
}

impl StateSpace {
    pub fn new(left: f64, right: f64, left_kind: BoundaryKind, right_kind: BoundaryKind) -> Result<Self> {
        if left.is_nan() || right.is_nan() || !(left < right) {
            return Err(Error::Argument(format!("state space needs l < r, got ({left}, {right})")));
        }
        if left == f64::INFINITY || right == f64::NEG_INFINITY {
            return Err(Error::Argument("endpoint on the wrong side of the real line".into()));
        }
        if (left.is_infinite() && left_kind != BoundaryKind::Inaccessible)
            || (right.is_infinite() && right_kind != BoundaryKind::Inaccessible)
        {
            return Err(Error::Argument("an infinite endpoint must be inaccessible".into()));
        }
        Ok(Self { left, right, left_kind, right_kind })
    }

    pub fn real_line() -> Self {
        Self {
            left: f64::NEG_INFINITY,
            right: f64::INFINITY,
            left_kind: BoundaryKind::Inaccessible,
            right_kind: BoundaryKind::Inaccessible,
        }
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn left_kind(&self) -> BoundaryKind {
        self.left_kind
    }

    pub fn right_kind(&self) -> BoundaryKind {
        self.right_kind
    }

    /// `y ∈ I° = (l, r)`.
    pub fn in_interior(&self, y: f64) -> bool {
        y > self.left && y < self.right
    }

    /// `y ∈ [l, r]` (finite `y` only).
    pub fn in_closure(&self, y: f64) -> bool {
        y.is_finite() && y >= self.left && y <= self.right
    }

    /// `y ∈ I`: the interior plus the absorbing endpoints.
    pub fn contains(&self, y: f64) -> bool {
        self.in_interior(y)
            || (y == self.left && self.left_kind == BoundaryKind::Absorbing)
            || (y == self.right && self.right_kind == BoundaryKind::Absorbing)
    }

    pub fn is_absorbing_point(&self, y: f64) -> bool {
        (y == self.left && self.left_kind == BoundaryKind::Absorbing)
            || (y == self.right && self.right_kind == BoundaryKind::Absorbing)
    }
}

/// Absolutely continuous part of a speed measure.
#[derive(Clone)]
pub struct Density {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
    constant: Option<f64>,
    label: String,
}

impl Density {
    pub fn constant(value: f64) -> Self {
        Self {
            f: Arc::new(move |_| value),
            breakpoints: Vec::new(),
            constant: Some(value),
            label: format!("constant({value})"),
        }
    }

    /// A density given by a callable together with the points where it
    /// fails to be smooth. Quadrature always splits at those points.
    pub fn from_fn<F>(label: impl Into<String>, f: F, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut breakpoints = breakpoints;
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Self { f: Arc::new(f), breakpoints, constant: None, label: label.into() }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `Some(c)` when the density was built by [`Density::constant`].
    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density").field("label", &self.label).field("breakpoints", &self.breakpoints).finish()
    }
}

/// A point mass `weight · δ_position`; a sticky point of the diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// Speed measure `m` on the interior of a [`StateSpace`].
#[derive(Debug, Clone)]
pub struct SpeedMeasure {
    space: StateSpace,
    density: Option<Density>,
    atoms: Vec<Atom>,
    singular: Vec<SelfSimilarMeasure>,
    quad_tol: f64,
    /// Density break points plus atom positions, sorted.
    kinks: Vec<f64>,
}

impl SpeedMeasure {
    pub fn builder(space: StateSpace) -> SpeedMeasureBuilder {
        SpeedMeasureBuilder {
            space,
            density: None,
            atoms: Vec::new(),
            singular: Vec::new(),
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }

    /// `c · dx` on the real line: Brownian motion with variance `2/c` per unit time.
    pub fn lebesgue(c: f64) -> Result<Self> {
        Self::builder(StateSpace::real_line()).density(Density::constant(c)).build()
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn singular_parts(&self) -> &[SelfSimilarMeasure] {
        &self.singular
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// `Some(c)` if `m = c·dx` on the whole real line (a scaled Brownian motion).
    pub fn brownian_constant(&self) -> Option<f64> {
        let line = self.space.left == f64::NEG_INFINITY && self.space.right == f64::INFINITY;
        if line && self.atoms.is_empty() && self.singular.is_empty() {
            self.density.as_ref().and_then(Density::constant_value)
        } else {
            None
        }
    }

    /// The triangle integral `G(y, a)` at the default quadrature tolerance.
    pub fn triangle_integral(&self, y: f64, a: f64) -> Result<f64> {
        self.triangle_integral_tol(y, a, self.quad_tol)
    }

    /// The triangle integral with an explicit absolute tolerance for the
    /// density and singular parts.
    pub fn triangle_integral_tol(&self, y: f64, a: f64, tol: f64) -> Result<f64> {
        if !self.space.in_interior(y) {
            return Err(Error::Domain(format!("y = {y} is not in the interior of the state space")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("half-width must be finite and nonnegative, got {a}")));
        }
        let slack = 1e-12 * y.abs().max(1.0);
        if y - a < self.space.left - slack || y + a > self.space.right + slack {
            return Err(Error::Domain(format!(
                "interval ({}, {}) leaves the closure of the state space",
                y - a,
                y + a
            )));
        }
        Ok(self.triangle_unchecked(y, a, tol))
    }

    /// `G(y, a)` without argument validation; `y ± a` is clipped to `[l, r]`.
    pub(crate) fn triangle_unchecked(&self, y: f64, a: f64, tol: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let lo = (y - a).max(self.space.left);
        let hi = (y + a).min(self.space.right);
        let mut twice = 0.0;
        if let Some(c) = self.density.as_ref().and_then(Density::constant_value) {
            let (left, right) = (y - lo, hi - y);
            twice += c * (a * (left + right) - 0.5 * (left * left + right * right));
        } else if let Some(d) = &self.density {
            let weight = |u: f64| {
                let w = a - (u - y).abs();
                if w <= 0.0 {
                    0.0
                } else {
                    w * d.eval(u)
                }
            };
            let parts = 1 + self.singular.len();
            let dtol = 2.0 * tol / parts as f64;
            let mut breaks = Vec::with_capacity(4);
            breaks.push(y);
            let from = self.kinks.partition_point(|&k| k <= lo);
            breaks.extend(self.kinks[from..].iter().copied().take_while(|&k| k < hi));
            twice += integrate_with_breaks(&weight, lo, hi, &breaks, dtol);
        }
        for atom in &self.atoms {
            let w = a - (atom.position - y).abs();
            if w > 0.0 {
                twice += atom.weight * w;
            }
        }
        if !self.singular.is_empty() {
            let stol = 2.0 * tol / (1 + self.singular.len()) as f64;
            for s in &self.singular {
                // Validated at construction, so the tolerance is positive.
                twice += s.tent_integral(y, a, stol).unwrap_or(0.0);
            }
        }
        0.5 * twice
    }

    /// `m([a, b])` for a compact interval inside the interior.
    pub fn measure_of_interval(&self, a: f64, b: f64) -> Result<f64> {
        ensure_arg!(a <= b, "interval [{a}, {b}] is reversed");
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Domain("infinite intervals have no finite measure here".into()));
        }
        if !(self.space.in_interior(a) && self.space.in_interior(b)) {
            return Err(Error::Domain(format!("[{a}, {b}] is not inside the interior")));
        }
        Ok(self.mass_unchecked(a, b))
    }

    fn mass_unchecked(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        if let Some(d) = &self.density {
            total += integrate_with_breaks(&|u| d.eval(u), a, b, d.breakpoints(), self.quad_tol);
        }
        total += self.atoms.iter().filter(|at| at.position >= a && at.position <= b).map(|at| at.weight).sum::<f64>();
        total += self.singular.iter().map(|s| s.interval_mass(a, b, self.quad_tol)).sum::<f64>();
        total
    }
}

pub struct SpeedMeasureBuilder {
    space: StateSpace,
    density: Option<Density>,
    atoms: Vec<Atom>,
    singular: Vec<SelfSimilarMeasure>,
    quad_tol: f64,
}

impl SpeedMeasureBuilder {
    pub fn density(mut self, d: Density) -> Self {
        self.density = Some(d);
        self
    }

    pub fn atom(mut self, position: f64, weight: f64) -> Self {
        self.atoms.push(Atom { position, weight });
        self
    }

    pub fn singular(mut self, s: SelfSimilarMeasure) -> Self {
        self.singular.push(s);
        self
    }

    pub fn quad_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    /// Validates atoms and checks `0 < m([a, b]) < ∞` on a grid of cells
    /// covering the interior.
    pub fn build(mut self) -> Result<SpeedMeasure> {
        ensure_arg!(self.quad_tol > 0.0, "quadrature tolerance must be positive");
        for at in &self.atoms {
            if !self.space.in_interior(at.position) {
                return Err(Error::Domain(format!("atom at {} is not in the interior", at.position)));
            }
            if !(at.weight > 0.0 && at.weight.is_finite()) {
                return Err(Error::Argument(format!("atom weight {} must be positive", at.weight)));
            }
        }
        self.atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        if self.atoms.windows(2).any(|w| w[0].position == w[1].position) {
            return Err(Error::Argument("atom positions must be distinct".into()));
        }
        let mut kinks: Vec<f64> = self.atoms.iter().map(|a| a.position).collect();
        if let Some(d) = &self.density {
            kinks.extend_from_slice(d.breakpoints());
        }
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        let m = SpeedMeasure {
            space: self.space,
            density: self.density,
            atoms: self.atoms,
            singular: self.singular,
            quad_tol: self.quad_tol,
            kinks,
        };
        m.validate()?;
        Ok(m)
    }
}

impl SpeedMeasure {
    fn validate(&self) -> Result<()> {
        // Moderate range: far-tail cells of fast-decaying densities underflow to 0.
        let grid = condition::spaced_grid(&self.space, 65, -3.0, 1.0);
        if let Some(d) = &self.density {
            for &x in &grid {
                let v = d.eval(x);
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Configuration(format!("density is {v} at x = {x}")));
                }
            }
        }
        for w in grid.windows(2) {
            let mass = self.mass_unchecked(w[0], w[1]);
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::Configuration(format!(
                    "m([{}, {}]) = {mass}; a speed measure charges every compact interval finitely",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}
