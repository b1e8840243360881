use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{emcel_with_thresholds, BoundaryThresholds};
use crate::error::{ensure_arg, Error, Result};
use crate::measure::SpeedMeasure;

type TolerancePolicy = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ScaleFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

const MEMO_LIMIT: usize = 1 << 20;

/// `h ↦ min(1e−10, 0.1·h^{3/2})`: Condition (Aλ) with `λ = ½`, `K ≤ 0.1`.
pub fn default_tolerance(h: f64) -> f64 {
    (0.1 * h.powf(1.5)).min(1e-10)
}

/// Declared rate parameters of a scheme: `|G(y, a_h(y)) − h| ≤ K h^{1+λ} ≤ γ h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeMetadata {
    pub lambda: f64,
    pub k: f64,
    pub gamma: f64,
}

#[derive(Clone)]
enum Rule {
    Emcel(TolerancePolicy),
    Custom(ScaleFn),
}

/// A family `h ↦ a_h(·)` of scale factors for one speed measure.
pub struct ScaleFactorScheme {
    measure: Arc<SpeedMeasure>,
    h_max: f64,
    rule: Rule,
    metadata: Option<SchemeMetadata>,
    thresholds: Mutex<HashMap<u64, BoundaryThresholds>>,
    memo: Mutex<HashMap<(u64, u64), f64>>,
}

impl fmt::Debug for ScaleFactorScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScaleFactorScheme")
            .field("h_max", &self.h_max)
            .field("emcel", &matches!(self.rule, Rule::Emcel(_)))
            .field("metadata", &self.metadata)
            .finish_non_exhaustive()
    }
}

impl ScaleFactorScheme {
    /// EMCEL scheme whose roots are solved to `tol_policy(h)`.
    pub fn emcel<T>(measure: Arc<SpeedMeasure>, h_max: f64, tol_policy: T) -> Result<Self>
    where
        T: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ensure_arg!(h_max > 0.0 && h_max < 1.0, "h_max must lie in (0, 1), got {h_max}");
        Ok(Self::with_rule(measure, h_max, Rule::Emcel(Arc::new(tol_policy))))
    }

    /// EMCEL scheme with [`default_tolerance`].
    pub fn emcel_default(measure: Arc<SpeedMeasure>, h_max: f64) -> Result<Self> {
        Self::emcel(measure, h_max, default_tolerance)
    }

    /// Arbitrary scale factors `(h, y) ↦ a_h(y)`, e.g. perturbed EMCEL.
    pub fn custom<F>(measure: Arc<SpeedMeasure>, h_max: f64, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        ensure_arg!(h_max > 0.0 && h_max < 1.0, "h_max must lie in (0, 1), got {h_max}");
        Ok(Self::with_rule(measure, h_max, Rule::Custom(Arc::new(f))))
    }

    fn with_rule(measure: Arc<SpeedMeasure>, h_max: f64, rule: Rule) -> Self {
        Self {
            measure,
            h_max,
            rule,
            metadata: None,
            thresholds: Mutex::new(HashMap::new()),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_metadata(mut self, metadata: SchemeMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn measure(&self) -> &SpeedMeasure {
        &self.measure
    }

    pub fn measure_arc(&self) -> Arc<SpeedMeasure> {
        Arc::clone(&self.measure)
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn metadata(&self) -> Option<SchemeMetadata> {
        self.metadata
    }

    pub fn is_emcel(&self) -> bool {
        matches!(self.rule, Rule::Emcel(_))
    }

    /// Root-solving tolerance at step `h` (0 for custom schemes).
    pub fn tolerance(&self, h: f64) -> f64 {
        match &self.rule {
            Rule::Emcel(tol) => tol(h),
            Rule::Custom(_) => 0.0,
        }
    }

    fn check_h(&self, h: f64) -> Result<()> {
        ensure_arg!(h > 0.0 && h < self.h_max, "time step {h} outside (0, h_max = {})", self.h_max);
        Ok(())
    }

    pub fn thresholds(&self, h: f64) -> Result<BoundaryThresholds> {
        self.check_h(h)?;
        let key = h.to_bits();
        if let Some(t) = self.thresholds.lock().unwrap().get(&key) {
            return Ok(*t);
        }
        let t = BoundaryThresholds::compute(&self.measure, h)?;
        self.thresholds.lock().unwrap().insert(key, t);
        Ok(t)
    }

    /// A handle evaluating `a_h(·)` for one fixed `h`.
    pub fn at(&self, h: f64) -> Result<StepRule<'_>> {
        let thresholds = self.thresholds(h)?;
        let tol = self.tolerance(h);
        if self.is_emcel() {
            ensure_arg!(tol > 0.0, "tolerance policy returned {tol} at h = {h}");
        }
        Ok(StepRule { scheme: self, h, thresholds, tol })
    }

    /// `a_h(y)`, memoised per `(h, y)`.
    pub fn evaluate(&self, h: f64, y: f64) -> Result<f64> {
        self.check_h(h)?;
        let key = (h.to_bits(), y.to_bits());
        if let Some(&a) = self.memo.lock().unwrap().get(&key) {
            return Ok(a);
        }
        let a = self.at(h)?.scale_factor(y)?;
        let mut memo = self.memo.lock().unwrap();
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(key, a);
        Ok(a)
    }
}

/// `a_h(·)` for one fixed `h`, with thresholds resolved once.
#[derive(Clone)]
pub struct StepRule<'a> {
    scheme: &'a ScaleFactorScheme,
    h: f64,
    thresholds: BoundaryThresholds,
    tol: f64,
}

impl StepRule<'_> {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn thresholds(&self) -> BoundaryThresholds {
        self.thresholds
    }

    pub fn measure(&self) -> &SpeedMeasure {
        &self.scheme.measure
    }

    /// `a_h(y)` for `y ∈ I`; zero at absorbing endpoints.
    pub fn scale_factor(&self, y: f64) -> Result<f64> {
        let m = &*self.scheme.measure;
        let space = m.space();
        if space.is_absorbing_point(y) {
            return Ok(0.0);
        }
        if !space.in_interior(y) {
            return Err(Error::Domain(format!("y = {y} is not in the state space")));
        }
        match &self.scheme.rule {
            Rule::Emcel(_) => emcel_with_thresholds(m, &self.thresholds, self.h, y, self.tol),
            Rule::Custom(f) => {
                let a = f(self.h, y);
                let slack = 1e-12 * y.abs().max(1.0);
                if !(a >= 0.0) || y - a < space.left() - slack || y + a > space.right() + slack {
                    return Err(Error::Configuration(format!(
                        "scale factor {a} at y = {y} leaves the closure of the state space"
                    )));
                }
                Ok(a)
            }
        }
    }
}
