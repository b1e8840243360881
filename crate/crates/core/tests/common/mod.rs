#![allow(dead_code)]

use std::sync::Arc;

use gendiff::measure::{Density, SpeedMeasure, StateSpace};

/// `P(H ≤ 1)` for the exit time of Brownian motion from (−1, 1), from two
/// series evaluated in 40-digit arithmetic and a Crank–Nicolson heat solve.
pub const EXIT_CDF_AT_ONE: f64 = 0.629_222_570_200_476_1;
pub const EXIT_MEAN: f64 = 1.0;
/// `E[H²]`, from `½u'' = −2(1 − x²)`, `u(±1) = 0`.
pub const EXIT_SECOND_MOMENT: f64 = 5.0 / 3.0;
pub const EXIT_VARIANCE: f64 = 2.0 / 3.0;
/// `((T − h)·Var(H)/4)^{1/4} h^{1/4}` at `T = 1`, `h = 0.01`.
pub const LOWER_BOUND_T1_H001: f64 = 0.201_544_516_231_972_45;
/// `E sup_{[0,1]} W = √(2/π)`.
pub const MEAN_SUP_BM_UNIT: f64 = 0.797_884_560_802_865_4;
/// `1 − E|U − ½|` for `U` Cantor distributed.
pub const CANTOR_TENT_HALF_ONE: f64 = 2.0 / 3.0;

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Plain recursive adaptive Simpson on `[a, b]`.
pub fn oracle_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// A density with known kinks, usable both by the crate and by the oracle.
#[derive(Clone)]
pub struct TestDensity {
    pub label: &'static str,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub kinks: Vec<f64>,
}

impl TestDensity {
    pub fn density(&self) -> Density {
        let f = self.f.clone();
        Density::from_fn(self.label, move |x| f(x), self.kinks.clone())
    }
}

/// The density family used by the randomized checks, indexed by `kind % 5`.
pub fn test_density(kind: usize, p: f64) -> TestDensity {
    match kind % 5 {
        0 => TestDensity { label: "constant", f: Arc::new(move |_| 0.5 + 3.0 * p), kinks: vec![] },
        1 => TestDensity { label: "rational", f: Arc::new(move |x| 2.0 * (0.5 + p) / (1.0 + x * x)), kinks: vec![] },
        2 => TestDensity { label: "gauss-bump", f: Arc::new(move |x| 1.0 + 4.0 * p * (-x * x).exp()), kinks: vec![] },
        3 => {
            let s = 2.0 * p - 1.0;
            TestDensity { label: "step", f: Arc::new(move |x| if x < s { 2.0 } else { 0.5 }), kinks: vec![s] }
        }
        _ => TestDensity { label: "wave", f: Arc::new(move |x| 2.0 + (3.0 * x + 10.0 * p).sin()), kinks: vec![] },
    }
}

/// `½∫(a − |u − y|)⁺ (density + atoms)(du)` by the oracle, splitting at `y`
/// and at every density kink.
pub fn oracle_triangle(d: &TestDensity, atoms: &[(f64, f64)], y: f64, a: f64) -> f64 {
    let (lo, hi) = (y - a, y + a);
    let mut cuts = vec![lo, y, hi];
    cuts.extend(d.kinks.iter().copied().filter(|&k| k > lo && k < hi));
    cuts.sort_by(f64::total_cmp);
    let f = d.f.clone();
    let w = move |u: f64| (a - (u - y).abs()).max(0.0) * f(u);
    let mut twice: f64 = cuts.windows(2).map(|c| oracle_integrate(&w, c[0], c[1], 1e-15)).sum();
    for &(x, wt) in atoms {
        twice += wt * (a - (x - y).abs()).max(0.0);
    }
    0.5 * twice
}

pub fn measure_with(d: &TestDensity, atoms: &[(f64, f64)]) -> SpeedMeasure {
    let mut b = SpeedMeasure::builder(StateSpace::real_line()).density(d.density());
    for &(x, w) in atoms {
        b = b.atom(x, w);
    }
    b.build().expect("valid test measure")
}

/// `∫(a − |u − y|)⁺ c(du)` for the unit Cantor measure, by splitting into the
/// `2^depth` level-`depth` intervals and putting each one's mass at its midpoint.
pub fn cantor_tent_brute_force(y: f64, a: f64, depth: u32) -> f64 {
    fn walk(lo: f64, len: f64, mass: f64, depth: u32, y: f64, a: f64) -> f64 {
        if depth == 0 {
            let mid = lo + 0.5 * len;
            return mass * (a - (mid - y).abs()).max(0.0);
        }
        let third = len / 3.0;
        walk(lo, third, 0.5 * mass, depth - 1, y, a) + walk(lo + 2.0 * third, third, 0.5 * mass, depth - 1, y, a)
    }
    walk(0.0, 1.0, 1.0, depth, y, a)
}

pub fn geometric_h(from_exp: i32, to_exp: i32) -> Vec<f64> {
    (from_exp..=to_exp).map(|k| 2f64.powi(-k)).collect()
}
