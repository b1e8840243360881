use std::f64::consts::PI;

use libm::erfc;

use crate::error::{ensure_arg, Result};

pub const DEFAULT_CROSSOVER: f64 = 0.35;
pub const DEFAULT_TERM_TOL: f64 = 1e-14;

const MAX_TERMS: usize = 200;
/// Bracket for inversion: `F(0.005) < 1e-40` and `1 − F(40) < 1e-21`.
const T_MIN: f64 = 0.005;
const T_MAX: f64 = 40.0;
const T_TOL: f64 = 1e-10;

/// Distribution of the exit time `H` of a standard Brownian motion started
/// at 0 from `(−1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitTimeSampler {
    pub crossover: f64,
    pub term_tol: f64,
}

impl Default for ExitTimeSampler {
    fn default() -> Self {
        Self { crossover: DEFAULT_CROSSOVER, term_tol: DEFAULT_TERM_TOL }
    }
}

impl ExitTimeSampler {
    /// `P(H ≤ t) = 2 Σ_k (−1)^k erfc((2k+1)/√(2t))`.
    pub fn small_time_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let c = 1.0 / (2.0 * t).sqrt();
        let mut sum = 0.0;
        for k in 0..MAX_TERMS {
            let term = 2.0 * erfc((2 * k + 1) as f64 * c);
            sum += if k % 2 == 0 { term } else { -term };
            if term < self.term_tol {
                break;
            }
        }
        sum
    }

    /// `P(H > t) = (4/π) Σ_n (−1)^n/(2n+1) exp(−(2n+1)²π²t/8)`.
    pub fn large_time_survival(&self, t: f64) -> f64 {
        let mut sum = 0.0;
        for n in 0..MAX_TERMS {
            let j = (2 * n + 1) as f64;
            let term = 4.0 / (PI * j) * (-j * j * PI * PI * t / 8.0).exp();
            sum += if n % 2 == 0 { term } else { -term };
            if term < self.term_tol {
                break;
            }
        }
        sum
    }

    pub fn large_time_cdf(&self, t: f64) -> f64 {
        1.0 - self.large_time_survival(t)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t < self.crossover {
            self.small_time_cdf(t)
        } else {
            self.large_time_cdf(t)
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            1.0
        } else if t < self.crossover {
            1.0 - self.small_time_cdf(t)
        } else {
            self.large_time_survival(t)
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        if t < self.crossover {
            let pre = 2.0 / (2.0 * PI * t * t * t).sqrt();
            for k in 0..MAX_TERMS {
                let j = (2 * k + 1) as f64;
                let term = pre * j * (-j * j / (2.0 * t)).exp();
                sum += if k % 2 == 0 { term } else { -term };
                if term < self.term_tol {
                    break;
                }
            }
        } else {
            for n in 0..MAX_TERMS {
                let j = (2 * n + 1) as f64;
                let term = PI / 2.0 * j * (-j * j * PI * PI * t / 8.0).exp();
                sum += if n % 2 == 0 { term } else { -term };
                if term < self.term_tol {
                    break;
                }
            }
        }
        sum
    }

    /// `F⁻¹(u)` by Newton's method inside a shrinking bracket, falling back
    /// to bisection whenever a Newton step leaves the bracket.
    pub fn sample(&self, u: f64) -> Result<f64> {
        ensure_arg!(u > 0.0 && u < 1.0, "uniform variate must lie in (0, 1), got {u}");
        let upper = u > 0.5;
        let q = 1.0 - u;
        // F(t) − u, with the upper half written through the survival function.
        let residual = |t: f64| if upper { q - self.survival(t) } else { self.cdf(t) - u };
        let mut t = if upper {
            8.0 / (PI * PI) * (4.0 / (PI * q)).ln()
        } else {
            // 2·erfc(c) ≈ 2e^{−c²}/(c√π) with c = 1/√(2t), solved by fixed point.
            let mut c: f64 = 1.0;
            for _ in 0..4 {
                c = (2.0 / (u * c * PI.sqrt())).ln().max(0.25).sqrt();
            }
            0.5 / (c * c)
        };
        let (mut lo, mut hi) = (T_MIN, T_MAX);
        t = t.clamp(lo, hi);
        for _ in 0..100 {
            let r = residual(t);
            if r == 0.0 {
                return Ok(t);
            }
            if r < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let d = self.pdf(t);
            let newton = t - r / d;
            let next = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            let step = (next - t).abs();
            t = next;
            if step <= T_TOL * 1e-2 || hi - lo <= T_TOL {
                break;
            }
        }
        Ok(t)
    }
}

pub fn exit_time_cdf_unit(t: f64) -> f64 {
    ExitTimeSampler::default().cdf(t)
}

pub fn exit_time_survival_unit(t: f64) -> f64 {
    ExitTimeSampler::default().survival(t)
}

pub fn exit_time_pdf_unit(t: f64) -> f64 {
    ExitTimeSampler::default().pdf(t)
}

pub fn sample_exit_time_unit(u: f64) -> Result<f64> {
    ExitTimeSampler::default().sample(u)
}
