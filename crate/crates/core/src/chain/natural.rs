//! Transformation of an SDE `dX = μ(X)dt + σ(X)dW` to natural scale.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::quadrature::adaptive_simpson;
use crate::measure::Density;

type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const QUAD_TOL: f64 = 1e-12;

fn signed_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b >= a {
        adaptive_simpson(f, a, b, tol)
    } else {
        -adaptive_simpson(f, b, a, tol)
    }
}

/// Scale function `s` of an SDE and the speed density of `s(X)`.
#[derive(Clone)]
pub struct NaturalScale {
    drift: Coefficient,
    diffusion: Coefficient,
    anchor: f64,
}

/// `s'(x) = exp(−∫_anchor^x 2μ/σ²)` and `s(x) = ∫_anchor^x s'`.
pub fn sde_to_natural_scale<M, S>(drift: M, diffusion: S, anchor: f64) -> Result<NaturalScale>
where
    M: Fn(f64) -> f64 + Send + Sync + 'static,
    S: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if !anchor.is_finite() {
        return Err(Error::Argument(format!("anchor must be finite, got {anchor}")));
    }
    let out = NaturalScale { drift: Arc::new(drift), diffusion: Arc::new(diffusion), anchor };
    let sigma = (out.diffusion)(anchor);
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(Error::Domain(format!("diffusion coefficient is {sigma} at the anchor")));
    }
    Ok(out)
}

impl NaturalScale {
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    fn exponent(&self, x: f64) -> Result<f64> {
        let integrand = |u: f64| {
            let s = (self.diffusion)(u);
            2.0 * (self.drift)(u) / (s * s)
        };
        let v = signed_integral(&integrand, self.anchor, x, QUAD_TOL);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("diffusion coefficient vanishes between {} and {x}", self.anchor)))
        }
    }

    pub fn scale_derivative(&self, x: f64) -> Result<f64> {
        Ok((-self.exponent(x)?).exp())
    }

    pub fn scale(&self, x: f64) -> Result<f64> {
        let failed = std::cell::Cell::new(false);
        let ds = |u: f64| match self.scale_derivative(u) {
            Ok(v) => v,
            Err(_) => {
                failed.set(true);
                0.0
            }
        };
        let v = signed_integral(&ds, self.anchor, x, 1e-10);
        if failed.get() || !v.is_finite() {
            return Err(Error::Domain(format!("scale function undefined at {x}")));
        }
        Ok(v)
    }

    /// `s⁻¹(z)` by bracketing outward from the anchor and bisecting.
    pub fn inverse(&self, z: f64) -> Result<f64> {
        if z == 0.0 {
            return Ok(self.anchor);
        }
        let dir = z.signum();
        let mut near = self.anchor;
        let mut step = 1.0;
        let mut far = self.anchor + dir * step;
        while (self.scale(far)? - z) * dir < 0.0 {
            near = far;
            step *= 2.0;
            if step > 1e6 {
                return Err(Error::Domain(format!("{z} is outside the range of the scale function")));
            }
            far = self.anchor + dir * step;
        }
        let (mut lo, mut hi) = if dir > 0.0 { (near, far) } else { (far, near) };
        while hi - lo > 1e-13 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.scale(mid)? < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Speed density of `s(X)` at `z = s(x)`: `2 / (s'(x)² σ(x)²)`.
    pub fn density_at(&self, z: f64) -> Result<f64> {
        let x = self.inverse(z)?;
        let sigma = (self.diffusion)(x);
        if sigma == 0.0 {
            return Err(Error::Domain(format!("diffusion coefficient vanishes at {x}")));
        }
        let ds = self.scale_derivative(x)?;
        Ok(2.0 / (ds * ds * sigma * sigma))
    }

    /// The transformed density as a measure component; NaN where undefined.
    pub fn speed_density(&self) -> Density {
        let me = self.clone();
        Density::from_fn("natural_scale", move |z| me.density_at(z).unwrap_or(f64::NAN), Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn driftless_is_already_natural() {
        let ns = sde_to_natural_scale(|_| 0.0, |x: f64| 1.0 + 0.5 * x.sin(), 0.3).unwrap();
        assert!((ns.scale(1.3).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(ns.scale_derivative(2.0).unwrap(), 1.0);
        let z = 0.7;
        let sigma = 1.0 + 0.5 * (z + 0.3f64).sin();
        assert!((ns.density_at(z).unwrap() - 2.0 / (sigma * sigma)).abs() < 1e-9);
    }

    #[test]
    fn constant_drift() {
        let mu = 0.4;
        let ns = sde_to_natural_scale(move |_| mu, |_| 1.0, 0.5).unwrap();
        for x in [-1.0, 0.5, 2.0] {
            let exact = (-2.0 * mu * (x - 0.5f64)).exp();
            assert!((ns.scale_derivative(x).unwrap() - exact).abs() < 1e-10);
        }
        let exact_s = (1.0 - (-2.0 * mu * 1.5f64).exp()) / (2.0 * mu);
        assert!((ns.scale(2.0).unwrap() - exact_s).abs() < 1e-9);
        let z = ns.scale(1.2).unwrap();
        assert!((ns.inverse(z).unwrap() - 1.2).abs() < 1e-9);
    }

    #[test]
    fn mean_reverting_drift() {
        let ns = sde_to_natural_scale(|x: f64| -x, |_| 1.0, 0.0).unwrap();
        let exact = 1f64.exp();
        assert!((ns.scale_derivative(1.0).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn vanishing_diffusion() {
        assert!(matches!(sde_to_natural_scale(|_| 1.0, |_| 0.0, 0.0), Err(Error::Domain(_))));
        let ns = sde_to_natural_scale(|_| 1.0, |x: f64| if x > 1.0 { 0.0 } else { 1.0 }, 0.0).unwrap();
        assert!(ns.scale_derivative(2.0).is_err());
    }
}
