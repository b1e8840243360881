//! Self-similar singular measures given by an iterated function system of
//! orientation-preserving affine contractions.

use crate::error::{Error, Result};

/// One branch `x ↦ scale·x + offset` of the function system, chosen with
/// probability `weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBranch {
    pub scale: f64,
    pub offset: f64,
    pub weight: f64,
}

/// A finite self-similar measure on `[u, v]` with total mass `total_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarMeasure {
    support: (f64, f64),
    branches: Vec<AffineBranch>,
    total_mass: f64,
    /// Barycentre of the normalised measure.
    mean: f64,
}

/// A cylinder set `φ([u, v])` with `φ(x) = slope·x + shift`.
#[derive(Clone, Copy)]
struct Piece {
    slope: f64,
    shift: f64,
    mass: f64,
}

impl SelfSimilarMeasure {
    pub fn new(support: (f64, f64), branches: Vec<AffineBranch>, total_mass: f64) -> Result<Self> {
        let (u, v) = support;
        if !(u.is_finite() && v.is_finite() && u < v) {
            return Err(Error::Configuration(format!("bad support interval [{u}, {v}]")));
        }
        if !(total_mass > 0.0 && total_mass.is_finite()) {
            return Err(Error::Configuration(format!("total mass must be positive, got {total_mass}")));
        }
        if branches.is_empty() {
            return Err(Error::Configuration("no branches".into()));
        }
        let slack = 1e-12 * (v - u).max(1.0);
        let mut images = Vec::with_capacity(branches.len());
        let mut weight_sum = 0.0;
        for b in &branches {
            if !(b.scale > 0.0 && b.scale < 1.0) {
                return Err(Error::Configuration(format!("branch scale {} is not a contraction in (0, 1)", b.scale)));
            }
            if !(b.weight > 0.0) {
                return Err(Error::Configuration(format!("branch weight {} must be positive", b.weight)));
            }
            let lo = b.scale * u + b.offset;
            let hi = b.scale * v + b.offset;
            if lo < u - slack || hi > v + slack {
                return Err(Error::Configuration(format!(
                    "branch maps [{u}, {v}] to [{lo}, {hi}], outside the support"
                )));
            }
            images.push((lo, hi));
            weight_sum += b.weight;
        }
        if (weight_sum - 1.0).abs() > 1e-12 {
            return Err(Error::Configuration(format!("branch weights sum to {weight_sum}, not 1")));
        }
        images.sort_by(|a, b| a.0.total_cmp(&b.0));
        if images.windows(2).any(|w| w[1].0 < w[0].1 - slack) {
            return Err(Error::Configuration("branch images overlap".into()));
        }
        let contraction: f64 = branches.iter().map(|b| b.weight * b.scale).sum();
        let drift: f64 = branches.iter().map(|b| b.weight * b.offset).sum();
        let mean = drift / (1.0 - contraction);
        Ok(Self { support, branches, total_mass, mean })
    }

    /// The middle-thirds Cantor measure on `[0, 1]` scaled to `total_mass`.
    pub fn cantor(total_mass: f64) -> Result<Self> {
        Self::new(
            (0.0, 1.0),
            vec![
                AffineBranch { scale: 1.0 / 3.0, offset: 0.0, weight: 0.5 },
                AffineBranch { scale: 1.0 / 3.0, offset: 2.0 / 3.0, weight: 0.5 },
            ],
            total_mass,
        )
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn branches(&self) -> &[AffineBranch] {
        &self.branches
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn root(&self) -> Piece {
        Piece { slope: 1.0, shift: 0.0, mass: self.total_mass }
    }

    fn bounds(&self, p: &Piece) -> (f64, f64) {
        (p.slope * self.support.0 + p.shift, p.slope * self.support.1 + p.shift)
    }

    fn children<'a>(&'a self, p: Piece) -> impl Iterator<Item = Piece> + 'a {
        self.branches.iter().map(move |b| Piece {
            slope: p.slope * b.scale,
            shift: p.slope * b.offset + p.shift,
            mass: p.mass * b.weight,
        })
    }

    /// `∫ (a − |u − y|)⁺ c(du)` to absolute accuracy `tol`.
    ///
    /// Pieces that miss `(y − a, y + a)` contribute nothing; pieces lying
    /// on one side of `y` inside the window see a linear integrand and are
    /// integrated exactly through their barycentre; only pieces straddling
    /// one of the three kinks are subdivided, and those whose
    /// `mass × length` falls below the leaf threshold use the midpoint.
    pub fn tent_integral(&self, y: f64, a: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
        }
        if !(a > 0.0) {
            return Ok(0.0);
        }
        // At most six straddling leaves (two per kink), each off by ≤ mass·len/2.
        let leaf = tol / 4.0;
        let mut total = 0.0;
        let mut stack = vec![self.root()];
        while let Some(p) = stack.pop() {
            let (lo, hi) = self.bounds(&p);
            if hi <= y - a || lo >= y + a {
                continue;
            }
            let inside = lo >= y - a && hi <= y + a;
            if inside && (hi <= y || lo >= y) {
                let centre = p.slope * self.mean + p.shift;
                total += p.mass * (a - (centre - y).abs());
                continue;
            }
            if p.mass * (hi - lo) < leaf {
                let mid = 0.5 * (lo + hi);
                total += p.mass * (a - (mid - y).abs()).max(0.0);
                continue;
            }
            stack.extend(self.children(p));
        }
        Ok(total)
    }

    /// Mass of the closed interval `[a, b]` to absolute accuracy `tol`.
    pub fn interval_mass(&self, a: f64, b: f64, tol: f64) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![self.root()];
        while let Some(p) = stack.pop() {
            let (lo, hi) = self.bounds(&p);
            if hi < a || lo > b {
                continue;
            }
            if lo >= a && hi <= b {
                total += p.mass;
                continue;
            }
            if p.mass < tol {
                let mid = 0.5 * (lo + hi);
                if mid >= a && mid <= b {
                    total += p.mass;
                }
                continue;
            }
            stack.extend(self.children(p));
        }
        total
    }
}
