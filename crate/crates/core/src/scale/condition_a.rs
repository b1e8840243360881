use super::ScaleFactorScheme;
use crate::error::{ensure_arg, Error, Result};

/// One row of the one-step temporal error ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionARow {
    pub h: f64,
    /// `R(h) = max |G(y, a_h(y)) − h|` over surviving grid points.
    pub residual: f64,
    pub points: usize,
}

/// Grid estimate of the constants in `R(h) ≤ K h^{1+λ}` and `R(h) ≤ γ h`.
///
/// The supremum over `I_h` is replaced by a maximum over grid points, so
/// `k_hat` and `gamma_hat` are lower estimates of the true constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionAReport {
    pub lambda: f64,
    pub k_hat: f64,
    pub gamma_hat: f64,
    pub rows: Vec<ConditionARow>,
    /// `gamma_hat < 1`.
    pub gamma_ok: bool,
}

pub fn verify_condition_a(
    scheme: &ScaleFactorScheme,
    lambda: f64,
    h_list: &[f64],
    grid: &[f64],
) -> Result<ConditionAReport> {
    ensure_arg!(lambda > 0.0, "λ must be positive, got {lambda}");
    ensure_arg!(!h_list.is_empty(), "h list is empty");
    let m = scheme.measure();
    let space = m.space();
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let rule = scheme.at(h)?;
        let t = rule.thresholds();
        let qtol = m.quad_tol().min(1e-4 * h.powf(1.5));
        let mut residual: f64 = 0.0;
        let mut points = 0;
        for &y in grid.iter().filter(|&&y| space.in_interior(y)) {
            let a = rule.scale_factor(y)?;
            let in_ih = t.is_solved_zone(y) || (space.in_interior(y - a) && space.in_interior(y + a));
            if !in_ih {
                continue;
            }
            let g = m.triangle_unchecked(y, a, qtol);
            residual = residual.max((g - h).abs());
            points += 1;
        }
        if points == 0 {
            return Err(Error::Argument(format!("no grid point lies in I_h for h = {h}")));
        }
        rows.push(ConditionARow { h, residual, points });
    }
    let k_hat = rows.iter().map(|r| r.residual / r.h.powf(1.0 + lambda)).fold(0.0, f64::max);
    let gamma_hat = rows.iter().map(|r| r.residual / r.h).fold(0.0, f64::max);
    Ok(ConditionAReport { lambda, k_hat, gamma_hat, rows, gamma_ok: gamma_hat < 1.0 })
}
