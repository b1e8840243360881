use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::reference::ReferenceSampler;
use super::wasserstein::wasserstein_with_std_error;
use crate::chain::{simulate_terminal_batch, Evaluation};
use crate::error::{ensure_arg, Error, Result};
use crate::rng::derive_seed;
use crate::scale::ScaleFactorScheme;
use crate::stats::BOOTSTRAP_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub h: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Distance estimates for a strictly decreasing sequence of step sizes.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn new(rows: Vec<RateRow>) -> Result<Self> {
        ensure_arg!(rows.windows(2).all(|w| w[1].h < w[0].h), "h must be strictly decreasing across rows");
        ensure_arg!(rows.iter().all(|r| r.estimate >= 0.0), "estimates must be nonnegative");
        Ok(Self { rows })
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "h,estimate,std_error,n")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.h, r.estimate, r.std_error, r.n)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Least-squares line `log estimate = intercept + slope·log h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl RateFit {
    pub fn report(&self) -> String {
        let mut s = String::new();
        writeln!(s, "slope = {}", self.slope).unwrap();
        writeln!(s, "intercept = {}", self.intercept).unwrap();
        writeln!(s, "r_squared = {}", self.r_squared).unwrap();
        s
    }
}

pub fn fit_rate(table: &RateTable) -> Result<RateFit> {
    ensure_arg!(table.rows.len() >= 3, "need at least 3 rows to fit a rate, got {}", table.rows.len());
    ensure_arg!(
        table.rows.iter().all(|r| r.estimate > 0.0 && r.h > 0.0),
        "all estimates and step sizes must be positive"
    );
    let xs: Vec<f64> = table.rows.iter().map(|r| r.h.ln()).collect();
    let ys: Vec<f64> = table.rows.iter().map(|r| r.estimate.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    ensure_arg!(sxx > 0.0, "step sizes must not all coincide");
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(RateFit { slope, intercept, r_squared })
}

/// Parameters of a marginal rate study.
#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub y0: f64,
    pub horizon: f64,
    pub h_list: Vec<f64>,
    pub p: f64,
    pub n: usize,
    pub master_seed: u64,
}

/// Empirical `W_p(law(X^h_T), law(Y_T))` for each `h`. Row `i` uses chain
/// seed `derive_seed(seed, 2i)` and reference seed `derive_seed(seed, 2i+1)`.
pub fn marginal_rate_study(
    scheme: &ScaleFactorScheme,
    study: &RateStudy,
    reference: &dyn ReferenceSampler,
) -> Result<RateTable> {
    ensure_arg!(!study.h_list.is_empty(), "h_list is empty");
    ensure_arg!(study.n >= 1, "n must be at least 1");
    let mut rows = Vec::with_capacity(study.h_list.len());
    for (i, &h) in study.h_list.iter().enumerate() {
        let i = i as u64;
        let chain = simulate_terminal_batch(
            scheme,
            h,
            study.y0,
            study.horizon,
            study.n,
            derive_seed(study.master_seed, 2 * i),
            &Evaluation::Terminal,
        )?;
        let reference = reference.sample(study.n, derive_seed(study.master_seed, 2 * i + 1))?;
        let (estimate, std_error) = wasserstein_with_std_error(&chain, &reference, study.p, BOOTSTRAP_SEED ^ i)?;
        if !estimate.is_finite() {
            return Err(Error::Consistency(format!("non-finite distance estimate at h = {h}")));
        }
        rows.push(RateRow { h, estimate, std_error, n: study.n });
    }
    RateTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(h: f64, e: f64) -> RateRow {
        RateRow { h, estimate: e, std_error: 0.0, n: 1 }
    }

    #[test]
    fn exact_power_law() {
        let t = RateTable::new(vec![row(1.0, 1.0), row(0.25, 0.5), row(0.0625, 0.25)]).unwrap();
        let f = fit_rate(&t).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let t = RateTable::new((0..5).map(|k| 0.5f64.powi(k)).map(|h| row(h, 3.0 * h.sqrt())).collect()).unwrap();
        let f = fit_rate(&t).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let t = RateTable::new(vec![row(1.0, 1.0), row(0.5, 0.7)]).unwrap();
        assert!(fit_rate(&t).is_err());
        let t = RateTable::new(vec![row(1.0, 1.0), row(0.5, 0.0), row(0.25, 0.3)]).unwrap();
        assert!(fit_rate(&t).is_err());
        assert!(RateTable::new(vec![row(0.5, 1.0), row(1.0, 1.0)]).is_err());
    }

    #[test]
    fn csv_and_report() {
        let t = RateTable::new(vec![row(0.5, 0.25)]).unwrap();
        assert_eq!(t.to_csv(), "h,estimate,std_error,n\n0.5,0.25,0,1\n");
        let f = RateFit { slope: 0.5, intercept: 0.0, r_squared: 1.0 };
        assert_eq!(f.report(), "slope = 0.5\nintercept = 0\nr_squared = 1\n");
    }
}
