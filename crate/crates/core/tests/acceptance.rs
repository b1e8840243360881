//! Acceptance suite. Runs every criterion in order, prints one line per
//! criterion and exits nonzero if any of them fails or overruns its budget.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use gendiff::analysis::{
    empirical_wasserstein_p, fit_rate, marginal_rate_study, ChainReference, FixedSample, GaussianReference, RateRow,
    RateStudy, RateTable,
};
use gendiff::chain::{simulate_terminal_batch, Evaluation};
use gendiff::embedding::{simulate_embedding_times, temporal_error_stats, ExitTimeSampler};
use gendiff::measure::{Density, SelfSimilarMeasure, SpeedMeasure, StateSpace};
use gendiff::models::ModelSpec;
use gendiff::scale::{boundary_threshold_left, emcel_scale_factor, verify_condition_a, ScaleFactorScheme};
use gendiff::stats::mean_and_std_error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: gendiff::Error) -> String {
    e.to_string()
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn model(src: &str) -> ModelSpec {
    ModelSpec::from_table(&src.parse::<toml::Table>().expect("valid toml")).expect("valid model")
}

fn rate_table(rows: Vec<(f64, f64, f64, usize)>) -> Result<RateTable, String> {
    RateTable::new(rows.into_iter().map(|(h, estimate, std_error, n)| RateRow { h, estimate, std_error, n }).collect())
        .map_err(err)
}

fn emcel_brownian() -> Outcome {
    let m = SpeedMeasure::lebesgue(2.0).map_err(err)?;
    let generic = SpeedMeasure::builder(StateSpace::real_line())
        .density(Density::from_fn("two", |_| 2.0, vec![]))
        .build()
        .map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let h = 10f64.powi(-k);
        for _ in 0..50 {
            let y = rng.gen_range(-10.0..10.0);
            let a = emcel_scale_factor(&m, h, y, gendiff::scale::default_tolerance(h)).map_err(err)?;
            let g = emcel_scale_factor(&generic, h, y, 1e-15).map_err(err)?;
            worst = worst.max((a - h.sqrt()).abs()).max((g - h.sqrt()).abs());
        }
    }
    check(worst <= 1e-10, || format!("max |a − √h| = {worst:e}"))?;
    Ok(format!("max |a − √h| = {worst:.1e}"))
}

fn sticky_closed_form() -> Outcome {
    let sticky = model("id = \"sticky_brownian\"\nrho = 2.0\nsite = 0.0").build().map_err(err)?;
    let generic = SpeedMeasure::builder(StateSpace::real_line())
        .density(Density::from_fn("two", |_| 2.0, vec![]))
        .atom(0.0, 2.0)
        .build()
        .map_err(err)?;
    let mut worst: f64 = 0.0;
    for h in log_space(1e-6, 0.5, 20) {
        let exact = 2.0 * h / (1.0 + (1.0 + 4.0 * h).sqrt());
        let a = emcel_scale_factor(&sticky, h, 0.0, 1e-14).map_err(err)?;
        let g = emcel_scale_factor(&generic, h, 0.0, 1e-15).map_err(err)?;
        worst = worst.max((a - exact).abs()).max((g - exact).abs());
    }
    check(worst <= 1e-10, || format!("max deviation from (−1 + √(1 + 4h))/2 = {worst:e}"))?;
    Ok(format!("max deviation = {worst:.1e}"))
}

fn triangle_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let d = test_density(case, rng.gen());
        let y = rng.gen_range(-3.0..3.0);
        let a = rng.gen_range(0.05..2.0);
        let atoms: Vec<(f64, f64)> =
            (0..rng.gen_range(0..=3)).map(|_| (y + rng.gen_range(-a..a), rng.gen_range(0.01..3.0))).collect();
        let expected = oracle_triangle(&d, &atoms, y, a);
        let got = measure_with(&d, &atoms).triangle_integral(y, a).map_err(err)?;
        worst = worst.max((got - expected).abs() / expected);
        if case % 5 == 0 {
            let c = (d.f)(0.0);
            let mut b = SpeedMeasure::builder(StateSpace::real_line()).density(Density::constant(c));
            for &(x, w) in &atoms {
                b = b.atom(x, w);
            }
            let got = b.build().map_err(err)?.triangle_integral(y, a).map_err(err)?;
            worst = worst.max((got - expected).abs() / expected);
        }
    }
    check(worst <= 1e-8, || format!("max relative error = {worst:e}"))?;
    Ok(format!("max relative error = {worst:.1e}"))
}

fn cantor_consistency() -> Outcome {
    let c = SelfSimilarMeasure::cantor(1.0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let tol = [1e-4, 1e-6, 1e-8][i % 3];
        let y = rng.gen_range(-0.5..1.5);
        let a = rng.gen_range(0.0..1.5);
        let coarse = c.tent_integral(y, a, tol).map_err(err)?;
        let fine = c.tent_integral(y, a, tol / 10.0).map_err(err)?;
        check((coarse - fine).abs() <= tol, || format!("(y, a, tol) = ({y}, {a}, {tol}): {coarse} vs {fine}"))?;
    }
    let brute = cantor_tent_brute_force(0.5, 1.0, 20);
    check((brute - CANTOR_TENT_HALF_ONE).abs() <= 1e-9, || format!("brute force gave {brute}"))?;
    let v = c.tent_integral(0.5, 1.0, 1e-9).map_err(err)?;
    check((v - brute).abs() <= 1e-6, || format!("value at (0.5, 1) = {v}, oracle {brute}"))?;
    Ok(format!("value at (0.5, 1) = {v:.12}, oracle {brute:.12}"))
}

fn halfline_thresholds() -> Outcome {
    let m = model("id = \"absorbing_halfline\"").build().map_err(err)?;
    let mut worst: f64 = 0.0;
    for h in log_space(1e-6, 0.5, 20) {
        let l = boundary_threshold_left(&m, h).map_err(err)?;
        worst = worst.max((l - h.sqrt()).abs());
    }
    check(worst <= 1e-10, || format!("max |l_h − √h| = {worst:e}"))?;
    Ok(format!("max |l_h − √h| = {worst:.1e}"))
}

fn condition_a_ledger() -> Outcome {
    let h_list = geometric_h(4, 12);
    let line: Vec<f64> = (0..512).map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / 512.0).collect();
    let half: Vec<f64> = (0..512).map(|i| 3.0 * (i as f64 + 0.5) / 512.0).collect();
    let models = [
        ("brownian", "id = \"brownian\"", &line),
        ("sticky", "id = \"sticky_brownian\"", &line),
        ("cantor", "id = \"cantor_slowed\"", &line),
        ("rational", "id = \"custom\"\ndensity = \"rational_1px2\"\nk1 = 1.0\natoms = [[0.5, 0.3]]", &line),
        ("halfline", "id = \"absorbing_halfline\"", &half),
    ];
    let mut summary = Vec::new();
    for (name, src, grid) in models {
        let m = Arc::new(model(src).build().map_err(err)?);
        let scheme = ScaleFactorScheme::emcel(m, 0.5, |h| 0.1 * h.powf(1.5)).map_err(err)?;
        let rep = verify_condition_a(&scheme, 0.5, &h_list, grid).map_err(err)?;
        check(rep.k_hat <= 0.1 && rep.gamma_hat < 1.0, || {
            format!("{name}: K_hat = {:e}, γ_hat = {:e}", rep.k_hat, rep.gamma_hat)
        })?;
        summary.push(format!("{name} K_hat={:.1e}", rep.k_hat));
    }
    Ok(summary.join(", "))
}

fn variance_identity() -> Outcome {
    let (h, steps) = (0.01, 100);
    let run = simulate_embedding_times(h, steps, 100_000, 7).map_err(err)?;
    let s = temporal_error_stats(&run, 2.0).map_err(err)?;
    let target = h * h * steps as f64 * EXIT_VARIANCE;
    check((s.var_tau_n - target).abs() <= 4.0 * s.var_tau_n_se, || {
        format!("Var(τ_N) = {:e} ± {:e}, target {target:e}", s.var_tau_n, s.var_tau_n_se)
    })?;
    Ok(format!("Var(τ_N) = {:.4e} ± {:.1e}, target {target:.4e}", s.var_tau_n, s.var_tau_n_se))
}

fn temporal_exponent() -> Outcome {
    let mut rows = Vec::new();
    for (i, h) in geometric_h(4, 10).into_iter().enumerate() {
        let run = simulate_embedding_times(h, (1.0 / h).round() as usize, 10_000, 80 + i as u64).map_err(err)?;
        let s = temporal_error_stats(&run, 2.0).map_err(err)?;
        rows.push((h, s.sup_error_lp, s.sup_error_lp_se, s.paths));
    }
    let fit = fit_rate(&rate_table(rows)?).map_err(err)?;
    check((0.45..=0.60).contains(&fit.slope), || format!("slope = {}", fit.slope))?;
    Ok(format!("slope = {:.4}, r² = {:.4}", fit.slope, fit.r_squared))
}

fn brownian_wasserstein() -> Outcome {
    let scheme = model("id = \"brownian\"").scheme(0.5).map_err(err)?;
    let study = RateStudy { y0: 0.0, horizon: 1.0, h_list: geometric_h(4, 12), p: 2.0, n: 100_000, master_seed: 9 };
    let table = marginal_rate_study(&scheme, &study, &GaussianReference::for_lebesgue(2.0, 0.0, 1.0)).map_err(err)?;
    for r in &table.rows {
        check(r.estimate <= r.h.powf(0.25), || format!("h = {}: W_2 = {} > h^(1/4)", r.h, r.estimate))?;
    }
    let fit = fit_rate(&table).map_err(err)?;
    check(fit.slope >= 0.25, || format!("slope = {}", fit.slope))?;
    Ok(format!("slope = {:.4}, max W_2 = {:.4}", fit.slope, table.rows[0].estimate))
}

fn sticky_rate_study() -> Outcome {
    let scheme = Arc::new(model("id = \"sticky_brownian\"").scheme(0.5).map_err(err)?);
    let n = 100_000;
    let fine = ChainReference { scheme: scheme.clone(), h_ref: 2f64.powi(-16), y0: 0.0, horizon: 1.0 };
    let reference = FixedSample::freeze(&fine, n, 12345).map_err(err)?;
    let study = RateStudy { y0: 0.0, horizon: 1.0, h_list: geometric_h(4, 12), p: 2.0, n, master_seed: 10 };
    let table = marginal_rate_study(&scheme, &study, &reference).map_err(err)?;
    for w in table.rows.windows(2) {
        let slack = 2.0 * w[0].std_error.hypot(w[1].std_error);
        check(w[1].estimate <= w[0].estimate + slack, || {
            format!("W_2 increases from {} (h = {}) to {} (h = {})", w[0].estimate, w[0].h, w[1].estimate, w[1].h)
        })?;
    }
    let fit = fit_rate(&table).map_err(err)?;
    check(fit.slope >= 0.2, || format!("slope = {}", fit.slope))?;
    Ok(format!("slope = {:.4}, r² = {:.3}", fit.slope, fit.r_squared))
}

fn martingale_all_models() -> Outcome {
    let models = [
        "id = \"brownian\"",
        "id = \"scaled_brownian\"\nsigma = 0.5",
        "id = \"sticky_brownian\"",
        "id = \"cantor_slowed\"",
        "id = \"absorbing_halfline\"",
        "id = \"custom\"\ndensity = \"rational_1px2\"\nk1 = 1.0\natoms = [[0.5, 0.3]]",
        "id = \"custom\"\ndensity = \"sde_eta\"\neta_left = 1.0\neta_right = 2.0\nswitch = 0.1",
    ];
    let (y0, h) = (0.25, 2f64.powi(-6));
    let mut worst: f64 = 0.0;
    for (i, src) in models.iter().enumerate() {
        let spec = model(src);
        let scheme = spec.scheme(0.5).map_err(err)?;
        let xs =
            simulate_terminal_batch(&scheme, h, y0, 1.0, 100_000, 11 + i as u64, &Evaluation::Terminal).map_err(err)?;
        let (mean, se) = mean_and_std_error(&xs);
        let z = (mean - y0) / se;
        check(z.abs() <= 4.0, || format!("{}: mean {mean} ± {se}", spec.id()))?;
        worst = worst.max(z.abs());
    }
    Ok(format!("{} models, max |z| = {worst:.2}", models.len()))
}

fn exit_time_sampler() -> Outcome {
    let sampler = ExitTimeSampler::default();
    let gap = (sampler.small_time_cdf(0.35) - sampler.large_time_cdf(0.35)).abs();
    check(gap <= 1e-10, || format!("series disagree by {gap:e} at the crossover"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 1_000_000;
    let mut t = Vec::with_capacity(n);
    for _ in 0..n {
        t.push(sampler.sample(gendiff::rng::open_uniform(&mut rng)).map_err(err)?);
    }
    let sq: Vec<f64> = t.iter().map(|x| x * x).collect();
    let (m1, se1) = mean_and_std_error(&t);
    let (m2, se2) = mean_and_std_error(&sq);
    check((m1 - EXIT_MEAN).abs() <= 4.0 * se1, || format!("mean {m1} ± {se1}"))?;
    check((m2 - EXIT_SECOND_MOMENT).abs() <= 4.0 * se2, || format!("second moment {m2} ± {se2}"))?;
    Ok(format!("mean {m1:.5} ± {se1:.1e}, E[H²] {m2:.5} ± {se2:.1e}, series gap {gap:.1e}"))
}

fn runner(seed: u8) -> TestRunner {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let mut key = [0u8; 32];
    key[0] = seed;
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &key))
}

/// A measure from the test family, with Condition (C) constants `(k1, k2)`.
fn family_measure(kind: usize, p: f64, atoms: &[(f64, f64)], cantor: bool) -> (SpeedMeasure, f64, f64) {
    let d = test_density(kind, p);
    let mut b = SpeedMeasure::builder(StateSpace::real_line()).density(d.density());
    for &(x, w) in atoms {
        b = b.atom(x, w);
    }
    if cantor {
        b = b.singular(SelfSimilarMeasure::cantor(1.0).expect("cantor"));
    }
    let (k1, k2) = match kind % 5 {
        0 => (2.0 / (0.5 + 3.0 * p), 0.0),
        1 => (1.0 / (0.5 + p), 1.0),
        2 | 4 => (2.0, 0.0),
        _ => (4.0, 0.0),
    };
    (b.build().expect("valid family measure"), k1, k2)
}

fn family() -> impl Strategy<Value = (usize, f64, Vec<(f64, f64)>, bool)> {
    (0..5usize, 0.0..1.0f64, prop::collection::vec((-2.0..2.0f64, 0.01..2.0f64), 0..=3), any::<bool>())
}

fn fail(e: gendiff::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn property_suites() -> Outcome {
    runner(1)
        .run(&(family(), -2.0..2.0f64, 0.0..3.0f64, 0.0..3.0f64), |((kind, p, atoms, cantor), y, a1, a2)| {
            let (m, _, _) = family_measure(kind, p, &atoms, cantor);
            let (lo, hi) = (a1.min(a2), a1.max(a2));
            let g = |a: f64| m.triangle_integral(y, a).map_err(fail);
            let (g_lo, g_hi, g_mid) = (g(lo)?, g(hi)?, g(0.5 * (lo + hi))?);
            prop_assert!(g_lo <= g_hi + 1e-11, "not monotone: G({lo}) = {g_lo} > G({hi}) = {g_hi}");
            prop_assert!(g_mid <= 0.5 * (g_lo + g_hi) + 1e-10, "not convex at y = {y}: {g_mid} vs {g_lo}, {g_hi}");
            Ok(())
        })
        .map_err(|e| format!("G monotone/convex: {e}"))?;

    runner(2)
        .run(&(family(), -2.0..2.0f64, 0.0..0.5f64, -12.0..-1.5f64), |((kind, p, atoms, cantor), y1, dy, log2h)| {
            let (m, _, _) = family_measure(kind, p, &atoms, cantor);
            let h = log2h.exp2();
            let y2 = y1 + dy;
            let a1 = emcel_scale_factor(&m, h, y1, 1e-13).map_err(fail)?;
            let a2 = emcel_scale_factor(&m, h, y2, 1e-13).map_err(fail)?;
            prop_assert!((a2 - a1).abs() <= dy + 1e-8, "|a({y2}) − a({y1})| = {} > {dy}", (a2 - a1).abs());
            Ok(())
        })
        .map_err(|e| format!("1-Lipschitz EMCEL: {e}"))?;

    runner(3)
        .run(&(family(), -5.0..5.0f64, -14.0..-1.5f64), |((kind, p, atoms, cantor), y, log2h)| {
            let (m, k1, k2) = family_measure(kind, p, &atoms, cantor);
            let h = log2h.exp2();
            let tol = gendiff::scale::default_tolerance(h);
            let a = emcel_scale_factor(&m, h, y, tol).map_err(fail)?;
            let gamma = tol / h;
            let bound = (1.0 + gamma) * k1 * (1.0 + k2 * (y.abs() + a).powi(2)) * h;
            prop_assert!(a * a <= bound * (1.0 + 1e-12), "â² = {} > {bound} at y = {y}, h = {h}", a * a);
            Ok(())
        })
        .map_err(|e| format!("growth inequality: {e}"))?;

    let sample = |n: usize| prop::collection::vec(-5.0..5.0f64, n);
    runner(4)
        .run(&(1usize..40).prop_flat_map(move |n| (sample(n), sample(n), sample(n), 1.0..4.0f64)), |(x, y, z, p)| {
            let w = |a: &[f64], b: &[f64]| empirical_wasserstein_p(a, b, p).map_err(fail);
            prop_assert_eq!(w(&x, &x)?, 0.0);
            prop_assert_eq!(w(&x, &y)?, w(&y, &x)?);
            let (xy, yz, xz) = (w(&x, &y)?, w(&y, &z)?, w(&x, &z)?);
            prop_assert!(xz <= xy + yz + 1e-12, "triangle: {xz} > {xy} + {yz}");
            prop_assert!(xy >= 0.0);
            Ok(())
        })
        .map_err(|e| format!("W_p pseudometric: {e}"))?;

    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(3).build().map_err(|e| e.to_string())?;
    let models: Vec<ScaleFactorScheme> = [
        "id = \"brownian\"",
        "id = \"sticky_brownian\"",
        "id = \"absorbing_halfline\"",
        "id = \"custom\"\ndensity = \"rational_1px2\"\nk1 = 1.0\natoms = [[0.5, 0.3]]",
    ]
    .iter()
    .map(|s| model(s).scheme(0.5).expect("scheme"))
    .collect();
    runner(5)
        .run(&(0..models.len(), any::<u64>(), 2..7i32, 1usize..1500), |(i, seed, k, n)| {
            let h = 2f64.powi(-k);
            let go = || simulate_terminal_batch(&models[i], h, 0.25, 1.0, n, seed, &Evaluation::Terminal);
            let a = serial.install(go).map_err(fail)?;
            let b = parallel.install(go).map_err(fail)?;
            prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()), "results depend on thread count");
            Ok(())
        })
        .map_err(|e| format!("determinism under parallelism: {e}"))?;

    Ok("5 suites × 1000 cases".to_string())
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("EMCEL exactness for Brownian motion", 1, emcel_brownian),
        ("sticky closed form", 1, sticky_closed_form),
        ("triangle integral vs quadrature oracle", 10, triangle_oracle),
        ("Cantor integral consistency", 10, cantor_consistency),
        ("half-line boundary thresholds", 1, halfline_thresholds),
        ("Condition (A) ledger", 30, condition_a_ledger),
        ("variance identity for τ_N", 60, variance_identity),
        ("global temporal error exponent", 120, temporal_exponent),
        ("Brownian marginal Wasserstein bound", 120, brownian_wasserstein),
        ("sticky rate study", 300, sticky_rate_study),
        ("martingale property", 60, martingale_all_models),
        ("exit-time sampler", 60, exit_time_sampler),
        ("property suites", 60, property_suites),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let overrun = elapsed > Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, overrun) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {:>2} {status} [{:>6.2}s / {limit}s] {name}: {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
