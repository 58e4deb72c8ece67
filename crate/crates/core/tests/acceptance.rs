//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary so the PASS/FAIL lines reach the terminal. Pass
//! criterion numbers as arguments to run a subset, e.g.
//! `cargo test --release --test acceptance -- 1 2 9`.

use std::time::{Duration, Instant};

use adcv::arma::{self, ArmaModel};
use adcv::bootstrap::{
    gof_test, iid_curves, quantile_bands, residual_curves, BootstrapConfig, ModelSpec, StudyModel,
};
use adcv::dcov::{adcf, adcv, adcv_quadrature_oracle, WeightMeasure};
use adcv::garch::{self, GarchModel, Presample};
use adcv::numerics::{draw_normal, FitOptions, Innovations, RngSeed};
use adcv::Series;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn reference_arma() -> ArmaModel {
    ArmaModel::new(vec![1.2, -0.32], vec![-0.2, -0.48], 1.0).unwrap()
}

fn reference_garch() -> GarchModel {
    GarchModel::new(0.5, vec![0.1], vec![0.8])
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let m = WeightMeasure::default();
    let mut worst = 0.0f64;
    for rep in 0..20 {
        let x = draw_normal(30, &RngSeed::new(100 + rep));
        for h in 1..=3 {
            let direct = adcv(&x, h, &m).unwrap();
            let oracle = adcv_quadrature_oracle(&x, h, &m, 64).unwrap();
            worst = worst.max((direct - oracle).abs() / direct.max(1e-12));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-6 && elapsed < Duration::from_secs(10),
        format!("max relative error {worst:.2e} over 60 cases in {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = RngSeed::new(2).rng();
    let (mut loc, mut dual, mut lag0, mut constant) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for rep in 0..12 {
        let x = draw_normal(40, &RngSeed::new(200 + rep));
        let shift: f64 = rng.random_range(-50.0..50.0);
        let scale: f64 = rng.random_range(0.2..5.0);
        let sigma: f64 = rng.random_range(0.1..2.0);
        let shifted = Series::new(x.iter().map(|v| v + shift).collect()).unwrap();
        let scaled = Series::new(x.iter().map(|v| v * scale).collect()).unwrap();
        let m = WeightMeasure::isotropic(sigma).unwrap();
        let m_scaled = WeightMeasure::isotropic(sigma * scale).unwrap();
        for h in 1..=3 {
            loc = loc.max((adcv(&shifted, h, &m).unwrap() - adcv(&x, h, &m).unwrap()).abs());
            dual =
                dual.max((adcv(&scaled, h, &m).unwrap() - adcv(&x, h, &m_scaled).unwrap()).abs());
        }
        lag0 = lag0.max((adcf(&x, 0, &m).unwrap() - 1.0).abs());
        let c = Series::new(vec![shift; 25]).unwrap();
        constant = constant.max(adcv(&c, 1 + rep as usize % 3, &m).unwrap().abs());
    }
    outcome(
        loc < 1e-12 && dual < 1e-10 && lag0 < 1e-10 && constant == 0.0,
        format!(
            "location {loc:.1e}, scale/bandwidth {dual:.1e}, |adcf(0) - 1| {lag0:.1e}, constant {constant:.1e} over 12 instances"
        ),
    )
}

fn criterion_3() -> Outcome {
    let model = reference_arma();
    let pi = arma::pi_coeffs(&model, 50).unwrap();
    let theta_poly = [1.0, -0.2, -0.48];
    let phi_poly = [1.0, -1.2, 0.32];
    let mut conv_err = 0.0f64;
    for j in 0..=50 {
        let conv: f64 = (0..=j.min(2)).map(|k| theta_poly[k] * pi[j - k]).sum();
        let target = phi_poly.get(j).copied().unwrap_or(0.0);
        conv_err = conv_err.max((conv - target).abs());
    }

    let g = reference_garch();
    let x = garch::simulate(
        &g,
        1000,
        &Innovations::standard_normal(),
        500,
        &RngSeed::new(3),
    )
    .unwrap();
    let filtered = garch::sigma2_filter_with(&x, &g, Presample::Expansion).unwrap();
    let c = garch::c_coeffs(&g, 200).unwrap();
    let mut filt_err = 0.0f64;
    for t in 51..x.len() {
        let s: f64 = c[0]
            + (1..=t.min(200))
                .map(|i| c[i] * x[t - i] * x[t - i])
                .sum::<f64>();
        filt_err = filt_err.max((s - filtered[t]).abs());
    }
    outcome(
        conv_err < 1e-12 && filt_err < 1e-8,
        format!("theta*pi vs phi {conv_err:.1e}; c-expansion vs filter {filt_err:.1e} for t > 50"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (arma_m, garch_m) = (reference_arma(), reference_garch());
    let truth = [1.2, -0.32, -0.2, -0.48];
    let mut arma_err: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let (mut a_err, mut b_err) = (Vec::new(), Vec::new());
    for rep in 0..50 {
        let seed = RngSeed::new(4_000 + rep);
        let opts = FitOptions {
            seed: seed.derive(9),
            ..FitOptions::default()
        };
        let x = arma::simulate(&arma_m, 2000, &Innovations::standard_normal(), 500, &seed).unwrap();
        let f = arma::fit(&x, 2, 2, &opts).unwrap();
        let est = [
            f.model.phi[0],
            f.model.phi[1],
            f.model.theta[0],
            f.model.theta[1],
        ];
        for k in 0..4 {
            arma_err[k].push((est[k] - truth[k]).abs());
        }
        let y =
            garch::simulate(&garch_m, 2000, &Innovations::standard_normal(), 500, &seed).unwrap();
        let g = garch::fit(&y, 1, 1, &opts).unwrap();
        a_err.push((g.model.alpha[0] - 0.1).abs());
        b_err.push((g.model.beta[0] - 0.8).abs());
    }
    let arma_med: Vec<f64> = arma_err.into_iter().map(median).collect();
    let (a_med, b_med) = (median(a_err), median(b_err));
    let elapsed = start.elapsed();
    let arma_ok = arma_med.iter().all(|&e| e < 0.05);
    outcome(
        arma_ok && a_med < 0.03 && b_med < 0.06 && elapsed < Duration::from_secs(300),
        format!(
            "ARMA(2,2) median |error| phi1 {:.3} phi2 {:.3} theta1 {:.3} theta2 {:.3}; GARCH(1,1) alpha1 {a_med:.4} beta1 {b_med:.4}; {elapsed:.1?}",
            arma_med[0], arma_med[1], arma_med[2], arma_med[3]
        ),
    )
}

fn study_config(seed: u64, max_lag: usize) -> BootstrapConfig {
    BootstrapConfig {
        max_lag,
        seed: RngSeed::new(seed),
        ..BootstrapConfig::default()
    }
}

/// 95% quantiles per lag of iid-innovation and refitted-residual ADCF.
fn mc_quantiles(
    model: &StudyModel,
    n: usize,
    reps: usize,
    cfg: &BootstrapConfig,
) -> (Vec<f64>, Vec<f64>) {
    let iid = quantile_bands(&iid_curves(model, n, reps, cfg).unwrap(), 0.05, 0.95);
    let res = quantile_bands(&residual_curves(model, n, reps, cfg).unwrap(), 0.05, 0.95);
    (
        iid.iter().map(|b| b.hi).collect(),
        res.iter().map(|b| b.hi).collect(),
    )
}

fn criterion_5(residual_q95: &mut Vec<f64>) -> Outcome {
    let model = StudyModel::Arma(reference_arma(), Innovations::standard_normal());
    let (iid, res) = mc_quantiles(&model, 1000, 300, &study_config(5, 5));
    let ratio = res[0] / iid[0];
    *residual_q95 = res.clone();
    outcome(
        ratio < 0.9,
        format!(
            "lag-1 95% quantile residual {:.3e} vs iid {:.3e}, ratio {ratio:.3}",
            res[0], iid[0]
        ),
    )
}

fn criterion_6() -> Outcome {
    let model = StudyModel::Garch(reference_garch(), Innovations::standard_normal());
    let (iid, res) = mc_quantiles(&model, 1000, 300, &study_config(6, 1));
    let ratio = res[0] / iid[0];
    outcome(
        ratio > 1.1,
        format!(
            "lag-1 95% quantile residual {:.3e} vs iid {:.3e}, ratio {ratio:.3}",
            res[0], iid[0]
        ),
    )
}

/// The bootstrap runs at n = 2000 and the Monte Carlo reference at
/// n = 1000, so both are compared on the `n * R_h` scale.
fn criterion_7(residual_q95: &[f64]) -> Outcome {
    let x = arma::simulate(
        &reference_arma(),
        2000,
        &Innovations::standard_normal(),
        500,
        &RngSeed::new(77),
    )
    .unwrap();
    let cfg = BootstrapConfig {
        replicates: 300,
        ..study_config(7, 5)
    };
    let report = match gof_test(&x, ModelSpec::Arma { p: 2, q: 2 }, &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("bootstrap failed: {e}")),
    };
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (row, mc) in report.bands.rows.iter().zip(residual_q95) {
        let boot = 2000.0 * row.hi;
        let reference = 1000.0 * mc;
        let rel = (boot - reference).abs() / reference;
        worst = worst.max(rel);
        parts.push(format!("{rel:.2}"));
    }
    outcome(
        residual_q95.len() == 5 && worst < 0.3,
        format!(
            "relative distance of scaled 95% quantiles, lags 1-5: [{}]",
            parts.join(", ")
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let t25 = Innovations::StudentT {
        df: 2.5,
        scale: 1.0,
    };
    // causal AR(1) with the same second-order structure as the non-causal model
    let null = ArmaModel::new(vec![1.0 / 1.67], vec![], 1.0).unwrap();
    let ar1 = ModelSpec::Arma { p: 1, q: 0 };
    let base = BootstrapConfig {
        replicates: 200,
        ..study_config(0, 1)
    };
    let mut size_rejects = 0;
    let mut errors = 0;
    for run in 0..200u64 {
        let x = arma::simulate(&null, 500, &t25, 500, &RngSeed::new(8_000 + run)).unwrap();
        let cfg = BootstrapConfig {
            seed: RngSeed::new(80_000 + run),
            ..base.clone()
        };
        match gof_test(&x, ar1, &cfg) {
            Ok(r) => size_rejects += r.bands.rows[0].reject as usize,
            Err(_) => errors += 1,
        }
    }
    let mut power_rejects = 0;
    for run in 0..50u64 {
        let x =
            arma::simulate_noncausal_ar1(1.67, 1000, 2.5, 200, &RngSeed::new(9_000 + run)).unwrap();
        let cfg = BootstrapConfig {
            seed: RngSeed::new(90_000 + run),
            ..base.clone()
        };
        match gof_test(&x, ar1, &cfg) {
            Ok(r) => power_rejects += r.bands.rows[0].reject as usize,
            Err(_) => errors += 1,
        }
    }
    let size = size_rejects as f64 / 200.0;
    let power = power_rejects as f64 / 50.0;
    outcome(
        (0.01..=0.12).contains(&size) && power >= 0.8 && errors == 0,
        format!(
            "lag-1 rejection rate under the null {size:.3} (200 runs), under non-causal data {power:.2} (50 runs), {errors} errors; {:.1?}",
            start.elapsed()
        ),
    )
}

fn criterion_9() -> Outcome {
    let model = ArmaModel::new(vec![0.5], vec![0.3], 1.0).unwrap();
    let x = arma::simulate(
        &model,
        400,
        &Innovations::standard_normal(),
        500,
        &RngSeed::new(9),
    )
    .unwrap();
    let spec = ModelSpec::Arma { p: 1, q: 1 };
    let run = |threads: usize| {
        let cfg = BootstrapConfig {
            replicates: 100,
            threads: Some(threads),
            keep_replicates: true,
            ..study_config(99, 5)
        };
        serde_json::to_string(&gof_test(&x, spec, &cfg).unwrap()).unwrap()
    };
    let reference = run(1);
    let same = [1, 2, 8].iter().all(|&k| run(k) == reference);
    outcome(
        same,
        format!(
            "{} bytes of JSON compared across 1/1/2/8 threads",
            reference.len()
        ),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let wanted = |k: usize| selected.is_empty() || selected.contains(&k);
    let names = [
        "oracle equivalence",
        "exact invariants",
        "coefficient identities",
        "estimator recovery",
        "ARMA residual vs iid ordering",
        "GARCH residual vs iid ordering",
        "bootstrap consistency",
        "size and power",
        "determinism",
    ];
    let mut residual_q95 = Vec::new();
    let mut failures = 0;
    for k in 1..=9 {
        // criterion 7 reuses the Monte Carlo quantiles of criterion 5
        if !wanted(k) && !(k == 5 && wanted(7)) {
            continue;
        }
        let start = Instant::now();
        let result = match k {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(&mut residual_q95),
            6 => criterion_6(),
            7 => criterion_7(&residual_q95),
            8 => criterion_8(),
            _ => criterion_9(),
        };
        let tag = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failures += 1;
        }
        println!(
            "[{tag}] criterion {k} {}: {} ({:.1?})",
            names[k - 1],
            result.detail,
            start.elapsed()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
