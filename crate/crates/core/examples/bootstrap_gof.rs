//! Bootstrap goodness-of-fit test: a correct AR(2) fit against an
//! underfitted AR(1) on the same data.
//!
//! Each lag is its own 5% test, so a correct model still shows occasional
//! single-lag rejections; the max-over-lags line summarizes the curve.
//!
//! cargo run --release --example bootstrap_gof

use adcv::{arma, gof_test, ArmaModel, BootstrapConfig, Innovations, ModelSpec, RngSeed};

fn main() -> adcv::Result<()> {
    let truth = ArmaModel::new(vec![0.5, 0.3], vec![], 1.0)?;
    let x = arma::simulate(
        &truth,
        800,
        &Innovations::standard_normal(),
        500,
        &RngSeed::new(11),
    )?;
    let config = BootstrapConfig {
        replicates: 200,
        max_lag: 6,
        seed: RngSeed::new(5),
        ..BootstrapConfig::default()
    };

    for spec in [
        ModelSpec::Arma { p: 2, q: 0 },
        ModelSpec::Arma { p: 1, q: 0 },
    ] {
        let report = gof_test(&x, spec, &config)?;
        println!(
            "{} fit, {} replicates:",
            report.bands.model, report.bands.replicates
        );
        println!(
            "{:>4} {:>10} {:>10} {:>10} {:>8} {:>7}",
            "lag", "lo", "hi", "observed", "p", "reject"
        );
        for r in &report.bands.rows {
            println!(
                "{:>4} {:>10.3e} {:>10.3e} {:>10.3e} {:>8.3} {:>7}",
                r.lag, r.lo, r.hi, r.observed, r.p_value, r.reject
            );
        }
        println!(
            "max over lags {:.3e}, p = {:.3}\n",
            report.max_over_lags.observed, report.max_over_lags.p_value
        );
    }
    Ok(())
}
