//! A non-causal AR(1) with Student-t(2.5) noise, fitted as a causal AR(1).
//! The fitted residuals are uncorrelated but not independent, which the
//! lag-1 ADCF picks up. A causal AR(1) with the same autocorrelation is
//! shown for contrast.
//!
//! cargo run --release --example noncausal_misspecification

use adcv::arma;
use adcv::{gof_test, ArmaModel, BootstrapConfig, Innovations, ModelSpec, RngSeed};

fn main() -> adcv::Result<()> {
    let config = BootstrapConfig {
        replicates: 200,
        max_lag: 3,
        seed: RngSeed::new(3),
        ..BootstrapConfig::default()
    };
    let spec = ModelSpec::Arma { p: 1, q: 0 };
    let noncausal = arma::simulate_noncausal_ar1(1.67, 1000, 2.5, 200, &RngSeed::new(21))?;
    let causal = arma::simulate(
        &ArmaModel::new(vec![1.0 / 1.67], vec![], 1.0)?,
        1000,
        &Innovations::StudentT {
            df: 2.5,
            scale: 1.0,
        },
        500,
        &RngSeed::new(21),
    )?;

    for (name, x) in [("non-causal", &noncausal), ("causal", &causal)] {
        let report = gof_test(x, spec, &config)?;
        if let adcv::bootstrap::Coefficients::Arma { phi, .. } = &report.fit.coefficients {
            println!("{name} data, fitted phi = {:.4}", phi[0]);
        }
        for r in &report.bands.rows {
            println!(
                "  lag {}: observed {:.3e}, 95% band {:.3e}, p = {:.3}{}",
                r.lag,
                r.observed,
                r.hi,
                r.p_value,
                if r.reject { "  reject" } else { "" }
            );
        }
    }
    Ok(())
}
