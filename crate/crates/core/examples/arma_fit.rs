//! Conditional least-squares fits of ARMA models.
//!
//! The ARMA(2,2) model below has AR and MA polynomials sharing the factor
//! `1 - 0.8z`, so it is an ARMA(1,1) in disguise. Its coefficients are not
//! identified: fits land anywhere on the line `phi = (0.4 + c, -0.4c)`,
//! `theta = (0.6 - c, -0.6c)` while the residuals stay the same.
//!
//! cargo run --release --example arma_fit

use adcv::{adcf, arma, ArmaModel, FitOptions, Innovations, RngSeed, WeightMeasure};

fn main() -> adcv::Result<()> {
    let truth = ArmaModel::new(vec![1.2, -0.32], vec![-0.2, -0.48], 1.0)?;
    println!("AR roots outside unit circle: {}", truth.validate().causal);
    println!(
        "MA roots outside unit circle: {}",
        truth.validate().invertible
    );
    println!("pi weights: {:?}", arma::pi_coeffs(&truth, 5)?);

    for seed in 0..4 {
        let x = arma::simulate(
            &truth,
            2000,
            &Innovations::standard_normal(),
            500,
            &RngSeed::new(seed),
        )?;
        let big = arma::fit(&x, 2, 2, &FitOptions::default())?;
        let small = arma::fit(&x, 1, 1, &FitOptions::default())?;
        // common factor implied by the ARMA(2,2) fit
        let c = big.model.phi[0] - 0.4;
        println!(
            "seed {seed}: ARMA(2,2) phi {:?} theta {:?} (c = {c:.3}) | ARMA(1,1) phi {:.4} theta {:.4} sigma2 {:.4} | residual ADCF(1) {:.2e}",
            round(&big.model.phi),
            round(&big.model.theta),
            small.model.phi[0],
            small.model.theta[0],
            small.model.sigma2,
            adcf(&big.residuals, 1, &WeightMeasure::default())?,
        );
    }
    Ok(())
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
