//! Gaussian QMLE of a GARCH(1,1) model and its conditional variance path.
//!
//! cargo run --release --example garch_fit

use adcv::garch::{self, Presample};
use adcv::{FitOptions, GarchModel, Innovations, RngSeed};

fn main() -> adcv::Result<()> {
    let truth = GarchModel::new(0.5, vec![0.1], vec![0.8]);
    println!(
        "persistence {:.2}, unconditional variance {:.2}",
        truth.persistence(),
        truth.unconditional_variance()
    );
    println!("c-expansion: {:?}", garch::c_coeffs(&truth, 4)?);

    for seed in 0..5 {
        let x = garch::simulate(
            &truth,
            2000,
            &Innovations::standard_normal(),
            500,
            &RngSeed::new(seed),
        )?;
        let fit = garch::fit(&x, 1, 1, &FitOptions::default())?;
        let expansion = garch::fit_with(&x, 1, 1, &FitOptions::default(), Presample::Expansion)?;
        let m = &fit.model;
        println!(
            "seed {seed}: alpha0 {:.3} alpha1 {:.4} beta1 {:.4} loglik {:.1} | expansion start: alpha1 {:.4} beta1 {:.4}",
            m.alpha0, m.alpha[0], m.beta[0], fit.loglik, expansion.model.alpha[0], expansion.model.beta[0]
        );
    }
    Ok(())
}
