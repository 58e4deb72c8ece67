//! ADCF of iid noise, a linear AR(1) and a GARCH(1,1) series, checked
//! against the Gauss-Hermite quadrature of the characteristic-function
//! integral at lag 1.
//!
//! cargo run --release --example adcf_curve

use adcv::dcov::adcv_quadrature_oracle;
use adcv::numerics::draw_normal;
use adcv::{adcv_curve, arma, garch, ArmaModel, GarchModel, Innovations, RngSeed, WeightMeasure};

fn main() -> adcv::Result<()> {
    let n = 1000;
    let measure = WeightMeasure::default();
    let noise = draw_normal(n, &RngSeed::new(1));
    let ar = arma::simulate(
        &ArmaModel::new(vec![0.6], vec![], 1.0)?,
        n,
        &Innovations::standard_normal(),
        500,
        &RngSeed::new(2),
    )?;
    let vol = garch::simulate(
        &GarchModel::new(0.5, vec![0.1], vec![0.8]),
        n,
        &Innovations::standard_normal(),
        500,
        &RngSeed::new(3),
    )?;

    let curves = [
        ("iid", adcv_curve(&noise, 8, &measure)?),
        ("ar1", adcv_curve(&ar, 8, &measure)?),
        ("garch", adcv_curve(&vol, 8, &measure)?),
    ];
    println!("{:>4} {:>10} {:>10} {:>10}", "lag", "iid", "ar1", "garch");
    for h in 0..8 {
        println!(
            "{:>4} {:>10.5} {:>10.5} {:>10.5}",
            h + 1,
            curves[0].1[h].r_stat,
            curves[1].1[h].r_stat,
            curves[2].1[h].r_stat
        );
    }

    let short = draw_normal(40, &RngSeed::new(4));
    let closed = adcv::adcv(&short, 1, &measure)?;
    let quad = adcv_quadrature_oracle(&short, 1, &measure, 64)?;
    println!("\nlag-1 ADCV, n = 40: closed form {closed:.12e}, quadrature {quad:.12e}");
    Ok(())
}
