use num_complex::Complex64;

use super::{check_lag, WeightMeasure};
use crate::error::{Error, Result};
use crate::series::Series;

const PI_M4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)

/// Gauss-Hermite nodes and weights for the weight `exp(-u^2)` on the real
/// line, found by Newton iteration on the normalized Hermite recurrence.
/// Nodes are returned in decreasing order.
pub fn gauss_hermite(nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if nodes == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let n = nodes;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut deriv = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = PI_M4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            deriv = (2.0 * nf).sqrt() * p2;
            let step = p1 / deriv;
            z -= step;
            if step.abs() <= 3e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(100));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (deriv * deriv);
        w[n - 1 - i] = w[i];
    }
    Ok((x, w))
}

/// ADCV by tensor Gauss-Hermite quadrature of `|C_n(s, t)|^2` against the
/// weight measure, with `s = sqrt(2) sigma_s u`.
pub fn adcv_quadrature_oracle(
    series: &Series,
    h: usize,
    measure: &WeightMeasure,
    nodes: usize,
) -> Result<f64> {
    let pairs = check_lag(series, h)?;
    if nodes < 16 {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs at least 16 nodes, got {nodes}"
        )));
    }
    let (u, w) = gauss_hermite(nodes)?;
    let x = series.values();
    let front = &x[..pairs];
    let back = &x[h..h + pairs];
    let inv = 1.0 / pairs as f64;

    let phases = |data: &[f64], sigma: f64| -> Vec<Vec<Complex64>> {
        u.iter()
            .map(|&ui| {
                let s = std::f64::consts::SQRT_2 * sigma * ui;
                data.iter().map(|&v| Complex64::cis(s * v)).collect()
            })
            .collect()
    };
    let es = phases(front, measure.sigma_s());
    let et = phases(back, measure.sigma_t());
    let mean = |v: &[Complex64]| v.iter().sum::<Complex64>() * inv;
    let ms: Vec<Complex64> = es.iter().map(|v| mean(v)).collect();
    let mt: Vec<Complex64> = et.iter().map(|v| mean(v)).collect();

    let mut total = 0.0;
    for (i, (ei, wi)) in es.iter().zip(&w).enumerate() {
        for (j, (ej, wj)) in et.iter().zip(&w).enumerate() {
            let joint: Complex64 = ei.iter().zip(ej).map(|(a, b)| a * b).sum::<Complex64>() * inv;
            let c = joint - ms[i] * mt[j];
            total += wi * wj * c.norm_sqr();
        }
    }
    Ok(total / std::f64::consts::PI)
}
