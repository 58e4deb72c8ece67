use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 1000;

/// Real polynomial `c_0 + c_1 z + ... + c_m z^m`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// All complex roots by Durand-Kerner (Weierstrass) iteration.
///
/// A constant polynomial has no roots and yields an empty list.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    let m = p.degree();
    if m == 0 {
        if p.coeffs[0] == 0.0 {
            return Err(Error::InvalidParameter("zero polynomial".into()));
        }
        return Ok(Vec::new());
    }
    let lead = p.coeffs[m];
    let monic: Vec<f64> = p.coeffs.iter().map(|c| c / lead).collect();
    let eval_monic = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };

    let radius = 1.0 + monic[..m].iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut roots: Vec<Complex64> = (0..m)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..m {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates: nudge apart
                roots[i] = zi + Complex64::new(1e-8, 1e-8);
                max_step = f64::INFINITY;
                continue;
            }
            let step = eval_monic(zi) / denom;
            roots[i] = zi - step;
            max_step = max_step.max(step.norm() / zi.norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }

    let bound = 1e-8 * p.max_abs_coeff();
    let accurate = roots.iter().all(|&r| p.eval(r).norm() < bound);
    if !accurate {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    Ok(roots)
}

/// Smallest root modulus; `+inf` for a constant polynomial.
pub fn min_root_modulus(p: &Polynomial) -> Result<f64> {
    Ok(poly_roots(p)?
        .iter()
        .map(|r| r.norm())
        .fold(f64::INFINITY, f64::min))
}
