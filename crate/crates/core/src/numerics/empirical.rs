use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{normal_draws, student_t_draws, RngSeed};
use crate::error::{Error, Result};
use crate::series::Series;

/// Equal-weight discrete distribution on mean-corrected residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDist {
    atoms: Vec<f64>,
    mean: f64,
    /// Sample variance of the atoms (divisor `n - 1`).
    variance: f64,
    rescaled: bool,
}

impl EmpiricalDist {
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn is_rescaled(&self) -> bool {
        self.rescaled
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let len = self.atoms.len();
        (0..n)
            .map(|_| self.atoms[rng.random_range(0..len)])
            .collect()
    }
}

fn mean_and_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Centers the residuals and, if requested, scales them to unit sample
/// variance.
pub fn make_empirical(residuals: &Series, rescale_unit_variance: bool) -> Result<EmpiricalDist> {
    if residuals.len() < 2 {
        return Err(Error::InsufficientData {
            n: residuals.len(),
            needed: "at least 2 residuals".into(),
        });
    }
    if residuals.is_constant() {
        return Err(Error::DegenerateSeries("constant residuals"));
    }
    let (m, v) = mean_and_var(residuals);
    let scale = if rescale_unit_variance { v.sqrt() } else { 1.0 };
    let mut atoms: Vec<f64> = residuals.iter().map(|x| (x - m) / scale).collect();
    // second centering pass removes the rounding left by the first
    let (m2, _) = mean_and_var(&atoms);
    atoms.iter_mut().for_each(|a| *a -= m2);
    let (mean, variance) = mean_and_var(&atoms);
    Ok(EmpiricalDist {
        atoms,
        mean,
        variance,
        rescaled: rescale_unit_variance,
    })
}

/// `n` draws with replacement from the atoms.
pub fn sample_empirical(dist: &EmpiricalDist, n: usize, seed: &RngSeed) -> Series {
    Series::new(dist.draw(&mut seed.rng(), n)).expect("atoms are finite")
}

/// Innovation law used by the simulators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Innovations {
    Normal { sd: f64 },
    StudentT { df: f64, scale: f64 },
    Empirical(EmpiricalDist),
}

impl Innovations {
    pub fn standard_normal() -> Self {
        Self::Normal { sd: 1.0 }
    }

    /// Student-t scaled to unit variance; requires `df > 2`.
    pub fn standardized_t(df: f64) -> Result<Self> {
        if df.is_nan() || df <= 2.0 {
            return Err(Error::InvalidParameter(format!(
                "unit-variance t needs df > 2, got {df}"
            )));
        }
        Ok(Self::StudentT {
            df,
            scale: ((df - 2.0) / df).sqrt(),
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        Ok(match self {
            Self::Normal { sd } => {
                let mut z = normal_draws(rng, n);
                z.iter_mut().for_each(|v| *v *= sd);
                z
            }
            Self::StudentT { df, scale } => {
                let mut z = student_t_draws(rng, *df, n)?;
                z.iter_mut().for_each(|v| *v *= scale);
                z
            }
            Self::Empirical(dist) => dist.draw(rng, n),
        })
    }
}
