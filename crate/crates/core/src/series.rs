use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered, non-empty sequence of finite observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series(Vec<f64>);

impl From<Series> for Vec<f64> {
    fn from(s: Series) -> Self {
        s.0
    }
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// Variance with divisor `n`.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.0.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.0.len() as f64
    }

    pub fn centered(&self) -> Series {
        let m = self.mean();
        Series(self.0.iter().map(|x| x - m).collect())
    }

    pub fn is_constant(&self) -> bool {
        let first = self.0[0];
        self.0.iter().all(|&x| x == first)
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for Series {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}
