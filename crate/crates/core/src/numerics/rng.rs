use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

/// Key for a reproducible random stream.
///
/// The base seed is expanded into a ChaCha key and the stream index selects
/// the ChaCha stream, so stream `i` never depends on how many draws any other
/// stream has made.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub base_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    pub fn new(base_seed: u64) -> Self {
        Self {
            base_seed,
            stream_index: 0,
        }
    }

    pub fn stream(&self, stream_index: u64) -> Self {
        Self {
            base_seed: self.base_seed,
            stream_index,
        }
    }

    /// A fresh base seed for an independent family of streams, keyed by
    /// this seed and `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        let mut state =
            self.base_seed ^ splitmix64(&mut (self.stream_index ^ 0xA076_1D64_78BD_642F));
        state ^= splitmix64(&mut tag.wrapping_mul(0xE703_7ED1_A0B4_28DB));
        Self::new(splitmix64(&mut state))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.base_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }
}

pub(crate) fn normal_draws<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Student-t draws as `Z / sqrt(V / df)`, `Z` standard normal, `V ~ chi2(df)`.
pub(crate) fn student_t_draws<R: Rng + ?Sized>(rng: &mut R, df: f64, n: usize) -> Result<Vec<f64>> {
    let chi = ChiSquared::new(df).map_err(|_| {
        Error::InvalidParameter(format!("degrees of freedom must be positive, got {df}"))
    })?;
    Ok((0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let v = chi.sample(rng);
            z / (v / df).sqrt()
        })
        .collect())
}

pub fn draw_normal(n: usize, seed: &RngSeed) -> Series {
    Series::new(normal_draws(&mut seed.rng(), n)).expect("normal draws are finite")
}

pub fn draw_student_t(df: f64, n: usize, seed: &RngSeed) -> Result<Series> {
    if df.is_nan() || df <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "degrees of freedom must be positive, got {df}"
        )));
    }
    Series::new(student_t_draws(&mut seed.rng(), df, n)?)
}
