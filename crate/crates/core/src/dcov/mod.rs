//! Sample auto-distance covariance (ADCV) and correlation (ADCF).
//!
//! The weight measure is a Gaussian product measure
//! `N(0, sigma_s^2) x N(0, sigma_t^2)` on the plane. Because it is finite,
//! the squared-modulus integral of the empirical characteristic-function
//! discrepancy reduces to a V-statistic over kernel evaluations
//! `exp(-sigma^2 d^2 / 2)`, which is what [`adcv`] evaluates in `O(N^2)`.
//!
//! Every statistic at lag `h` is built from the `N = n - h` pairs
//! `(X_j, X_{j+h})` and normalized by powers of `N`.
//!
//! [`adcv_quadrature_oracle`] integrates the same quantity numerically and
//! exists to cross-check the closed form.

mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

pub use quadrature::{adcv_quadrature_oracle, gauss_hermite};

/// Values this far below zero are treated as rounding noise and clamped.
pub const NEGATIVE_CLAMP_TOL: f64 = 1e-12;

/// Gaussian product weight measure `N(0, sigma_s^2) x N(0, sigma_t^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightMeasure {
    sigma_s: f64,
    sigma_t: f64,
}

impl WeightMeasure {
    pub fn new(sigma_s: f64, sigma_t: f64) -> Result<Self> {
        if !(sigma_s > 0.0 && sigma_s.is_finite() && sigma_t > 0.0 && sigma_t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight measure bandwidths must be positive and finite, got ({sigma_s}, {sigma_t})"
            )));
        }
        Ok(Self { sigma_s, sigma_t })
    }

    /// Equal bandwidth in both coordinates.
    pub fn isotropic(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma)
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn sigma_t(&self) -> f64 {
        self.sigma_t
    }
}

impl Default for WeightMeasure {
    /// `N(0, 0.5^2)` in both coordinates.
    fn default() -> Self {
        Self {
            sigma_s: 0.5,
            sigma_t: 0.5,
        }
    }
}

/// Fourier transform of the weight measure at `(x, y)`.
pub fn fourier_weight(measure: &WeightMeasure, x: f64, y: f64) -> f64 {
    let a = measure.sigma_s * x;
    let b = measure.sigma_t * y;
    (-(a * a + b * b) / 2.0).exp()
}

/// Statistics for a single lag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdcvResult {
    pub lag: usize,
    /// Sample ADCV.
    pub t_stat: f64,
    /// Sample ADCF.
    pub r_stat: f64,
    pub n_pairs: usize,
}

fn check_lag(series: &Series, h: usize) -> Result<usize> {
    let n = series.len();
    if n < h + 2 {
        return Err(Error::LagTooLarge { lag: h, n });
    }
    Ok(n - h)
}

/// Empirical characteristic-function discrepancy `C_n(s, t)` at lag `h`.
pub fn ecf_diff(series: &Series, h: usize, s: f64, t: f64) -> Result<Complex64> {
    let pairs = check_lag(series, h)?;
    let x = series.values();
    let inv = 1.0 / pairs as f64;
    let mut joint = Complex64::new(0.0, 0.0);
    let mut front = Complex64::new(0.0, 0.0);
    let mut back = Complex64::new(0.0, 0.0);
    for j in 0..pairs {
        let (a, b) = (x[j], x[j + h]);
        joint += Complex64::cis(s * a + t * b);
        front += Complex64::cis(s * a);
        back += Complex64::cis(t * b);
    }
    Ok(joint * inv - (front * inv) * (back * inv))
}

/// Dense Gaussian kernel matrix `k[i][j] = exp(-sigma^2 (x_i - x_j)^2 / 2)`.
struct Kernel {
    n: usize,
    data: Vec<f64>,
}

impl Kernel {
    fn new(x: &[f64], sigma: f64) -> Self {
        let n = x.len();
        let c = sigma * sigma / 2.0;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
            for j in (i + 1)..n {
                let d = x[i] - x[j];
                let v = (-c * d * d).exp();
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn row(&self, i: usize, from: usize, to: usize) -> &[f64] {
        &self.data[i * self.n + from..i * self.n + to]
    }
}

/// `term1 + term2 - term3` of the V-statistic from its four sums, with
/// round-off negatives clamped to zero.
fn combine(cross: f64, sum_a: f64, sum_b: f64, sum_ab: f64, len: usize) -> Result<f64> {
    let nf = len as f64;
    let term1 = cross / (nf * nf);
    let term2 = sum_a * sum_b / (nf * nf * nf * nf);
    let term3 = 2.0 * sum_ab / (nf * nf * nf);
    let value = term1 + term2 - term3;
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!(
            "distance covariance evaluated to {value:e}"
        )))
    }
}

/// Square window `[start, end)` of a kernel with its row sums and the sum
/// of its squared entries, maintained while the window shrinks.
struct Window<'a> {
    k: &'a Kernel,
    start: usize,
    end: usize,
    /// Indexed by absolute position; only `[start, end)` is meaningful.
    row_sums: Vec<f64>,
    sq_total: f64,
}

impl<'a> Window<'a> {
    fn new(k: &'a Kernel, start: usize, end: usize) -> Self {
        let mut row_sums = vec![0.0; k.n];
        let mut sq_total = 0.0;
        for (i, sum) in row_sums.iter_mut().enumerate().take(end).skip(start) {
            let row = k.row(i, start, end);
            *sum = row.iter().sum();
            sq_total += row.iter().map(|v| v * v).sum::<f64>();
        }
        Self {
            k,
            start,
            end,
            row_sums,
            sq_total,
        }
    }

    fn remove(&mut self, m: usize) {
        for i in self.start..self.end {
            if i != m {
                let v = self.k.at(i, m);
                self.row_sums[i] -= v;
                self.sq_total -= 2.0 * v * v;
            }
        }
        let d = self.k.at(m, m);
        self.sq_total -= d * d;
    }

    fn drop_last(&mut self) {
        self.remove(self.end - 1);
        self.end -= 1;
    }

    fn drop_first(&mut self) {
        self.remove(self.start);
        self.start += 1;
    }

    fn sums(&self) -> &[f64] {
        &self.row_sums[self.start..self.end]
    }

    fn len(&self) -> usize {
        self.end - self.start
    }

    /// Distance variance of the window under its own kernel.
    fn dvar(&self) -> Result<f64> {
        let a = self.sums();
        let total: f64 = a.iter().sum();
        let sq: f64 = a.iter().map(|v| v * v).sum();
        combine(self.sq_total, total, total, sq, self.len())
    }
}

/// ADCV of the pairs formed by two equally long windows.
fn cross_vstat(front: &Window, back: &Window) -> Result<f64> {
    let len = front.len();
    let (k1, k2) = (front.k, back.k);
    let (o1, o2) = (front.start, back.start);
    let mut off_diag = 0.0;
    let mut diag = 0.0;
    for i in 0..len {
        let ra = k1.row(o1 + i, o1 + i + 1, o1 + len);
        let rb = k2.row(o2 + i, o2 + i + 1, o2 + len);
        off_diag += ra.iter().zip(rb).map(|(u, v)| u * v).sum::<f64>();
        diag += k1.at(o1 + i, o1 + i) * k2.at(o2 + i, o2 + i);
    }
    let a = front.sums();
    let b = back.sums();
    let sum_a: f64 = a.iter().sum();
    let sum_b: f64 = b.iter().sum();
    let sum_ab: f64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
    combine(diag + 2.0 * off_diag, sum_a, sum_b, sum_ab, len)
}

fn correlation(t_stat: f64, front: &Window, back: &Window) -> Result<f64> {
    let f = front.dvar()?;
    let b = back.dvar()?;
    if f <= 0.0 || b <= 0.0 {
        return Err(Error::DegenerateSeries(
            "zero distance variance (constant segment)",
        ));
    }
    Ok(t_stat / (f * b).sqrt())
}

/// Kernels for one series under one measure; shared when the bandwidths agree.
struct MeasureKernels {
    s: Kernel,
    t: Option<Kernel>,
}

impl MeasureKernels {
    fn new(x: &[f64], measure: &WeightMeasure) -> Self {
        let s = Kernel::new(x, measure.sigma_s);
        let t = (measure.sigma_t != measure.sigma_s).then(|| Kernel::new(x, measure.sigma_t));
        Self { s, t }
    }

    fn t(&self) -> &Kernel {
        self.t.as_ref().unwrap_or(&self.s)
    }

    /// Leading window of the `s` kernel and trailing window of the `t`
    /// kernel, each of length `n - h`.
    fn windows(&self, h: usize) -> (Window<'_>, Window<'_>) {
        let n = self.s.n;
        (Window::new(&self.s, 0, n - h), Window::new(self.t(), h, n))
    }
}

/// Sample ADCV at lag `h`.
pub fn adcv(series: &Series, h: usize, measure: &WeightMeasure) -> Result<f64> {
    check_lag(series, h)?;
    let k = MeasureKernels::new(series.values(), measure);
    let (front, back) = k.windows(h);
    cross_vstat(&front, &back)
}

/// Sample ADCF at lag `h`: the ADCV divided by the geometric mean of the
/// distance variances of the leading and trailing `n - h` observations.
pub fn adcf(series: &Series, h: usize, measure: &WeightMeasure) -> Result<f64> {
    check_lag(series, h)?;
    let k = MeasureKernels::new(series.values(), measure);
    let (front, back) = k.windows(h);
    correlation(cross_vstat(&front, &back)?, &front, &back)
}

/// ADCV and ADCF for lags `1..=max_lag`, sharing one kernel evaluation.
pub fn adcv_curve(
    series: &Series,
    max_lag: usize,
    measure: &WeightMeasure,
) -> Result<Vec<AdcvResult>> {
    if max_lag == 0 {
        return Err(Error::InvalidParameter("max_lag must be at least 1".into()));
    }
    check_lag(series, max_lag)?;
    let k = MeasureKernels::new(series.values(), measure);
    let (mut front, mut back) = k.windows(1);
    let mut out = Vec::with_capacity(max_lag);
    for h in 1..=max_lag {
        if h > 1 {
            front.drop_last();
            back.drop_first();
        }
        let t_stat = cross_vstat(&front, &back)?;
        let r_stat = correlation(t_stat, &front, &back)?;
        out.push(AdcvResult {
            lag: h,
            t_stat,
            r_stat,
            n_pairs: front.len(),
        });
    }
    Ok(out)
}
