//! GARCH(p, q) models: conditional-variance filtering, simulation, residual
//! extraction and Gaussian quasi-maximum-likelihood fitting.
//!
//! `sigma_t^2 = alpha0 + sum alpha_i X_{t-i}^2 + sum beta_j sigma_{t-j}^2`
//! and `X_t = sigma_t Z_t` with unit-variance innovations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{poly_roots, FitOptions, Innovations, NelderMead, Polynomial, RngSeed};
use crate::series::Series;

pub const DEFAULT_BURN_IN: usize = 500;

/// Lower bound on every fitted parameter.
pub const PARAM_FLOOR: f64 = 1e-6;
/// Upper bound on `sum(alpha) + sum(beta)` during fitting.
pub const PERSISTENCE_CAP: f64 = 0.999;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GarchModel {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct GarchValidity {
    pub valid: bool,
    pub reasons: Vec<String>,
    /// Non-fatal findings, such as a non-minimal representation.
    pub warnings: Vec<String>,
}

impl GarchModel {
    pub fn new(alpha0: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        Self {
            alpha0,
            alpha,
            beta,
        }
    }

    pub fn p(&self) -> usize {
        self.alpha.len()
    }

    pub fn q(&self) -> usize {
        self.beta.len()
    }

    pub fn persistence(&self) -> f64 {
        self.alpha.iter().sum::<f64>() + self.beta.iter().sum::<f64>()
    }

    /// `alpha0 / (1 - sum(alpha) - sum(beta))`.
    pub fn unconditional_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.persistence())
    }

    fn constraint_violations(&self) -> Vec<String> {
        let mut reasons = Vec::new();
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            reasons.push("alpha0 must be positive".to_string());
        }
        if self.alpha.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            reasons.push("alpha coefficients must be nonnegative".to_string());
        }
        if self.beta.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
            reasons.push("beta coefficients must be nonnegative".to_string());
        }
        let s = self.persistence();
        if s.is_nan() || s >= 1.0 {
            reasons.push(format!(
                "sum(alpha) + sum(beta) = {s} must be below 1 for covariance stationarity"
            ));
        }
        reasons
    }

    /// Positivity and stationarity checks, plus a minimality warning when
    /// `A(z) = sum alpha_i z^i` and `B(z) = 1 - sum beta_j z^j` share a root.
    pub fn validate(&self) -> GarchValidity {
        let reasons = self.constraint_violations();
        let mut warnings = Vec::new();
        if reasons.is_empty() && self.q() > 0 {
            let mut a = vec![0.0];
            a.extend_from_slice(&self.alpha);
            let a = Polynomial::new(a);
            let mut b = vec![1.0];
            b.extend(self.beta.iter().map(|v| -v));
            let b = Polynomial::new(b);
            if a.coeffs().iter().all(|&c| c == 0.0) {
                warnings.push("all alpha are zero: beta is not identified".to_string());
            } else if let (Ok(ra), Ok(rb)) = (poly_roots(&a), poly_roots(&b)) {
                if ra.iter().any(|x| rb.iter().any(|y| (x - y).norm() < 1e-6)) {
                    warnings.push(
                        "A(z) and B(z) share a root: representation is not minimal".to_string(),
                    );
                }
            }
        }
        GarchValidity {
            valid: reasons.is_empty(),
            reasons,
            warnings,
        }
    }

    pub fn require_valid(&self) -> Result<()> {
        let reasons = self.constraint_violations();
        if reasons.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(reasons))
        }
    }
}

/// How the unobserved pre-sample terms of the variance recursion are filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Presample {
    /// Pre-sample `X^2` and `sigma^2` set to the sample variance.
    #[default]
    SampleVariance,
    /// Pre-sample `X^2 = 0` and `sigma^2 = alpha0 / (1 - sum beta)`, which
    /// makes the recursion coincide with the truncated expansion
    /// `c_0 + sum_{i<t} c_i X_{t-i}^2`.
    Expansion,
}

fn filter_unchecked(x: &[f64], model: &GarchModel, presample: Presample) -> Vec<f64> {
    let (x2_pre, s2_pre) = match presample {
        Presample::SampleVariance => {
            let n = x.len() as f64;
            let m = x.iter().sum::<f64>() / n;
            let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            (v, v)
        }
        Presample::Expansion => (0.0, model.alpha0 / (1.0 - model.beta.iter().sum::<f64>())),
    };
    let mut s2 = vec![0.0; x.len()];
    for t in 0..x.len() {
        let mut v = model.alpha0;
        for (i, a) in model.alpha.iter().enumerate() {
            let x2 = if t > i {
                x[t - 1 - i] * x[t - 1 - i]
            } else {
                x2_pre
            };
            v += a * x2;
        }
        for (j, b) in model.beta.iter().enumerate() {
            v += b * if t > j { s2[t - 1 - j] } else { s2_pre };
        }
        s2[t] = v;
    }
    s2
}

/// Conditional variance path under the default pre-sample initialization.
pub fn sigma2_filter(series: &Series, model: &GarchModel) -> Result<Series> {
    sigma2_filter_with(series, model, Presample::default())
}

pub fn sigma2_filter_with(
    series: &Series,
    model: &GarchModel,
    presample: Presample,
) -> Result<Series> {
    model.require_valid()?;
    Series::new(filter_unchecked(series, model, presample))
}

/// `c_0..c_m` of `sigma_t^2 = c_0 + sum_{i>=1} c_i X_{t-i}^2` for GARCH(1,1).
pub fn c_coeffs(model: &GarchModel, m: usize) -> Result<Vec<f64>> {
    if model.p() != 1 || model.q() != 1 {
        return Err(Error::UnsupportedOrder {
            p: model.p(),
            q: model.q(),
        });
    }
    let (a0, a1, b1) = (model.alpha0, model.alpha[0], model.beta[0]);
    if b1.is_nan() || b1 >= 1.0 {
        return Err(Error::InvalidModel(vec!["beta_1 must be below 1".into()]));
    }
    let mut c = Vec::with_capacity(m + 1);
    c.push(a0 / (1.0 - b1));
    let mut pow = 1.0;
    for _ in 1..=m {
        c.push(a1 * pow);
        pow *= b1;
    }
    Ok(c)
}

/// Simulates from the unconditional variance for `burn_in + n` steps and
/// keeps the last `n`. Innovations are the first `burn_in + n` draws of the
/// stream and should have unit variance.
pub fn simulate(
    model: &GarchModel,
    n: usize,
    innovations: &Innovations,
    burn_in: usize,
    seed: &RngSeed,
) -> Result<Series> {
    model.require_valid()?;
    let z = innovations.draw(&mut seed.rng(), burn_in + n)?;
    let s0 = model.unconditional_variance();
    let mut x = vec![0.0; z.len()];
    let mut s2 = vec![0.0; z.len()];
    for t in 0..z.len() {
        let mut v = model.alpha0;
        for (i, a) in model.alpha.iter().enumerate() {
            v += a * if t > i {
                x[t - 1 - i] * x[t - 1 - i]
            } else {
                s0
            };
        }
        for (j, b) in model.beta.iter().enumerate() {
            v += b * if t > j { s2[t - 1 - j] } else { s0 };
        }
        s2[t] = v;
        x[t] = v.sqrt() * z[t];
    }
    Series::new(x[burn_in..].to_vec())
}

/// `X_t / sigma_t` with the filtered conditional variance.
pub fn residuals(series: &Series, model: &GarchModel) -> Result<Series> {
    residuals_with(series, model, Presample::default())
}

pub fn residuals_with(series: &Series, model: &GarchModel, presample: Presample) -> Result<Series> {
    let s2 = sigma2_filter_with(series, model, presample)?;
    Series::new(
        series
            .iter()
            .zip(s2.iter())
            .map(|(x, s)| x / s.sqrt())
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub model: GarchModel,
    pub residuals: Series,
    pub sigma2_path: Series,
    /// `sum_t (-log(sigma_t^2)/2 - X_t^2 / (2 sigma_t^2))` at the optimum.
    pub loglik: f64,
    pub converged: bool,
}

/// Maps unconstrained coordinates onto the fitting region: `alpha0` through
/// an exponential, the `p + q` dynamic coefficients through a softmax with
/// one slack component so their sum stays below [`PERSISTENCE_CAP`].
struct Transform {
    p: usize,
    q: usize,
}

impl Transform {
    fn budget(&self) -> f64 {
        PERSISTENCE_CAP - (self.p + self.q) as f64 * PARAM_FLOOR
    }

    fn to_model(&self, u: &[f64]) -> GarchModel {
        let alpha0 = PARAM_FLOOR + u[0].exp();
        let logits = &u[1..];
        let top = logits.iter().copied().fold(0.0f64, f64::max);
        let slack = (-top).exp();
        let weights: Vec<f64> = logits.iter().map(|v| (v - top).exp()).collect();
        let total = slack + weights.iter().sum::<f64>();
        let coef: Vec<f64> = weights
            .iter()
            .map(|w| PARAM_FLOOR + self.budget() * w / total)
            .collect();
        GarchModel {
            alpha0,
            alpha: coef[..self.p].to_vec(),
            beta: coef[self.p..].to_vec(),
        }
    }

    fn to_unconstrained(&self, m: &GarchModel) -> Vec<f64> {
        let mut u = vec![(m.alpha0 - PARAM_FLOOR).max(1e-12).ln()];
        let shares: Vec<f64> = m
            .alpha
            .iter()
            .chain(&m.beta)
            .map(|c| ((c - PARAM_FLOOR) / self.budget()).max(1e-9))
            .collect();
        let slack = (1.0 - shares.iter().sum::<f64>()).max(1e-9);
        u.extend(shares.iter().map(|s| (s / slack).ln()));
        u
    }
}

fn negative_quasi_loglik(x: &[f64], model: &GarchModel, presample: Presample) -> f64 {
    let s2 = filter_unchecked(x, model, presample);
    0.5 * x
        .iter()
        .zip(&s2)
        .map(|(x, s)| s.ln() + x * x / s)
        .sum::<f64>()
}

/// Gaussian quasi-maximum-likelihood fit of a GARCH(p, q) model.
///
/// Parameters are kept in `[PARAM_FLOOR, inf)` with persistence at most
/// [`PERSISTENCE_CAP`]; the search runs in transformed coordinates from a
/// moment-based start plus jittered restarts.
pub fn fit(series: &Series, p: usize, q: usize, opts: &FitOptions) -> Result<GarchFit> {
    fit_with(series, p, q, opts, Presample::default())
}

/// [`fit`] with an explicit pre-sample rule, used both in the likelihood
/// and for the returned residuals.
pub fn fit_with(
    series: &Series,
    p: usize,
    q: usize,
    opts: &FitOptions,
    presample: Presample,
) -> Result<GarchFit> {
    let n = series.len();
    if n <= 200 {
        return Err(Error::InsufficientData {
            n,
            needed: "GARCH fitting needs more than 200 observations".into(),
        });
    }
    if series.is_constant() {
        return Err(Error::DegenerateSeries("constant series"));
    }
    let x = series.values();
    let var = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let tr = Transform { p, q };

    let a_share = if p > 0 { 0.05 / p as f64 } else { 0.0 };
    let b_share = if q > 0 { 0.9 / q as f64 } else { 0.0 };
    let start_model = GarchModel {
        alpha0: var * (1.0 - a_share * p as f64 - b_share * q as f64),
        alpha: vec![a_share; p],
        beta: vec![b_share; q],
    };
    let base = tr.to_unconstrained(&start_model);
    let objective = |u: &[f64]| negative_quasi_loglik(x, &tr.to_model(u), presample);

    let optimizer = NelderMead {
        tol: opts.tol,
        max_iter: opts.max_iter,
        initial_step: 0.3,
    };
    let mut rng = opts.seed.rng();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for attempt in 0..opts.restarts.max(1) {
        let mut start = base.clone();
        if attempt > 0 {
            start
                .iter_mut()
                .for_each(|v| *v += rng.random_range(-0.75..0.75));
        }
        let Ok(mut run) = optimizer.minimize(objective, &start) else {
            continue;
        };
        if run.converged {
            if let Ok(again) = optimizer.minimize(objective, &run.argmin) {
                if again.converged && again.objective_value <= run.objective_value {
                    run = again;
                }
            }
        }
        if !run.converged || !run.objective_value.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| run.objective_value < b.1) {
            best = Some((run.argmin, run.objective_value));
        }
    }
    let (u, value) = best.ok_or_else(|| {
        Error::FitDiverged(format!(
            "GARCH({p},{q}) optimizer failed from all {} starts",
            opts.restarts.max(1)
        ))
    })?;
    let model = tr.to_model(&u);
    let sigma2_path = Series::new(filter_unchecked(x, &model, presample))?;
    let residuals = Series::new(
        x.iter()
            .zip(sigma2_path.iter())
            .map(|(x, s)| x / s.sqrt())
            .collect(),
    )?;
    Ok(GarchFit {
        model,
        residuals,
        sigma2_path,
        loglik: -value,
        converged: true,
    })
}
