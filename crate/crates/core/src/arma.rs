//! ARMA(p, q) models: validation, simulation, the truncated residual filter
//! and conditional Gaussian (pseudo-likelihood) fitting.
//!
//! Sign conventions: the AR polynomial is `1 - phi_1 z - ... - phi_p z^p`
//! and the MA polynomial is `1 + theta_1 z + ... + theta_q z^q`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{min_root_modulus, FitOptions, Innovations, NelderMead, Polynomial, RngSeed};
use crate::series::Series;

pub const DEFAULT_BURN_IN: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmaModel {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArmaValidity {
    pub causal: bool,
    pub invertible: bool,
}

impl ArmaValidity {
    pub fn is_valid(&self) -> bool {
        self.causal && self.invertible
    }
}

impl ArmaModel {
    pub fn new(phi: Vec<f64>, theta: Vec<f64>, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "innovation variance must be positive, got {sigma2}"
            )));
        }
        if phi.iter().chain(&theta).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite ARMA coefficient".into(),
            ));
        }
        Ok(Self { phi, theta, sigma2 })
    }

    pub fn p(&self) -> usize {
        self.phi.len()
    }

    pub fn q(&self) -> usize {
        self.theta.len()
    }

    pub fn ar_polynomial(&self) -> Polynomial {
        let mut c = vec![1.0];
        c.extend(self.phi.iter().map(|v| -v));
        Polynomial::new(c)
    }

    pub fn ma_polynomial(&self) -> Polynomial {
        let mut c = vec![1.0];
        c.extend_from_slice(&self.theta);
        Polynomial::new(c)
    }

    /// Causality and invertibility from the root moduli of the AR and MA
    /// polynomials. A root finder failure counts as a failed check.
    pub fn validate(&self) -> ArmaValidity {
        let outside = |p: &Polynomial| min_root_modulus(p).map(|m| m > 1.0).unwrap_or(false);
        ArmaValidity {
            causal: outside(&self.ar_polynomial()),
            invertible: outside(&self.ma_polynomial()),
        }
    }
}

/// Coefficients `pi_0..pi_m` of the expansion of `phi(z) / theta(z)`.
pub fn pi_coeffs(model: &ArmaModel, m: usize) -> Result<Vec<f64>> {
    if !model.validate().invertible {
        return Err(Error::NotInvertible);
    }
    let (p, q) = (model.p(), model.q());
    let mut pi = Vec::with_capacity(m + 1);
    pi.push(1.0);
    for j in 1..=m {
        let mut v = if j <= p { -model.phi[j - 1] } else { 0.0 };
        for k in 1..=j.min(q) {
            v -= model.theta[k - 1] * pi[j - k];
        }
        pi.push(v);
    }
    Ok(pi)
}

fn arma_recursion(model: &ArmaModel, z: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; z.len()];
    for t in 0..z.len() {
        let mut v = z[t];
        for (i, phi) in model.phi.iter().enumerate() {
            if t > i {
                v += phi * x[t - 1 - i];
            }
        }
        for (j, theta) in model.theta.iter().enumerate() {
            if t > j {
                v += theta * z[t - 1 - j];
            }
        }
        x[t] = v;
    }
    x
}

/// Simulates `burn_in + n` steps from zero initial conditions and keeps the
/// last `n`. The innovations are the first `burn_in + n` draws of the
/// stream.
pub fn simulate(
    model: &ArmaModel,
    n: usize,
    innovations: &Innovations,
    burn_in: usize,
    seed: &RngSeed,
) -> Result<Series> {
    let v = model.validate();
    if !v.causal {
        return Err(Error::NotCausal);
    }
    if !v.invertible {
        return Err(Error::NotInvertible);
    }
    let z = innovations.draw(&mut seed.rng(), burn_in + n)?;
    let x = arma_recursion(model, &z);
    Series::new(x[burn_in..].to_vec())
}

/// Stationary solution of `X_t = phi X_{t-1} + Z_t` for `|phi| > 1` with
/// Student-t innovations, `X_t = -sum_{j>=1} phi^{-j} Z_{t+j}`.
///
/// `horizon` extra future innovations are drawn; the series is obtained by
/// running the recursion backward from zero at the end of the horizon. The
/// innovations are the first `n + horizon` draws of the stream, and
/// `X_t - phi X_{t-1}` reproduces draw `t` for `t >= 1`.
pub fn simulate_noncausal_ar1(
    phi: f64,
    n: usize,
    df: f64,
    horizon: usize,
    seed: &RngSeed,
) -> Result<Series> {
    if !(phi.abs() > 1.0 && phi.is_finite()) {
        return Err(Error::NotNoncausal(phi));
    }
    let z = crate::numerics::draw_student_t(df, n + horizon, seed)?;
    let total = z.len();
    let mut x = vec![0.0; total];
    for t in (0..total - 1).rev() {
        x[t] = (x[t + 1] - z[t + 1]) / phi;
    }
    x.truncate(n);
    Series::new(x)
}

/// Truncated residuals `Z_t = sum_{j<t} pi_j X_{t-j}`, evaluated by the
/// equivalent recursion `theta(B) Z = phi(B) X` with zero pre-sample values.
pub fn residuals(series: &Series, model: &ArmaModel) -> Result<Series> {
    if !model.validate().invertible {
        return Err(Error::NotInvertible);
    }
    Series::new(residual_filter(series, model))
}

fn residual_filter(x: &[f64], model: &ArmaModel) -> Vec<f64> {
    let mut z = vec![0.0; x.len()];
    for t in 0..x.len() {
        let mut v = x[t];
        for (i, phi) in model.phi.iter().enumerate() {
            if t > i {
                v -= phi * x[t - 1 - i];
            }
        }
        for (j, theta) in model.theta.iter().enumerate() {
            if t > j {
                v -= theta * z[t - 1 - j];
            }
        }
        z[t] = v;
    }
    z
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmaFit {
    pub model: ArmaModel,
    /// Residuals of the mean-centered series.
    pub residuals: Series,
    /// Sample mean removed before fitting.
    pub mean: f64,
    /// Minimized objective `(n/2) log(sigma2_hat)`.
    pub objective_value: f64,
    /// Conditional Gaussian log-likelihood at the optimum.
    pub loglik: f64,
    pub converged: bool,
}

fn conditional_objective(x: &[f64], p: usize, beta: &[f64]) -> (f64, f64) {
    let model = ArmaModel {
        phi: beta[..p].to_vec(),
        theta: beta[p..].to_vec(),
        sigma2: 1.0,
    };
    if !model.validate().is_valid() {
        return (f64::INFINITY, f64::NAN);
    }
    let z = residual_filter(x, &model);
    let sigma2 = z.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    (0.5 * x.len() as f64 * sigma2.ln(), sigma2)
}

fn least_squares(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Option<Vec<f64>> {
    let cols = rows.first()?.len();
    if cols == 0 || rows.len() <= cols {
        return None;
    }
    let a = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let sol = a.svd(true, true).solve(&b, 1e-10).ok()?;
    sol.iter()
        .all(|v| v.is_finite())
        .then(|| sol.iter().copied().collect())
}

/// Hannan-Rissanen style start: a long autoregression supplies innovation
/// estimates, then `X_t` is regressed on its own lags and lagged innovations.
fn initial_guess(x: &[f64], p: usize, q: usize) -> Vec<f64> {
    let n = x.len();
    let long = (2 * (p + q) + 5)
        .max((10.0 * (n as f64).log10()).ceil() as usize)
        .min(n / 4);
    let mut e = vec![0.0; n];
    if q > 0 && long > 0 {
        let rows: Vec<Vec<f64>> = (long..n)
            .map(|t| (1..=long).map(|i| x[t - i]).collect())
            .collect();
        if let Some(a) = least_squares(rows, x[long..].to_vec()) {
            for t in long..n {
                e[t] = x[t] - (1..=long).map(|i| a[i - 1] * x[t - i]).sum::<f64>();
            }
        }
    }
    let start = long + p.max(q);
    let rows: Vec<Vec<f64>> = (start..n)
        .map(|t| {
            (1..=p)
                .map(|i| x[t - i])
                .chain((1..=q).map(|j| e[t - j]))
                .collect()
        })
        .collect();
    least_squares(rows, x[start..].to_vec()).unwrap_or_else(|| vec![0.0; p + q])
}

/// Scales coefficients toward zero until the model is causal and invertible.
fn pull_inside(beta: &mut [f64], p: usize) {
    for _ in 0..60 {
        if conditional_valid(beta, p) {
            return;
        }
        beta.iter_mut().for_each(|b| *b *= 0.7);
    }
    beta.iter_mut().for_each(|b| *b = 0.0);
}

fn conditional_valid(beta: &[f64], p: usize) -> bool {
    ArmaModel {
        phi: beta[..p].to_vec(),
        theta: beta[p..].to_vec(),
        sigma2: 1.0,
    }
    .validate()
    .is_valid()
}

/// Conditional Gaussian pseudo-likelihood fit of an ARMA(p, q) model to the
/// mean-centered series.
///
/// The innovation variance is profiled out, so the optimizer minimizes
/// `(n/2) log(mean squared residual)` over the causal-invertible region,
/// from a Hannan-Rissanen start plus jittered restarts.
pub fn fit(series: &Series, p: usize, q: usize, opts: &FitOptions) -> Result<ArmaFit> {
    let n = series.len();
    if n <= 10 * (p + q + 1) {
        return Err(Error::InsufficientData {
            n,
            needed: format!(
                "ARMA({p},{q}) needs more than {} observations",
                10 * (p + q + 1)
            ),
        });
    }
    let mean = series.mean();
    let centered = series.centered();
    let x = centered.values();
    if centered.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSeries("constant series"));
    }

    let objective = |beta: &[f64]| conditional_objective(x, p, beta).0;
    let best = if p + q == 0 {
        Some((Vec::new(), objective(&[]), true))
    } else {
        let mut base = initial_guess(x, p, q);
        pull_inside(&mut base, p);
        let mut rng = opts.seed.rng();
        let optimizer = NelderMead {
            tol: opts.tol,
            max_iter: opts.max_iter,
            initial_step: 0.1,
        };
        let mut best: Option<(Vec<f64>, f64, bool)> = None;
        for attempt in 0..opts.restarts.max(1) {
            let mut start = base.clone();
            if attempt > 0 {
                start
                    .iter_mut()
                    .for_each(|b| *b += rng.random_range(-0.2..0.2));
                pull_inside(&mut start, p);
            }
            let Ok(mut run) = optimizer.minimize(objective, &start) else {
                continue;
            };
            if run.converged {
                // fresh simplex at the optimum guards against early collapse
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
                best = Some((run.argmin, run.objective_value, true));
            }
        }
        best
    };

    let (beta, objective_value, converged) = best.ok_or_else(|| {
        Error::FitDiverged(format!(
            "ARMA({p},{q}) optimizer failed from all {} starts",
            opts.restarts.max(1)
        ))
    })?;
    let (_, sigma2) = conditional_objective(x, p, &beta);
    let model = ArmaModel::new(beta[..p].to_vec(), beta[p..].to_vec(), sigma2)?;
    let residuals = Series::new(residual_filter(x, &model))?;
    let nf = n as f64;
    let loglik = -0.5 * nf * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
    Ok(ArmaFit {
        model,
        residuals,
        mean,
        objective_value,
        loglik,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::draw_normal;
    use proptest::prelude::*;

    fn reference_model() -> ArmaModel {
        ArmaModel::new(vec![1.2, -0.32], vec![-0.2, -0.48], 1.0).unwrap()
    }

    /// Direct truncated pi-sum, the definition the recursion must match.
    fn residuals_by_pi_sum(x: &[f64], model: &ArmaModel) -> Vec<f64> {
        let pi = pi_coeffs(model, x.len()).unwrap();
        (0..x.len())
            .map(|t| (0..=t).map(|j| pi[j] * x[t - j]).sum())
            .collect()
    }

    #[test]
    fn validity_flags() {
        let v = reference_model().validate();
        assert!(v.causal && v.invertible);
        assert!(
            !ArmaModel::new(vec![1.67], vec![], 1.0)
                .unwrap()
                .validate()
                .causal
        );
        let white = ArmaModel::new(vec![], vec![], 1.0).unwrap().validate();
        assert!(white.causal && white.invertible);
        assert!(
            !ArmaModel::new(vec![], vec![-1.25], 1.0)
                .unwrap()
                .validate()
                .invertible
        );
    }

    #[test]
    fn reference_polynomial_roots() {
        use crate::numerics::poly_roots;
        let m = reference_model();
        let mut ar: Vec<f64> = poly_roots(&m.ar_polynomial())
            .unwrap()
            .iter()
            .map(|r| r.re)
            .collect();
        let mut ma: Vec<f64> = poly_roots(&m.ma_polynomial())
            .unwrap()
            .iter()
            .map(|r| r.re)
            .collect();
        ar.sort_by(f64::total_cmp);
        ma.sort_by(f64::total_cmp);
        assert!((ar[0] - 1.25).abs() < 1e-10 && (ar[1] - 2.5).abs() < 1e-10);
        assert!((ma[0] + 5.0 / 3.0).abs() < 1e-10 && (ma[1] - 1.25).abs() < 1e-10);
    }

    #[test]
    fn pi_coeffs_long_division() {
        let m = ArmaModel::new(vec![0.5], vec![0.4], 1.0).unwrap();
        let pi = pi_coeffs(&m, 3).unwrap();
        let expected = [1.0, -0.9, 0.36, -0.144];
        for (a, b) in pi.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let ar = ArmaModel::new(vec![0.3, -0.2], vec![], 1.0).unwrap();
        assert_eq!(pi_coeffs(&ar, 4).unwrap(), vec![1.0, -0.3, 0.2, 0.0, 0.0]);
        let bad = ArmaModel::new(vec![], vec![2.0], 1.0).unwrap();
        assert!(matches!(pi_coeffs(&bad, 3), Err(Error::NotInvertible)));
    }

    #[test]
    fn pi_coeffs_decay_for_reference_model() {
        let pi = pi_coeffs(&reference_model(), 50).unwrap();
        assert!(pi[50].abs() < 1e-4);
        // MA roots have modulus >= 1.25, so |pi_j| <= C * 0.8^j
        let partial: f64 = pi.iter().map(|v| v.abs()).sum();
        assert!(partial.is_finite() && partial < 10.0);
        let tail: f64 = pi[40..].iter().map(|v| v.abs()).sum();
        assert!(tail < 1e-3);
    }

    #[test]
    fn white_noise_simulation_is_the_innovations() {
        let m = ArmaModel::new(vec![], vec![], 1.0).unwrap();
        let seed = RngSeed::new(5);
        let x = simulate(&m, 100, &Innovations::standard_normal(), 20, &seed).unwrap();
        let z = draw_normal(120, &seed);
        assert_eq!(x.values(), &z[20..]);
        assert_eq!(
            x,
            simulate(&m, 100, &Innovations::standard_normal(), 20, &seed).unwrap()
        );
    }

    #[test]
    fn simulate_rejects_invalid_models() {
        let law = Innovations::standard_normal();
        let seed = RngSeed::new(1);
        let nc = ArmaModel::new(vec![1.67], vec![], 1.0).unwrap();
        assert!(matches!(
            simulate(&nc, 10, &law, 0, &seed),
            Err(Error::NotCausal)
        ));
        let ni = ArmaModel::new(vec![], vec![1.5], 1.0).unwrap();
        assert!(matches!(
            simulate(&ni, 10, &law, 0, &seed),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn noncausal_recursion_recovers_innovations() {
        let seed = RngSeed::new(9);
        let (n, horizon) = (300, 500);
        let x = simulate_noncausal_ar1(1.67, n, 2.5, horizon, &seed).unwrap();
        let z = crate::numerics::draw_student_t(2.5, n + horizon, &seed).unwrap();
        for t in 1..n {
            assert!((x[t] - 1.67 * x[t - 1] - z[t]).abs() < 1e-8);
        }
        assert_eq!(
            x,
            simulate_noncausal_ar1(1.67, n, 2.5, horizon, &seed).unwrap()
        );
        assert!(matches!(
            simulate_noncausal_ar1(0.9, n, 2.5, horizon, &seed),
            Err(Error::NotNoncausal(_))
        ));
    }

    #[test]
    fn ar1_residuals_two_term_filter() {
        let m = ArmaModel::new(vec![0.6], vec![], 1.0).unwrap();
        let x = Series::new(vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        let z = residuals(&x, &m).unwrap();
        assert_eq!(z[0], 1.0);
        for t in 1..4 {
            assert!((z[t] - (x[t] - 0.6 * x[t - 1])).abs() < 1e-15);
        }
        let white = ArmaModel::new(vec![], vec![], 1.0).unwrap();
        assert_eq!(residuals(&x, &white).unwrap(), x);
    }

    #[test]
    fn residuals_recover_innovations_after_transient() {
        let m = reference_model();
        let seed = RngSeed::new(21);
        let burn = 500;
        let x = simulate(&m, 1000, &Innovations::standard_normal(), burn, &seed).unwrap();
        let z = draw_normal(burn + 1000, &seed);
        let zhat = residuals(&x, &m).unwrap();
        let err_at = |t: usize| (zhat[t] - z[burn + t]).abs();
        // the start-up error decays like 0.8^t
        assert!(err_at(300) < 1e-10);
        assert!(err_at(20) > err_at(300));
    }

    #[test]
    fn white_noise_fit() {
        let x: Vec<f64> = (0..200)
            .map(|i| if i % 2 == 0 { 1.5 } else { -1.5 } * ((i % 7) as f64 + 1.0))
            .collect();
        let s = Series::new(x.clone()).unwrap();
        let f = fit(&s, 0, 0, &FitOptions::default()).unwrap();
        let mean = x.iter().sum::<f64>() / 200.0;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 200.0;
        assert!((f.mean - mean).abs() < 1e-12);
        assert!((f.model.sigma2 - var).abs() < 1e-10 * var);
        for (a, b) in f.residuals.iter().zip(&x) {
            assert!((a - (b - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_rejects_short_series() {
        let s = draw_normal(10, &RngSeed::new(1));
        assert!(matches!(
            fit(&s, 1, 0, &FitOptions::default()),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn ar1_fit_recovers_coefficient() {
        let m = ArmaModel::new(vec![0.6], vec![], 1.0).unwrap();
        let x = simulate(
            &m,
            2000,
            &Innovations::standard_normal(),
            500,
            &RngSeed::new(3),
        )
        .unwrap();
        let f = fit(&x, 1, 0, &FitOptions::default()).unwrap();
        assert!(f.converged);
        assert!((f.model.phi[0] - 0.6).abs() < 0.05, "{:?}", f.model);
        assert!((f.model.sigma2 - 1.0).abs() < 0.1);
        assert!(f.model.validate().is_valid());
        assert_eq!(f.residuals.len(), 2000);
    }

    #[test]
    fn fit_is_location_equivariant() {
        let m = ArmaModel::new(vec![0.5], vec![0.3], 1.0).unwrap();
        let x = simulate(
            &m,
            800,
            &Innovations::standard_normal(),
            500,
            &RngSeed::new(8),
        )
        .unwrap();
        let shifted = Series::new(x.iter().map(|v| v + 7.5).collect()).unwrap();
        let a = fit(&x, 1, 1, &FitOptions::default()).unwrap();
        let b = fit(&shifted, 1, 1, &FitOptions::default()).unwrap();
        assert!((a.model.phi[0] - b.model.phi[0]).abs() < 1e-5);
        assert!((a.model.theta[0] - b.model.theta[0]).abs() < 1e-5);
    }

    #[test]
    fn refit_on_model_data_recovers_parameters() {
        let m = ArmaModel::new(vec![0.5], vec![0.3], 1.0).unwrap();
        let x = simulate(
            &m,
            2000,
            &Innovations::standard_normal(),
            500,
            &RngSeed::new(12),
        )
        .unwrap();
        let fitted = fit(&x, 1, 1, &FitOptions::default()).unwrap();
        let dist = crate::numerics::make_empirical(&fitted.residuals, false).unwrap();
        let xs = simulate(
            &fitted.model,
            2000,
            &Innovations::Empirical(dist),
            500,
            &RngSeed::new(13),
        )
        .unwrap();
        let refit = fit(&xs, 1, 1, &FitOptions::default()).unwrap();
        // Monte Carlo standard errors are about 0.03 at n = 2000
        assert!((refit.model.phi[0] - fitted.model.phi[0]).abs() < 0.12);
        assert!((refit.model.theta[0] - fitted.model.theta[0]).abs() < 0.12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn theta_times_pi_reproduces_phi(
            phi in prop::collection::vec(-0.4f64..0.4, 0..3),
            theta in prop::collection::vec(-0.4f64..0.4, 0..3),
        ) {
            let m = ArmaModel::new(phi.clone(), theta.clone(), 1.0).unwrap();
            let pi = pi_coeffs(&m, 30).unwrap();
            let th: Vec<f64> = std::iter::once(1.0).chain(theta.iter().copied()).collect();
            for k in 0..=30 {
                let conv: f64 = (0..=k.min(th.len() - 1)).map(|i| th[i] * pi[k - i]).sum();
                let target = if k == 0 { 1.0 } else if k <= phi.len() { -phi[k - 1] } else { 0.0 };
                prop_assert!((conv - target).abs() < 1e-12);
            }
        }

        #[test]
        fn recursion_matches_pi_sum(
            phi in prop::collection::vec(-0.45f64..0.45, 0..3),
            theta in prop::collection::vec(-0.45f64..0.45, 0..3),
            x in prop::collection::vec(-5.0f64..5.0, 1..80),
        ) {
            let m = ArmaModel::new(phi, theta, 1.0).unwrap();
            let direct = residuals_by_pi_sum(&x, &m);
            let fast = residuals(&Series::new(x).unwrap(), &m).unwrap();
            for (a, b) in direct.iter().zip(fast.iter()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
