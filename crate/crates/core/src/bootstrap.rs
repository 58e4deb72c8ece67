//! Parametric-bootstrap calibration of residual ADCV/ADCF curves.
//!
//! The null law of a residual statistic is approximated by simulating from
//! the fitted model with resampled (mean-corrected) residuals, refitting the
//! same model class to each simulated path, and recomputing the statistic on
//! the refitted residuals. Replicate `i` draws only from stream `i` of a
//! seed family, so the replicate matrix does not depend on how the work is
//! scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arma::{self, ArmaFit, ArmaModel};
use crate::dcov::{adcv_curve, AdcvResult, WeightMeasure};
use crate::error::{Error, Result};
use crate::garch::{self, GarchFit, GarchModel};
use crate::numerics::{make_empirical, FitOptions, Innovations, RngSeed};
use crate::series::Series;

/// Largest tolerated fraction of replicates whose refit fails.
pub const MAX_DROP_RATE: f64 = 0.05;

const TAG_FIT: u64 = 1;
const TAG_REPLICATE: u64 = 2;
const TAG_IID: u64 = 3;
const TAG_RESIDUAL: u64 = 4;
const TAG_REALIZATION: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Adcv,
    Adcf,
}

impl Statistic {
    pub fn pick(&self, r: &AdcvResult) -> f64 {
        match self {
            Statistic::Adcv => r.t_stat,
            Statistic::Adcf => r.r_stat,
        }
    }
}

/// Model class to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Arma { p: usize, q: usize },
    Garch { p: usize, q: usize },
}

impl ModelSpec {
    pub fn orders(&self) -> (usize, usize) {
        match *self {
            ModelSpec::Arma { p, q } | ModelSpec::Garch { p, q } => (p, q),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Arma { .. } => "arma",
            ModelSpec::Garch { .. } => "garch",
        }
    }

    pub fn fit(&self, series: &Series, opts: &FitOptions) -> Result<FittedModel> {
        Ok(match *self {
            ModelSpec::Arma { p, q } => FittedModel::Arma(arma::fit(series, p, q, opts)?),
            ModelSpec::Garch { p, q } => FittedModel::Garch(garch::fit(series, p, q, opts)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FittedModel {
    Arma(ArmaFit),
    Garch(GarchFit),
}

impl FittedModel {
    pub fn residuals(&self) -> &Series {
        match self {
            FittedModel::Arma(f) => &f.residuals,
            FittedModel::Garch(f) => &f.residuals,
        }
    }

    pub fn spec(&self) -> ModelSpec {
        match self {
            FittedModel::Arma(f) => ModelSpec::Arma {
                p: f.model.p(),
                q: f.model.q(),
            },
            FittedModel::Garch(f) => ModelSpec::Garch {
                p: f.model.p(),
                q: f.model.q(),
            },
        }
    }

    /// Innovation law for resampling: mean-corrected residuals, additionally
    /// scaled to unit variance for GARCH.
    pub fn bootstrap_innovations(&self) -> Result<Innovations> {
        let rescale = matches!(self, FittedModel::Garch(_));
        Ok(Innovations::Empirical(make_empirical(
            self.residuals(),
            rescale,
        )?))
    }

    pub fn simulate(
        &self,
        n: usize,
        innovations: &Innovations,
        burn_in: usize,
        seed: &RngSeed,
    ) -> Result<Series> {
        match self {
            FittedModel::Arma(f) => arma::simulate(&f.model, n, innovations, burn_in, seed),
            FittedModel::Garch(f) => garch::simulate(&f.model, n, innovations, burn_in, seed),
        }
    }

    pub fn summary(&self) -> FitSummary {
        match self {
            FittedModel::Arma(f) => FitSummary {
                model_kind: "arma".into(),
                orders: [f.model.p(), f.model.q()],
                coefficients: Coefficients::Arma {
                    phi: f.model.phi.clone(),
                    theta: f.model.theta.clone(),
                },
                sigma2: Some(f.model.sigma2),
                alpha0: None,
                mean: Some(f.mean),
                converged: f.converged,
                loglik: f.loglik,
                n: f.residuals.len(),
            },
            FittedModel::Garch(f) => FitSummary {
                model_kind: "garch".into(),
                orders: [f.model.p(), f.model.q()],
                coefficients: Coefficients::Garch {
                    alpha: f.model.alpha.clone(),
                    beta: f.model.beta.clone(),
                },
                sigma2: None,
                alpha0: Some(f.model.alpha0),
                mean: None,
                converged: f.converged,
                loglik: f.loglik,
                n: f.residuals.len(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    Arma { phi: Vec<f64>, theta: Vec<f64> },
    Garch { alpha: Vec<f64>, beta: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub model_kind: String,
    pub orders: [usize; 2],
    pub coefficients: Coefficients,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    pub converged: bool,
    pub loglik: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub max_lag: usize,
    pub lo: f64,
    pub hi: f64,
    pub measure: WeightMeasure,
    pub seed: RngSeed,
    pub statistic: Statistic,
    pub burn_in: usize,
    pub fit: FitOptions,
    /// Worker threads; `None` uses the global pool. Never affects output.
    pub threads: Option<usize>,
    /// Keep the full replicate matrix in the report.
    pub keep_replicates: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 500,
            max_lag: 20,
            lo: 0.05,
            hi: 0.95,
            measure: WeightMeasure::default(),
            seed: RngSeed::new(0),
            statistic: Statistic::Adcf,
            burn_in: 500,
            fit: FitOptions::default(),
            threads: None,
            keep_replicates: false,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 50 {
            return Err(Error::InvalidParameter(format!(
                "need at least 50 bootstrap replicates, got {}",
                self.replicates
            )));
        }
        if self.max_lag == 0 {
            return Err(Error::InvalidParameter("max_lag must be at least 1".into()));
        }
        if !(0.0 < self.lo && self.lo < self.hi && self.hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quantile levels must satisfy 0 < lo < hi < 1, got ({}, {})",
                self.lo, self.hi
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be positive".into()));
        }
        Ok(())
    }

    fn run<T, F>(&self, f: F) -> Result<T>
    where
        T: Send,
        F: FnOnce() -> T + Send,
    {
        match self.threads {
            None => Ok(f()),
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

fn statistic_row(series: &Series, config: &BootstrapConfig) -> Result<Vec<f64>> {
    Ok(adcv_curve(series, config.max_lag, &config.measure)?
        .iter()
        .map(|r| config.statistic.pick(r))
        .collect())
}

/// Runs replicate jobs `0..count` in parallel, dropping those whose fit
/// fails and aborting when more than [`MAX_DROP_RATE`] are dropped.
fn collect_rows<F>(config: &BootstrapConfig, count: usize, job: F) -> Result<(Vec<Vec<f64>>, usize)>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let outcomes: Vec<Result<Option<Vec<f64>>>> = config.run(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|i| match job(i) {
                Ok(row) => Ok(Some(row)),
                Err(Error::FitDiverged(msg)) => {
                    log::warn!("replicate {i} dropped: {msg}");
                    Ok(None)
                }
                Err(e) => Err(e),
            })
            .collect()
    })?;
    let mut rows = Vec::with_capacity(count);
    let mut dropped = 0;
    for outcome in outcomes {
        match outcome? {
            Some(row) => rows.push(row),
            None => dropped += 1,
        }
    }
    if dropped as f64 > MAX_DROP_RATE * count as f64 {
        return Err(Error::DropRateExceeded {
            dropped,
            total: count,
        });
    }
    Ok((rows, dropped))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapOutput {
    pub fit: FittedModel,
    pub observed: Vec<AdcvResult>,
    /// One row per retained replicate, one column per lag.
    pub replicates: Vec<Vec<f64>>,
    pub dropped: usize,
}

/// Fit, resample, refit and recompute the residual statistic curve.
pub fn parametric_bootstrap(
    series: &Series,
    spec: ModelSpec,
    config: &BootstrapConfig,
) -> Result<BootstrapOutput> {
    config.validate()?;
    let fit_opts = FitOptions {
        seed: config.seed.derive(TAG_FIT),
        ..config.fit.clone()
    };
    let fitted = spec.fit(series, &fit_opts)?;
    let observed = adcv_curve(fitted.residuals(), config.max_lag, &config.measure)?;
    let innovations = fitted.bootstrap_innovations()?;
    let family = config.seed.derive(TAG_REPLICATE);
    let n = series.len();

    let (replicates, dropped) = collect_rows(config, config.replicates, |i| {
        let stream = family.stream(i);
        let path = fitted.simulate(n, &innovations, config.burn_in, &stream)?;
        let opts = FitOptions {
            seed: stream.derive(TAG_FIT),
            ..config.fit.clone()
        };
        let refit = spec.fit(&path, &opts)?;
        statistic_row(refit.residuals(), config)
    })
    .map_err(|e| match e {
        Error::FitDiverged(msg) => Error::FitDiverged(format!("replicate: {msg}")),
        other => other,
    })?;

    Ok(BootstrapOutput {
        fit: fitted,
        observed,
        replicates,
        dropped,
    })
}

fn sorted_column(replicates: &[Vec<f64>], lag: usize) -> Vec<f64> {
    let mut col: Vec<f64> = replicates.iter().map(|r| r[lag]).collect();
    col.sort_by(f64::total_cmp);
    col
}

/// Order statistic `ceil(B * level)` (1-based) of a sorted sample.
pub fn empirical_quantile(sorted: &[f64], level: f64) -> f64 {
    let b = sorted.len();
    let rank = ((b as f64 * level) - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(b) - 1]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lag: usize,
    pub lo: f64,
    pub hi: f64,
}

/// Per-lag type-1 empirical quantiles of the replicate matrix.
pub fn quantile_bands(replicates: &[Vec<f64>], lo: f64, hi: f64) -> Vec<Band> {
    let lags = replicates.first().map_or(0, Vec::len);
    (0..lags)
        .map(|h| {
            let col = sorted_column(replicates, h);
            Band {
                lag: h + 1,
                lo: empirical_quantile(&col, lo),
                hi: empirical_quantile(&col, hi),
            }
        })
        .collect()
}

/// Monte Carlo p-values `(1 + #{replicate >= observed}) / (B + 1)`.
pub fn pvalues(replicates: &[Vec<f64>], observed: &[f64]) -> Vec<f64> {
    let b = replicates.len() as f64;
    observed
        .iter()
        .enumerate()
        .map(|(h, &obs)| {
            let exceed = replicates.iter().filter(|r| r[h] >= obs).count();
            (1.0 + exceed as f64) / (b + 1.0)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub lag: usize,
    pub lo: f64,
    pub hi: f64,
    pub observed: f64,
    pub p_value: f64,
    /// `observed > hi`.
    pub reject: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandResult {
    pub rows: Vec<BandRow>,
    /// Replicates retained after drops.
    pub replicates: usize,
    pub n: usize,
    pub model: String,
    pub statistic: Statistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxOverLags {
    pub observed: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub fit: FitSummary,
    pub bands: BandResult,
    /// Observed ADCV and ADCF of the fitted residuals.
    pub observed_curve: Vec<AdcvResult>,
    /// Largest statistic over lags, referred to the replicate row maxima.
    /// Not calibrated beyond the per-lag tests.
    pub max_over_lags: MaxOverLags,
    pub dropped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicate_matrix: Option<Vec<Vec<f64>>>,
}

/// Bootstrap goodness-of-fit test of `spec` on `series`.
pub fn gof_test(series: &Series, spec: ModelSpec, config: &BootstrapConfig) -> Result<GofReport> {
    let out = parametric_bootstrap(series, spec, config)?;
    let observed: Vec<f64> = out
        .observed
        .iter()
        .map(|r| config.statistic.pick(r))
        .collect();
    let bands = quantile_bands(&out.replicates, config.lo, config.hi);
    let p = pvalues(&out.replicates, &observed);
    let rows: Vec<BandRow> = bands
        .iter()
        .zip(&observed)
        .zip(&p)
        .map(|((b, &obs), &p_value)| BandRow {
            lag: b.lag,
            lo: b.lo,
            hi: b.hi,
            observed: obs,
            p_value,
            reject: obs > b.hi,
        })
        .collect();

    let row_max = |r: &[f64]| r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_obs = row_max(&observed);
    let maxima: Vec<Vec<f64>> = out.replicates.iter().map(|r| vec![row_max(r)]).collect();
    let max_p = pvalues(&maxima, &[max_obs])[0];

    let (p_ord, q_ord) = spec.orders();
    Ok(GofReport {
        fit: out.fit.summary(),
        bands: BandResult {
            rows,
            replicates: out.replicates.len(),
            n: series.len(),
            model: format!("{}({p_ord},{q_ord})", spec.kind()),
            statistic: config.statistic,
        },
        observed_curve: out.observed,
        max_over_lags: MaxOverLags {
            observed: max_obs,
            p_value: max_p,
        },
        dropped: out.dropped,
        replicate_matrix: config.keep_replicates.then_some(out.replicates),
    })
}

/// True model and innovation law for a Monte Carlo band study.
#[derive(Clone, Debug, PartialEq)]
pub enum StudyModel {
    Arma(ArmaModel, Innovations),
    Garch(GarchModel, Innovations),
}

impl StudyModel {
    fn spec(&self) -> ModelSpec {
        match self {
            StudyModel::Arma(m, _) => ModelSpec::Arma { p: m.p(), q: m.q() },
            StudyModel::Garch(m, _) => ModelSpec::Garch { p: m.p(), q: m.q() },
        }
    }

    fn innovations(&self) -> &Innovations {
        match self {
            StudyModel::Arma(_, z) | StudyModel::Garch(_, z) => z,
        }
    }

    pub fn simulate(&self, n: usize, burn_in: usize, seed: &RngSeed) -> Result<Series> {
        match self {
            StudyModel::Arma(m, z) => arma::simulate(m, n, z, burn_in, seed),
            StudyModel::Garch(m, z) => garch::simulate(m, n, z, burn_in, seed),
        }
    }
}

/// Statistic curves of `reps` fresh iid innovation samples of length `n`.
pub fn iid_curves(
    model: &StudyModel,
    n: usize,
    reps: usize,
    config: &BootstrapConfig,
) -> Result<Vec<Vec<f64>>> {
    let family = config.seed.derive(TAG_IID);
    let (rows, _) = collect_rows(config, reps, |i| {
        let z = model.innovations().draw(&mut family.stream(i).rng(), n)?;
        statistic_row(&Series::new(z)?, config)
    })?;
    Ok(rows)
}

/// Statistic curves of refitted residuals from `reps` independent
/// simulations of the true model.
pub fn residual_curves(
    model: &StudyModel,
    n: usize,
    reps: usize,
    config: &BootstrapConfig,
) -> Result<Vec<Vec<f64>>> {
    let family = config.seed.derive(TAG_RESIDUAL);
    let spec = model.spec();
    let (rows, _) = collect_rows(config, reps, |i| {
        let stream = family.stream(i);
        let x = model.simulate(n, config.burn_in, &stream)?;
        let opts = FitOptions {
            seed: stream.derive(TAG_FIT),
            ..config.fit.clone()
        };
        statistic_row(spec.fit(&x, &opts)?.residuals(), config)
    })?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStudy {
    /// Fresh iid innovations.
    pub iid: Vec<Band>,
    /// Refitted residuals from independent simulations.
    pub residual: Vec<Band>,
    /// Parametric bootstrap from a single realization.
    pub bootstrap: GofReport,
}

/// The three quantile-band panels: iid innovations, residuals across
/// independent simulations, and the bootstrap from one realization.
pub fn mc_band_study(
    model: &StudyModel,
    n: usize,
    reps: usize,
    config: &BootstrapConfig,
) -> Result<BandStudy> {
    config.validate()?;
    if reps < 100 {
        return Err(Error::InvalidParameter(format!(
            "band study needs at least 100 repetitions, got {reps}"
        )));
    }
    let iid = quantile_bands(&iid_curves(model, n, reps, config)?, config.lo, config.hi);
    let residual = quantile_bands(
        &residual_curves(model, n, reps, config)?,
        config.lo,
        config.hi,
    );
    let realization = model.simulate(n, config.burn_in, &config.seed.derive(TAG_REALIZATION))?;
    let bootstrap = gof_test(&realization, model.spec(), config)?;
    Ok(BandStudy {
        iid,
        residual,
        bootstrap,
    })
}
