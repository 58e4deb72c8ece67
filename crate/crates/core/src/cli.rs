//! Command-line front end.
//!
//! Input data is a single-column CSV with a header line. Tables are written
//! as CSV, summaries as JSON. Floats are rounded to 12 significant digits and
//! then printed in shortest round-trip form, so output is byte-stable for a
//! fixed seed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arma::{self, ArmaModel};
use crate::bootstrap::{
    gof_test, mc_band_study, Band, BootstrapConfig, ModelSpec, Statistic, StudyModel,
};
use crate::dcov::{adcv_curve, WeightMeasure};
use crate::error::{Error, Result};
use crate::garch::{self, GarchModel};
use crate::numerics::{FitOptions, Innovations, RngSeed};
use crate::series::Series;

/// Environment variable capping the bootstrap worker count.
pub const THREADS_ENV: &str = "ADCV_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "adcv",
    version,
    about = "Residual ADCV/ADCF goodness-of-fit tests for ARMA and GARCH models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a series and write it as single-column CSV.
    Simulate(SimulateArgs),
    /// Fit a model and print a JSON summary.
    Fit(FitArgs),
    /// ADCV and ADCF of a series for lags 1..H.
    Adcf(AdcfArgs),
    /// Bootstrap goodness-of-fit test of a fitted model.
    Gof(GofArgs),
    /// Monte Carlo quantile bands: iid, residual and bootstrap panels.
    Bands(BandsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Arma,
    Ar,
    Garch,
    #[value(name = "noncausal-ar1")]
    NoncausalAr1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InnovationKind {
    Normal,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Adcf,
    Adcv,
}

impl From<StatisticArg> for Statistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::Adcf => Statistic::Adcf,
            StatisticArg::Adcv => Statistic::Adcv,
        }
    }
}

/// True-model parameters for simulation.
#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// AR coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    /// MA coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// ARMA innovation variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// GARCH ARCH coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// GARCH GARCH coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = InnovationKind::Normal)]
    pub innovations: InnovationKind,
    /// Degrees of freedom for t innovations.
    #[arg(long)]
    pub df: Option<f64>,
    #[arg(long, default_value_t = arma::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// Future innovations drawn by the non-causal generator.
    #[arg(long, default_value_t = 500)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Model class to fit.
#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub q: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Bandwidth of the Gaussian weight measure.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Separate bandwidth for the lagged coordinate; defaults to `--sigma`.
    #[arg(long)]
    pub sigma_t: Option<f64>,
    /// Largest lag.
    #[arg(short = 'H', long, default_value_t = 20)]
    pub max_lag: usize,
}

impl MeasureArgs {
    fn measure(&self) -> Result<WeightMeasure> {
        WeightMeasure::new(self.sigma, self.sigma_t.unwrap_or(self.sigma))
    }
}

#[derive(Debug, Args)]
pub struct AdcfArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Bootstrap replicates.
    #[arg(short = 'B', long, default_value_t = 500)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lo: f64,
    #[arg(long, default_value_t = 0.95)]
    pub hi: f64,
    #[arg(long, value_enum, default_value_t = StatisticArg::Adcf)]
    pub statistic: StatisticArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub boot: BootstrapArgs,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Monte Carlo repetitions for the iid and residual panels.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub boot: BootstrapArgs,
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::LagTooLarge { .. } | Error::InvalidParameter(_) => 2,
        Error::NotCausal
        | Error::NotInvertible
        | Error::NotNoncausal(_)
        | Error::UnsupportedOrder { .. }
        | Error::InvalidModel(_) => 3,
        Error::FitDiverged(_)
        | Error::InsufficientData { .. }
        | Error::NonFiniteObjective
        | Error::NoConvergence(_) => 4,
        Error::Io(_) | Error::Parse { .. } | Error::EmptySeries | Error::NonFinite(_) => 5,
        Error::DegenerateSeries(_) => 6,
        Error::DropRateExceeded { .. } => 7,
        Error::Internal(_) => 1,
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// round-trips the rounded value.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if rounded == 0.0 || (1e-5..1e16).contains(&a) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// Reads a single-column CSV. The first line is a header unless it parses
/// as a number; blank lines are ignored.
pub fn read_series(path: &Path) -> Result<Series> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("{field:?}: {e}"),
                })
            }
        }
    }
    Series::new(values)
}

pub fn write_series(series: &Series, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "x")?;
    for v in series.iter() {
        writeln!(out, "{}", format_float(*v))?;
    }
    Ok(())
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::InvalidParameter(format!(
                "{THREADS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn with_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = io::BufWriter::new(fs::File::create(p)?);
            body(&mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Serializes to pretty JSON with every float passed through
/// [`format_float`].
fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    let v = serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))?;
    let v = round_json(v);
    serde_json::to_writer_pretty(&mut *out, &v).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn round_json(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format_float(x).parse().expect("formatted float parses");
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

impl ParamArgs {
    fn arma_innovations(&self) -> Result<Innovations> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        match self.innovations {
            InnovationKind::Normal => Ok(Innovations::Normal {
                sd: self.sigma2.sqrt(),
            }),
            InnovationKind::T => match Innovations::standardized_t(self.require_df()?)? {
                Innovations::StudentT { df, scale } => Ok(Innovations::StudentT {
                    df,
                    scale: scale * self.sigma2.sqrt(),
                }),
                other => Ok(other),
            },
        }
    }

    fn unit_innovations(&self) -> Result<Innovations> {
        match self.innovations {
            InnovationKind::Normal => Ok(Innovations::standard_normal()),
            InnovationKind::T => Innovations::standardized_t(self.require_df()?),
        }
    }

    fn require_df(&self) -> Result<f64> {
        self.df
            .ok_or_else(|| Error::InvalidParameter("--df is required for t innovations".into()))
    }

    fn arma_model(&self) -> Result<ArmaModel> {
        if self.model == ModelKind::Ar && !self.theta.is_empty() {
            return Err(Error::InvalidParameter(
                "--theta is not allowed for an AR model".into(),
            ));
        }
        ArmaModel::new(self.phi.clone(), self.theta.clone(), self.sigma2)
    }

    fn garch_model(&self) -> Result<GarchModel> {
        let alpha0 = self
            .alpha0
            .ok_or_else(|| Error::InvalidParameter("--alpha0 is required for GARCH".into()))?;
        let m = GarchModel::new(alpha0, self.alpha.clone(), self.beta.clone());
        m.require_valid()?;
        Ok(m)
    }

    fn study_model(&self) -> Result<StudyModel> {
        match self.model {
            ModelKind::Arma | ModelKind::Ar => Ok(StudyModel::Arma(
                self.arma_model()?,
                self.arma_innovations()?,
            )),
            ModelKind::Garch => Ok(StudyModel::Garch(
                self.garch_model()?,
                self.unit_innovations()?,
            )),
            ModelKind::NoncausalAr1 => Err(Error::InvalidParameter(
                "band studies need a causal ARMA or a GARCH model".into(),
            )),
        }
    }

    fn simulate(&self, n: usize, seed: &RngSeed) -> Result<Series> {
        match self.model {
            ModelKind::NoncausalAr1 => {
                if self.phi.len() != 1 {
                    return Err(Error::InvalidParameter(
                        "noncausal-ar1 takes exactly one --phi value".into(),
                    ));
                }
                arma::simulate_noncausal_ar1(self.phi[0], n, self.require_df()?, self.horizon, seed)
            }
            ModelKind::Arma | ModelKind::Ar => arma::simulate(
                &self.arma_model()?,
                n,
                &self.arma_innovations()?,
                self.burn_in,
                seed,
            ),
            ModelKind::Garch => garch::simulate(
                &self.garch_model()?,
                n,
                &self.unit_innovations()?,
                self.burn_in,
                seed,
            ),
        }
    }
}

impl SpecArgs {
    fn spec(&self) -> Result<ModelSpec> {
        match self.model {
            ModelKind::Arma => Ok(ModelSpec::Arma {
                p: self.p,
                q: self.q,
            }),
            ModelKind::Ar => {
                if self.q != 0 {
                    return Err(Error::InvalidParameter("an AR model has q = 0".into()));
                }
                Ok(ModelSpec::Arma { p: self.p, q: 0 })
            }
            ModelKind::Garch => Ok(ModelSpec::Garch {
                p: self.p,
                q: self.q,
            }),
            ModelKind::NoncausalAr1 => Err(Error::InvalidParameter(
                "noncausal-ar1 is a generator only; fit it as --model ar".into(),
            )),
        }
    }
}

impl BootstrapArgs {
    fn config(&self) -> Result<BootstrapConfig> {
        let cfg = BootstrapConfig {
            replicates: self.replicates,
            max_lag: self.measure.max_lag,
            lo: self.lo,
            hi: self.hi,
            measure: self.measure.measure()?,
            seed: RngSeed::new(resolve_seed(self.seed)),
            statistic: self.statistic.into(),
            threads: threads_from_env()?,
            ..BootstrapConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    if args.n == 0 {
        return Err(Error::InvalidParameter("--n must be positive".into()));
    }
    let seed = resolve_seed(args.seed);
    let x = args.params.simulate(args.n, &RngSeed::new(seed))?;
    with_output(args.out.as_deref(), |out| write_series(&x, out))
}

fn run_fit(args: &FitArgs) -> Result<()> {
    let spec = args.spec.spec()?;
    let x = read_series(&args.data)?;
    let opts = FitOptions {
        seed: RngSeed::new(args.seed),
        ..FitOptions::default()
    };
    let fitted = spec.fit(&x, &opts)?;
    with_output(args.out.as_deref(), |out| {
        write_json(&fitted.summary(), out)
    })
}

fn run_adcf(args: &AdcfArgs) -> Result<()> {
    let x = read_series(&args.data)?;
    let curve = adcv_curve(&x, args.measure.max_lag, &args.measure.measure()?)?;
    with_output(args.out.as_deref(), |out| {
        writeln!(out, "lag,adcv,adcf,n_pairs")?;
        for r in &curve {
            writeln!(
                out,
                "{},{},{},{}",
                r.lag,
                format_float(r.t_stat),
                format_float(r.r_stat),
                r.n_pairs
            )?;
        }
        Ok(())
    })
}

fn run_gof(args: &GofArgs) -> Result<()> {
    let spec = args.spec.spec()?;
    let x = read_series(&args.data)?;
    let cfg = args.boot.config()?;
    let report = gof_test(&x, spec, &cfg)?;
    with_output(args.boot.out.as_deref(), |out| match args.boot.format {
        Format::Json => write_json(&report, out),
        Format::Csv => {
            writeln!(out, "lag,lo,hi,observed,p_value,reject")?;
            for r in &report.bands.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.lag,
                    format_float(r.lo),
                    format_float(r.hi),
                    format_float(r.observed),
                    format_float(r.p_value),
                    r.reject
                )?;
            }
            Ok(())
        }
    })
}

fn run_bands(args: &BandsArgs) -> Result<()> {
    let model = args.params.study_model()?;
    let mut cfg = args.boot.config()?;
    cfg.burn_in = args.params.burn_in;
    let study = mc_band_study(&model, args.n, args.reps, &cfg)?;
    with_output(args.boot.out.as_deref(), |out| match args.boot.format {
        Format::Json => write_json(&study, out),
        Format::Csv => {
            writeln!(out, "panel,lag,lo,hi")?;
            let boot: Vec<Band> = study
                .bootstrap
                .bands
                .rows
                .iter()
                .map(|r| Band {
                    lag: r.lag,
                    lo: r.lo,
                    hi: r.hi,
                })
                .collect();
            for (panel, bands) in [
                ("iid", &study.iid),
                ("residual", &study.residual),
                ("bootstrap", &boot),
            ] {
                for b in bands {
                    writeln!(
                        out,
                        "{panel},{},{},{}",
                        b.lag,
                        format_float(b.lo),
                        format_float(b.hi)
                    )?;
                }
            }
            Ok(())
        }
    })
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Fit(a) => run_fit(a),
        Command::Adcf(a) => run_adcf(a),
        Command::Gof(a) => run_gof(a),
        Command::Bands(a) => run_bands(a),
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
