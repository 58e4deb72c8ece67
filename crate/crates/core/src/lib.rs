//! Goodness-of-fit testing for ARMA and GARCH models through the
//! auto-distance covariance (ADCV) and correlation (ADCF) of fitted
//! residuals, calibrated by a parametric bootstrap.
//!
//! ```
//! use adcv::{adcf, Series, WeightMeasure};
//!
//! let x = Series::new(vec![0.5, -1.2, 0.3, 2.0, -0.7, 0.1]).unwrap();
//! let r = adcf(&x, 1, &WeightMeasure::default()).unwrap();
//! assert!((0.0..=1.0).contains(&r));
//! ```

pub mod arma;
pub mod bootstrap;
pub mod cli;
pub mod dcov;
pub mod error;
pub mod garch;
pub mod numerics;
pub mod series;

pub use arma::{ArmaFit, ArmaModel};
pub use bootstrap::{
    gof_test, mc_band_study, parametric_bootstrap, pvalues, quantile_bands, BootstrapConfig,
    GofReport, ModelSpec, Statistic,
};
pub use dcov::{adcf, adcv, adcv_curve, AdcvResult, WeightMeasure};
pub use error::{Error, Result};
pub use garch::{GarchFit, GarchModel};
pub use numerics::{FitOptions, Innovations, RngSeed};
pub use series::Series;
