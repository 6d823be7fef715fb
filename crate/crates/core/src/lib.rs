//! Sensitivity analysis from the trajectories of first, second and third
//! derivatives of a single tanh unit's MSE loss with respect to each weight,
//! compared against Spearman rank correlation.

pub mod cli;
pub mod data;
pub mod error;
pub mod export;
pub mod jets;
pub mod model;
pub mod sensitivity;
pub mod stats;

pub use data::Dataset;
pub use error::{Error, Result};
pub use jets::Jet3;
pub use model::{GradientTrace, ModelParams, TrainConfig};
pub use sensitivity::{SensitivityReport, SurfaceSlice, TrendLabel};
