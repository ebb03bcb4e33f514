//! Experiment runner for the reciprocity-error model: JSON sweep configs,
//! figure presets, CSV and gnuplot output, and the self-validation suite.

pub mod config;
pub mod exec;
pub mod figures;
pub mod oracle;
pub mod output;
pub mod validate;
