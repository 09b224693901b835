//! Configuration-driven runs and sweeps on top of the `triphoton` library.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod presets;
pub mod sweep;

pub use config::{RunConfig, Source, SweepParameter};
pub use error::{CliError, ConfigError};
pub use pipeline::{config_hash, report_rate, run, RunSummary};
pub use sweep::{sweep, sweep_pulse_duration, sweep_pump_bandwidth, sweep_pump_wavelength, SweepTable};
