//! Experiment orchestration behind the `syncgrid` command line: presets and
//! config files, multi-seed training with CSV/JSON outputs, exact MST
//! verification and checkpoint playback.

mod config;
pub mod csv;
mod render;
mod run;
mod verify;

pub use config::{ExperimentConfig, DEFAULT_PRESET, PRESETS};
pub use render::render;
pub use run::{
    checkpoint_dir, load_checkpoint, metrics_path, run, save_checkpoint, sweep, worker_count,
    Manifest, RunSummary, SeedSummary, THREADS_VAR,
};
pub use verify::{verify, VerifyReport, WitnessReport};
