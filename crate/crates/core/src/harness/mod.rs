//! Experiment plumbing: preset catalog, TOML configs, scenario runs, α
//! sweeps and report files.

mod config;
mod presets;
mod report;
mod scenario;
mod sweep;

pub use config::{
    CertificateConfig, DataPolicy, DiagnosticsConfig, ExperimentConfig, GridConfig, InitialData, SimulationConfig,
    SweepAxes, CONFIG_VERSION,
};
pub use presets::{geometric, padded_grid, resolve_preset, BallSetup, DecaySetup, KernelSetup, Preset, PRESET_NAMES};
pub use report::{emit_report, record_file_name, sorted, ReportFiles, SUMMARY_HEADER};
pub use scenario::{
    certificate_block, certify, prepare, resolve_system, run_scenario, run_scenario_with, symmetry_pairs,
    system_diagnostics, CertificateBlock, CertifyReport, ConglSummary, DecayDiagnostics, ExperimentRecord,
    KernelDiagnostics, LemmaSummary, Prepared, ResolvedSystem, SimulationSummary, SystemDiagnostics, VolumeDiagnostics,
    WeisslerSummary, DIVERGENCE_HORIZON, TRIANGLE_SAMPLES,
};
pub use sweep::{bracket, sweep, Bracket, SweepOutcome, SweepPoint};

/// Environment variable naming the root directory for all outputs.
pub const OUTPUT_ROOT_ENV: &str = "FUJITA_OUTPUT_ROOT";

/// Output directory for `cfg`: `$FUJITA_OUTPUT_ROOT` (default `out`) joined
/// with the config's `output` entry or its label.
pub fn output_dir(cfg: &ExperimentConfig) -> std::path::PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_ENV)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| "out".into());
    root.join(cfg.output.clone().unwrap_or_else(|| cfg.label().into()))
}
