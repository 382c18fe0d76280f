use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fujita_core::cc_geometry::{build_reach_graph, distance_resolution, BallProfile};
use fujita_core::harness::{
    certify, emit_report, output_dir, resolve_preset, run_scenario, sweep, symmetry_pairs, DataPolicy,
    ExperimentConfig, Preset, OUTPUT_ROOT_ENV,
};
use fujita_core::heat::io::{write_field, write_field_csv};
use fujita_core::heat::{assemble_operator, heat_kernel, kernel_mass, symmetry_residual, KernelConfig, Scheme};
use fujita_core::stats::log_log_fit;
use fujita_core::vf_algebra::{analyze, parse_system, VectorFieldSystem};
use fujita_core::{Error, GridSpec, Result};

#[derive(Parser)]
#[command(
    name = "fujita",
    version,
    about = "Fujita-type blow-up experiments for Hörmander sums of squares"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket rank, homogeneity, homogeneous dimension and Fujita exponent.
    Analyze {
        /// Preset name or path to a system file.
        system: String,
        /// Longest bracket considered (default: largest dilation weight).
        #[arg(long)]
        max_step: Option<usize>,
    },
    /// Carnot–Carathéodory ball volumes and their growth exponent.
    Ccball(CcballArgs),
    /// Heat kernel from a point, written as a binary field and CSV.
    Kernel(KernelArgs),
    /// Run one configuration and write the report files.
    Simulate(RunArgs),
    /// Certificates only; prints one JSON verdict block.
    Certify(RunArgs),
    /// Run the configured α (and amplitude) sweep.
    Sweep(RunArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    upper: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
}

impl GridArgs {
    fn resolve(&self, fallback: Option<&GridSpec>) -> Result<GridSpec> {
        match (&self.lower, &self.upper, &self.points, fallback) {
            (Some(l), Some(u), Some(p), _) => GridSpec::new(l.clone(), u.clone(), p.clone()),
            (None, None, None, Some(g)) => Ok(g.clone()),
            _ => Err(Error::Config("give all of --lower, --upper, --points".into())),
        }
    }
}

#[derive(Args)]
struct CcballArgs {
    /// Preset name or path to a system file.
    system: String,
    #[command(flatten)]
    grid: GridArgs,
    /// Flow length of one graph edge (default: preset value or smallest spacing).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    /// Output subdirectory below the output root.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    /// Preset name or path to a system file.
    system: String,
    /// Grid override; by default the preset kernel box dilated to `--time`.
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    time: Option<f64>,
    /// Source point (default: origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<f64>>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    implicit: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    config: PathBuf,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// `fixed` or `certified`.
    #[arg(long)]
    data_policy: Option<String>,
    #[arg(long)]
    max_change: Option<f64>,
    /// Skip the kernel, decay and volume diagnostics.
    #[arg(long)]
    no_diagnostics: bool,
}

impl RunArgs {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(p) = &self.preset {
            cfg.preset = Some(p.clone());
            cfg.system = None;
        }
        if let Some(a) = self.alpha {
            cfg = cfg.with_alpha(a)?;
        }
        if let Some(a) = self.amplitude {
            cfg = cfg.with_amplitude(a);
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        if let Some(p) = &self.data_policy {
            cfg.certificates.data_policy = match p.as_str() {
                "fixed" => DataPolicy::Fixed,
                "certified" => DataPolicy::Certified,
                other => return Err(Error::Config(format!("unknown data policy `{other}`"))),
            };
        }
        if let Some(m) = self.max_change {
            cfg.simulation.max_change = m;
        }
        if self.no_diagnostics {
            cfg.diagnostics.kernel = false;
            cfg.diagnostics.decay = false;
            cfg.diagnostics.volume = false;
        }
        cfg.validate()?;
        let base = self.config.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }
}

fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| "out".into())
}

/// A preset, or a system file with no preset setups.
fn load_system(name: &str) -> Result<(VectorFieldSystem, Option<Preset>, String)> {
    if let Ok(p) = resolve_preset(name) {
        return Ok((p.system.clone(), Some(p), name.to_string()));
    }
    let path = Path::new(name);
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("`{name}` is neither a preset nor a readable system file: {e}")))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into());
    Ok((parse_system(&text)?, None, label))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn cmd_analyze(system: &str, max_step: Option<usize>) -> Result<()> {
    let (sys, _, label) = load_system(system)?;
    let analysis = analyze(&sys, max_step)?;
    let refusal = sys.validate(max_step).err();
    let mut v = serde_json::to_value(&analysis)?;
    v["system"] = json!(label);
    v["refused"] = json!(refusal.as_ref().map(|e| e.to_string()));
    print_json(&v)?;
    match refusal {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_ccball(a: &CcballArgs) -> Result<()> {
    let (sys, preset, label) = load_system(&a.system)?;
    sys.validate(None)?;
    let setup = preset.as_ref().map(|p| &p.ball);
    let grid = a.grid.resolve(setup.map(|s| &s.grid))?;
    let step = a
        .step
        .or(setup.map(|s| s.step))
        .unwrap_or_else(|| grid.spacings().into_iter().fold(f64::INFINITY, f64::min));
    let radii = match (&a.radii, setup) {
        (Some(r), _) => r.clone(),
        (None, Some(s)) => s.radii.clone(),
        (None, None) => return Err(Error::Config("--radii is required for a system file".into())),
    };
    let center = a.center.clone().unwrap_or_else(|| vec![0.0; grid.dim()]);
    let graph = build_reach_graph(&sys, &grid, step)?;
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let profile = BallProfile::new(&graph, &center, r_max)?;
    let res = distance_resolution(&graph);
    let volumes = radii.iter().map(|&r| profile.volume(r)).collect::<Result<Vec<_>>>()?;
    let fit = log_log_fit(&radii, &volumes)?;

    let dir = output_root().join(a.output.clone().unwrap_or_else(|| format!("ccball-{label}").into()));
    fs::create_dir_all(&dir)?;
    let path = dir.join("ccball.csv");
    let mut text = String::from("r,volume,distance_resolution\n");
    for (r, v) in radii.iter().zip(&volumes) {
        text.push_str(&format!("{r},{v},{res}\n"));
    }
    text.push_str(&format!("# exponent={} r_squared={}\n", fit.slope, fit.r_squared));
    fs::write(&path, text)?;
    print_json(&json!({
        "system": label,
        "exponent": fit.slope,
        "r_squared": fit.r_squared,
        "distance_resolution": res,
        "csv": path,
    }))
}

fn cmd_kernel(a: &KernelArgs) -> Result<()> {
    let (sys, preset, label) = load_system(&a.system)?;
    sys.validate(None)?;
    let time = a
        .time
        .or(preset.as_ref().map(|p| p.kernel.time))
        .ok_or_else(|| Error::Config("--time is required for a system file".into()))?;
    let fallback = preset.as_ref().map(|p| p.kernel_grid(time)).transpose()?;
    let grid = a.grid.resolve(fallback.as_ref())?;
    let y = a.y.clone().unwrap_or_else(|| vec![0.0; grid.dim()]);
    let op = assemble_operator(&sys, &grid)?;
    let cfg = KernelConfig {
        dt: a.dt,
        scheme: if a.implicit { Scheme::Implicit } else { Scheme::Explicit },
    };
    let k = heat_kernel(&op, &y, time, &cfg)?;
    let pairs = symmetry_pairs(&grid, sys.weights().sigma(), time);
    let symmetry = symmetry_residual(&op, &pairs, time, &cfg)?;

    let dir = output_root().join(a.output.clone().unwrap_or_else(|| format!("kernel-{label}").into()));
    fs::create_dir_all(&dir)?;
    let bin = dir.join("kernel.fjf");
    let csv = dir.join("kernel.csv");
    write_field(&k, BufWriter::new(fs::File::create(&bin)?))?;
    write_field_csv(&k, BufWriter::new(fs::File::create(&csv)?))?;
    print_json(&json!({
        "system": label,
        "time": time,
        "y": y,
        "mass": kernel_mass(&op, &k),
        "symmetry_residual": symmetry,
        "field": bin,
        "csv": csv,
    }))
}

fn cmd_simulate(a: &RunArgs) -> Result<()> {
    let (cfg, base) = a.load()?;
    let record = run_scenario(&cfg, &base)?;
    let dir = output_dir(&cfg);
    let files = emit_report(std::slice::from_ref(&record), &dir)?;
    print_json(&json!({
        "preset": record.preset,
        "alpha": record.alpha,
        "amplitude": record.amplitude,
        "alpha_F": record.alpha_f,
        "verdict": record.verdict,
        "manual_review": record.certificates.manual_review,
        "summary": files.summary,
    }))
}

fn cmd_certify(a: &RunArgs) -> Result<()> {
    let (cfg, base) = a.load()?;
    let report = certify(&cfg, &base)?;
    print_json(&serde_json::to_value(&report)?)
}

fn cmd_sweep(a: &RunArgs) -> Result<()> {
    let (cfg, base) = a.load()?;
    let outcome = sweep(&cfg, &base)?;
    let failures: Vec<_> = outcome
        .points
        .iter()
        .filter_map(|p| {
            p.outcome
                .as_ref()
                .err()
                .map(|e| json!({"alpha": p.alpha, "amplitude": p.amplitude, "error": e}))
        })
        .collect();
    let records: Vec<_> = outcome.records().into_iter().cloned().collect();
    if records.is_empty() {
        return Err(Error::numerical("every sweep point failed"));
    }
    let files = emit_report(&records, &output_dir(&cfg))?;
    let bracket = outcome.bracket();
    print_json(&json!({
        "points": outcome.points.len(),
        "failed": failures,
        "warnings": outcome.warnings,
        "alpha_F": outcome.alpha_f,
        "bracket": bracket,
        "contains_alpha_F": bracket.map(|b| b.contains(outcome.alpha_f)),
        "summary": files.summary,
        "dichotomy": files.dichotomy,
    }))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { system, max_step } => cmd_analyze(system, *max_step),
        Command::Ccball(a) => cmd_ccball(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
