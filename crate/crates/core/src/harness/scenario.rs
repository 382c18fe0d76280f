use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cc_geometry::{build_reach_graph, distances_from, volume_growth_exponent};
use crate::grid::{Field, GridSpec};
use crate::heat::{
    assemble_operator, decay_exponent, gaussian_rate, heat_kernel, kernel_mass, ray_is_monotone, symmetry_residual,
    KernelConfig, Norm, OperatorStencil, SolverConfig,
};
use crate::semilinear::{
    blow_up_simulate, chi_for, congl_check, necessary_condition_certificate, sandwich_check,
    time_dependent_divergence_test, weissler_iterate, BlowUpConfig, Classification, ConglOptions, Nonlinearity,
    TimeWeight, Verdict, WeisslerConfig,
};
use crate::vf_algebra::{parse_system, SystemAnalysis, VectorFieldSystem};
use crate::{Error, Result};

use super::config::{DataPolicy, ExperimentConfig};
use super::presets::{geometric, resolve_preset, Preset};

/// Cutoff for the divergence quadrature.
pub const DIVERGENCE_HORIZON: f64 = 1e12;
/// Sampled triples for the triangle-inequality diagnostic.
pub const TRIANGLE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelDiagnostics {
    pub time: f64,
    pub mass: f64,
    pub symmetry_residual: f64,
    /// Fitted `ρ` in `Γ ≈ C exp(−d²/(ρt))` along the coordinate rays; logged only.
    pub gaussian_rho: Option<f64>,
    /// The kernel does not increase with `d²/t` along each coordinate ray.
    pub rays_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayDiagnostics {
    pub slope: f64,
    pub r_squared: f64,
    pub times_used: usize,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeDiagnostics {
    pub exponent: f64,
    pub r_squared: f64,
    /// Seeded random triples violating `d(x,z) ≤ d(x,y) + d(y,z)`.
    pub triangle_violations: usize,
}

/// Per-system diagnostics that do not depend on the nonlinearity or data.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct SystemDiagnostics {
    pub kernel: Option<KernelDiagnostics>,
    pub decay: Option<DecayDiagnostics>,
    pub volume: Option<VolumeDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConglSummary {
    pub value: f64,
    /// `None` stands for an infinite tail.
    pub tail_bound: Option<f64>,
    pub decay_constant: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub clean_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeisslerSummary {
    pub iterations: usize,
    pub converged: bool,
    pub inconclusive: bool,
    pub monotonicity_residual: f64,
    pub sandwich_factor: f64,
    pub chi_at_horizon: Option<f64>,
    pub chi_residual: Option<f64>,
    pub sandwich_lower: Option<f64>,
    pub sandwich_upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSummary {
    pub max_value: f64,
    pub bound: f64,
    pub violated: bool,
    pub first_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateBlock {
    pub congl: Option<ConglSummary>,
    pub weissler: Option<WeisslerSummary>,
    pub lemma34: Option<LemmaSummary>,
    pub divergence: Option<Classification>,
    pub divergence_closed_form: Option<Classification>,
    /// Blow-up observed while the necessary-condition certificate never
    /// tripped: the discretisation outran the continuum certificate.
    pub manual_review: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub initial_sup: f64,
    pub max_sup: f64,
    pub final_time: f64,
    pub threshold: f64,
    pub steps: u64,
    pub rejected_steps: u64,
    pub min_dt: f64,
    pub note: &'static str,
}

/// One run. Serialises deterministically; wall-clock time and the sup-norm
/// trace are kept out of the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub config_hash: String,
    pub seed: u64,
    pub preset: String,
    pub alpha: Option<f64>,
    pub amplitude: f64,
    pub q: u64,
    pub alpha_f: String,
    pub alpha_f_value: f64,
    pub lie_dimension: usize,
    pub needs_lifting: bool,
    pub verdict: Verdict,
    pub simulation: SimulationSummary,
    pub certificates: CertificateBlock,
    pub diagnostics: SystemDiagnostics,
    #[serde(skip)]
    pub trace: Vec<(f64, f64)>,
    #[serde(skip)]
    pub wall_clock: f64,
}

/// A validated system with its grids.
pub struct ResolvedSystem {
    pub label: String,
    pub system: VectorFieldSystem,
    pub analysis: SystemAnalysis,
    pub grid: GridSpec,
    pub preset: Option<Preset>,
}

/// Loads the preset or system file of `cfg` and runs the rank and
/// homogeneity checks; failing systems are refused before any simulation.
pub fn resolve_system(cfg: &ExperimentConfig, base: &Path) -> Result<ResolvedSystem> {
    let (system, preset) = match (&cfg.preset, &cfg.system) {
        (Some(name), _) => {
            let p = resolve_preset(name)?;
            (p.system.clone(), Some(p))
        }
        (None, Some(path)) => {
            let path = if path.is_absolute() {
                path.clone()
            } else {
                base.join(path)
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read system {}: {e}", path.display())))?;
            (parse_system(&text)?, None)
        }
        (None, None) => return Err(Error::Config("no system given".into())),
    };
    let analysis = system.validate(None).map_err(|e| e.in_stage("analysis"))?;
    let grid = match (&cfg.grid, &preset) {
        (Some(g), _) => g.to_spec()?,
        (None, Some(p)) => p.grid.clone(),
        (None, None) => return Err(Error::Config("a grid is required".into())),
    };
    if grid.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: grid.dim(),
        });
    }
    Ok(ResolvedSystem {
        label: cfg.label(),
        system,
        analysis,
        grid,
        preset,
    })
}

/// Bulk point pairs for the symmetry check, scaled to time `t`.
pub fn symmetry_pairs(grid: &GridSpec, sigma: &[u32], t: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let scale = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(sigma)
            .enumerate()
            .map(|(j, (v, &s))| {
                let y = v * t.powf(0.5 * s as f64);
                y.clamp(0.5 * grid.lower()[j], 0.5 * grid.upper()[j])
            })
            .collect()
    };
    let n = grid.dim();
    let a = [0.0, 0.0];
    let b = [0.5, 0.2];
    let c = [0.3, 0.1];
    let d = [-0.4, 0.3];
    vec![(scale(&a[..n]), scale(&b[..n])), (scale(&c[..n]), scale(&d[..n]))]
}

/// Kernel mass and symmetry, the decay slope and the ball-volume exponent of
/// a preset. `seed` drives the random triples of the triangle check.
pub fn system_diagnostics(
    preset: &Preset,
    which: &super::config::DiagnosticsConfig,
    seed: u64,
) -> Result<SystemDiagnostics> {
    let q: f64 = preset.system.weights().sigma().iter().map(|&s| s as f64).sum();
    let kernel = if which.kernel {
        let setup = &preset.kernel;
        let op = assemble_operator(&preset.system, &setup.grid)?;
        let cfg = KernelConfig::default();
        let origin = vec![0.0; setup.grid.dim()];
        let k = heat_kernel(&op, &origin, setup.time, &cfg)?;
        let pairs = symmetry_pairs(&setup.grid, preset.system.weights().sigma(), setup.time);
        let (gaussian_rho, rays_monotone) = kernel_rays(&preset.system, &k, setup.time)?;
        Some(KernelDiagnostics {
            time: setup.time,
            mass: kernel_mass(&op, &k),
            symmetry_residual: symmetry_residual(&op, &pairs, setup.time, &cfg)?,
            gaussian_rho,
            rays_monotone,
        })
    } else {
        None
    };
    let decay = if which.decay {
        let setup = &preset.decay;
        let op = assemble_operator(&preset.system, &setup.grid)?;
        let u0 = Field::gaussian(&setup.grid, &vec![0.0; setup.grid.dim()], &setup.widths, 1.0);
        let mut cfg = SolverConfig::explicit(&op, *setup.times.last().expect("times"));
        cfg.scheme = setup.scheme;
        if let Some(dt) = setup.dt {
            cfg.dt = dt;
        }
        let fit = decay_exponent(&op, &u0, &setup.times, Norm::Sup, &cfg).map_err(|e| e.in_stage("decay"))?;
        Some(DecayDiagnostics {
            slope: fit.slope(),
            r_squared: fit.fit.r_squared,
            times_used: fit.times.len(),
            expected: -0.5 * q,
        })
    } else {
        None
    };
    let volume = if which.volume {
        let setup = &preset.ball;
        let graph = build_reach_graph(&preset.system, &setup.grid, setup.step)?;
        let origin = vec![0.0; setup.grid.dim()];
        let fit = volume_growth_exponent(&graph, &origin, &setup.radii).map_err(|e| e.in_stage("volume"))?;
        Some(VolumeDiagnostics {
            exponent: fit.slope,
            r_squared: fit.r_squared,
            triangle_violations: triangle_violations(&graph, seed, TRIANGLE_SAMPLES)?,
        })
    } else {
        None
    };
    Ok(SystemDiagnostics { kernel, decay, volume })
}

/// Kernel values and CC distances along the positive coordinate rays from
/// the source node; returns the fitted Gaussian constant and ray monotonicity.
fn kernel_rays(system: &VectorFieldSystem, k: &Field, t: f64) -> Result<(Option<f64>, bool)> {
    let grid = k.grid();
    let step = grid.spacings().into_iter().fold(f64::INFINITY, f64::min);
    let graph = build_reach_graph(system, grid, step)?;
    let source = grid.snap(&vec![0.0; grid.dim()])?;
    let dist = distances_from(&graph, source, f64::INFINITY);
    let centre = grid.multi_index(source);
    let floor = 1e-8 * k.sup_abs();
    let mut all_k = Vec::new();
    let mut all_d = Vec::new();
    let mut monotone = true;
    for axis in 0..grid.dim() {
        let mut idx = centre.clone();
        let (mut ray_k, mut ray_d) = (Vec::new(), Vec::new());
        for i in centre[axis]..grid.points()[axis] {
            idx[axis] = i;
            let p = grid.linear_index(&idx);
            if k.values()[p] > floor {
                ray_k.push(k.values()[p]);
                ray_d.push(dist[p]);
            }
        }
        monotone &= ray_is_monotone(&ray_k, &ray_d, t)?;
        all_k.extend(ray_k);
        all_d.extend(ray_d);
    }
    let rho = gaussian_rate(&all_k, &all_d, t)
        .ok()
        .filter(|f| f.slope < 0.0)
        .map(|f| -1.0 / f.slope);
    Ok((rho, monotone))
}

/// Random triples near the centre of the ball grid; counts strict violations
/// of the triangle inequality beyond round-off.
fn triangle_violations(graph: &crate::cc_geometry::ReachGraph, seed: u64, samples: usize) -> Result<usize> {
    let grid = graph.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> Result<usize> {
        let x: Vec<f64> = (0..grid.dim())
            .map(|j| {
                let lo = grid.lower()[j] * 0.05;
                let hi = grid.upper()[j] * 0.05;
                rng.gen_range(lo..=hi)
            })
            .collect();
        grid.snap(&x)
    };
    let mut violations = 0;
    for _ in 0..samples {
        let (x, y, z) = (point(&mut rng)?, point(&mut rng)?, point(&mut rng)?);
        let dx = distances_from(graph, x, f64::INFINITY);
        let dy = distances_from(graph, y, f64::INFINITY);
        if dx[z] > dx[y] + dy[z] + 1e-9 * dx[z].max(1.0) {
            violations += 1;
        }
    }
    Ok(violations)
}

fn lemma_times(cfg: &ExperimentConfig) -> Vec<f64> {
    geometric(
        cfg.certificates.horizon / 1000.0,
        cfg.horizon,
        cfg.certificates.lemma_samples,
    )
}

/// Amplitude actually used for `cfg` under its data policy, with the
/// global-existence report at unit scaling when one was needed.
fn policy_amplitude(
    op: &OperatorStencil,
    cfg: &ExperimentConfig,
    u0: &Field,
    alpha_f: f64,
    opts: &ConglOptions,
) -> Result<f64> {
    let base = cfg.initial_data.amplitude();
    let (alpha, a) = match (&cfg.certificates.data_policy, &cfg.nonlinearity) {
        (DataPolicy::Certified, Nonlinearity::Power { alpha, a, .. }) if *alpha > alpha_f && base > 0.0 => (*alpha, *a),
        _ => return Ok(base),
    };
    let report = congl_check(op, u0, alpha, a, opts)?;
    let total = report.value + report.tail_bound;
    if !(total > 0.0) || !total.is_finite() {
        return Ok(base);
    }
    // value(θu0) = θ^{α−1}·value(u0)
    let scale = (report.threshold / total).powf(1.0 / (alpha - 1.0));
    Ok(base.min(cfg.certificates.certified_fraction * scale * base))
}

/// A resolved system with its operator and the initial data after the
/// data policy.
pub struct Prepared {
    pub sys: ResolvedSystem,
    pub op: OperatorStencil,
    pub u0: Field,
    pub amplitude: f64,
}

pub fn prepare(cfg: &ExperimentConfig, base: &Path) -> Result<Prepared> {
    cfg.validate()?;
    let sys = resolve_system(cfg, base)?;
    cfg.initial_data.validate(sys.system.dim())?;
    let op = assemble_operator(&sys.system, &sys.grid).map_err(|e| e.in_stage("operator"))?;
    let raw = cfg
        .initial_data
        .realize(&sys.grid, base)
        .map_err(|e| e.in_stage("initial data"))?;
    let opts = congl_options(cfg, sys.analysis.q as f64);
    let amplitude =
        policy_amplitude(&op, cfg, &raw, sys.analysis.alpha_f_value, &opts).map_err(|e| e.in_stage("data policy"))?;
    let base_amp = cfg.initial_data.amplitude();
    let u0 = if base_amp > 0.0 && amplitude != base_amp {
        raw.scaled(amplitude / base_amp)
    } else {
        raw
    };
    Ok(Prepared { sys, op, u0, amplitude })
}

fn congl_options(cfg: &ExperimentConfig, q: f64) -> ConglOptions {
    ConglOptions {
        t_split: cfg.certificates.t_split,
        horizon: cfg.certificates.horizon,
        q,
        intervals: cfg.certificates.snapshots,
        dt: None,
    }
}

/// Global-existence test, Weissler iteration with the χ certificate,
/// necessary condition and the time-dependent divergence test.
pub fn certificate_block(p: &Prepared, cfg: &ExperimentConfig) -> Result<CertificateBlock> {
    let op = &p.op;
    let u0 = &p.u0;
    let q = p.sys.analysis.q as f64;
    let alpha_f = p.sys.analysis.alpha_f_value;
    let f = &cfg.nonlinearity;
    let phi = &cfg.time_weight;
    let power = f.upper_power();

    let congl = match power {
        Some((alpha, a)) => {
            let r = congl_check(op, u0, alpha, a, &congl_options(cfg, q)).map_err(|e| e.in_stage("congl"))?;
            if alpha <= alpha_f && r.tail_bound.is_finite() {
                return Err(Error::numerical("finite congl tail at or below the Fujita exponent").in_stage("congl"));
            }
            Some(ConglSummary {
                value: r.value,
                tail_bound: r.tail_bound.is_finite().then_some(r.tail_bound),
                decay_constant: r.decay_constant,
                threshold: r.threshold,
                satisfied: r.satisfied,
                clean_window: r.clean_window,
            })
        }
        None => None,
    };

    let weissler = if phi.require_bounded().is_ok() {
        let wcfg = WeisslerConfig {
            snapshots: cfg.certificates.snapshots,
            ..WeisslerConfig::new(cfg.certificates.horizon)
        };
        let sol = weissler_iterate(op, u0, f, phi, &wcfg).map_err(|e| e.in_stage("weissler"))?;
        let unit_weight = matches!(phi, TimeWeight::Constant { c } if *c == 1.0);
        let chi = match power {
            Some((alpha, a)) if unit_weight => chi_for(&sol, alpha, a).ok(),
            _ => None,
        };
        let (chi_at_horizon, chi_residual, lower, upper) = match chi {
            Some(chi) => match (chi.at(cfg.certificates.horizon), chi.identity_residual()) {
                (Ok(c), Ok(res)) => {
                    let s = sandwich_check(op, &sol, &chi, 1e-3)?;
                    (Some(c), Some(res), Some(s.lower_violation), Some(s.upper_violation))
                }
                _ => (None, None, None, None),
            },
            None => (None, None, None, None),
        };
        Some(WeisslerSummary {
            iterations: sol.state.iterations,
            converged: sol.state.converged,
            inconclusive: sol.state.inconclusive,
            monotonicity_residual: sol.state.monotonicity_residual,
            sandwich_factor: sol.state.sandwich_factor,
            chi_at_horizon,
            chi_residual,
            sandwich_lower: lower,
            sandwich_upper: upper,
        })
    } else {
        None
    };

    let lemma34 = match f.lower_power() {
        Some((alpha, b)) => {
            let r = necessary_condition_certificate(op, u0, alpha, b, &lemma_times(cfg), None)
                .map_err(|e| e.in_stage("lemma"))?;
            Some(LemmaSummary {
                max_value: r.max_value,
                bound: r.bound,
                violated: r.violated,
                first_violation: r.first_violation,
            })
        }
        None => None,
    };

    let (divergence, divergence_closed_form) = if f.is_zero() {
        (None, None)
    } else {
        let r =
            time_dependent_divergence_test(phi, f, 1.0, q, DIVERGENCE_HORIZON).map_err(|e| e.in_stage("divergence"))?;
        (Some(r.classification), r.closed_form)
    };

    Ok(CertificateBlock {
        congl,
        weissler,
        lemma34,
        divergence,
        divergence_closed_form,
        manual_review: false,
    })
}

/// Output of the `certify` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub config_hash: String,
    pub preset: String,
    pub alpha: Option<f64>,
    pub amplitude: f64,
    pub q: u64,
    pub alpha_f: String,
    pub certificates: CertificateBlock,
}

pub fn certify(cfg: &ExperimentConfig, base: &Path) -> Result<CertifyReport> {
    let p = prepare(cfg, base)?;
    let certificates = certificate_block(&p, cfg)?;
    Ok(CertifyReport {
        config_hash: cfg.hash(),
        preset: p.sys.label.clone(),
        alpha: cfg.alpha(),
        amplitude: p.amplitude,
        q: p.sys.analysis.q,
        alpha_f: p.sys.analysis.alpha_f.clone(),
        certificates,
    })
}

/// Full pipeline for one configuration: analysis, diagnostics (or the
/// supplied shared ones), certificates and the blow-up simulation.
pub fn run_scenario(cfg: &ExperimentConfig, base: &Path) -> Result<ExperimentRecord> {
    run_scenario_with(cfg, base, None)
}

pub fn run_scenario_with(
    cfg: &ExperimentConfig,
    base: &Path,
    shared: Option<&SystemDiagnostics>,
) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let p = prepare(cfg, base)?;
    let diagnostics = match (shared, &p.sys.preset) {
        (Some(d), _) => d.clone(),
        (None, Some(preset)) => system_diagnostics(preset, &cfg.diagnostics, cfg.seed)?,
        (None, None) => SystemDiagnostics::default(),
    };
    let mut certificates = certificate_block(&p, cfg)?;

    let bcfg = BlowUpConfig {
        threshold: cfg.simulation.threshold,
        dt: cfg.simulation.dt,
        max_change: cfg.simulation.max_change,
        ..BlowUpConfig::new(cfg.horizon)
    };
    let sim = blow_up_simulate(&p.op, &p.u0, &cfg.nonlinearity, &cfg.time_weight, &bcfg)
        .map_err(|e| e.in_stage("simulation"))?;
    certificates.manual_review =
        matches!(sim.verdict, Verdict::BlowUp { .. }) && certificates.lemma34.as_ref().is_some_and(|l| !l.violated);
    if certificates.manual_review {
        log::warn!(
            "{}: blow-up without a necessary-condition violation; flagged for review",
            p.sys.label
        );
    }

    let a = &p.sys.analysis;
    Ok(ExperimentRecord {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        preset: p.sys.label.clone(),
        alpha: cfg.alpha(),
        amplitude: p.amplitude,
        q: a.q,
        alpha_f: a.alpha_f.clone(),
        alpha_f_value: a.alpha_f_value,
        lie_dimension: a.lie_dimension,
        needs_lifting: a.needs_lifting,
        verdict: sim.verdict,
        simulation: SimulationSummary {
            initial_sup: sim.initial_sup,
            max_sup: sim.max_sup,
            final_time: sim.final_time,
            threshold: sim.threshold,
            steps: sim.steps,
            rejected_steps: sim.rejected_steps,
            min_dt: sim.min_dt,
            note: sim.note,
        },
        certificates,
        diagnostics,
        trace: sim.trace,
        wall_clock: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_config(alpha: f64, amplitude: f64, horizon: f64) -> ExperimentConfig {
        ExperimentConfig::from_toml(&format!(
            r#"
version = 1
preset = "euclidean-1d"
horizon = {horizon}

[nonlinearity]
kind = "power"
alpha = {alpha}
a = 1.0
b = 1.0

[initial_data]
kind = "gaussian"
center = [0.0]
width = [1.0]
amplitude = {amplitude}

[diagnostics]
kernel = false
decay = false
volume = false
"#
        ))
        .unwrap()
    }

    fn plane_system_config() -> ExperimentConfig {
        let mut cfg = line_config(2.0, 0.5, 1.0);
        cfg.preset = None;
        cfg.system = Some("sys.txt".into());
        cfg.grid = Some(super::super::config::GridConfig {
            lower: vec![-4.0, -4.0],
            upper: vec![4.0, 4.0],
            points: vec![17, 17],
        });
        cfg.initial_data = super::super::config::InitialData::Gaussian {
            center: vec![0.0, 0.0],
            width: vec![1.0, 1.0],
            amplitude: 0.5,
        };
        cfg
    }

    #[test]
    fn subcritical_line_blows_up() {
        let r = run_scenario(&line_config(2.0, 0.5, 50.0), Path::new(".")).unwrap();
        assert_eq!(r.verdict.label(), "blow_up");
        assert_eq!(r.q, 1);
        assert_eq!(r.alpha_f, "3");
        assert!(r.certificates.lemma34.as_ref().unwrap().violated);
        assert!(!r.certificates.manual_review);
        assert!(!r.trace.is_empty());
    }

    #[test]
    fn small_supercritical_data_stays_bounded() {
        let r = run_scenario(&line_config(5.0, 0.01, 20.0), Path::new(".")).unwrap();
        assert_eq!(r.verdict.label(), "bounded");
        assert_eq!(r.verdict.t_blowup(), None);
        assert!(r.certificates.congl.as_ref().unwrap().satisfied);
    }

    #[test]
    fn rank_deficient_system_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("sys.txt"), "weights: 1 1\n1 ; 0\n").unwrap();
        let err = run_scenario(&plane_system_config(), dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("rank"), "{err}");
    }

    #[test]
    fn inhomogeneous_system_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("sys.txt"), "weights: 1 2\n1 ; 0\n0 ; x1 + x1^2\n").unwrap();
        let err = certify(&plane_system_config(), dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("homogeneous"), "{err}");
    }

    #[test]
    fn certify_matches_the_full_run() {
        let cfg = line_config(2.0, 0.5, 5.0);
        let c = certify(&cfg, Path::new(".")).unwrap();
        let r = run_scenario(&cfg, Path::new(".")).unwrap();
        assert_eq!(c.config_hash, r.config_hash);
        assert_eq!(c.certificates.congl, r.certificates.congl);
        assert_eq!(c.certificates.lemma34, r.certificates.lemma34);
    }
}
