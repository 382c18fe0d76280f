//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use fujita_core::cc_geometry::{build_reach_graph, cc_distance, distance_resolution};
use fujita_core::harness::{
    certify, emit_report, resolve_preset, run_scenario, sweep, symmetry_pairs, system_diagnostics, DiagnosticsConfig,
    ExperimentConfig, ExperimentRecord,
};
use fujita_core::heat::{
    assemble_operator, decay_exponent, heat_kernel, kernel_mass, reproduction_residual, symmetry_residual,
    KernelConfig, Norm, SolverConfig,
};
use fujita_core::semilinear::{
    closed_form_classification, necessary_condition_certificate, time_dependent_divergence_test, weissler_iterate,
    Classification, Nonlinearity, TimeWeight, WeisslerConfig,
};
use fujita_core::vf_algebra::{grushin, homogeneous_dimension, hormander_rank, lie_algebra_dimension, rat, ratio};
use fujita_core::{Field, Result};

type Check = Result<(bool, String)>;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&configs().join(name)).expect("shipped config")
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn symbolic_exactness() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for gamma in 1..=3u32 {
        let sys = grushin(gamma);
        let step = gamma as usize + 1;
        let rank = hormander_rank(&sys, &[rat(0), rat(0)], step)?;
        let (lie, lifting) = lie_algebra_dimension(&sys, step)?;
        let (q, alpha_f) = homogeneous_dimension(sys.weights());
        let good = rank == (2, Some(step))
            && lie == gamma as usize + 2
            && lifting
            && q == gamma as u64 + 2
            && alpha_f == rat(1) + ratio(2, gamma as i64 + 2);
        ok &= good;
        notes.push(format!("γ={gamma}: rank {:?} N={lie} q={q} α_F={alpha_f}", rank));
    }
    Ok((ok, notes.join("; ")))
}

fn kernel_properties() -> Check {
    let preset = resolve_preset("grushin-1")?;
    let sigma = preset.system.weights().sigma();
    let cfg = KernelConfig::default();
    let origin = [0.0, 0.0];
    let mut ok = true;
    let mut worst_mass: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    let mut worst_leak: f64 = 0.0;
    for t in [0.05, 0.2, 0.5] {
        let grid = preset.kernel_grid(t)?;
        ok &= grid.points() == [128, 128];
        let op = assemble_operator(&preset.system, &grid)?;
        let k = heat_kernel(&op, &origin, t, &cfg)?;
        let m = kernel_mass(&op, &k);
        worst_mass = worst_mass.max((m - 1.0).abs());
        worst_leak = worst_leak.max(k.mass_outside(0.9));
        ok &= (0.995..=1.005).contains(&m);
        let s = symmetry_residual(&op, &symmetry_pairs(&grid, sigma, t), t, &cfg)?;
        worst_sym = worst_sym.max(s);
        ok &= s < 0.01;
    }
    let mut repro = Vec::new();
    for (t, s) in [(0.05, 0.05), (0.3, 0.2)] {
        let op = assemble_operator(&preset.system, &preset.kernel_grid(t + s)?)?;
        let r = reproduction_residual(&op, &origin, t, s, 16, 0.01, &cfg)?;
        ok &= r.residual < 0.02;
        repro.push(format!("({t},{s}) {:.3}% over {} nodes", 100.0 * r.residual, r.samples));
    }
    Ok((
        ok,
        format!(
            "max |mass−1| {worst_mass:.2e}, symmetry {:.3}%, edge mass {worst_leak:.1e}, reproduction {}",
            100.0 * worst_sym,
            repro.join(", ")
        ),
    ))
}

fn decay_exponents() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, target, tol) in [
        ("euclidean-1d", -0.5, 0.05),
        ("grushin-1", -1.5, 0.15),
        ("grushin-2", -2.0, 0.3),
    ] {
        let preset = resolve_preset(name)?;
        let setup = &preset.decay;
        let op = assemble_operator(&preset.system, &setup.grid)?;
        let u0 = Field::gaussian(&setup.grid, &vec![0.0; setup.grid.dim()], &setup.widths, 1.0);
        let mut cfg = SolverConfig::explicit(&op, *setup.times.last().expect("times"));
        cfg.scheme = setup.scheme;
        if let Some(dt) = setup.dt {
            cfg.dt = dt;
        }
        let fit = decay_exponent(&op, &u0, &setup.times, Norm::Sup, &cfg)?;
        let good = within(fit.slope(), target, tol);
        ok &= good;
        notes.push(format!(
            "{name} {:.3} (target {target}±{tol}, {} times)",
            fit.slope(),
            fit.times.len()
        ));
        if name == "euclidean-1d" {
            let mass = decay_exponent(&op, &u0, &setup.times, Norm::Lp(1.0), &cfg)?;
            ok &= within(mass.slope(), 0.0, 0.05);
            notes.push(format!("L¹ slope {:.1e}", mass.slope()));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn volume_growth() -> Check {
    let which = DiagnosticsConfig {
        kernel: false,
        decay: false,
        volume: true,
    };
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, target, tol) in [("euclidean-2d", 2.0, 0.2), ("grushin-1", 3.0, 0.45)] {
        let preset = resolve_preset(name)?;
        let radii = &preset.ball.radii;
        let decade = radii.last().expect("radii") / radii[0] >= 10.0 - 1e-9;
        let v = system_diagnostics(&preset, &which, 0)?.volume.expect("volume");
        ok &= decade && within(v.exponent, target, tol) && v.triangle_violations == 0;
        notes.push(format!("{name} {:.3} (target {target}±{tol})", v.exponent));
    }
    let preset = resolve_preset("grushin-1")?;
    let graph = build_reach_graph(&preset.system, &preset.ball.grid, preset.ball.step)?;
    let b = 256.0;
    let near = cc_distance(&graph, &[0.0, 0.0], &[0.0, b])?;
    let far = cc_distance(&graph, &[0.0, 0.0], &[0.0, 4.0 * b])?;
    let ratio = far / near;
    ok &= within(ratio, 2.0, 0.2);
    notes.push(format!(
        "d(0,(0,{}))/d(0,(0,{b})) = {ratio:.3} (resolution {})",
        4.0 * b,
        distance_resolution(&graph)
    ));
    Ok((ok, notes.join("; ")))
}

fn weissler_machinery() -> Check {
    let cfg = load("grushin1_bounded.toml").with_alpha(3.0)?;
    let c = certify(&cfg, &configs())?;
    let w = c.certificates.weissler.expect("weissler summary");
    let lower = w.sandwich_lower.unwrap_or(f64::INFINITY);
    let upper = w.sandwich_upper.unwrap_or(f64::INFINITY);
    let residual = w.chi_residual.unwrap_or(f64::INFINITY);
    let mut ok =
        w.converged && w.monotonicity_residual <= f64::EPSILON && lower <= 0.02 && upper <= 0.02 && residual < 1e-3;

    let preset = resolve_preset("grushin-1")?;
    let op = assemble_operator(&preset.system, &preset.grid)?;
    let u0 = Field::gaussian(&preset.grid, &[0.0, 0.0], &[1.0, 1.0], 0.5);
    let lin = weissler_iterate(
        &op,
        &u0,
        &Nonlinearity::Zero,
        &TimeWeight::default(),
        &WeisslerConfig::new(1.0),
    )?;
    let exact = lin.iterate == lin.linear.snapshots;
    ok &= exact;
    Ok((
        ok,
        format!(
            "monotonicity residual {:.1e}, sandwich lower {lower:.1e} upper {upper:.1e}, χ residual {residual:.1e}, f≡0 exact: {exact}",
            w.monotonicity_residual
        ),
    ))
}

fn dichotomy(records: &[ExperimentRecord]) -> Check {
    let verdict = |a: f64| {
        records.iter().find(|r| r.alpha == Some(a)).map(|r| {
            (
                r.verdict.label(),
                r.amplitude,
                r.certificates.congl.as_ref().is_some_and(|g| g.satisfied),
            )
        })
    };
    let mut ok = records.len() == 6;
    for a in [1.2, 1.4] {
        ok &= matches!(verdict(a), Some(("blow_up", amp, _)) if amp == 0.5);
    }
    for a in [2.5, 3.0] {
        ok &= matches!(verdict(a), Some(("bounded", _, true)));
    }
    let refs: Vec<&ExperimentRecord> = records.iter().collect();
    let bracket = fujita_core::harness::bracket(&refs);
    let alpha_f = 5.0 / 3.0;
    ok &= bracket.is_some_and(|b| b.monotone && b.contains(alpha_f));
    let row: Vec<String> = records
        .iter()
        .map(|r| format!("{}:{}", r.alpha.unwrap_or(f64::NAN), r.verdict.label()))
        .collect();
    let b = bracket
        .map(|b| format!("[{:.4}, {:.4}]", b.lower(), b.upper()))
        .unwrap_or_else(|| "none".into());
    Ok((ok, format!("{}; bracket {b}", row.join(" "))))
}

fn necessary_condition() -> Check {
    let preset = resolve_preset("grushin-1")?;
    let grid = &preset.grid;
    let op = assemble_operator(&preset.system, grid)?;
    let times: Vec<f64> = (0..=60).map(|k| 1e-3 * 10f64.powf(5.0 * k as f64 / 60.0)).collect();
    let alpha = 1.3;
    let mut ok = true;
    let mut notes = Vec::new();
    for c in [0.01, 0.1, 1.0] {
        let r = necessary_condition_certificate(&op, &Field::constant(grid, c), alpha, 1.0, &times, None)?;
        ok &= r.violated;
        notes.push(format!("constant {c}: t={:?}", r.first_violation));
    }
    let zero = necessary_condition_certificate(&op, &Field::zeros(grid), alpha, 1.0, &times, None)?;
    ok &= !zero.violated;
    let bump = Field::gaussian(grid, &[0.0, 0.0], &[1.0, 1.0], 0.5);
    let r = necessary_condition_certificate(&op, &bump, alpha, 1.0, &times, None)?;
    ok &= r.first_violation.is_some_and(|t| t < 50.0);
    notes.push(format!(
        "zero violated: {}; bump at α=1.3: t={:?}",
        zero.violated, r.first_violation
    ));
    Ok((ok, notes.join("; ")))
}

fn time_dependent_criterion() -> Check {
    let q = 3.0;
    let classify = |sigma: f64, alpha: f64| -> Result<(Classification, Option<Classification>)> {
        let phi = TimeWeight::Power { sigma };
        let f = Nonlinearity::power(alpha, 1.0)?;
        let r = time_dependent_divergence_test(&phi, &f, 1.0, q, 1e12)?;
        Ok((r.classification, closed_form_classification(&phi, &f, q)))
    };
    let mut ok =
        classify(1.0, 2.0)?.0 == Classification::Divergent && classify(1.0, 3.0)?.0 == Classification::Convergent;
    let mut checked = 0;
    let mut agree = 0;
    for sigma in [-0.5, 0.0, 0.5, 1.0, 2.0] {
        for alpha in [1.5, 2.0, 2.5, 3.0, 4.0] {
            let boundary = 1.0 + 2.0 * (1.0 + sigma) / q;
            if (alpha - boundary).abs() <= 0.05 {
                continue;
            }
            checked += 1;
            let (quad, closed) = classify(sigma, alpha)?;
            if Some(quad) == closed {
                agree += 1;
            }
        }
    }
    ok &= checked == agree;
    Ok((
        ok,
        format!("σ=1: α=2 divergent, α=3 convergent; grid agreement {agree}/{checked}"),
    ))
}

fn record_bytes(records: &[ExperimentRecord]) -> Result<Vec<(String, Vec<u8>)>> {
    let dir = tempfile::tempdir()?;
    let files = emit_report(records, dir.path())?;
    files
        .records
        .iter()
        .map(|p| Ok((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(p)?)))
        .collect()
}

fn determinism(sweep_records: &[ExperimentRecord]) -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["euclidean1d_simulate.toml", "grushin1_bounded.toml"] {
        let cfg = load(name);
        let a = record_bytes(&[run_scenario(&cfg, &configs())?])?;
        let b = record_bytes(&[run_scenario(&cfg, &configs())?])?;
        ok &= a == b;
        notes.push(format!("{name}: {}", if a == b { "identical" } else { "differs" }));
    }
    let again = sweep(&load("grushin1_sweep.toml"), &configs())?;
    let again: Vec<ExperimentRecord> = again.records().into_iter().cloned().collect();
    let same = record_bytes(sweep_records)? == record_bytes(&again)?;
    ok &= same;
    notes.push(format!(
        "grushin1_sweep.toml: {}",
        if same { "identical" } else { "differs" }
    ));
    Ok((ok, notes.join("; ")))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, check: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {n}. {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    };

    report(1, "symbolic exactness", &mut symbolic_exactness);
    report(2, "kernel properties", &mut kernel_properties);
    report(3, "decay exponents", &mut decay_exponents);
    report(4, "volume growth", &mut volume_growth);
    report(5, "Weissler machinery", &mut weissler_machinery);
    let swept = std::cell::OnceCell::new();
    let run_sweep = || -> std::result::Result<Vec<ExperimentRecord>, String> {
        sweep(&load("grushin1_sweep.toml"), &configs())
            .map(|o| o.records().into_iter().cloned().collect())
            .map_err(|e| e.to_string())
    };
    let with_sweep = |f: fn(&[ExperimentRecord]) -> Check| match swept.get_or_init(run_sweep) {
        Ok(r) => f(r),
        Err(e) => Ok((false, format!("sweep failed: {e}"))),
    };
    report(6, "Fujita dichotomy sweep", &mut || with_sweep(dichotomy));
    report(7, "necessary-condition certificate", &mut necessary_condition);
    report(8, "time-dependent criterion", &mut time_dependent_criterion);
    report(9, "determinism", &mut || with_sweep(determinism));

    println!("acceptance: {} of 9 criteria failed", failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
