use std::path::Path;

use serde::Serialize;

use crate::par;
use crate::Error;
use crate::Result;

use super::config::ExperimentConfig;
use super::scenario::{resolve_system, run_scenario_with, system_diagnostics, ExperimentRecord, SystemDiagnostics};

/// One point of the cross product and its outcome.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub alpha: f64,
    pub amplitude: f64,
    pub outcome: std::result::Result<ExperimentRecord, String>,
}

/// Verdict transition along the α axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    /// Largest α with a blow-up verdict.
    pub last_blow_up: f64,
    /// Smallest α with a bounded verdict.
    pub first_bounded: f64,
    /// Every blow-up α lies below every bounded α.
    pub monotone: bool,
}

impl Bracket {
    pub fn lower(&self) -> f64 {
        self.last_blow_up.min(self.first_bounded)
    }

    pub fn upper(&self) -> f64 {
        self.last_blow_up.max(self.first_bounded)
    }

    pub fn contains(&self, alpha: f64) -> bool {
        self.lower() <= alpha && alpha <= self.upper()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub alpha_f: f64,
    pub warnings: Vec<String>,
}

impl SweepOutcome {
    pub fn records(&self) -> Vec<&ExperimentRecord> {
        self.points.iter().filter_map(|p| p.outcome.as_ref().ok()).collect()
    }

    /// Transition bracket over the records, if both verdicts occur.
    pub fn bracket(&self) -> Option<Bracket> {
        bracket(&self.records())
    }
}

pub fn bracket(records: &[&ExperimentRecord]) -> Option<Bracket> {
    let blow: Vec<f64> = records
        .iter()
        .filter(|r| r.verdict.label() == "blow_up")
        .filter_map(|r| r.alpha)
        .collect();
    let bounded: Vec<f64> = records
        .iter()
        .filter(|r| r.verdict.label() == "bounded")
        .filter_map(|r| r.alpha)
        .collect();
    let last_blow_up = blow.iter().copied().reduce(f64::max)?;
    let first_bounded = bounded.iter().copied().reduce(f64::min)?;
    Some(Bracket {
        last_blow_up,
        first_bounded,
        monotone: last_blow_up < first_bounded,
    })
}

/// Sorted, deduplicated axis values; duplicates are reported as warnings.
fn clean_axis(name: &str, values: &[f64], warnings: &mut Vec<String>) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Config(format!("sweep axis `{name}` is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("sweep axis `{name}` has a non-finite value")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let before = v.len();
    v.dedup();
    if v.len() < before {
        let msg = format!("sweep axis `{name}`: dropped {} duplicate value(s)", before - v.len());
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(v)
}

/// Runs the cross product of the sweep axes. System diagnostics are
/// computed once and shared; points run in parallel and come back in
/// (α, amplitude) order. A failing point is recorded and the sweep goes on.
pub fn sweep(cfg: &ExperimentConfig, base: &Path) -> Result<SweepOutcome> {
    cfg.validate()?;
    let axes = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("the sweep needs a `[sweep]` table".into()))?;
    let mut warnings = Vec::new();
    let alphas = clean_axis("alpha", &axes.alpha, &mut warnings)?;
    let amplitudes = match &axes.amplitude {
        Some(a) => clean_axis("amplitude", a, &mut warnings)?,
        None => vec![cfg.initial_data.amplitude()],
    };
    for &a in &alphas {
        cfg.with_alpha(a)?;
    }
    let sys = resolve_system(cfg, base)?;
    let shared = match &sys.preset {
        Some(p) => system_diagnostics(p, &cfg.diagnostics, cfg.seed)?,
        None => SystemDiagnostics::default(),
    };
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| amplitudes.iter().map(move |&m| (a, m)))
        .collect();
    let points = par::map_slice(&grid, |&(alpha, amplitude)| {
        let outcome = cfg
            .with_alpha(alpha)
            .and_then(|c| run_scenario_with(&c.with_amplitude(amplitude), base, Some(&shared)))
            .map_err(|e| e.to_string());
        SweepPoint {
            alpha,
            amplitude,
            outcome,
        }
    });
    Ok(SweepOutcome {
        points,
        alpha_f: sys.analysis.alpha_f_value,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_cleaning() {
        let mut w = Vec::new();
        assert_eq!(clean_axis("alpha", &[2.0, 1.5, 2.0], &mut w).unwrap(), vec![1.5, 2.0]);
        assert_eq!(w.len(), 1);
        assert!(clean_axis("alpha", &[], &mut w).is_err());
        assert!(clean_axis("alpha", &[f64::NAN], &mut w).is_err());
    }

    fn line_sweep(alphas: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(&format!(
            "version = 1\npreset = \"euclidean-1d\"\nhorizon = 20.0\n\
             [nonlinearity]\nkind = \"power\"\nalpha = 2.0\na = 1.0\nb = 1.0\n\
             [initial_data]\nkind = \"gaussian\"\ncenter = [0.0]\nwidth = [1.0]\namplitude = 0.5\n\
             [diagnostics]\nkernel = false\ndecay = false\nvolume = false\n\
             [sweep]\nalpha = [{alphas}]\namplitude = [0.5, 0.01]\n"
        ))
        .unwrap()
    }

    #[test]
    fn sweep_runs_the_cross_product() {
        let out = sweep(&line_sweep("5.0, 1.5, 5.0"), Path::new(".")).unwrap();
        assert_eq!(out.warnings.len(), 1);
        let keys: Vec<(f64, f64)> = out.points.iter().map(|p| (p.alpha, p.amplitude)).collect();
        assert_eq!(keys, [(1.5, 0.01), (1.5, 0.5), (5.0, 0.01), (5.0, 0.5)]);
        assert!(out.points.iter().all(|p| p.outcome.is_ok()));
        assert_eq!(out.alpha_f, 3.0);
    }

    #[test]
    fn empty_alpha_axis_is_an_error() {
        let err = sweep(&line_sweep(""), Path::new(".")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
