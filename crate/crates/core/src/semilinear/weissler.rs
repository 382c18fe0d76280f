use serde::{Deserialize, Serialize};

use crate::grid::Field;
use crate::heat::{heat_kernel, KernelConfig, OperatorStencil};
use crate::stats::log_log_fit;
use crate::{Error, Result};

use super::certificates::{congl_check, ChiCertificate, ConglOptions};
use super::functions::{Nonlinearity, TimeWeight};
use super::linear::{interior_mask, linear_run, masked_sup, IntervalPropagator, LinearRun, SnapshotGrid};

/// How the Duhamel integral is assembled on the snapshot grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Duhamel {
    /// `D_{i+1} = e^{ΔL}(D_i + Δ/2·g_i) + Δ/2·g_{i+1}`: one propagation per
    /// snapshot, the same trapezoid sum as `Direct`.
    #[default]
    Recursive,
    /// `D_i = Δ Σ_j w_j e^{(t_i−t_j)L} g_j` term by term.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeisslerConfig {
    pub horizon: f64,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub duhamel: Duhamel,
}

fn default_snapshots() -> usize {
    32
}

fn default_k_max() -> usize {
    50
}

fn default_tol() -> f64 {
    1e-10
}

impl WeisslerConfig {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            snapshots: default_snapshots(),
            k_max: default_k_max(),
            tol: default_tol(),
            dt: None,
            duhamel: Duhamel::Recursive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MildIterationState {
    pub iterations: usize,
    /// Interior sup-norm of `h_{k} − h_{k−1}` per iterate.
    pub increments: Vec<f64>,
    /// Largest `h_k − h_{k+1}` seen anywhere (0 for a monotone sequence).
    pub monotonicity_residual: f64,
    /// `sup_t ‖h_k(t)‖_∞ / ‖e^{tL}u0‖_∞`.
    pub sandwich_factor: f64,
    pub converged: bool,
    pub inconclusive: bool,
}

#[derive(Debug, Clone)]
pub struct MildSolution {
    pub linear: LinearRun,
    /// Final iterate at the snapshot times.
    pub iterate: Vec<Vec<f64>>,
    pub state: MildIterationState,
}

impl MildSolution {
    pub fn times(&self) -> &[f64] {
        &self.linear.grid.times
    }

    pub fn field(&self, op: &OperatorStencil, i: usize) -> Result<Field> {
        Field::new(op.grid().clone(), self.iterate[i].clone())
    }
}

fn reaction(f: &Nonlinearity, phi: f64, h: &[f64]) -> Vec<f64> {
    h.iter().map(|&v| phi * f.eval(v)).collect()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Duhamel term on every snapshot for sources `g_j`.
fn duhamel(prop: &IntervalPropagator, grid: &SnapshotGrid, g: &[Vec<f64>], mode: Duhamel) -> Vec<Vec<f64>> {
    let s = grid.len();
    let n = g[0].len();
    let dl = grid.interval;
    let mut out = vec![vec![0.0; n]; s];
    match mode {
        Duhamel::Recursive => {
            for i in 0..s - 1 {
                let mut acc = out[i].clone();
                axpy(&mut acc, 0.5 * dl, &g[i]);
                let mut next = prop.advance(&acc);
                axpy(&mut next, 0.5 * dl, &g[i + 1]);
                out[i + 1] = next;
            }
        }
        Duhamel::Direct => {
            for j in 0..s - 1 {
                let mut carried = g[j].clone();
                for i in j + 1..s {
                    carried = prop.advance(&carried);
                    let w = if j == 0 { 0.5 * dl } else { dl };
                    axpy(&mut out[i], w, &carried);
                }
            }
            for i in 1..s {
                axpy(&mut out[i], 0.5 * dl, &g[i]);
            }
        }
    }
    out
}

/// Monotone iteration `h_{k+1}(t) = e^{tL}u0 + ∫₀^t e^{(t−τ)L}[φ(τ)f(h_k(τ))] dτ`
/// from `h_0 = e^{tL}u0`, on a uniform snapshot grid.
pub fn weissler_iterate(
    op: &OperatorStencil,
    u0: &Field,
    f: &Nonlinearity,
    phi: &TimeWeight,
    cfg: &WeisslerConfig,
) -> Result<MildSolution> {
    f.validate()?;
    phi.require_bounded()?;
    if u0.min_value() < 0.0 {
        return Err(Error::invalid("initial data must be non-negative"));
    }
    if cfg.k_max == 0 {
        return Err(Error::invalid("k_max must be positive"));
    }
    let grid = SnapshotGrid::uniform(cfg.horizon, cfg.snapshots, cfg.dt.unwrap_or_else(|| op.default_dt()))?;
    let linear = linear_run(op, u0, &grid, true)?;
    let prop = IntervalPropagator::new(op, &grid, true)?;
    let mask = interior_mask(op);
    let phis: Vec<f64> = grid.times.iter().map(|&t| phi.eval(t)).collect();

    let mut h = linear.snapshots.clone();
    let mut increments = Vec::new();
    let mut monotonicity_residual: f64 = 0.0;
    let mut converged = false;
    let mut inconclusive = false;
    let mut iterations = 0;
    for _ in 0..cfg.k_max {
        let g: Vec<Vec<f64>> = h.iter().zip(&phis).map(|(hi, &p)| reaction(f, p, hi)).collect();
        let d = duhamel(&prop, &grid, &g, cfg.duhamel);
        let next: Vec<Vec<f64>> = linear
            .snapshots
            .iter()
            .zip(&d)
            .map(|(l, di)| l.iter().zip(di).map(|(a, b)| a + b).collect())
            .collect();
        let mut inc: f64 = 0.0;
        for (hi, ni) in h.iter().zip(&next) {
            for (p, (a, b)) in hi.iter().zip(ni).enumerate() {
                monotonicity_residual = monotonicity_residual.max(a - b);
                if mask[p] {
                    inc = inc.max((b - a).abs());
                }
            }
        }
        iterations += 1;
        h = next;
        if !inc.is_finite() {
            inconclusive = true;
            increments.push(inc);
            break;
        }
        let grew = increments.len() >= 2 && inc > *increments.last().expect("non-empty");
        increments.push(inc);
        if inc <= cfg.tol {
            converged = true;
            break;
        }
        if grew {
            inconclusive = true;
            break;
        }
    }

    let mut sandwich_factor: f64 = 1.0;
    for (hi, li) in h.iter().zip(&linear.snapshots) {
        let lin = masked_sup(li, &mask);
        if lin > 0.0 {
            sandwich_factor = sandwich_factor.max(masked_sup(hi, &mask) / lin);
        }
    }
    Ok(MildSolution {
        linear,
        iterate: h,
        state: MildIterationState {
            iterations,
            increments,
            monotonicity_residual,
            sandwich_factor,
            converged,
            inconclusive,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    /// Largest relative amount by which `h` falls below `e^{tL}u0`.
    pub lower_violation: f64,
    /// Largest relative amount by which `h` exceeds `χ(t)e^{tL}u0`.
    pub upper_violation: f64,
}

/// Compares the final iterate against `e^{tL}u0 ≤ h ≤ χ(t)e^{tL}u0` at
/// interior nodes where `e^{tL}u0` exceeds `floor` times its maximum.
pub fn sandwich_check(
    op: &OperatorStencil,
    sol: &MildSolution,
    chi: &ChiCertificate,
    floor: f64,
) -> Result<SandwichReport> {
    let mask = interior_mask(op);
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for ((t, h), lin) in sol.times().iter().zip(&sol.iterate).zip(&sol.linear.snapshots) {
        let c = chi.at(*t)?;
        let cut = floor * masked_sup(lin, &mask);
        for p in 0..lin.len() {
            if !mask[p] || lin[p] <= cut || lin[p] <= 0.0 {
                continue;
            }
            lower = lower.max((lin[p] - h[p]) / lin[p]);
            upper = upper.max((h[p] - c * lin[p]) / (c * lin[p]));
        }
    }
    Ok(SandwichReport {
        lower_violation: lower.max(0.0),
        upper_violation: upper.max(0.0),
    })
}

/// χ certificate built from the per-step sup-norm trace of a solution's
/// linear part.
pub fn chi_for(sol: &MildSolution, alpha: f64, a: f64) -> Result<ChiCertificate> {
    ChiCertificate::from_trace(&sol.linear.trace_times, &sol.linear.trace_sup, alpha, a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub holds: bool,
    pub worst_ratio: f64,
    /// Max ratio per snapshot time.
    pub ratios: Vec<(f64, f64)>,
    /// Log-log slope of the per-time ratio over the second half of the run.
    pub trend: f64,
    pub state: MildIterationState,
}

/// Largest trend slope still read as "bounded".
pub const DOMINATION_TREND_MAX: f64 = 0.05;

/// Runs the iteration from `u0 = θ·Γ(0,0;ρ,·)` and tracks
/// `u(t,x) / Γ(0,0;t+ρ,x)` over interior nodes.
#[allow(clippy::too_many_arguments)]
pub fn gaussian_domination_check(
    op: &OperatorStencil,
    theta: f64,
    rho_time: f64,
    f: &Nonlinearity,
    congl: &ConglOptions,
    cfg: &WeisslerConfig,
    floor: f64,
) -> Result<DominationReport> {
    if !(theta >= 0.0) {
        return Err(Error::invalid("theta must be non-negative"));
    }
    let origin = vec![0.0; op.grid().dim()];
    let kernel = heat_kernel(op, &origin, rho_time, &KernelConfig::default())?;
    let u0 = kernel.scaled(theta);
    if theta > 0.0 && !f.is_zero() {
        let (alpha, a) = f
            .upper_power()
            .ok_or_else(|| Error::invalid("domination check needs a power-type upper bound"))?;
        let report = congl_check(op, &u0, alpha, a, congl)?;
        if !report.satisfied {
            return Err(Error::Refused(format!(
                "global-existence condition fails: {} + {} >= {}",
                report.value, report.tail_bound, report.threshold
            )));
        }
    }
    let sol = weissler_iterate(op, &u0, f, &TimeWeight::default(), cfg)?;
    let mask = interior_mask(op);
    let mut ratios = Vec::with_capacity(sol.times().len());
    for ((t, h), lin) in sol.times().iter().zip(&sol.iterate).zip(&sol.linear.snapshots) {
        let cut = floor * masked_sup(lin, &mask);
        let mut worst: f64 = 0.0;
        for p in 0..lin.len() {
            if mask[p] && lin[p] > cut && lin[p] > 0.0 {
                // e^{tL}Γ(ρ) = Γ(t+ρ) and lin = θ·e^{tL}Γ(ρ)
                worst = worst.max(theta * h[p] / lin[p]);
            }
        }
        ratios.push((*t, worst));
    }
    let worst_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let late: Vec<&(f64, f64)> = ratios
        .iter()
        .filter(|(t, r)| *t >= 0.5 * cfg.horizon && *r > 0.0)
        .collect();
    let trend = if late.len() >= 2 {
        let xs: Vec<f64> = late.iter().map(|r| r.0).collect();
        let ys: Vec<f64> = late.iter().map(|r| r.1).collect();
        log_log_fit(&xs, &ys)?.slope
    } else {
        0.0
    };
    let holds = worst_ratio.is_finite() && trend <= DOMINATION_TREND_MAX && !sol.state.inconclusive;
    Ok(DominationReport {
        holds,
        worst_ratio,
        ratios,
        trend,
        state: sol.state,
    })
}
