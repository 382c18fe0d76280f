use serde::{Deserialize, Serialize};

use crate::grid::Field;
use crate::heat::{evolve, OperatorStencil, SolverConfig, WINDOW_INNER, WINDOW_LEAK};
use crate::{Error, Result};

use super::linear::{cumulative_trapezoid, interior_mask, interpolate, linear_run, masked_sup, SnapshotGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConglOptions {
    /// Start of the window used to fit the decay constant.
    pub t_split: f64,
    /// End of the quadrature; the analytic tail covers `t > horizon`.
    pub horizon: f64,
    /// Homogeneous dimension.
    pub q: f64,
    /// Snapshot intervals of the linear run (the trace itself is per step).
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    #[serde(default)]
    pub dt: Option<f64>,
}

fn default_intervals() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConglReport {
    /// `∫₀^H ‖e^{tL}u0‖_∞^{α−1} dt` by the trapezoid rule on every step.
    pub value: f64,
    /// Bound for `∫_H^∞`; `+∞` when `α ≤ 1 + 2/q`.
    pub tail_bound: f64,
    /// `C₀` in `‖e^{tL}u0‖_∞ ≤ C₀‖u0‖₁ t^{-q/2}`, fitted on `[t_split, H]`.
    pub decay_constant: f64,
    /// `1 / (A(α−1))`.
    pub threshold: f64,
    pub satisfied: bool,
    /// Whether the run stayed clear of the box edge up to `H`.
    pub clean_window: bool,
}

/// Global-existence test `∫₀^∞ ‖e^{tL}u0‖_∞^{α−1} dt < 1/(A(α−1))`.
pub fn congl_check(op: &OperatorStencil, u0: &Field, alpha: f64, a: f64, opts: &ConglOptions) -> Result<ConglReport> {
    if !(alpha > 1.0) {
        return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(a > 0.0) {
        return Err(Error::invalid("A must be positive"));
    }
    if u0.min_value() < 0.0 {
        return Err(Error::invalid("initial data must be non-negative"));
    }
    if !(opts.t_split > 0.0) || !(opts.horizon > opts.t_split) {
        return Err(Error::invalid("need 0 < t_split < horizon"));
    }
    if !(opts.q > 0.0) {
        return Err(Error::invalid("homogeneous dimension must be positive"));
    }
    let grid = SnapshotGrid::uniform(opts.horizon, opts.intervals, opts.dt.unwrap_or_else(|| op.default_dt()))?;
    let run = linear_run(op, u0, &grid, true)?;
    let integrand: Vec<f64> = run.trace_sup.iter().map(|s| s.powf(alpha - 1.0)).collect();
    let value = *cumulative_trapezoid(&run.trace_times, &integrand)
        .last()
        .expect("non-empty");

    let l1 = u0.lp_norm(1.0);
    let half_q = 0.5 * opts.q;
    let decay_constant = if l1 > 0.0 {
        run.trace_times
            .iter()
            .zip(&run.trace_sup)
            .filter(|(t, _)| **t >= opts.t_split)
            .map(|(t, s)| s * t.powf(half_q) / l1)
            .fold(0.0_f64, f64::max)
    } else {
        0.0
    };
    let rate = half_q * (alpha - 1.0);
    let tail_bound = if rate > 1.0 {
        (decay_constant * l1).powf(alpha - 1.0) * opts.horizon.powf(1.0 - rate) / (rate - 1.0)
    } else {
        f64::INFINITY
    };
    let threshold = 1.0 / (a * (alpha - 1.0));
    let last = Field::new(op.grid().clone(), run.snapshots.last().expect("non-empty").clone())?;
    Ok(ConglReport {
        value,
        tail_bound,
        decay_constant,
        threshold,
        satisfied: value + tail_bound < threshold,
        clean_window: last.mass_outside(WINDOW_INNER) <= WINDOW_LEAK,
    })
}

/// `χ(t) = (1 − A(α−1)·I(t))^{−1/(α−1)}` for the partial integral `I(t)`.
pub fn chi(partial: f64, alpha: f64, a: f64) -> Result<f64> {
    let arg = 1.0 - a * (alpha - 1.0) * partial;
    if !(arg > 0.0) {
        return Err(Error::Numerical(format!(
            "chi undefined: 1 - A(alpha-1)I = {arg} is not positive"
        )));
    }
    Ok(arg.powf(-1.0 / (alpha - 1.0)))
}

/// `χ` along a sup-norm trace of the linear evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiCertificate {
    pub alpha: f64,
    pub a: f64,
    pub times: Vec<f64>,
    pub partial: Vec<f64>,
    pub norms: Vec<f64>,
}

impl ChiCertificate {
    pub fn from_trace(times: &[f64], sups: &[f64], alpha: f64, a: f64) -> Result<Self> {
        if times.len() != sups.len() || times.len() < 2 {
            return Err(Error::invalid("trace needs at least two matching samples"));
        }
        if !(alpha > 1.0) || !(a >= 0.0) {
            return Err(Error::invalid("need alpha > 1 and A >= 0"));
        }
        let integrand: Vec<f64> = sups.iter().map(|s| s.powf(alpha - 1.0)).collect();
        Ok(Self {
            alpha,
            a,
            times: times.to_vec(),
            partial: cumulative_trapezoid(times, &integrand),
            norms: sups.to_vec(),
        })
    }

    /// `χ(t)`, interpolating the partial integral between trace samples.
    pub fn at(&self, t: f64) -> Result<f64> {
        if t > *self.times.last().expect("non-empty") * (1.0 + 1e-12) {
            return Err(Error::invalid("time beyond the certificate trace"));
        }
        chi(interpolate(&self.times, &self.partial, t), self.alpha, self.a)
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        self.partial.iter().map(|&p| chi(p, self.alpha, self.a)).collect()
    }

    /// Largest `|χ(t) − 1 − A∫₀^t ‖·‖^{α−1}χ^α dτ| / χ(t)` over the trace,
    /// both sides by the trapezoid rule on the same samples.
    pub fn identity_residual(&self) -> Result<f64> {
        let chis = self.values()?;
        let integrand: Vec<f64> = self
            .norms
            .iter()
            .zip(&chis)
            .map(|(s, c)| s.powf(self.alpha - 1.0) * c.powf(self.alpha))
            .collect();
        let rhs = cumulative_trapezoid(&self.times, &integrand);
        Ok(chis
            .iter()
            .zip(&rhs)
            .map(|(c, r)| (c - 1.0 - self.a * r).abs() / c)
            .fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryConditionReport {
    /// `max_t t^{1/(α−1)} ‖e^{tL}v0‖_∞` over the sampled times.
    pub max_value: f64,
    /// `(B(α−1))^{−1/(α−1)}`.
    pub bound: f64,
    pub violated: bool,
    pub first_violation: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

/// Necessary condition for a global supersolution:
/// `t^{1/(α−1)} ‖e^{tL}v0‖_∞ ≤ (B(α−1))^{−1/(α−1)}` for every `t`.
pub fn necessary_condition_certificate(
    op: &OperatorStencil,
    v0: &Field,
    alpha: f64,
    b: f64,
    times: &[f64],
    dt: Option<f64>,
) -> Result<NecessaryConditionReport> {
    if times.is_empty() {
        return Err(Error::invalid("no sample times given"));
    }
    if !(alpha > 1.0) || !(b > 0.0) {
        return Err(Error::invalid("need alpha > 1 and B > 0"));
    }
    if v0.min_value() < 0.0 {
        return Err(Error::invalid("data must be non-negative"));
    }
    if times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid("sample times must be positive"));
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let t_end = *sorted.last().expect("non-empty");
    let cfg = SolverConfig {
        dt: dt.unwrap_or_else(|| op.default_dt()),
        ..SolverConfig::explicit(op, t_end)
    }
    .with_snapshots(sorted.clone());
    let snaps = evolve(op, v0, &cfg)?;
    let mask = interior_mask(op);
    let bound = (b * (alpha - 1.0)).powf(-1.0 / (alpha - 1.0));
    let mut samples = Vec::with_capacity(sorted.len());
    let mut first_violation = None;
    let mut max_value: f64 = 0.0;
    for (t, u) in snaps {
        let v = t.powf(1.0 / (alpha - 1.0)) * masked_sup(u.values(), &mask);
        if v > bound && first_violation.is_none() {
            first_violation = Some(t);
        }
        max_value = max_value.max(v);
        samples.push((t, v));
    }
    Ok(NecessaryConditionReport {
        max_value,
        bound,
        violated: max_value > bound,
        first_violation,
        samples,
    })
}
