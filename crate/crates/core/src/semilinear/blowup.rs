use serde::{Deserialize, Serialize};

use crate::grid::Field;
use crate::heat::OperatorStencil;
use crate::{Error, Result};

use super::functions::{Nonlinearity, TimeWeight};
use super::linear::{interior_mask, masked_sup};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowUpConfig {
    pub horizon: f64,
    /// Sup-norm level read as blow-up; defaults to `1e6·‖u0‖_∞`.
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Initial and largest step; defaults to the operator's explicit step.
    #[serde(default)]
    pub dt: Option<f64>,
    /// A step is retried at half size when the reaction increment exceeds
    /// this fraction of `‖u‖_∞`.
    #[serde(default = "default_max_change")]
    pub max_change: f64,
    /// Steps below `dt_floor · dt` end the run as inconclusive.
    #[serde(default = "default_dt_floor")]
    pub dt_floor: f64,
    /// Time between recorded trace samples.
    #[serde(default)]
    pub trace_interval: Option<f64>,
}

fn default_max_change() -> f64 {
    0.2
}

fn default_dt_floor() -> f64 {
    1e-12
}

impl BlowUpConfig {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            threshold: None,
            dt: None,
            max_change: default_max_change(),
            dt_floor: default_dt_floor(),
            trace_interval: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    BlowUp { t_star: f64 },
    Bounded { horizon: f64 },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::BlowUp { .. } => "blow_up",
            Verdict::Bounded { .. } => "bounded",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn t_blowup(&self) -> Option<f64> {
        match self {
            Verdict::BlowUp { t_star } => Some(*t_star),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowUpReport {
    pub verdict: Verdict,
    pub initial_sup: f64,
    pub max_sup: f64,
    pub final_time: f64,
    pub threshold: f64,
    pub steps: u64,
    pub rejected_steps: u64,
    pub min_dt: f64,
    /// `(t, ‖u(t)‖_∞)` samples.
    pub trace: Vec<(f64, f64)>,
    pub note: &'static str,
}

const NOTE: &str = "blow_up means the interior sup-norm crossed the threshold; \
                    it is numerical evidence of non-existence, not a proof";

/// Explicit stepping of `u' = Lu + φ(t)f(u)` with step halving.
pub fn blow_up_simulate(
    op: &OperatorStencil,
    u0: &Field,
    f: &Nonlinearity,
    phi: &TimeWeight,
    cfg: &BlowUpConfig,
) -> Result<BlowUpReport> {
    f.validate()?;
    phi.require_bounded()?;
    if u0.grid() != op.grid() {
        return Err(Error::invalid("initial field lives on a different grid"));
    }
    if u0.min_value() < 0.0 {
        return Err(Error::invalid("initial data must be non-negative"));
    }
    if !(cfg.horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let mask = interior_mask(op);
    let initial_sup = masked_sup(u0.values(), &mask);
    let threshold = cfg.threshold.unwrap_or(1e6 * initial_sup);
    if !(threshold >= 10.0 * initial_sup) || !(threshold > 0.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold} must be at least 10 times the initial sup-norm {initial_sup}"
        )));
    }
    let dt0 = cfg.dt.unwrap_or_else(|| op.default_dt());
    if !(dt0 > 0.0) || dt0 > op.stability_bound() * (1.0 + 1e-12) {
        return Err(Error::invalid("dt must be positive and within the stability bound"));
    }
    let trace_interval = cfg.trace_interval.unwrap_or(cfg.horizon / 200.0);

    let n = u0.values().len();
    let mut u = u0.values().to_vec();
    let mut lu = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut t = 0.0;
    let mut dt = dt0;
    let mut min_dt = dt0;
    let mut steps = 0u64;
    let mut rejected = 0u64;
    let mut sup = initial_sup;
    let mut max_sup = initial_sup;
    let mut trace = vec![(0.0, initial_sup)];
    let mut next_trace = trace_interval;
    let verdict = loop {
        if t >= cfg.horizon * (1.0 - 1e-12) {
            break if sup < 10.0 * initial_sup {
                Verdict::Bounded { horizon: cfg.horizon }
            } else {
                Verdict::Inconclusive {
                    reason: format!("sup-norm {sup} at the horizon is not below 10 times the initial value"),
                }
            };
        }
        let h = dt.min(cfg.horizon - t);
        op.apply(&u, &mut lu);
        let w = phi.eval(t);
        let mut change: f64 = 0.0;
        for p in 0..n {
            let react = h * w * f.eval(u[p]);
            next[p] = u[p] + h * lu[p] + react;
            if mask[p] {
                change = change.max(react.abs());
            }
        }
        let scale = sup.max(f64::MIN_POSITIVE);
        if !(change / scale <= cfg.max_change) {
            dt *= 0.5;
            rejected += 1;
            min_dt = min_dt.min(dt);
            if dt < cfg.dt_floor * dt0 {
                break Verdict::Inconclusive {
                    reason: format!("step size underflow at t = {t} (dt = {dt})"),
                };
            }
            continue;
        }
        std::mem::swap(&mut u, &mut next);
        t += h;
        steps += 1;
        sup = masked_sup(&u, &mask);
        max_sup = max_sup.max(sup);
        if t >= next_trace * (1.0 - 1e-12) {
            trace.push((t, sup));
            next_trace += trace_interval;
        }
        if sup >= threshold {
            break Verdict::BlowUp { t_star: t };
        }
        if !sup.is_finite() {
            break Verdict::Inconclusive {
                reason: format!("non-finite values at t = {t}"),
            };
        }
        if change / scale < 0.25 * cfg.max_change && dt < dt0 {
            dt = (2.0 * dt).min(dt0);
        }
    };
    if trace.last().map(|s| s.0) != Some(t) {
        trace.push((t, sup));
    }
    Ok(BlowUpReport {
        verdict,
        initial_sup,
        max_sup,
        final_time: t,
        threshold,
        steps,
        rejected_steps: rejected,
        min_dt,
        trace,
        note: NOTE,
    })
}
