use serde::Serialize;

use crate::grid::{Field, BOUNDARY_LAYER};
use crate::heat::{OperatorStencil, Scheme, Stepper};
use crate::{Error, Result};

/// Nodes at least [`BOUNDARY_LAYER`] cells inside the box.
pub fn interior_mask(op: &OperatorStencil) -> Vec<bool> {
    let g = op.grid();
    (0..g.len()).map(|p| g.boundary_depth(p) >= BOUNDARY_LAYER).collect()
}

pub fn masked_sup(values: &[f64], mask: &[bool]) -> f64 {
    values
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .fold(0.0_f64, |acc, (v, _)| acc.max(v.abs()))
}

/// Uniform snapshot times `t_i = iΔ`, `i = 0..=S`, with `Δ` an exact
/// multiple of the explicit step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotGrid {
    pub times: Vec<f64>,
    pub interval: f64,
    pub dt: f64,
    pub steps_per_interval: usize,
}

impl SnapshotGrid {
    pub fn uniform(horizon: f64, intervals: usize, max_dt: f64) -> Result<Self> {
        if !(horizon > 0.0) || intervals == 0 {
            return Err(Error::invalid(
                "snapshot grid needs a positive horizon and interval count",
            ));
        }
        if !(max_dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        let interval = horizon / intervals as f64;
        let steps_per_interval = (interval / max_dt).ceil().max(1.0) as usize;
        let dt = interval / steps_per_interval as f64;
        Ok(Self {
            times: (0..=intervals).map(|i| i as f64 * interval).collect(),
            interval,
            dt,
            steps_per_interval,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `e^{ΔL}` as a fixed number of identical explicit steps.
#[derive(Debug, Clone, Copy)]
pub struct IntervalPropagator<'a> {
    stepper: Stepper<'a>,
    dt: f64,
    steps: usize,
}

impl<'a> IntervalPropagator<'a> {
    pub fn new(op: &'a OperatorStencil, grid: &SnapshotGrid, parallel: bool) -> Result<Self> {
        if grid.dt > op.stability_bound() * (1.0 + 1e-12) {
            return Err(Error::invalid("snapshot dt exceeds the explicit stability bound"));
        }
        Ok(Self {
            stepper: Stepper::new(op, Scheme::Explicit, parallel),
            dt: grid.dt,
            steps: grid.steps_per_interval,
        })
    }

    /// Apply `e^{ΔL}`, calling `each_step(k, u)` after every step.
    pub fn advance_with(&self, u: &[f64], mut each_step: impl FnMut(usize, &[f64])) -> Vec<f64> {
        let mut cur = u.to_vec();
        let mut next = vec![0.0; u.len()];
        let mut scratch = vec![0.0; u.len()];
        for k in 0..self.steps {
            self.stepper
                .step(&cur, self.dt, &mut next, &mut scratch)
                .expect("explicit steps cannot fail");
            std::mem::swap(&mut cur, &mut next);
            each_step(k + 1, &cur);
        }
        cur
    }

    pub fn advance(&self, u: &[f64]) -> Vec<f64> {
        self.advance_with(u, |_, _| {})
    }
}

/// Linear evolution `e^{tL}u0` at the snapshot times plus its interior
/// sup-norm after every step.
#[derive(Debug, Clone)]
pub struct LinearRun {
    pub grid: SnapshotGrid,
    pub snapshots: Vec<Vec<f64>>,
    pub trace_times: Vec<f64>,
    pub trace_sup: Vec<f64>,
}

pub fn linear_run(op: &OperatorStencil, u0: &Field, grid: &SnapshotGrid, parallel: bool) -> Result<LinearRun> {
    if u0.grid() != op.grid() {
        return Err(Error::invalid("initial field lives on a different grid"));
    }
    let mask = interior_mask(op);
    let prop = IntervalPropagator::new(op, grid, parallel)?;
    let mut snapshots = vec![u0.values().to_vec()];
    let mut trace_times = vec![0.0];
    let mut trace_sup = vec![masked_sup(u0.values(), &mask)];
    for i in 0..grid.len() - 1 {
        let t0 = grid.times[i];
        let next = prop.advance_with(&snapshots[i], |k, u| {
            trace_times.push(t0 + k as f64 * grid.dt);
            trace_sup.push(masked_sup(u, &mask));
        });
        // keep the trace aligned with the exact snapshot time
        *trace_times.last_mut().expect("non-empty") = grid.times[i + 1];
        snapshots.push(next);
    }
    Ok(LinearRun {
        grid: grid.clone(),
        snapshots,
        trace_times,
        trace_sup,
    })
}

/// Cumulative trapezoid integral of `ys` over `xs`.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..xs.len() {
        acc += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
        out.push(acc);
    }
    out
}

/// Linear interpolation of `(xs, ys)` at `x`, clamped to the end values.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v <= x);
    let s = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + s * (ys[k] - ys[k - 1])
}
