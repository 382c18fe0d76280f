use serde::{Deserialize, Serialize};

use crate::grid::Field;
use crate::{Error, Result};

use super::operator::OperatorStencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    /// Output times in `[0, t_end]`; `t_end` is always reported last.
    pub snapshots: Vec<f64>,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl SolverConfig {
    /// Explicit scheme at the operator's default step.
    pub fn explicit(op: &OperatorStencil, t_end: f64) -> Self {
        Self {
            dt: op.default_dt(),
            scheme: Scheme::Explicit,
            t_end,
            snapshots: Vec::new(),
            parallel: true,
        }
    }

    pub fn with_snapshots(mut self, snapshots: Vec<f64>) -> Self {
        self.snapshots = snapshots;
        self
    }

    pub fn validate(&self, op: &OperatorStencil) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("dt must be positive"));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::invalid("t_end must be non-negative"));
        }
        if self.snapshots.iter().any(|&t| !(0.0..=self.t_end).contains(&t)) {
            return Err(Error::invalid("snapshot times must lie in [0, t_end]"));
        }
        if self.scheme == Scheme::Explicit && self.dt > op.stability_bound() * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "explicit dt {} exceeds the stability bound {}",
                self.dt,
                op.stability_bound()
            )));
        }
        Ok(())
    }
}

/// Time stepper for `u' = L u` with fixed operator and scheme.
#[derive(Debug, Clone, Copy)]
pub struct Stepper<'a> {
    op: &'a OperatorStencil,
    scheme: Scheme,
    parallel: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(op: &'a OperatorStencil, scheme: Scheme, parallel: bool) -> Self {
        Self { op, scheme, parallel }
    }

    pub fn operator(&self) -> &OperatorStencil {
        self.op
    }

    fn apply(&self, u: &[f64], out: &mut [f64]) {
        if self.parallel {
            self.op.apply(u, out);
        } else {
            self.op.apply_seq(u, out);
        }
    }

    /// One step of size `dt` from `u` into `out`; `scratch` has the same length.
    pub fn step(&self, u: &[f64], dt: f64, out: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        match self.scheme {
            Scheme::Explicit => {
                self.apply(u, scratch);
                for ((o, &a), &l) in out.iter_mut().zip(u).zip(scratch.iter()) {
                    *o = a + dt * l;
                }
                Ok(())
            }
            Scheme::Implicit => self.implicit_solve(u, dt, out),
        }
    }

    /// Solve `(M + dt K) x = M u` by Jacobi-preconditioned conjugate gradients.
    fn implicit_solve(&self, u: &[f64], dt: f64, x: &mut [f64]) -> Result<()> {
        let m = self.op.mass();
        let k = self.op.stiffness();
        let n = u.len();
        let diag: Vec<f64> = k.diagonal().iter().zip(m).map(|(d, mi)| mi + dt * d).collect();
        let b: Vec<f64> = u.iter().zip(m).map(|(a, mi)| a * mi).collect();
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.copy_from_slice(u);
        if b_norm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(());
        }
        let mut ax = vec![0.0; n];
        let matvec = |v: &[f64], out: &mut [f64]| {
            if self.parallel {
                k.matvec(v, out);
            } else {
                k.matvec_seq(v, out);
            }
            for ((o, &vi), mi) in out.iter_mut().zip(v).zip(m) {
                *o = mi * vi + dt * *o;
            }
        };
        matvec(x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let tol = 1e-13 * b_norm;
        let max_iter = 10 * n + 100;
        for _ in 0..max_iter {
            let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r_norm <= tol {
                return Ok(());
            }
            matvec(&p, &mut ax);
            let pap: f64 = p.iter().zip(&ax).map(|(a, b)| a * b).sum();
            if !(pap > 0.0) {
                return Err(Error::numerical("conjugate gradients broke down"));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ax[i];
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::numerical("conjugate gradients did not converge"))
    }

    /// Advance `u` by time `t` in steps of `dt`, shortening the last step.
    pub fn propagate(&self, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
        let mut cur = u.to_vec();
        let mut next = vec![0.0; u.len()];
        let mut scratch = vec![0.0; u.len()];
        for h in step_sizes(t, dt) {
            self.step(&cur, h, &mut next, &mut scratch)?;
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }
}

/// Steps of size `dt` covering `[0, t]`; a final remainder shorter than
/// `dt` (beyond round-off) gets its own step.
pub fn step_sizes(t: f64, dt: f64) -> Vec<f64> {
    if t <= 0.0 {
        return Vec::new();
    }
    let ratio = t / dt;
    let whole = (ratio + 1e-9).floor();
    let mut steps = vec![dt; whole as usize];
    let rest = t - whole * dt;
    if rest > 1e-9 * dt {
        steps.push(rest);
    }
    steps
}

/// Evolve `u0` under `∂_t u = L u`; returns `(time, field)` at each snapshot
/// time (sorted, deduplicated) followed by `t_end`.
pub fn evolve(op: &OperatorStencil, u0: &Field, cfg: &SolverConfig) -> Result<Vec<(f64, Field)>> {
    cfg.validate(op)?;
    if u0.grid() != op.grid() {
        return Err(Error::invalid("initial field lives on a different grid"));
    }
    let mut targets: Vec<f64> = cfg.snapshots.clone();
    targets.push(cfg.t_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let stepper = Stepper::new(op, cfg.scheme, cfg.parallel);
    let mut out = Vec::with_capacity(targets.len());
    let mut cur = u0.values().to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut scratch = vec![0.0; cur.len()];
    let mut t = 0.0;
    // full steps are exactly `dt`; off-lattice snapshots get partial steps
    let mut k: u64 = 0;
    let mut on_lattice = true;
    for target in targets {
        while t < target - 1e-12 * cfg.dt.max(target) {
            let lattice_next = (k + 1) as f64 * cfg.dt;
            let (h, advance) = if lattice_next <= target * (1.0 + 1e-12) + 1e-15 {
                let h = if on_lattice { cfg.dt } else { lattice_next - t };
                on_lattice = true;
                (h, true)
            } else {
                on_lattice = false;
                (target - t, false)
            };
            stepper.step(&cur, h, &mut next, &mut scratch)?;
            std::mem::swap(&mut cur, &mut next);
            if advance {
                k += 1;
                t = lattice_next;
            } else {
                t = target;
            }
        }
        if !cur.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical(format!("non-finite values at t = {t}")));
        }
        out.push((target, Field::new(op.grid().clone(), cur.clone())?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::heat::assemble_operator;
    use crate::vf_algebra::{euclidean, grushin};

    #[test]
    fn constant_stays_constant() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[15, 15]).unwrap();
        let op = assemble_operator(&grushin(1), &grid).unwrap();
        let u0 = Field::constant(&grid, 2.5);
        for scheme in [Scheme::Explicit, Scheme::Implicit] {
            let cfg = SolverConfig {
                scheme,
                ..SolverConfig::explicit(&op, 0.1)
            };
            let out = evolve(&op, &u0, &cfg).unwrap();
            for v in out[0].1.values() {
                assert!((v - 2.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn explicit_rejects_unstable_dt() {
        let grid = GridSpec::centered(&[1.0], &[21]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let cfg = SolverConfig {
            dt: 2.0 * op.stability_bound(),
            ..SolverConfig::explicit(&op, 0.1)
        };
        assert!(evolve(&op, &Field::zeros(&grid), &cfg).is_err());
    }

    #[test]
    fn snapshots_are_reported_in_order() {
        let grid = GridSpec::centered(&[1.0], &[21]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let cfg = SolverConfig::explicit(&op, 0.05).with_snapshots(vec![0.02, 0.0, 0.01]);
        let out = evolve(&op, &Field::gaussian(&grid, &[0.0], &[0.2], 1.0), &cfg).unwrap();
        let times: Vec<f64> = out.iter().map(|(t, _)| *t).collect();
        assert_eq!(times, vec![0.0, 0.01, 0.02, 0.05]);
    }

    #[test]
    fn step_sizes_cover_the_interval() {
        let s = step_sizes(1.0, 0.3);
        assert_eq!(s.len(), 4);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(step_sizes(0.9, 0.3).len(), 3);
        assert!(step_sizes(0.0, 0.3).is_empty());
    }

    #[test]
    fn implicit_matches_explicit_roughly() {
        let grid = GridSpec::centered(&[3.0], &[121]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let u0 = Field::gaussian(&grid, &[0.0], &[0.5], 1.0);
        let e = evolve(&op, &u0, &SolverConfig::explicit(&op, 0.2)).unwrap();
        let cfg = SolverConfig {
            dt: 1e-3,
            scheme: Scheme::Implicit,
            ..SolverConfig::explicit(&op, 0.2)
        };
        let i = evolve(&op, &u0, &cfg).unwrap();
        let diff = e[0]
            .1
            .values()
            .iter()
            .zip(i[0].1.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 2e-3, "diff = {diff}");
    }
}
