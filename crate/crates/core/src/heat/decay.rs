use serde::{Deserialize, Serialize};

use crate::grid::Field;
use crate::stats::{log_log_fit, LinearFit};
use crate::{Error, Result};

use super::evolve::{evolve, SolverConfig};
use super::operator::OperatorStencil;

/// Fraction of the box half-width that must still hold the solution.
pub const WINDOW_INNER: f64 = 0.9;
/// Largest fraction of `∫|u|` allowed outside the inner box.
pub const WINDOW_LEAK: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "p")]
pub enum Norm {
    /// Max over nodes clear of the boundary layers.
    Sup,
    Lp(f64),
}

impl Norm {
    pub fn of(&self, u: &Field) -> f64 {
        match *self {
            Norm::Sup => u.sup_interior(),
            Norm::Lp(p) => u.lp_norm(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub fit: LinearFit,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Requested times dropped because the solution had reached the box edge.
    pub rejected: Vec<f64>,
}

impl DecayFit {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Fit `log‖e^{tL}u0‖` against `log t` over the requested times that lie in
/// the uncontaminated window: at most [`WINDOW_LEAK`] of the mass outside
/// the central [`WINDOW_INNER`] box.
pub fn decay_exponent(
    op: &OperatorStencil,
    u0: &Field,
    times: &[f64],
    norm: Norm,
    cfg: &SolverConfig,
) -> Result<DecayFit> {
    if u0.min_value() < 0.0 {
        return Err(Error::invalid("initial data must be non-negative"));
    }
    if u0.mass_outside(WINDOW_INNER) > WINDOW_LEAK {
        return Err(Error::invalid("initial data is not interior-supported"));
    }
    if times.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid("decay times must be positive"));
    }
    let t_end = times.iter().copied().fold(0.0_f64, f64::max);
    let run = SolverConfig {
        t_end,
        snapshots: times.to_vec(),
        ..cfg.clone()
    };
    let snaps = evolve(op, u0, &run)?;
    let mut ts = Vec::new();
    let mut norms = Vec::new();
    let mut rejected = Vec::new();
    for (t, u) in snaps {
        if !times.contains(&t) {
            continue;
        }
        if u.mass_outside(WINDOW_INNER) <= WINDOW_LEAK {
            ts.push(t);
            norms.push(norm.of(&u));
        } else {
            rejected.push(t);
        }
    }
    if ts.len() < 2 {
        return Err(Error::invalid(
            "decay window is empty: fewer than two times before boundary contamination",
        ));
    }
    let fit = log_log_fit(&ts, &norms)?;
    Ok(DecayFit {
        fit,
        times: ts,
        norms,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::heat::assemble_operator;
    use crate::vf_algebra::euclidean;

    #[test]
    fn window_rejects_late_times() {
        let grid = GridSpec::centered(&[2.0], &[81]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let u0 = Field::gaussian(&grid, &[0.0], &[0.2], 1.0);
        let cfg = SolverConfig::explicit(&op, 1.0);
        let fit = decay_exponent(&op, &u0, &[0.01, 0.02, 0.04, 2.0], Norm::Sup, &cfg).unwrap();
        assert_eq!(fit.rejected, vec![2.0]);
        assert!(decay_exponent(&op, &u0, &[1.5, 2.0], Norm::Sup, &cfg).is_err());
    }

    #[test]
    fn rejects_negative_data() {
        let grid = GridSpec::centered(&[2.0], &[81]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let u0 = Field::gaussian(&grid, &[0.0], &[0.2], -1.0);
        let cfg = SolverConfig::explicit(&op, 1.0);
        assert!(decay_exponent(&op, &u0, &[0.1, 0.2], Norm::Sup, &cfg).is_err());
    }
}
