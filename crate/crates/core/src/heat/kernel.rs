use serde::{Deserialize, Serialize};

use crate::grid::Field;
use crate::par;
use crate::stats::{linear_fit, LinearFit};
use crate::{Error, Result};

use super::evolve::{Scheme, Stepper};
use super::operator::OperatorStencil;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct KernelConfig {
    /// Step size; `None` means the operator's default explicit step.
    pub dt: Option<f64>,
    pub scheme: Scheme,
}

impl KernelConfig {
    pub fn dt(&self, op: &OperatorStencil) -> f64 {
        self.dt.unwrap_or_else(|| op.default_dt())
    }
}

/// Tent bump of half-width `2h_j` per axis centred at the node nearest to
/// `y`, normalised to unit discrete mass.
pub fn mollified_delta(op: &OperatorStencil, y: &[f64]) -> Result<Field> {
    let grid = op.grid();
    let y = grid.coords(grid.snap(y)?);
    let h = grid.spacings();
    let mut f = Field::from_fn(grid, |x| {
        x.iter()
            .zip(&y)
            .zip(&h)
            .map(|((xi, yi), hi)| (1.0 - (xi - yi).abs() / (2.0 * hi)).max(0.0))
            .product()
    });
    let mass: f64 = f.values().iter().zip(op.mass()).map(|(v, m)| v * m).sum();
    if !(mass > 0.0) {
        return Err(Error::invalid("delta support misses every grid node"));
    }
    f.values_mut().iter_mut().for_each(|v| *v /= mass);
    Ok(f)
}

fn check_time(op: &OperatorStencil, t: f64, cfg: &KernelConfig) -> Result<f64> {
    let dt = cfg.dt(op);
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    if cfg.scheme == Scheme::Explicit && dt > op.stability_bound() * (1.0 + 1e-12) {
        return Err(Error::invalid("explicit dt exceeds the stability bound"));
    }
    if !(t >= dt) {
        return Err(Error::invalid(format!("kernel time {t} is below one step {dt}")));
    }
    Ok(dt)
}

/// `Γ(0, y; t, ·)`: the mollified delta at `y` evolved to time `t`.
pub fn heat_kernel(op: &OperatorStencil, y: &[f64], t: f64, cfg: &KernelConfig) -> Result<Field> {
    let dt = check_time(op, t, cfg)?;
    let delta = mollified_delta(op, y)?;
    let values = Stepper::new(op, cfg.scheme, true).propagate(delta.values(), t, dt)?;
    Field::new(op.grid().clone(), values)
}

fn kernel_seq(op: &OperatorStencil, y: &[f64], t: f64, cfg: &KernelConfig) -> Result<Vec<f64>> {
    let dt = check_time(op, t, cfg)?;
    let delta = mollified_delta(op, y)?;
    Stepper::new(op, cfg.scheme, false).propagate(delta.values(), t, dt)
}

/// Discrete mass `Σ m_p Γ_p`.
pub fn kernel_mass(op: &OperatorStencil, kernel: &Field) -> f64 {
    kernel.values().iter().zip(op.mass()).map(|(v, m)| v * m).sum()
}

/// Largest relative gap `|Γ(x→y) − Γ(y→x)| / max` over the given pairs.
pub fn symmetry_residual(
    op: &OperatorStencil,
    pairs: &[(Vec<f64>, Vec<f64>)],
    t: f64,
    cfg: &KernelConfig,
) -> Result<f64> {
    let grid = op.grid();
    let gaps = par::map_slice(pairs, |(x, y)| -> Result<f64> {
        let from_x = kernel_seq(op, x, t, cfg)?;
        let from_y = kernel_seq(op, y, t, cfg)?;
        let a = from_x[grid.snap(y)?];
        let b = from_y[grid.snap(x)?];
        let scale = a.abs().max(b.abs());
        Ok(if scale == 0.0 { 0.0 } else { (a - b).abs() / scale })
    });
    gaps.into_iter().try_fold(0.0_f64, |m, g| g.map(|g| m.max(g)))
}

/// Relative `L¹` gap between `Γ(y; t+s)` and `∫ Γ(y; t)(w) Γ(·; s, w) dw`.
///
/// The composition is evaluated at every `stride`-th node (per axis) where
/// `Γ(y; t+s)` exceeds `floor` times its maximum. At a sample `x`, the inner
/// kernel `w ↦ Γ(w; s, x)` comes from its own evolution, so the composition
/// never reuses the outer solution.
pub fn reproduction_residual(
    op: &OperatorStencil,
    y: &[f64],
    t: f64,
    s: f64,
    stride: usize,
    floor: f64,
    cfg: &KernelConfig,
) -> Result<ReproductionReport> {
    if stride == 0 {
        return Err(Error::invalid("stride must be positive"));
    }
    let grid = op.grid();
    let first = heat_kernel(op, y, t, cfg)?;
    let direct = heat_kernel(op, y, t + s, cfg)?;
    let peak = direct.sup_abs();
    let samples: Vec<usize> = (0..grid.len())
        .filter(|&p| {
            grid.multi_index(p).iter().all(|i| i % stride == 0)
                && direct.values()[p] > floor * peak
                && !grid.is_on_boundary(p)
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::invalid("no sample nodes above the floor"));
    }
    let composed = par::map_slice(&samples, |&p| -> Result<f64> {
        let inner = kernel_seq(op, &grid.coords(p), s, cfg)?;
        Ok(op.inner(first.values(), &inner))
    });
    let mut num = 0.0;
    let mut den = 0.0;
    for (&p, c) in samples.iter().zip(composed) {
        let c = c?;
        let d = direct.values()[p];
        num += (d - c).abs();
        den += d.abs();
    }
    Ok(ReproductionReport {
        samples: samples.len(),
        residual: num / den,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproductionReport {
    pub samples: usize,
    pub residual: f64,
}

/// Sorts ray samples by `d²/t` and checks that the kernel does not increase.
/// Samples with `Γ ≤ 0` are ignored.
pub fn ray_is_monotone(kernel_values: &[f64], cc_distances: &[f64], t: f64) -> Result<bool> {
    let pts = ray_points(kernel_values, cc_distances, t)?;
    Ok(pts.windows(2).all(|w| w[1].1 <= w[0].1))
}

/// Fit `log Γ ≈ a − b·d²/t`; `1/b` estimates the Gaussian constant. Only
/// logged, never asserted.
pub fn gaussian_rate(kernel_values: &[f64], cc_distances: &[f64], t: f64) -> Result<LinearFit> {
    let pts = ray_points(kernel_values, cc_distances, t)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    linear_fit(&xs, &ys)
}

fn ray_points(kernel_values: &[f64], cc_distances: &[f64], t: f64) -> Result<Vec<(f64, f64)>> {
    if kernel_values.len() != cc_distances.len() {
        return Err(Error::DimensionMismatch {
            expected: kernel_values.len(),
            found: cc_distances.len(),
        });
    }
    if !(t > 0.0) {
        return Err(Error::invalid("t must be positive"));
    }
    let mut pts: Vec<(f64, f64)> = kernel_values
        .iter()
        .zip(cc_distances)
        .filter(|(k, d)| **k > 0.0 && d.is_finite())
        .map(|(k, d)| (d * d / t, k.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::heat::assemble_operator;
    use crate::vf_algebra::euclidean;

    #[test]
    fn delta_has_unit_mass() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[21, 21]).unwrap();
        let op = assemble_operator(&euclidean(2), &grid).unwrap();
        let d = mollified_delta(&op, &[0.13, -0.2]).unwrap();
        assert!((kernel_mass(&op, &d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_rejects_tiny_time() {
        let grid = GridSpec::centered(&[1.0], &[21]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let cfg = KernelConfig::default();
        assert!(heat_kernel(&op, &[0.0], 0.5 * op.default_dt(), &cfg).is_err());
    }

    #[test]
    fn euclidean_kernel_matches_gaussian() {
        let grid = GridSpec::centered(&[4.0], &[401]).unwrap();
        let op = assemble_operator(&euclidean(1), &grid).unwrap();
        let t = 0.25;
        let k = heat_kernel(&op, &[0.0], t, &KernelConfig::default()).unwrap();
        let exact = 1.0 / (4.0 * std::f64::consts::PI * t).sqrt();
        assert!((k.at(&[0.0]).unwrap() / exact - 1.0).abs() < 0.01);
    }

    #[test]
    fn ray_monotonicity() {
        assert!(ray_is_monotone(&[1.0, 0.5, 0.2], &[0.0, 1.0, 2.0], 1.0).unwrap());
        assert!(!ray_is_monotone(&[1.0, 0.5, 0.7], &[0.0, 1.0, 2.0], 1.0).unwrap());
        let fit = gaussian_rate(&[1.0, (-1.0f64).exp(), (-4.0f64).exp()], &[0.0, 1.0, 2.0], 1.0).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
    }
}
