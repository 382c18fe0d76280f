use serde::Serialize;

use crate::grid::GridSpec;
use crate::heat::Scheme;
use crate::vf_algebra::{euclidean, grushin, VectorFieldSystem};
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 4] = ["euclidean-1d", "euclidean-2d", "grushin-1", "grushin-2"];

/// Decay-fit setup: a Gaussian bump evolved on its own grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySetup {
    pub grid: GridSpec,
    pub widths: Vec<f64>,
    pub times: Vec<f64>,
    pub scheme: Scheme,
    /// `None` uses the operator's explicit step.
    pub dt: Option<f64>,
}

/// Ball-volume setup for the reach graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSetup {
    pub grid: GridSpec,
    pub step: f64,
    pub radii: Vec<f64>,
}

/// Kernel-property setup: a centred box sized for the kernel at `time`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSetup {
    pub grid: GridSpec,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub system: VectorFieldSystem,
    /// Grid for semilinear runs.
    pub grid: GridSpec,
    pub kernel: KernelSetup,
    pub decay: DecaySetup,
    pub ball: BallSetup,
}

impl Preset {
    /// The kernel box dilated from its reference time to `t`: half-widths
    /// scale by `(t/time)^{σ_j/2}`, the point counts stay.
    pub fn kernel_grid(&self, t: f64) -> Result<GridSpec> {
        if !(t > 0.0) {
            return Err(Error::invalid("kernel time must be positive"));
        }
        let g = &self.kernel.grid;
        let lambda = (t / self.kernel.time).sqrt();
        let half: Vec<f64> = self.system.weights().dilate(lambda, g.upper());
        GridSpec::centered(&half, g.points())
    }
}

/// `n` points from `a` to `b` in geometric progression.
pub fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

/// Semilinear grid padding rule: the box `δ_2([−3, 3]ⁿ)`, i.e. half-width
/// `3·2^{σ_j}` on axis `j`, with 49 points per axis (97 in one dimension).
pub fn padded_grid(sys: &VectorFieldSystem) -> GridSpec {
    let half: Vec<f64> = sys
        .weights()
        .sigma()
        .iter()
        .map(|&s| 3.0 * 2f64.powi(s as i32))
        .collect();
    let pts = if sys.dim() == 1 { 97 } else { 49 };
    GridSpec::centered(&half, &vec![pts; sys.dim()]).expect("valid padded grid")
}

fn grid(half: &[f64], pts: &[usize]) -> GridSpec {
    GridSpec::centered(half, pts).expect("valid preset grid")
}

/// The system of a named preset and its recommended grids.
pub fn resolve_preset(name: &str) -> Result<Preset> {
    let (system, kernel, decay, ball) = match name {
        "euclidean-1d" => (
            euclidean(1),
            KernelSetup {
                grid: grid(&[4.0], &[129]),
                time: 0.2,
            },
            DecaySetup {
                grid: grid(&[6.0], &[481]),
                widths: vec![0.25],
                times: geometric(0.5, 2.0, 5),
                scheme: Scheme::Explicit,
                dt: None,
            },
            BallSetup {
                grid: grid(&[40.0], &[81]),
                step: 1.0,
                radii: geometric(3.0, 30.0, 8),
            },
        ),
        "euclidean-2d" => (
            euclidean(2),
            KernelSetup {
                grid: grid(&[4.0, 4.0], &[128, 128]),
                time: 0.2,
            },
            DecaySetup {
                grid: grid(&[6.0, 6.0], &[97, 97]),
                widths: vec![0.25, 0.25],
                times: geometric(0.5, 2.0, 5),
                scheme: Scheme::Explicit,
                dt: None,
            },
            BallSetup {
                grid: grid(&[40.0, 40.0], &[81, 81]),
                step: 1.0,
                radii: geometric(3.0, 30.0, 8),
            },
        ),
        "grushin-1" => (
            grushin(1),
            KernelSetup {
                grid: grid(&[3.5, 2.0], &[128, 128]),
                time: 0.3,
            },
            DecaySetup {
                grid: grid(&[10.0, 32.0], &[161, 401]),
                widths: vec![0.25, 0.25],
                times: geometric(2.0, 5.0, 5),
                scheme: Scheme::Implicit,
                dt: Some(0.02),
            },
            BallSetup {
                grid: grid(&[70.0, 2098.0], &[141, 4197]),
                step: 1.0,
                radii: geometric(6.4, 64.0, 8),
            },
        ),
        "grushin-2" => (
            grushin(2),
            KernelSetup {
                grid: grid(&[4.5, 1.5], &[128, 128]),
                time: 0.5,
            },
            DecaySetup {
                grid: grid(&[12.0, 110.0], &[97, 441]),
                widths: vec![0.25, 0.5],
                times: geometric(2.8, 5.6, 4),
                scheme: Scheme::Implicit,
                dt: Some(0.02),
            },
            BallSetup {
                grid: grid(&[30.0, 1050.0], &[61, 2101]),
                step: 1.0,
                radii: geometric(2.0, 20.0, 8),
            },
        ),
        other => {
            return Err(Error::invalid(format!(
                "unknown preset `{other}`; known presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let grid = padded_grid(&system);
    Ok(Preset {
        name: PRESET_NAMES.iter().find(|n| **n == name).expect("listed"),
        system,
        grid,
        kernel,
        decay,
        ball,
    })
}
