//! Numerical laboratory for semilinear heat equations driven by homogeneous
//! Hörmander sums of squares `L = Σ X_i²` on `ℝⁿ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`vf_algebra`]: exact polynomial vector fields, brackets, rank and
//!   homogeneity checks, homogeneous dimension and Fujita exponent.
//! * [`cc_geometry`]: Carnot–Carathéodory distances and ball volumes on a
//!   grid graph built from short flows of the fields.
//! * [`heat`]: divergence-form discretisation of `L`, time stepping, heat
//!   kernel diagnostics and decay fits.
//! * [`semilinear`]: mild-solution iteration, global-existence and
//!   non-existence certificates, blow-up simulation.
//! * [`harness`]: presets, configuration files, scenario runs, sweeps and
//!   report emission.
//!
//! Data-parallel inner loops go through [`par`]; building without the
//! default `parallel` feature gives a purely sequential library with
//! bit-identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cc_geometry;
pub mod error;
pub mod grid;
pub mod harness;
pub mod heat;
pub mod par;
pub mod semilinear;
pub mod stats;
pub mod vf_algebra;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec};
