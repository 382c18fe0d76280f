//! Finite-difference evolution of `∂_t u = Σ X_i² u` on a truncated box,
//! heat-kernel approximation and decay measurements.

mod decay;
mod evolve;
pub mod io;
mod kernel;
mod operator;
mod sparse;

pub use decay::{decay_exponent, DecayFit, Norm, WINDOW_INNER, WINDOW_LEAK};
pub use evolve::{evolve, step_sizes, Scheme, SolverConfig, Stepper};
pub use kernel::{
    gaussian_rate, heat_kernel, kernel_mass, mollified_delta, ray_is_monotone, reproduction_residual,
    symmetry_residual, KernelConfig, ReproductionReport,
};
pub use operator::{assemble_operator, OperatorStencil};
pub use sparse::Csr;
