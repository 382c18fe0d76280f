//! Mild solutions of `u_t − Lu = φ(t) f(u)`: monotone iteration, existence
//! and non-existence certificates, and blow-up simulation.

mod blowup;
mod certificates;
mod divergence;
mod functions;
mod linear;
mod weissler;

pub use blowup::{blow_up_simulate, BlowUpConfig, BlowUpReport, Verdict};
pub use certificates::{
    chi, congl_check, necessary_condition_certificate, ChiCertificate, ConglOptions, ConglReport,
    NecessaryConditionReport,
};
pub use divergence::{
    closed_form_classification, time_dependent_divergence_test, weighted_ratio_integral, Classification,
    DivergenceReport, CONVERGENT_MARGIN, DIVERGENT_EPS, R2_FLOOR,
};
pub use functions::{
    majorant, majorant_limit_check, MajorantLimit, MajorantValue, Nonlinearity, TimeWeight, MAJORANT_ALPHA_MIN,
};
pub use linear::{
    cumulative_trapezoid, interior_mask, interpolate, linear_run, masked_sup, IntervalPropagator, LinearRun,
    SnapshotGrid,
};
pub use weissler::{
    chi_for, gaussian_domination_check, sandwich_check, weissler_iterate, DominationReport, Duhamel,
    MildIterationState, MildSolution, SandwichReport, WeisslerConfig, DOMINATION_TREND_MAX,
};
