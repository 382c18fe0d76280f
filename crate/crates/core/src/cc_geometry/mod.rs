//! Carnot–Carathéodory distance and ball volumes on a grid graph.
//!
//! Admissible curves `γ' = Σ a_j X_j(γ)` with `|a_j| ≤ 1` are discretised by
//! edges that follow a fixed control for a time `step` and snap to the
//! nearest grid node. Distances are shortest paths in that graph.

mod graph;
mod metric;

pub use graph::{
    build_reach_graph, build_reach_graph_with, ControlNorm, ControlStencil, FlowRule, ReachGraph, ReachOptions,
};
pub use metric::distances_from;
pub use metric::{
    ball_volume, ball_volumes, cc_distance, distance_resolution, volume_growth_exponent, BallProfile, BallRow,
};
