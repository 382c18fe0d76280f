use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::grid::GridSpec;
use crate::par;
use crate::vf_algebra::{NumericField, VectorFieldSystem};
use crate::{Error, Result};

/// How an edge endpoint is integrated from its start node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FlowRule {
    #[default]
    Midpoint,
    Euler,
}

/// Norm of the control vector used as the edge cost rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ControlNorm {
    /// `max_j |a_j|`, matching the `|a_j| ≤ l(γ)` normalisation.
    #[default]
    Max,
    Euclidean,
}

/// Finite set of unit-ball controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlStencil {
    controls: Vec<Vec<f64>>,
}

impl ControlStencil {
    /// `±e_i` plus every diagonal `±e_i ± e_j`, `i < j`.
    pub fn diagonal(m: usize) -> Self {
        let mut controls = Vec::new();
        for i in 0..m {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; m];
                a[i] = s;
                controls.push(a);
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for si in [1.0, -1.0] {
                    for sj in [1.0, -1.0] {
                        let mut a = vec![0.0; m];
                        a[i] = si;
                        a[j] = sj;
                        controls.push(a);
                    }
                }
            }
        }
        Self { controls }
    }

    /// Only the `2m` single-field controls.
    pub fn axial(m: usize) -> Self {
        let mut s = Self::diagonal(m);
        s.controls.truncate(2 * m);
        s
    }

    pub fn custom(controls: Vec<Vec<f64>>) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::invalid("control stencil is empty"));
        }
        let m = controls[0].len();
        for a in &controls {
            check_dim(m, a.len())?;
            if a.iter().any(|v| v.abs() > 1.0 || !v.is_finite()) {
                return Err(Error::invalid("controls must satisfy |a_j| <= 1"));
            }
        }
        Ok(Self { controls })
    }

    pub fn controls(&self) -> &[Vec<f64>] {
        &self.controls
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachOptions {
    pub stencil: Option<ControlStencil>,
    pub rule: FlowRule,
    pub norm: ControlNorm,
    /// Integrate the per-node flows on the rayon pool.
    pub parallel: bool,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self {
            stencil: None,
            rule: FlowRule::Midpoint,
            norm: ControlNorm::Max,
            parallel: true,
        }
    }
}

/// Symmetric weighted graph on the grid nodes, stored as adjacency arrays.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    grid: GridSpec,
    step: f64,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    costs: Vec<f64>,
}

impl ReachGraph {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[node]..self.offsets[node + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.costs[r])
            .map(|(&t, &c)| (t as usize, c))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> Option<f64> {
        self.neighbors(a).find(|&(t, _)| t == b).map(|(_, c)| c)
    }
}

fn control_cost(a: &[f64], norm: ControlNorm) -> f64 {
    match norm {
        ControlNorm::Max => a.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        ControlNorm::Euclidean => a.iter().map(|v| v * v).sum::<f64>().sqrt(),
    }
}

fn velocity(fields: &[NumericField], a: &[f64], x: &[f64], scratch: &mut [f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (f, &aj) in fields.iter().zip(a) {
        if aj == 0.0 {
            continue;
        }
        f.eval_into(x, scratch);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o += aj * s;
        }
    }
}

/// Outgoing edges of one node, before symmetrisation.
fn node_edges(
    grid: &GridSpec,
    fields: &[NumericField],
    stencil: &ControlStencil,
    step: f64,
    opts: &ReachOptions,
    node: usize,
) -> Vec<(u32, f64)> {
    let n = grid.dim();
    let p = grid.coords(node);
    let mut scratch = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut mid = vec![0.0; n];
    let mut out = Vec::with_capacity(stencil.controls().len());
    for a in stencil.controls() {
        velocity(fields, a, &p, &mut scratch, &mut v);
        let end: Vec<f64> = match opts.rule {
            FlowRule::Euler => p.iter().zip(&v).map(|(x, dx)| x + step * dx).collect(),
            FlowRule::Midpoint => {
                for k in 0..n {
                    mid[k] = p[k] + 0.5 * step * v[k];
                }
                velocity(fields, a, &mid, &mut scratch, &mut v);
                p.iter().zip(&v).map(|(x, dx)| x + step * dx).collect()
            }
        };
        if let Some(target) = grid.nearest_node(&end) {
            if target != node {
                out.push((target as u32, step * control_cost(a, opts.norm)));
            }
        }
    }
    out
}

/// Graph with the default diagonal stencil, midpoint flow and max-norm cost.
pub fn build_reach_graph(sys: &VectorFieldSystem, grid: &GridSpec, step: f64) -> Result<ReachGraph> {
    build_reach_graph_with(sys, grid, step, &ReachOptions::default())
}

pub fn build_reach_graph_with(
    sys: &VectorFieldSystem,
    grid: &GridSpec,
    step: f64,
    opts: &ReachOptions,
) -> Result<ReachGraph> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid("flow step must be positive"));
    }
    check_dim(sys.dim(), grid.dim())?;
    let fields = sys.numeric_fields();
    let stencil = opts
        .stencil
        .clone()
        .unwrap_or_else(|| ControlStencil::diagonal(fields.len()));
    check_dim(fields.len(), stencil.controls()[0].len())?;
    if grid.len() > u32::MAX as usize {
        return Err(Error::invalid("grid too large for the reach graph"));
    }

    let edges = |node| node_edges(grid, &fields, &stencil, step, opts, node);
    let forward = if opts.parallel {
        par::map_range(grid.len(), edges)
    } else {
        par::map_range_seq(grid.len(), edges)
    };
    if forward.iter().all(|e| e.is_empty()) {
        return Err(Error::invalid(
            "every flow leaves the box or stays put: the reach graph is empty",
        ));
    }
    Ok(symmetrize(grid.clone(), step, forward))
}

/// Add every reversed edge and keep the cheapest copy of each pair. The
/// reversed trajectory is itself admissible with the same cost.
fn symmetrize(grid: GridSpec, step: f64, forward: Vec<Vec<(u32, f64)>>) -> ReachGraph {
    let nn = forward.len();
    let mut degree = vec![0usize; nn];
    for (a, edges) in forward.iter().enumerate() {
        degree[a] += edges.len();
        for &(b, _) in edges {
            degree[b as usize] += 1;
        }
    }
    let mut adj: Vec<Vec<(u32, f64)>> = degree.iter().map(|&d| Vec::with_capacity(d)).collect();
    for (a, edges) in forward.iter().enumerate() {
        for &(b, c) in edges {
            adj[a].push((b, c));
            adj[b as usize].push((a as u32, c));
        }
    }
    drop(forward);
    let mut offsets = Vec::with_capacity(nn + 1);
    let mut targets = Vec::new();
    let mut costs = Vec::new();
    offsets.push(0);
    for mut list in adj {
        list.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut last: Option<u32> = None;
        for (t, c) in list {
            if last != Some(t) {
                targets.push(t);
                costs.push(c);
                last = Some(t);
            }
        }
        offsets.push(targets.len());
    }
    ReachGraph {
        grid,
        step,
        offsets,
        targets,
        costs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::{euclidean, grushin};

    #[test]
    fn euclidean_axis_and_diagonal_neighbors() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[11, 11]).unwrap();
        let h = grid.spacing(0);
        let g = build_reach_graph(&euclidean(2), &grid, h).unwrap();
        let c = grid.snap(&[0.0, 0.0]).unwrap();
        let nbrs: Vec<_> = g.neighbors(c).collect();
        assert_eq!(nbrs.len(), 8);
        for dir in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            let t = grid.snap(&[dir[0] * h, dir[1] * h]).unwrap();
            assert_eq!(g.has_edge(c, t), Some(h));
        }
        // axial stencil gives exactly the four axis neighbours
        let opts = ReachOptions {
            stencil: Some(ControlStencil::axial(2)),
            ..Default::default()
        };
        let g4 = build_reach_graph_with(&euclidean(2), &grid, h, &opts).unwrap();
        assert_eq!(g4.neighbors(c).count(), 4);
    }

    #[test]
    fn grushin_degenerate_axis_has_no_vertical_edge() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[11, 11]).unwrap();
        let h = grid.spacing(0);
        let g = build_reach_graph(&grushin(1), &grid, h).unwrap();
        let c = grid.snap(&[0.0, 0.0]).unwrap();
        let up = grid.snap(&[0.0, h]).unwrap();
        let down = grid.snap(&[0.0, -h]).unwrap();
        assert_eq!(g.has_edge(c, up), None);
        assert_eq!(g.has_edge(c, down), None);
    }

    #[test]
    fn edges_cost_step_times_control_norm_and_are_symmetric() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[9, 17]).unwrap();
        let step = grid.spacing(0);
        let g = build_reach_graph(&grushin(1), &grid, step).unwrap();
        for a in 0..g.num_nodes() {
            for (b, c) in g.neighbors(a) {
                assert_eq!(c, step);
                assert_eq!(g.has_edge(b, a), Some(c));
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn rejects_bad_step() {
        let grid = GridSpec::centered(&[1.0], &[5]).unwrap();
        assert!(build_reach_graph(&euclidean(1), &grid, 0.0).is_err());
        assert!(build_reach_graph(&euclidean(1), &grid, 10.0).is_err());
    }
}
