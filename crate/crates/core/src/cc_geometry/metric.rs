use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::graph::ReachGraph;
use crate::stats::{log_log_fit, LinearFit};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path distances from `source`, settling nodes only up to `cutoff`.
/// Nodes beyond the cutoff or unreachable hold `f64::INFINITY`.
pub fn distances_from(graph: &ReachGraph, source: usize, cutoff: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.num_nodes()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: source,
    });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for (t, c) in graph.neighbors(node) {
            let nd = d + c;
            if nd < dist[t] && nd <= cutoff {
                dist[t] = nd;
                heap.push(Entry { dist: nd, node: t });
            }
        }
    }
    dist
}

/// Graph distance between the nodes nearest to `x` and `y`; `INFINITY` when
/// no path exists.
pub fn cc_distance(graph: &ReachGraph, x: &[f64], y: &[f64]) -> Result<f64> {
    let a = graph.grid().snap(x)?;
    let b = graph.grid().snap(y)?;
    if a == b {
        return Ok(0.0);
    }
    Ok(distances_from(graph, a, f64::INFINITY)[b])
}

/// Error bound carried by every reported distance: snapping at both ends
/// plus one partial step at each end.
pub fn distance_resolution(graph: &ReachGraph) -> f64 {
    let h = graph.grid().spacings().into_iter().fold(0.0_f64, f64::max);
    2.0 * h + 2.0 * graph.step()
}

/// Distances from one centre, reusable for many radii.
#[derive(Debug, Clone)]
pub struct BallProfile<'g> {
    graph: &'g ReachGraph,
    center: usize,
    dist: Vec<f64>,
    cutoff: f64,
}

impl<'g> BallProfile<'g> {
    /// Runs one shortest-path search from `center` out to `r_max`.
    pub fn new(graph: &'g ReachGraph, center: &[f64], r_max: f64) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(Error::invalid("radius must be positive"));
        }
        let c = graph.grid().snap(center)?;
        let dist = distances_from(graph, c, r_max);
        Ok(Self {
            graph,
            center: c,
            dist,
            cutoff: r_max,
        })
    }

    pub fn center_node(&self) -> usize {
        self.center
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Node count times cell volume; errors when a ball node lies on the
    /// box boundary, since the true ball would then extend past the box.
    pub fn volume(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::invalid("radius must be positive"));
        }
        if r > self.cutoff {
            return Err(Error::invalid(format!(
                "radius {r} exceeds the profile cutoff {}",
                self.cutoff
            )));
        }
        let grid = self.graph.grid();
        let mut count = 0usize;
        for (node, &d) in self.dist.iter().enumerate() {
            if d <= r {
                if grid.is_on_boundary(node) {
                    return Err(Error::Refused(format!("ball of radius {r} is clipped by the box")));
                }
                count += 1;
            }
        }
        Ok(count as f64 * grid.cell_volume())
    }
}

pub fn ball_volume(graph: &ReachGraph, center: &[f64], r: f64) -> Result<f64> {
    BallProfile::new(graph, center, r)?.volume(r)
}

/// Volumes for several radii from a single search.
pub fn ball_volumes(graph: &ReachGraph, center: &[f64], radii: &[f64]) -> Result<Vec<f64>> {
    let r_max = radii.iter().copied().fold(0.0_f64, f64::max);
    let profile = BallProfile::new(graph, center, r_max)?;
    radii.iter().map(|&r| profile.volume(r)).collect()
}

/// Least-squares slope of `log |B(center, r)|` against `log r`.
pub fn volume_growth_exponent(graph: &ReachGraph, center: &[f64], radii: &[f64]) -> Result<LinearFit> {
    if radii.len() < 4 {
        return Err(Error::invalid("at least four radii are needed"));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    let vols = ball_volumes(graph, center, radii)?;
    log_log_fit(radii, &vols)
}

/// One row of a ball-volume table.
#[derive(Debug, Clone, Serialize)]
pub struct BallRow {
    pub r: f64,
    pub volume: f64,
    pub distance_resolution: f64,
}

#[cfg(test)]
mod tests {
    use super::super::graph::build_reach_graph;
    use super::*;
    use crate::grid::GridSpec;
    use crate::vf_algebra::{euclidean, grushin};

    fn euclid_graph(half: f64, n: usize) -> ReachGraph {
        let grid = GridSpec::centered(&[half, half], &[n, n]).unwrap();
        let h = grid.spacing(0);
        build_reach_graph(&euclidean(2), &grid, h).unwrap()
    }

    #[test]
    fn zero_distance_to_self() {
        let g = euclid_graph(1.0, 21);
        assert_eq!(cc_distance(&g, &[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn euclidean_unit_distance() {
        let g = euclid_graph(1.5, 61);
        let d = cc_distance(&g, &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((d - 1.0).abs() <= distance_resolution(&g), "d = {d}");
    }

    #[test]
    fn outside_box_is_an_error() {
        let g = euclid_graph(1.0, 11);
        assert!(cc_distance(&g, &[0.0, 0.0], &[3.0, 0.0]).is_err());
    }

    #[test]
    fn max_norm_ball_is_a_square() {
        // diagonal moves cost one step under the max norm
        let g = euclid_graph(2.0, 81);
        let r = 1.0;
        let v = ball_volume(&g, &[0.0, 0.0], r).unwrap();
        assert!((v / (4.0 * r * r) - 1.0).abs() < 0.1, "v = {v}");
    }

    #[test]
    fn tiny_ball_is_one_cell() {
        let g = euclid_graph(1.0, 21);
        let v = ball_volume(&g, &[0.0, 0.0], 1e-3).unwrap();
        assert_eq!(v, g.grid().cell_volume());
    }

    #[test]
    fn clipped_ball_is_refused() {
        let g = euclid_graph(1.0, 21);
        assert!(ball_volume(&g, &[0.0, 0.0], 1.5).is_err());
    }

    #[test]
    fn disconnected_nodes_are_infinite() {
        // one field only: the x2 direction is unreachable
        use crate::vf_algebra::{DilationWeights, VectorField, VectorFieldSystem};
        let sys = VectorFieldSystem::new(
            vec![VectorField::partial(2, 0)],
            DilationWeights::new(vec![1, 1]).unwrap(),
        )
        .unwrap();
        let grid = GridSpec::centered(&[1.0, 1.0], &[11, 11]).unwrap();
        let g = build_reach_graph(&sys, &grid, grid.spacing(0)).unwrap();
        let d = cc_distance(&g, &[0.0, 0.0], &[0.0, 0.6]).unwrap();
        assert!(d.is_infinite());
    }

    #[test]
    fn grushin_vertical_needs_a_detour() {
        let grid = GridSpec::centered(&[2.0, 2.0], &[41, 41]).unwrap();
        let g = build_reach_graph(&grushin(1), &grid, grid.spacing(0)).unwrap();
        let d = cc_distance(&g, &[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(d.is_finite());
        assert!(d > 1.0);
    }

    #[test]
    fn growth_exponent_needs_four_radii() {
        let g = euclid_graph(2.0, 41);
        assert!(volume_growth_exponent(&g, &[0.0, 0.0], &[0.5, 1.0, 1.5]).is_err());
        assert!(volume_growth_exponent(&g, &[0.0, 0.0], &[0.5, 1.0, 0.8, 1.5]).is_err());
    }
}
