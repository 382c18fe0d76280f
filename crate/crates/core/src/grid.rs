//! Truncated rectangular grids over `ℝⁿ` and fields sampled on them.
//!
//! Nodes are numbered with axis 0 varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    points: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let n = lower.len();
        if n == 0 {
            return Err(Error::invalid("grid must have at least one axis"));
        }
        check_dim(n, upper.len())?;
        check_dim(n, points.len())?;
        for j in 0..n {
            if !(lower[j] < upper[j]) || !lower[j].is_finite() || !upper[j].is_finite() {
                return Err(Error::invalid(format!(
                    "grid axis {j}: need finite lower < upper, got [{}, {}]",
                    lower[j], upper[j]
                )));
            }
            if points[j] < 3 {
                return Err(Error::invalid(format!(
                    "grid axis {j}: need at least 3 points, got {}",
                    points[j]
                )));
            }
        }
        Ok(Self { lower, upper, points })
    }

    /// Symmetric box `[-half_j, half_j]` with `points_j` nodes per axis.
    pub fn centered(half_widths: &[f64], points: &[usize]) -> Result<Self> {
        Self::new(
            half_widths.iter().map(|h| -h).collect(),
            half_widths.to_vec(),
            points.to_vec(),
        )
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.points[axis] - 1) as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.spacing(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacings().iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.points[..axis].iter().product()
    }

    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for &p in &self.points {
            idx.push(node % p);
            node /= p;
        }
        idx
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        let mut node = 0;
        for j in (0..self.dim()).rev() {
            node = node * self.points[j] + idx[j];
        }
        node
    }

    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + i as f64 * self.spacing(axis)
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .enumerate()
            .map(|(j, &i)| self.axis_coord(j, i))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(j, &v)| v >= self.lower[j] && v <= self.upper[j])
    }

    /// Nearest node, or `None` outside the box (half a cell of slack).
    pub fn nearest_node(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim());
        for (j, &v) in x.iter().enumerate() {
            let s = ((v - self.lower[j]) / self.spacing(j)).round();
            if !(s >= 0.0) || s > (self.points[j] - 1) as f64 {
                return None;
            }
            idx.push(s as usize);
        }
        Some(self.linear_index(&idx))
    }

    pub fn snap(&self, x: &[f64]) -> Result<usize> {
        check_dim(self.dim(), x.len())?;
        self.nearest_node(x)
            .ok_or_else(|| Error::invalid(format!("point {x:?} lies outside the grid box")))
    }

    /// Trapezoid weight of a node: the volume of its dual cell.
    pub fn node_volume(&self, node: usize) -> f64 {
        self.multi_index(node)
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let h = self.spacing(j);
                if i == 0 || i + 1 == self.points[j] {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }

    pub fn node_volumes(&self) -> Vec<f64> {
        (0..self.len()).map(|p| self.node_volume(p)).collect()
    }

    /// Distance (in nodes) from the nearest box face.
    pub fn boundary_depth(&self, node: usize) -> usize {
        self.multi_index(node)
            .iter()
            .zip(&self.points)
            .map(|(&i, &p)| i.min(p - 1 - i))
            .min()
            .unwrap_or(0)
    }

    pub fn is_on_boundary(&self, node: usize) -> bool {
        self.boundary_depth(node) == 0
    }
}

/// Real values on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

/// Sup-norms skip this many outer layers to stay clear of the Neumann closure.
pub const BOUNDARY_LAYER: usize = 2;

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        check_dim(grid.len(), values.len())?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &GridSpec, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|p| f(&grid.coords(p))).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// `amplitude · exp(-Σ ((x_j - c_j)/w_j)²)`.
    pub fn gaussian(grid: &GridSpec, center: &[f64], widths: &[f64], amplitude: f64) -> Self {
        Self::from_fn(grid, |x| {
            let r2: f64 = x
                .iter()
                .zip(center)
                .zip(widths)
                .map(|((x, c), w)| ((x - c) / w).powi(2))
                .sum();
            amplitude * (-r2).exp()
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::invalid("fields live on different grids"))
        }
    }

    pub fn scaled(&self, s: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `∫ u` with trapezoid node weights.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(p, v)| v * self.grid.node_volume(p))
            .sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_abs();
        }
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.abs().powf(p) * self.grid.node_volume(i))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Max |u| over every node.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max |u| over nodes at least [`BOUNDARY_LAYER`] cells inside the box.
    pub fn sup_interior(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (p, v) in self.values.iter().enumerate() {
            if self.grid.boundary_depth(p) >= BOUNDARY_LAYER {
                m = m.max(v.abs());
            }
        }
        m
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Fraction of `∫|u|` carried outside the central sub-box of relative
    /// size `inner` (e.g. 0.9 keeps 90% of every half-width).
    pub fn mass_outside(&self, inner: f64) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        let mut outside = 0.0;
        for (p, v) in self.values.iter().enumerate() {
            let w = v.abs() * g.node_volume(p);
            total += w;
            let x = g.coords(p);
            let out = x.iter().enumerate().any(|(j, &xj)| {
                let mid = 0.5 * (g.lower()[j] + g.upper()[j]);
                let half = 0.5 * (g.upper()[j] - g.lower()[j]);
                (xj - mid).abs() > inner * half
            });
            if out {
                outside += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outside / total
        }
    }

    /// Value at the node nearest to `x`.
    pub fn at(&self, x: &[f64]) -> Result<f64> {
        Ok(self.values[self.grid.snap(x)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new(vec![0.0, -1.0], vec![1.0, 1.0], vec![4, 5]).unwrap();
        for p in 0..g.len() {
            assert_eq!(g.linear_index(&g.multi_index(p)), p);
        }
        assert_eq!(g.stride(1), 4);
        assert_eq!(g.coords(5), vec![1.0 / 3.0, -0.5]);
    }

    #[test]
    fn trapezoid_volumes_sum_to_box() {
        let g = GridSpec::new(vec![-1.0, 0.0], vec![1.0, 3.0], vec![5, 7]).unwrap();
        let total: f64 = g.node_volumes().iter().sum();
        assert!((total - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_coarse_or_inverted_axes() {
        assert!(GridSpec::new(vec![0.0], vec![1.0], vec![2]).is_err());
        assert!(GridSpec::new(vec![1.0], vec![0.0], vec![5]).is_err());
    }

    #[test]
    fn snapping_and_outside() {
        let g = GridSpec::centered(&[1.0], &[5]).unwrap();
        assert_eq!(g.nearest_node(&[0.26]), Some(3));
        assert!(g.snap(&[1.5]).is_err());
    }
}
