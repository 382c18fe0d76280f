use crate::error::check_dim;
use crate::grid::GridSpec;
use crate::par;
use crate::vf_algebra::{NumericField, VectorFieldSystem};
use crate::Result;

use super::sparse::Csr;

/// Discrete `L = Σ X_i²` in divergence form: `L = -M⁻¹ K` with
/// `K = Σ_i D_iᵀ W D_i`, `M` the trapezoid node volumes and `W` the volumes
/// attached to the rows of each difference operator `D_i`.
#[derive(Debug, Clone)]
pub struct OperatorStencil {
    grid: GridSpec,
    stiffness: Csr,
    mass: Vec<f64>,
    stability_bound: f64,
}

/// One row of a difference operator together with its quadrature weight.
struct FluxRow {
    weight: f64,
    entries: Vec<(usize, f64)>,
}

fn axis_node_volume(grid: &GridSpec, axis: usize, i: usize) -> f64 {
    let h = grid.spacing(axis);
    if i == 0 || i + 1 == grid.points()[axis] {
        0.5 * h
    } else {
        h
    }
}

/// Rows anchored at `node` for a field acting along a single axis: one
/// staggered difference on the edge from `node` to its upper neighbour.
fn axial_rows(grid: &GridSpec, field: &NumericField, axis: usize, node: usize) -> Option<FluxRow> {
    let idx = grid.multi_index(node);
    if idx[axis] + 1 >= grid.points()[axis] {
        return None;
    }
    let h = grid.spacing(axis);
    let mut mid = grid.coords(node);
    mid[axis] += 0.5 * h;
    let c = field.coeff(axis).eval(&mid);
    if c == 0.0 {
        return None;
    }
    let weight: f64 = (0..grid.dim())
        .map(|l| {
            if l == axis {
                h
            } else {
                axis_node_volume(grid, l, idx[l])
            }
        })
        .product();
    let up = node + grid.stride(axis);
    Some(FluxRow {
        weight,
        entries: vec![(node, -c / h), (up, c / h)],
    })
}

/// Row for a field with several active components: the derivative at the
/// centre of the cell whose lowest corner is `node`, each partial being the
/// mean of the cell's edge differences along that axis.
fn cell_row(grid: &GridSpec, field: &NumericField, node: usize) -> Option<FluxRow> {
    let n = grid.dim();
    let idx = grid.multi_index(node);
    if (0..n).any(|l| idx[l] + 1 >= grid.points()[l]) {
        return None;
    }
    let h = grid.spacings();
    let mut center = grid.coords(node);
    for l in 0..n {
        center[l] += 0.5 * h[l];
    }
    let corners = 1usize << n;
    let share = 1.0 / (corners / 2) as f64;
    let mut coef = vec![0.0; corners];
    let mut any = false;
    for k in 0..n {
        let c = field.coeff(k).eval(&center);
        if c == 0.0 {
            continue;
        }
        any = true;
        for (bits, slot) in coef.iter_mut().enumerate() {
            let sign = if bits >> k & 1 == 1 { 1.0 } else { -1.0 };
            *slot += sign * c * share / h[k];
        }
    }
    if !any {
        return None;
    }
    let entries = coef
        .into_iter()
        .enumerate()
        .filter(|&(_, v)| v != 0.0)
        .map(|(bits, v)| {
            let target = (0..n)
                .filter(|l| bits >> l & 1 == 1)
                .map(|l| grid.stride(l))
                .sum::<usize>()
                + node;
            (target, v)
        })
        .collect();
    Some(FluxRow {
        weight: grid.cell_volume(),
        entries,
    })
}

fn node_triplets(grid: &GridSpec, fields: &[NumericField], node: usize) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for f in fields {
        let support = f.support();
        let row = match support.as_slice() {
            [] => None,
            [axis] => axial_rows(grid, f, *axis, node),
            _ => cell_row(grid, f, node),
        };
        if let Some(row) = row {
            for &(a, da) in &row.entries {
                for &(b, db) in &row.entries {
                    out.push((a as u32, b as u32, row.weight * da * db));
                }
            }
        }
    }
    out
}

/// Assemble `L = Σ X_i²` with homogeneous Neumann closure.
///
/// Fields acting along one axis use staggered edge differences (three-point
/// stencil along that axis). Fields with several components use cell-centred
/// differences, which are consistent but coarser.
pub fn assemble_operator(sys: &VectorFieldSystem, grid: &GridSpec) -> Result<OperatorStencil> {
    check_dim(sys.dim(), grid.dim())?;
    let fields = sys.numeric_fields();
    let triplets: Vec<(u32, u32, f64)> = par::map_range(grid.len(), |p| node_triplets(grid, &fields, p))
        .into_iter()
        .flatten()
        .collect();
    let stiffness = Csr::from_triplets(grid.len(), triplets);
    let mass = grid.node_volumes();
    let stability_bound = stiffness
        .diagonal()
        .iter()
        .zip(&mass)
        .filter(|(k, _)| **k > 0.0)
        .map(|(k, m)| m / k)
        .fold(f64::INFINITY, f64::min);
    Ok(OperatorStencil {
        grid: grid.clone(),
        stiffness,
        mass,
        stability_bound,
    })
}

impl OperatorStencil {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn stiffness(&self) -> &Csr {
        &self.stiffness
    }

    /// Trapezoid node volumes (the diagonal mass matrix).
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Largest explicit step keeping `I + dt L` entrywise non-negative; it
    /// also bounds the Gershgorin spectral radius of `dt L` by 2.
    pub fn stability_bound(&self) -> f64 {
        self.stability_bound
    }

    /// Default explicit step: 0.4 of the stability bound.
    pub fn default_dt(&self) -> f64 {
        0.4 * self.stability_bound
    }

    /// `out = L u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.stiffness.matvec(u, out);
        for (o, m) in out.iter_mut().zip(&self.mass) {
            *o = -*o / m;
        }
    }

    pub fn apply_seq(&self, u: &[f64], out: &mut [f64]) {
        self.stiffness.matvec_seq(u, out);
        for (o, m) in out.iter_mut().zip(&self.mass) {
            *o = -*o / m;
        }
    }

    /// `⟨u, v⟩ = Σ m_p u_p v_p`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mass.iter().zip(u).zip(v).map(|((m, a), b)| m * a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vf_algebra::{euclidean, grushin};

    fn apply(op: &OperatorStencil, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let g = op.grid();
        let u: Vec<f64> = (0..g.len()).map(|p| f(&g.coords(p))).collect();
        let mut out = vec![0.0; g.len()];
        op.apply(&u, &mut out);
        out
    }

    #[test]
    fn euclidean_quadratic_is_exact() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[11, 13]).unwrap();
        let op = assemble_operator(&euclidean(2), &grid).unwrap();
        let lu = apply(&op, |x| x[0] * x[0] + x[1] * x[1]);
        for p in 0..grid.len() {
            if grid.boundary_depth(p) >= 1 {
                assert!((lu[p] - 4.0).abs() < 1e-9, "{}", lu[p]);
            }
        }
    }

    #[test]
    fn grushin_second_order() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[21, 21]).unwrap();
        let op = assemble_operator(&grushin(1), &grid).unwrap();
        let lu = apply(&op, |x| x[1] * x[1]);
        for p in 0..grid.len() {
            if grid.boundary_depth(p) >= 1 {
                let x = grid.coords(p);
                assert!((lu[p] - 2.0 * x[0] * x[0]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constants_are_annihilated_everywhere() {
        let grid = GridSpec::centered(&[1.0, 2.0], &[9, 12]).unwrap();
        let op = assemble_operator(&grushin(2), &grid).unwrap();
        let lu = apply(&op, |_| 3.5);
        assert!(lu.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn stiffness_is_symmetric() {
        let grid = GridSpec::centered(&[1.0, 1.0], &[9, 9]).unwrap();
        let op = assemble_operator(&grushin(1), &grid).unwrap();
        assert!(op.stiffness().is_symmetric(0.0));
    }

    #[test]
    fn mixed_field_uses_cell_rows() {
        use crate::vf_algebra::{parse_vector_field, DilationWeights, VectorFieldSystem};
        let sys = VectorFieldSystem::new(
            vec![
                parse_vector_field("1 ; x1").unwrap(),
                parse_vector_field("0 ; 1").unwrap(),
            ],
            DilationWeights::new(vec![1, 1]).unwrap(),
        )
        .unwrap();
        let grid = GridSpec::centered(&[1.0, 1.0], &[9, 9]).unwrap();
        let op = assemble_operator(&sys, &grid).unwrap();
        assert!(op.stiffness().is_symmetric(1e-12));
        let lu = apply(&op, |_| 1.0);
        assert!(lu.iter().all(|v| v.abs() < 1e-12));
        // (∂₁ + x₁∂₂)² x₁ = 0 and ∂₂² x₁ = 0
        let lu = apply(&op, |x| x[0]);
        for p in 0..grid.len() {
            if grid.boundary_depth(p) >= 2 {
                assert!(lu[p].abs() < 1e-9);
            }
        }
    }
}
