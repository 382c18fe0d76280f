//! Exact algebra of polynomial vector fields.
//!
//! Everything here runs over ℚ: ranks come from exact elimination and
//! homogeneity is checked monomial by monomial, so no tolerance appears
//! anywhere in this module.

mod echelon;
mod field;
mod numeric;
mod parser;
mod polynomial;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

pub use echelon::{rank_of, EchelonBasis};
pub use field::{lie_bracket, VectorField};
pub use numeric::{NumericField, NumericPolynomial};
pub use parser::{parse_system, parse_vector_field};
pub use polynomial::{rat, ratio, Monomial, Polynomial, Rational};

use crate::error::check_dim;
use crate::{Error, Result};

/// Exponents `1 = σ₁ ≤ … ≤ σₙ` of `δ_λ(x) = (λ^{σ₁}x₁, …, λ^{σₙ}xₙ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DilationWeights {
    sigma: Vec<u32>,
}

impl DilationWeights {
    pub fn new(sigma: Vec<u32>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::invalid("dilation weights must not be empty"));
        }
        if sigma[0] != 1 {
            return Err(Error::invalid(format!(
                "first dilation weight must be 1, got {}",
                sigma[0]
            )));
        }
        if sigma.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("dilation weights must be non-decreasing"));
        }
        Ok(Self { sigma })
    }

    pub fn isotropic(n: usize) -> Self {
        Self { sigma: vec![1; n] }
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn max(&self) -> u32 {
        *self.sigma.last().expect("non-empty")
    }

    /// `δ_λ` applied to a real point.
    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.sigma)
            .map(|(v, &s)| v * lambda.powi(s as i32))
            .collect()
    }
}

/// `m` linearly independent fields on `ℝⁿ` with their dilation weights.
#[derive(Debug, Clone)]
pub struct VectorFieldSystem {
    fields: Vec<VectorField>,
    weights: DilationWeights,
}

impl VectorFieldSystem {
    /// Checks dimensions and field-level linear independence over ℚ.
    /// Homogeneity and the rank condition are left to [`validate`](Self::validate).
    pub fn new(fields: Vec<VectorField>, weights: DilationWeights) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::invalid("a system needs at least one field"));
        }
        let n = weights.dim();
        for f in &fields {
            check_dim(n, f.dim())?;
        }
        let mut basis = EchelonBasis::new();
        for (i, f) in fields.iter().enumerate() {
            if !basis.insert(coefficient_vector(f)) {
                return Err(Error::invalid(format!(
                    "field {} is a linear combination of the preceding fields",
                    i + 1
                )));
            }
        }
        Ok(Self { fields, weights })
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn weights(&self) -> &DilationWeights {
        &self.weights
    }

    pub fn numeric_fields(&self) -> Vec<NumericField> {
        self.fields.iter().map(NumericField::from_exact).collect()
    }

    /// Default bracket-length cap: brackets longer than `σₙ` vanish for
    /// degree-1 homogeneous fields.
    pub fn default_max_step(&self) -> usize {
        self.weights.max() as usize
    }

    /// Refuse systems that are not degree-1 homogeneous or miss the rank
    /// condition at the origin within `max_step` brackets.
    pub fn validate(&self, max_step: Option<usize>) -> Result<SystemAnalysis> {
        let analysis = analyze(self, max_step)?;
        if let Some(i) = analysis.homogeneous.iter().position(|h| !h) {
            return Err(Error::Refused(format!(
                "field {} is not homogeneous of degree 1 for weights {:?}",
                i + 1,
                self.weights.sigma
            )));
        }
        if analysis.rank_at_origin < self.dim() {
            return Err(Error::Refused(format!(
                "rank condition fails at 0: rank {} < {} with brackets up to length {}",
                analysis.rank_at_origin,
                self.dim(),
                analysis.max_step
            )));
        }
        Ok(analysis)
    }
}

/// Coefficients keyed by `(axis, monomial)`: the field as a vector in the
/// monomial·∂_j basis.
fn coefficient_vector(f: &VectorField) -> BTreeMap<(usize, Monomial), Rational> {
    let mut v = BTreeMap::new();
    for (j, c) in f.coeffs().iter().enumerate() {
        for (m, coef) in c.terms() {
            v.insert((j, m.clone()), coef.clone());
        }
    }
    v
}

/// Iterated brackets up to `max_step`, pruned to a basis per length.
///
/// `levels[k]` holds the brackets of length `k + 1` that were independent of
/// every shorter bracket and of the earlier ones at the same length. This
/// spans the same space as all right-nested brackets of those lengths,
/// because a dependent bracket only generates brackets already covered.
pub struct BracketTower {
    pub levels: Vec<Vec<VectorField>>,
    basis: EchelonBasis<(usize, Monomial)>,
}

impl BracketTower {
    pub fn build(sys: &VectorFieldSystem, max_step: usize) -> Result<Self> {
        if max_step < 1 {
            return Err(Error::invalid("max_step must be at least 1"));
        }
        let mut basis = EchelonBasis::new();
        let mut levels: Vec<Vec<VectorField>> = Vec::new();
        let first: Vec<VectorField> = sys
            .fields
            .iter()
            .filter(|f| basis.insert(coefficient_vector(f)))
            .cloned()
            .collect();
        levels.push(first);
        for _ in 1..max_step {
            let prev = levels.last().expect("at least one level");
            let mut next = Vec::new();
            for x in &sys.fields {
                for b in prev {
                    let br = lie_bracket(x, b)?;
                    if !br.is_zero() && basis.insert(coefficient_vector(&br)) {
                        next.push(br);
                    }
                }
            }
            levels.push(next);
        }
        Ok(Self { levels, basis })
    }

    pub fn dimension(&self) -> usize {
        self.basis.rank()
    }

    pub fn all(&self) -> impl Iterator<Item = &VectorField> {
        self.levels.iter().flatten()
    }
}

/// Rank of `Lie{X}(point)` using brackets up to `max_step`, and the
/// shortest bracket length at which the rank reaches `n`.
pub fn hormander_rank(sys: &VectorFieldSystem, point: &[Rational], max_step: usize) -> Result<(usize, Option<usize>)> {
    check_dim(sys.dim(), point.len())?;
    let tower = BracketTower::build(sys, max_step)?;
    let n = sys.dim();
    let mut basis = EchelonBasis::<usize>::new();
    let mut achieved = None;
    for (k, level) in tower.levels.iter().enumerate() {
        for f in level {
            let v: BTreeMap<usize, Rational> = f
                .eval(point)?
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            basis.insert(v);
        }
        if achieved.is_none() && basis.rank() == n {
            achieved = Some(k + 1);
        }
    }
    Ok((basis.rank(), achieved))
}

/// True iff every monomial `x^β` in the coefficient of `∂_j` has weighted
/// degree `Σ β_k σ_k = σ_j − degree`, i.e. `X(φ∘δ_λ) = λ^degree (Xφ)∘δ_λ`.
pub fn check_homogeneity(x: &VectorField, w: &DilationWeights, degree: i64) -> Result<bool> {
    check_dim(w.dim(), x.dim())?;
    Ok(x.coeffs().iter().enumerate().all(|(j, c)| {
        let target = w.sigma[j] as i64 - degree;
        c.weighted_degrees(&w.sigma).all(|d| d == target)
    }))
}

/// `q = Σ σ_j` and `α_F = 1 + 2/q`.
pub fn homogeneous_dimension(w: &DilationWeights) -> (u64, Rational) {
    let q: u64 = w.sigma.iter().map(|&s| s as u64).sum();
    (q, rat(1) + ratio(2, q as i64))
}

/// `N = dim span` of brackets up to `max_step`; lifting is needed when `N > n`.
pub fn lie_algebra_dimension(sys: &VectorFieldSystem, max_step: usize) -> Result<(usize, bool)> {
    let tower = BracketTower::build(sys, max_step)?;
    let dim = tower.dimension();
    Ok((dim, dim > sys.dim()))
}

/// Symbolic summary of a system, as printed by `analyze`.
#[derive(Debug, Clone, Serialize)]
pub struct SystemAnalysis {
    pub n: usize,
    pub m: usize,
    pub weights: Vec<u32>,
    pub homogeneous: Vec<bool>,
    pub max_step: usize,
    pub rank_at_origin: usize,
    pub rank_step: Option<usize>,
    pub q: u64,
    /// Exact `α_F` as `"num/den"`.
    pub alpha_f: String,
    pub alpha_f_value: f64,
    pub lie_dimension: usize,
    pub needs_lifting: bool,
}

pub fn analyze(sys: &VectorFieldSystem, max_step: Option<usize>) -> Result<SystemAnalysis> {
    let max_step = max_step.unwrap_or_else(|| sys.default_max_step());
    let homogeneous = sys
        .fields
        .iter()
        .map(|f| check_homogeneity(f, &sys.weights, 1))
        .collect::<Result<Vec<_>>>()?;
    let origin = vec![Rational::zero(); sys.dim()];
    let (rank, step) = hormander_rank(sys, &origin, max_step)?;
    let (q, alpha_f) = homogeneous_dimension(&sys.weights);
    let (lie_dim, lifting) = lie_algebra_dimension(sys, max_step)?;
    let alpha_f_value = num_traits::ToPrimitive::to_f64(&alpha_f).unwrap_or(f64::NAN);
    Ok(SystemAnalysis {
        n: sys.dim(),
        m: sys.fields.len(),
        weights: sys.weights.sigma.clone(),
        homogeneous,
        max_step,
        rank_at_origin: rank,
        rank_step: step,
        q,
        alpha_f: alpha_f.to_string(),
        alpha_f_value,
        lie_dimension: lie_dim,
        needs_lifting: lifting,
    })
}

/// `{∂₁, x₁^γ ∂₂}` with weights `(1, γ+1)`.
pub fn grushin(gamma: u32) -> VectorFieldSystem {
    let x1 = Polynomial::variable(2, 0);
    VectorFieldSystem::new(
        vec![VectorField::partial(2, 0), VectorField::along(1, x1.pow(gamma))],
        DilationWeights::new(vec![1, gamma + 1]).expect("valid weights"),
    )
    .expect("independent fields")
}

/// Coordinate fields `∂₁, …, ∂ₙ`.
pub fn euclidean(n: usize) -> VectorFieldSystem {
    VectorFieldSystem::new(
        (0..n).map(|j| VectorField::partial(n, j)).collect(),
        DilationWeights::isotropic(n),
    )
    .expect("independent fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(n: usize) -> Vec<Rational> {
        vec![Rational::zero(); n]
    }

    #[test]
    fn grushin_rank_steps() {
        assert_eq!(hormander_rank(&grushin(1), &origin(2), 3).unwrap(), (2, Some(2)));
        assert_eq!(hormander_rank(&grushin(2), &origin(2), 4).unwrap(), (2, Some(3)));
        assert_eq!(hormander_rank(&grushin(2), &origin(2), 2).unwrap(), (1, None));
    }

    #[test]
    fn euclidean_rank_anywhere() {
        let p = vec![ratio(3, 7), rat(-2)];
        assert_eq!(hormander_rank(&euclidean(2), &p, 1).unwrap(), (2, Some(1)));
    }

    #[test]
    fn rank_rejects_zero_step() {
        assert!(hormander_rank(&euclidean(2), &origin(2), 0).is_err());
    }

    #[test]
    fn homogeneity_examples() {
        let x1 = Polynomial::variable(2, 0);
        let w12 = DilationWeights::new(vec![1, 2]).unwrap();
        assert!(check_homogeneity(&VectorField::along(1, x1.clone()), &w12, 1).unwrap());

        let w1 = DilationWeights::new(vec![1]).unwrap();
        let euler = VectorField::along(0, Polynomial::variable(1, 0));
        assert!(!check_homogeneity(&euler, &w1, 1).unwrap());
        assert!(check_homogeneity(&euler, &w1, 0).unwrap());

        let w23 = DilationWeights { sigma: vec![2, 3] };
        assert!(!check_homogeneity(&VectorField::partial(2, 0), &w23, 1).unwrap());
        assert!(check_homogeneity(&VectorField::partial(2, 0), &w23, 2).unwrap());
    }

    #[test]
    fn dimensions_and_fujita() {
        let (q, a) = homogeneous_dimension(&DilationWeights::new(vec![1, 2]).unwrap());
        assert_eq!((q, a), (3, ratio(5, 3)));
        let (q, a) = homogeneous_dimension(&DilationWeights::new(vec![1, 1, 2]).unwrap());
        assert_eq!((q, a), (4, ratio(3, 2)));
        let (q, a) = homogeneous_dimension(&DilationWeights::isotropic(5));
        assert_eq!((q, a), (5, ratio(7, 5)));
    }

    #[test]
    fn lie_dimensions() {
        assert_eq!(lie_algebra_dimension(&euclidean(2), 1).unwrap(), (2, false));
        assert_eq!(lie_algebra_dimension(&grushin(1), 2).unwrap(), (3, true));
        assert_eq!(lie_algebra_dimension(&grushin(2), 3).unwrap(), (4, true));
    }

    #[test]
    fn weights_validation() {
        assert!(DilationWeights::new(vec![2, 3]).is_err());
        assert!(DilationWeights::new(vec![1, 3, 2]).is_err());
        assert!(DilationWeights::new(vec![]).is_err());
    }

    #[test]
    fn dependent_fields_rejected() {
        let f = VectorField::partial(2, 0);
        let g = f.scale(&rat(3));
        assert!(VectorFieldSystem::new(vec![f, g], DilationWeights::isotropic(2)).is_err());
    }

    #[test]
    fn pointwise_dependent_but_field_independent() {
        // {∂₁, x₁∂₂} is dependent at x₁ = 0 yet independent as fields
        assert!(
            VectorFieldSystem::new(grushin(1).fields().to_vec(), DilationWeights::new(vec![1, 2]).unwrap()).is_ok()
        );
    }

    #[test]
    fn validation_refuses_non_hormander() {
        let sys = VectorFieldSystem::new(vec![VectorField::partial(2, 0)], DilationWeights::isotropic(2)).unwrap();
        match sys.validate(None) {
            Err(Error::Refused(msg)) => assert!(msg.contains("rank")),
            other => panic!("unexpected {other:?}"),
        }
        let sys = VectorFieldSystem::new(
            vec![
                VectorField::partial(2, 0),
                VectorField::along(1, Polynomial::variable(2, 0)),
            ],
            DilationWeights::isotropic(2),
        )
        .unwrap();
        assert!(matches!(sys.validate(None), Err(Error::Refused(_))));
    }
}
