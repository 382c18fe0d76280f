use std::fmt;

use crate::error::check_dim;
use crate::{Error, Result};

use super::polynomial::{Polynomial, Rational};

/// First-order operator `Σ_j c_j(x) ∂/∂x_j` with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    coeffs: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(coeffs: Vec<Polynomial>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::invalid("vector field needs at least one component"));
        }
        for c in &coeffs {
            check_dim(n, c.nvars())?;
        }
        Ok(Self { coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: vec![Polynomial::zero(dim); dim],
        }
    }

    /// The constant field `∂/∂x_{axis+1}`.
    pub fn partial(dim: usize, axis: usize) -> Self {
        let mut f = Self::zero(dim);
        f.coeffs[axis] = Polynomial::one(dim);
        f
    }

    /// `coeff · ∂/∂x_{axis+1}`.
    pub fn along(axis: usize, coeff: Polynomial) -> Self {
        let dim = coeff.nvars();
        let mut f = Self::zero(dim);
        f.coeffs[axis] = coeff;
        f
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, axis: usize) -> &Polynomial {
        &self.coeffs[axis]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    /// Axes with a non-zero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| !self.coeffs[j].is_zero()).collect()
    }

    /// `X(p) = Σ_j c_j ∂_j p`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim());
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = p.derivative(j);
            if !d.is_zero() {
                out = out.add(&c.mul(&d));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.eval(point)).collect()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.eval_f64(point)).collect()
    }
}

/// `[X, Y] = XY − YX`; the second-order parts cancel, leaving
/// `Σ_j (X(Y_j) − Y(X_j)) ∂_j`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    check_dim(x.dim(), y.dim())?;
    let coeffs = (0..x.dim())
        .map(|j| x.apply(y.coeff(j)).sub(&y.apply(x.coeff(j))))
        .collect();
    Ok(VectorField { coeffs })
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" ; "))
    }
}

#[cfg(test)]
mod tests {
    use super::super::polynomial::rat;
    use super::*;

    fn x1(n: usize) -> Polynomial {
        Polynomial::variable(n, 0)
    }

    #[test]
    fn constant_fields_commute() {
        let b = lie_bracket(&VectorField::partial(2, 0), &VectorField::partial(2, 1)).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn d1_with_x1_d2() {
        let b = lie_bracket(&VectorField::partial(2, 0), &VectorField::along(1, x1(2))).unwrap();
        assert_eq!(b, VectorField::partial(2, 1));
    }

    #[test]
    fn self_bracket_vanishes() {
        let y = VectorField::along(1, x1(2));
        assert!(lie_bracket(&y, &y).unwrap().is_zero());
    }

    #[test]
    fn second_order_grushin_bracket() {
        let d1 = VectorField::partial(2, 0);
        let y = VectorField::along(1, x1(2).pow(2));
        let b1 = lie_bracket(&d1, &y).unwrap();
        let b2 = lie_bracket(&d1, &b1).unwrap();
        assert_eq!(b2, VectorField::partial(2, 1).scale(&rat(2)));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(lie_bracket(&VectorField::partial(2, 0), &VectorField::partial(3, 0)).is_err());
    }
}
