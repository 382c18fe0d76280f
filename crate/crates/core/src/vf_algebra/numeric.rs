use num_traits::ToPrimitive;

use super::field::VectorField;
use super::polynomial::Polynomial;

/// Floating point copy of a polynomial for fast grid evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPolynomial {
    terms: Vec<(f64, Vec<i32>)>,
}

impl NumericPolynomial {
    pub fn from_exact(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| (c.to_f64().unwrap_or(f64::NAN), m.iter().map(|&e| e as i32).collect()))
            .collect();
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &v)| if k == 0 { acc } else { acc * v.powi(k) })
            })
            .sum()
    }
}

/// Floating point copy of a vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericField {
    coeffs: Vec<NumericPolynomial>,
}

impl NumericField {
    pub fn from_exact(f: &VectorField) -> Self {
        Self {
            coeffs: f.coeffs().iter().map(NumericPolynomial::from_exact).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, axis: usize) -> &NumericPolynomial {
        &self.coeffs[axis]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| !self.coeffs[j].is_zero()).collect()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o = c.eval(x);
        }
    }
}
