use serde::{Deserialize, Serialize};

use crate::stats::log_log_fit;
use crate::{Error, Result};

use super::functions::{Nonlinearity, TimeWeight};
use super::linear::cumulative_trapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Divergent,
    Convergent,
    Inconclusive,
}

/// Increment growth exponents at or above `-DIVERGENT_EPS` count as divergent.
pub const DIVERGENT_EPS: f64 = 1e-6;
/// Increment growth exponents at or below `-CONVERGENT_MARGIN` count as convergent.
pub const CONVERGENT_MARGIN: f64 = 0.02;
/// Minimum `R²` of the increment fit for a decision.
pub const R2_FLOOR: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub classification: Classification,
    /// Closed-form answer when both `φ` and `f` are power-type.
    pub closed_form: Option<Classification>,
    /// `(X_k, ∫₁^{X_k} …)` at geometric cutoffs.
    pub partial_integrals: Vec<(f64, f64)>,
    /// Log-log slope of the per-cutoff increments against the cutoff.
    pub growth_exponent: f64,
    pub r_squared: f64,
}

/// Power-type exponent of `φ`: `Some(None)` for `φ ≡ 0`.
fn weight_exponent(phi: &TimeWeight) -> Option<Option<f64>> {
    match phi {
        TimeWeight::Constant { c } if *c == 0.0 => Some(None),
        TimeWeight::Constant { .. } => Some(Some(0.0)),
        TimeWeight::Power { sigma } => Some(Some(*sigma)),
        TimeWeight::Tabulated { .. } => None,
    }
}

/// Closed form for `φ = t^σ`, `f = A u^α`: divergent iff `σ + (q/2)(1−α) ≥ −1`.
pub fn closed_form_classification(phi: &TimeWeight, f: &Nonlinearity, q: f64) -> Option<Classification> {
    let sigma = weight_exponent(phi)?;
    match (sigma, f) {
        (None, _) | (_, Nonlinearity::Zero) => Some(Classification::Convergent),
        (Some(sigma), Nonlinearity::Power { alpha, .. }) => {
            if sigma + 0.5 * q * (1.0 - alpha) >= -1.0 {
                Some(Classification::Divergent)
            } else {
                Some(Classification::Convergent)
            }
        }
        _ => None,
    }
}

const SEGMENTS_PER_DECADE: usize = 2;
const SIMPSON_PANELS: usize = 64;

/// Classifies `∫₁^∞ φ(τ) τ^{q/2} f(ω τ^{−q/2}) dτ` from partial integrals up
/// to `horizon`, using Simpson's rule in `log τ` on each cutoff segment.
pub fn time_dependent_divergence_test(
    phi: &TimeWeight,
    f: &Nonlinearity,
    omega: f64,
    q: f64,
    horizon: f64,
) -> Result<DivergenceReport> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega must be positive"));
    }
    if !(horizon >= 10.0) {
        return Err(Error::invalid("horizon must be at least 10"));
    }
    phi.validate()?;
    f.validate()?;
    let half_q = 0.5 * q;
    let integrand = |s: f64| {
        let tau = s.exp();
        phi.eval(tau) * tau.powf(1.0 + half_q) * f.eval(omega * tau.powf(-half_q))
    };
    let segments = ((horizon.log10() * SEGMENTS_PER_DECADE as f64).ceil() as usize).max(4);
    let s_end = horizon.ln();
    let ds = s_end / segments as f64;
    let mut partial = 0.0;
    let mut partial_integrals = Vec::with_capacity(segments);
    let mut increments = Vec::with_capacity(segments);
    for k in 0..segments {
        let a = k as f64 * ds;
        let h = ds / SIMPSON_PANELS as f64;
        let mut sum = integrand(a) + integrand(a + ds);
        for j in 1..SIMPSON_PANELS {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(a + j as f64 * h);
        }
        let inc = sum * h / 3.0;
        partial += inc;
        increments.push(((a + ds).exp(), inc));
        partial_integrals.push(((a + ds).exp(), partial));
    }

    let late = &increments[segments / 2..];
    let (classification, growth_exponent, r_squared) = if late.iter().all(|(_, v)| *v == 0.0) {
        (Classification::Convergent, f64::NEG_INFINITY, 1.0)
    } else if late.iter().any(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
        (Classification::Inconclusive, f64::NAN, 0.0)
    } else {
        let xs: Vec<f64> = late.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = late.iter().map(|p| p.1).collect();
        let fit = log_log_fit(&xs, &ys)?;
        let hi = ys.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ys.iter().cloned().fold(f64::MAX, f64::min);
        // round-off scatter around flat increments makes R² meaningless
        let r2 = if hi / lo - 1.0 < 1e-9 { 1.0 } else { fit.r_squared };
        let class = if r2 < R2_FLOOR {
            Classification::Inconclusive
        } else if fit.slope >= -DIVERGENT_EPS {
            Classification::Divergent
        } else if fit.slope <= -CONVERGENT_MARGIN {
            Classification::Convergent
        } else {
            Classification::Inconclusive
        };
        (class, fit.slope, r2)
    };
    Ok(DivergenceReport {
        classification,
        closed_form: closed_form_classification(phi, f, q),
        partial_integrals,
        growth_exponent,
        r_squared,
    })
}

/// Partial integrals of `φ(τ) f(‖e^{τL}w‖_∞) / ‖e^{τL}w‖_∞` along a sup-norm
/// trace.
pub fn weighted_ratio_integral(times: &[f64], sups: &[f64], f: &Nonlinearity, phi: &TimeWeight) -> Result<Vec<f64>> {
    if times.len() != sups.len() || times.is_empty() {
        return Err(Error::invalid("trace needs matching non-empty samples"));
    }
    let ys: Vec<f64> = times
        .iter()
        .zip(sups)
        .map(|(&t, &s)| if s > 0.0 { phi.eval(t) * f.eval(s) / s } else { 0.0 })
        .collect();
    Ok(cumulative_trapezoid(times, &ys))
}
