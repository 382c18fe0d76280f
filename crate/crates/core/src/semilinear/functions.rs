use serde::{Deserialize, Serialize};

use crate::stats::log_log_fit;
use crate::{Error, Result};

/// Reaction term `f(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Nonlinearity {
    /// `f(u) = a·u^alpha`, with `b` the constant in the lower bound `f ≥ b·u^alpha`.
    Power { alpha: f64, a: f64, b: f64 },
    /// Piecewise-linear interpolation of samples `(u_i, f_i)` with `u_0 = 0`.
    /// Beyond the last sample `f(u)/u` is held at its last value.
    Tabulated { u: Vec<f64>, f: Vec<f64> },
    /// `f ≡ 0`.
    Zero,
}

impl Nonlinearity {
    pub fn power(alpha: f64, a: f64) -> Result<Self> {
        let f = Nonlinearity::Power { alpha, a, b: a };
        f.validate()?;
        Ok(f)
    }

    pub fn tabulated(u: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let out = Nonlinearity::Tabulated { u, f };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::Power { alpha, a, b } => {
                if !(*alpha > 1.0) || !alpha.is_finite() {
                    return Err(Error::invalid(format!("power exponent must exceed 1, got {alpha}")));
                }
                if !(*b > 0.0) || !(a >= b) || !a.is_finite() {
                    return Err(Error::invalid(format!(
                        "power constants need A >= B > 0, got A = {a}, B = {b}"
                    )));
                }
                Ok(())
            }
            Nonlinearity::Tabulated { u, f } => {
                if u.len() != f.len() {
                    return Err(Error::DimensionMismatch {
                        expected: u.len(),
                        found: f.len(),
                    });
                }
                if u.len() < 2 {
                    return Err(Error::invalid("tabulated nonlinearity needs at least two samples"));
                }
                if u[0] != 0.0 || f[0] != 0.0 {
                    return Err(Error::invalid("tabulated nonlinearity must start at f(0) = 0"));
                }
                if u.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("tabulated u samples must be strictly increasing"));
                }
                if f.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::invalid("tabulated f samples must be finite and non-negative"));
                }
                let ratios: Vec<f64> = u[1..].iter().zip(&f[1..]).map(|(u, f)| f / u).collect();
                if let Some(i) = ratios.windows(2).position(|w| w[1] < w[0]) {
                    return Err(Error::invalid(format!(
                        "f(u)/u decreases between u = {} and u = {}",
                        u[i + 1],
                        u[i + 2]
                    )));
                }
                Ok(())
            }
            Nonlinearity::Zero => Ok(()),
        }
    }

    /// `f(u)` for `u ≥ 0`; negative inputs are treated as 0.
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match self {
            Nonlinearity::Power { alpha, a, .. } => a * u.powf(*alpha),
            Nonlinearity::Tabulated { u: us, f } => {
                let last = us.len() - 1;
                if u >= us[last] {
                    return f[last] / us[last] * u;
                }
                let k = us.partition_point(|&x| x <= u);
                let (u0, u1) = (us[k - 1], us[k]);
                let s = (u - u0) / (u1 - u0);
                f[k - 1] + s * (f[k] - f[k - 1])
            }
            Nonlinearity::Zero => 0.0,
        }
    }

    /// Largest sampled `u` for tabulated kinds.
    pub fn range(&self) -> f64 {
        match self {
            Nonlinearity::Tabulated { u, .. } => *u.last().expect("validated"),
            _ => f64::INFINITY,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Nonlinearity::Zero => true,
            Nonlinearity::Tabulated { f, .. } => f.iter().all(|v| *v == 0.0),
            Nonlinearity::Power { .. } => false,
        }
    }

    /// `(alpha, A)` for the upper bound `f ≤ A·u^alpha`, when one is known.
    pub fn upper_power(&self) -> Option<(f64, f64)> {
        match self {
            Nonlinearity::Power { alpha, a, .. } => Some((*alpha, *a)),
            _ => None,
        }
    }

    /// `(alpha, B)` for the lower bound `f ≥ B·u^alpha`, when one is known.
    pub fn lower_power(&self) -> Option<(f64, f64)> {
        match self {
            Nonlinearity::Power { alpha, b, .. } => Some((*alpha, *b)),
            _ => None,
        }
    }
}

/// Time weight `φ(t) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TimeWeight {
    Constant {
        c: f64,
    },
    /// `φ(t) = t^sigma`.
    Power {
        sigma: f64,
    },
    /// Piecewise-linear samples; constant beyond the last one.
    Tabulated {
        t: Vec<f64>,
        phi: Vec<f64>,
    },
}

impl Default for TimeWeight {
    fn default() -> Self {
        TimeWeight::Constant { c: 1.0 }
    }
}

impl TimeWeight {
    pub fn validate(&self) -> Result<()> {
        match self {
            TimeWeight::Constant { c } => {
                if !(*c >= 0.0) || !c.is_finite() {
                    return Err(Error::invalid("constant weight must be finite and non-negative"));
                }
            }
            TimeWeight::Power { sigma } => {
                if !(*sigma > -1.0) || !sigma.is_finite() {
                    return Err(Error::invalid(format!(
                        "t^sigma is not locally integrable at 0 for sigma = {sigma}"
                    )));
                }
            }
            TimeWeight::Tabulated { t, phi } => {
                if t.len() != phi.len() || t.is_empty() {
                    return Err(Error::invalid("tabulated weight needs matching non-empty samples"));
                }
                if t[0] != 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("tabulated weight times must start at 0 and increase"));
                }
                if phi.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::invalid("tabulated weight must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Refuses weights that are unbounded at `t = 0`, which the time-stepping
    /// routines would have to evaluate there.
    pub fn require_bounded(&self) -> Result<()> {
        self.validate()?;
        if let TimeWeight::Power { sigma } = self {
            if *sigma < 0.0 {
                return Err(Error::invalid(format!(
                    "t^{sigma} is unbounded at t = 0; time stepping needs a bounded weight"
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeWeight::Constant { c } => *c,
            TimeWeight::Power { sigma } => {
                if *sigma == 0.0 {
                    1.0
                } else {
                    t.powf(*sigma)
                }
            }
            TimeWeight::Tabulated { t: ts, phi } => {
                let last = ts.len() - 1;
                if t >= ts[last] {
                    return phi[last];
                }
                let k = ts.partition_point(|&x| x <= t).max(1);
                let s = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
                phi[k - 1] + s * (phi[k] - phi[k - 1])
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TimeWeight::Constant { c } => *c == 0.0,
            TimeWeight::Power { .. } => false,
            TimeWeight::Tabulated { phi, .. } => phi.iter().all(|v| *v == 0.0),
        }
    }
}

/// Smallest `α` on the geometric grid used for tabulated majorants.
pub const MAJORANT_ALPHA_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantValue {
    pub value: f64,
    /// `false` when the value is a grid supremum, hence a lower bound.
    pub exact: bool,
}

/// `f_M(v) = sup_{a∈(0,1)} f(a v)/f(a)`.
pub fn majorant(f: &Nonlinearity, v: f64, alpha_grid_size: usize) -> Result<MajorantValue> {
    if !(v >= 0.0) {
        return Err(Error::invalid("majorant argument must be non-negative"));
    }
    if alpha_grid_size < 16 {
        return Err(Error::invalid("majorant grid needs at least 16 points"));
    }
    match f {
        Nonlinearity::Power { alpha, .. } => Ok(MajorantValue {
            value: v.powf(*alpha),
            exact: true,
        }),
        Nonlinearity::Zero => Err(Error::invalid("the majorant of f = 0 is undefined")),
        Nonlinearity::Tabulated { .. } => {
            if v > f.range() {
                return Err(Error::invalid(format!(
                    "majorant argument {v} exceeds the tabulated range {}",
                    f.range()
                )));
            }
            let ratio = (1.0 / MAJORANT_ALPHA_MIN).powf(1.0 / alpha_grid_size as f64);
            let mut best: f64 = 0.0;
            let mut a = MAJORANT_ALPHA_MIN;
            for _ in 0..alpha_grid_size {
                let fa = f.eval(a);
                if fa > 0.0 {
                    best = best.max(f.eval(a * v) / fa);
                }
                a *= ratio;
            }
            Ok(MajorantValue {
                value: best,
                exact: false,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorantLimit {
    pub v: Vec<f64>,
    /// `sup_{w ≤ v_i} f_M(w)/w` over the sampled sequence.
    pub ratio: Vec<f64>,
    /// Log-log slope of the ratio against `v`.
    pub slope: f64,
    pub tends_to_zero: bool,
}

/// Checks `f_M(v)/v → 0` as `v → 0⁺` along `v_i = v0·2^{-i}`.
pub fn majorant_limit_check(f: &Nonlinearity, v0: f64, steps: usize, alpha_grid_size: usize) -> Result<MajorantLimit> {
    if steps < 4 {
        return Err(Error::invalid("limit check needs at least four points"));
    }
    let v: Vec<f64> = (0..steps).map(|i| v0 * 0.5f64.powi(i as i32)).collect();
    let mut raw = Vec::with_capacity(steps);
    for &vi in &v {
        raw.push(majorant(f, vi, alpha_grid_size)?.value / vi);
    }
    let mut ratio = raw.clone();
    for i in (0..steps - 1).rev() {
        ratio[i] = ratio[i].max(ratio[i + 1]);
    }
    let tends_to_zero;
    let slope;
    if ratio.iter().all(|r| *r > 0.0) {
        slope = log_log_fit(&v, &ratio)?.slope;
        tends_to_zero = slope > 0.0;
    } else {
        slope = f64::NAN;
        tends_to_zero = *ratio.last().expect("non-empty") == 0.0;
    }
    Ok(MajorantLimit {
        v,
        ratio,
        slope,
        tends_to_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_validation() {
        assert!(Nonlinearity::power(1.0, 1.0).is_err());
        assert!(Nonlinearity::Power {
            alpha: 2.0,
            a: 1.0,
            b: 2.0
        }
        .validate()
        .is_err());
        assert!(Nonlinearity::power(2.0, 1.0).is_ok());
    }

    #[test]
    fn tabulated_validation_and_eval() {
        let f = Nonlinearity::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(f.eval(1.5), 2.5);
        assert_eq!(f.eval(4.0), 8.0);
        assert!(Nonlinearity::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 3.0]).is_err());
        assert!(Nonlinearity::tabulated(vec![0.0, 1.0], vec![0.5, 1.0]).is_err());
    }

    #[test]
    fn power_majorant_is_exact() {
        let f = Nonlinearity::power(2.5, 3.0).unwrap();
        let m = majorant(&f, 1.7, 16).unwrap();
        assert!(m.exact);
        assert_eq!(m.value, 1.7f64.powf(2.5));
        assert_eq!(majorant(&f, 1.0, 16).unwrap().value, 1.0);
    }

    #[test]
    fn tabulated_majorant() {
        let us: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let fs: Vec<f64> = us.iter().map(|u| u * u).collect();
        let f = Nonlinearity::tabulated(us, fs).unwrap();
        let m = majorant(&f, 1.0, 32).unwrap();
        assert!(!m.exact);
        assert!((m.value - 1.0).abs() < 1e-12);
        // below the first knot the table is linear, so f(a/2)/f(a) = 1/2
        let m = majorant(&f, 0.5, 64).unwrap();
        assert!((m.value - 0.5).abs() < 1e-12);
        assert!(majorant(&f, 6.0, 32).is_err());
    }

    #[test]
    fn limit_check_for_power() {
        let f = Nonlinearity::power(1.5, 1.0).unwrap();
        let lim = majorant_limit_check(&f, 1.0, 10, 16).unwrap();
        assert!(lim.tends_to_zero);
        assert!((lim.slope - 0.5).abs() < 1e-9);
    }

    #[test]
    fn weights() {
        assert_eq!(TimeWeight::Power { sigma: 2.0 }.eval(3.0), 9.0);
        assert!(TimeWeight::Power { sigma: -1.0 }.validate().is_err());
        assert!(TimeWeight::Power { sigma: -0.5 }.require_bounded().is_err());
        let w = TimeWeight::Tabulated {
            t: vec![0.0, 1.0],
            phi: vec![0.0, 2.0],
        };
        assert_eq!(w.eval(0.5), 1.0);
        assert_eq!(w.eval(5.0), 2.0);
    }
}
