//! Truncated numeric models over the reals: multiplicative homogeneity of
//! degree `p`, its discrete (powers of `r0`) variant, and the additive
//! exponential variant. Regularizations here range over the sampled part of
//! `H` only, so they bound the true inf/sup from above (resp. below).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envelope::Side;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DemoError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("h={h} moves x={x} to {hx}, outside the sampled domain")]
    DomainEscape { h: f64, x: f64, hx: f64 },
    #[error("f is not finite at {x}")]
    NotFinite { x: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealKind {
    /// `h` in `]0,inf[` acting by multiplication, `h(h) = h^p`.
    PosHomog { p: f64 },
    /// `h` in `{r0^n}`, `h(h) = h^p`.
    BoundedHomog { r0: f64, p: i32 },
    /// `h` in `R` acting by translation, `h(h) = e^(p h)`.
    ExpHomog { p: f64 },
}

impl RealKind {
    fn identity(self) -> f64 {
        match self {
            RealKind::ExpHomog { .. } => 0.0,
            _ => 1.0,
        }
    }

    fn inverse(self, h: f64) -> f64 {
        match self {
            RealKind::ExpHomog { .. } => -h,
            _ => 1.0 / h,
        }
    }

    /// `h x`.
    pub fn act(self, h: f64, x: f64) -> f64 {
        match self {
            RealKind::ExpHomog { .. } => h + x,
            _ => h * x,
        }
    }

    /// The multiplier `h(h)` on the codomain.
    pub fn factor(self, h: f64) -> f64 {
        match self {
            RealKind::PosHomog { p } => h.powf(p),
            RealKind::BoundedHomog { p, .. } => h.powi(p),
            RealKind::ExpHomog { p } => (p * h).exp(),
        }
    }
}

/// A closed-form function to regularize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RealFunction {
    /// `coef * x^exponent`.
    Power { coef: f64, exponent: f64 },
    /// `x^exponent * (1 + amplitude * sin(2 pi log_base x))`.
    LogPeriodic { exponent: f64, amplitude: f64, base: f64 },
    /// `coef * e^(rate x)`.
    Exp { coef: f64, rate: f64 },
}

impl RealFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            RealFunction::Power { coef, exponent } => coef * x.powf(exponent),
            RealFunction::LogPeriodic { exponent, amplitude, base } => {
                x.powf(exponent) * (1.0 + amplitude * (std::f64::consts::TAU * x.log(base)).sin())
            }
            RealFunction::Exp { coef, rate } => coef * (rate * x).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealModel {
    #[serde(flatten)]
    pub kind: RealKind,
    pub sample_h: Vec<f64>,
    pub sample_x: Vec<f64>,
    /// Closed interval every `h x` must stay in; unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// The demo block of an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub model: RealModel,
    pub function: RealFunction,
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// `{2^n : |n| <= n_max}`.
pub fn dyadic(n_max: i32) -> Vec<f64> {
    (-n_max..=n_max).map(|n| 2f64.powi(n)).collect()
}

/// `count` points spaced evenly in `log` between `lo` and `hi`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

impl RealModel {
    pub fn new(kind: RealKind, sample_h: Vec<f64>, sample_x: Vec<f64>) -> Result<Self, DemoError> {
        let m = RealModel { kind, sample_h, sample_x, domain: None, tolerance: DEFAULT_TOLERANCE };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), DemoError> {
        let bad = |msg: String| Err(DemoError::InvalidModel(msg));
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.sample_h.is_empty() || self.sample_x.is_empty() {
            return bad("sample_h and sample_x must be nonempty".into());
        }
        if let Some(h) = self.sample_h.iter().chain(&self.sample_x).find(|v| !v.is_finite()) {
            return bad(format!("sample value {h} is not finite"));
        }
        let tol = self.tolerance;
        let contains = |v: f64| self.sample_h.iter().any(|&h| close(h, v, tol) || (v == 0.0 && h.abs() <= tol));
        match self.kind {
            RealKind::PosHomog { p } | RealKind::ExpHomog { p } if !p.is_finite() => {
                return bad("exponent must be finite".into());
            }
            RealKind::BoundedHomog { r0, .. } if !(r0 > 0.0 && r0 != 1.0 && r0.is_finite()) => {
                return bad(format!("r0 must be positive and not 1, got {r0}"));
            }
            _ => {}
        }
        if !matches!(self.kind, RealKind::ExpHomog { .. }) {
            if let Some(h) = self.sample_h.iter().find(|&&h| h <= 0.0) {
                return bad(format!("acting element {h} is not positive"));
            }
        }
        if let RealKind::BoundedHomog { r0, .. } = self.kind {
            for &h in &self.sample_h {
                let n = h.ln() / r0.ln();
                if !close(r0.powi(n.round() as i32), h, tol.max(1e-9)) {
                    return bad(format!("{h} is not an integer power of {r0}"));
                }
            }
        }
        if !contains(self.kind.identity()) {
            return bad("sample_h must contain the identity".into());
        }
        if let Some(&h) = self.sample_h.iter().find(|&&h| !contains(self.kind.inverse(h))) {
            return bad(format!("sample_h lacks the inverse of {h}"));
        }
        Ok(())
    }

    fn in_domain(&self, v: f64) -> bool {
        let positive = matches!(self.kind, RealKind::ExpHomog { .. }) || v > 0.0;
        positive && self.domain.is_none_or(|[lo, hi]| lo <= v && v <= hi)
    }
}

/// Truncated `f_min(x) = inf_h h(h)^-1 f(hx)` (or the sup for `Upper`) at
/// every sample point.
pub fn numeric_regularize(m: &RealModel, f: impl Fn(f64) -> f64, side: Side) -> Result<Vec<f64>, DemoError> {
    m.validate()?;
    m.sample_x
        .iter()
        .map(|&x| {
            let mut acc: Option<f64> = None;
            for &h in &m.sample_h {
                let hx = m.kind.act(h, x);
                if !m.in_domain(hx) || !m.in_domain(x) {
                    return Err(DemoError::DomainEscape { h, x, hx });
                }
                let v = f(hx);
                if !v.is_finite() {
                    return Err(DemoError::NotFinite { x: hx });
                }
                let v = v / m.kind.factor(h);
                acc = Some(match (acc, side) {
                    (None, _) => v,
                    (Some(a), Side::Lower) => a.min(v),
                    (Some(a), Side::Upper) => a.max(v),
                });
            }
            Ok(acc.expect("sample_h is nonempty"))
        })
        .collect()
}

/// One row of the demo output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub x: f64,
    pub f: f64,
    pub f_min: f64,
    pub f_max: f64,
}

pub fn demo_table(cfg: &DemoConfig) -> Result<Vec<DemoRow>, DemoError> {
    let f = |x: f64| cfg.function.eval(x);
    let lo = numeric_regularize(&cfg.model, f, Side::Lower)?;
    let hi = numeric_regularize(&cfg.model, f, Side::Upper)?;
    Ok(cfg
        .model
        .sample_x
        .iter()
        .zip(lo.into_iter().zip(hi))
        .map(|(&x, (f_min, f_max))| DemoRow { x, f: f(x), f_min, f_max })
        .collect())
}

/// Orbits of the extended reals under multiplication by `]0,inf[`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealOrbit {
    NegInf,
    Negative,
    Zero,
    Positive,
    PosInf,
}

impl RealOrbit {
    pub const ALL: [RealOrbit; 5] =
        [RealOrbit::NegInf, RealOrbit::Negative, RealOrbit::Zero, RealOrbit::Positive, RealOrbit::PosInf];

    pub fn label(self) -> &'static str {
        match self {
            RealOrbit::NegInf => "{-inf}",
            RealOrbit::Negative => "]-inf,0[",
            RealOrbit::Zero => "{0}",
            RealOrbit::Positive => "]0,+inf[",
            RealOrbit::PosInf => "{+inf}",
        }
    }

    pub fn is_stationary(self) -> bool {
        matches!(self, RealOrbit::NegInf | RealOrbit::Zero | RealOrbit::PosInf)
    }
}

impl fmt::Display for RealOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `None` for NaN.
pub fn classify_real_orbit(x: f64) -> Option<RealOrbit> {
    Some(if x.is_nan() {
        return None;
    } else if x == f64::NEG_INFINITY {
        RealOrbit::NegInf
    } else if x == f64::INFINITY {
        RealOrbit::PosInf
    } else if x < 0.0 {
        RealOrbit::Negative
    } else if x == 0.0 {
        RealOrbit::Zero
    } else {
        RealOrbit::Positive
    })
}
