use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing bijection of `[0, ∞)` fixing 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMonotone", into = "RawMonotone")]
pub enum MonotoneBijection {
    /// `t ↦ t^α`.
    Power { alpha: f64 },
    /// Linear interpolation through `(t, f(t))` pairs starting at `(0, 0)`;
    /// the last slope continues past the final breakpoint.
    PiecewiseLinear { breakpoints: Vec<(f64, f64)> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawMonotone {
    Power { alpha: f64 },
    PiecewiseLinear { breakpoints: Vec<(f64, f64)> },
}

impl TryFrom<RawMonotone> for MonotoneBijection {
    type Error = Error;

    fn try_from(raw: RawMonotone) -> Result<Self> {
        match raw {
            RawMonotone::Power { alpha } => Self::power(alpha),
            RawMonotone::PiecewiseLinear { breakpoints } => Self::piecewise_linear(breakpoints),
        }
    }
}

impl From<MonotoneBijection> for RawMonotone {
    fn from(m: MonotoneBijection) -> Self {
        match m {
            MonotoneBijection::Power { alpha } => RawMonotone::Power { alpha },
            MonotoneBijection::PiecewiseLinear { breakpoints } => RawMonotone::PiecewiseLinear { breakpoints },
        }
    }
}

impl MonotoneBijection {
    pub const IDENTITY: MonotoneBijection = MonotoneBijection::Power { alpha: 1.0 };

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidMonotone(format!("power exponent must be positive, got {alpha}")));
        }
        Ok(MonotoneBijection::Power { alpha })
    }

    pub fn piecewise_linear(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidMonotone("need at least two breakpoints".into()));
        }
        if breakpoints[0] != (0.0, 0.0) {
            return Err(Error::InvalidMonotone("first breakpoint must be (0, 0)".into()));
        }
        for w in breakpoints.windows(2) {
            let ok = w[1].0 > w[0].0 && w[1].1 > w[0].1 && w[1].0.is_finite() && w[1].1.is_finite();
            if !ok {
                return Err(Error::InvalidMonotone(format!(
                    "breakpoints must increase strictly in both coordinates: {:?} then {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(MonotoneBijection::PiecewiseLinear { breakpoints })
    }

    /// Evaluates at `t`; negative arguments are treated as 0.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            MonotoneBijection::Power { alpha } => {
                if *alpha == 1.0 {
                    t
                } else if t == 0.0 {
                    0.0
                } else {
                    t.powf(*alpha)
                }
            }
            MonotoneBijection::PiecewiseLinear { breakpoints } => {
                let k = breakpoints[1..]
                    .iter()
                    .position(|&(x, _)| t <= x)
                    .unwrap_or(breakpoints.len() - 2);
                let (x0, y0) = breakpoints[k];
                let (x1, y1) = breakpoints[k + 1];
                y0 + (t - x0) * (y1 - y0) / (x1 - x0)
            }
        }
    }

    pub fn inverse(&self) -> MonotoneBijection {
        match self {
            MonotoneBijection::Power { alpha } => MonotoneBijection::Power { alpha: 1.0 / alpha },
            MonotoneBijection::PiecewiseLinear { breakpoints } => MonotoneBijection::PiecewiseLinear {
                breakpoints: breakpoints.iter().map(|&(x, y)| (y, x)).collect(),
            },
        }
    }

    /// Slope `c` when the map is `t ↦ c·t`.
    pub fn linear_slope(&self) -> Option<f64> {
        match self {
            MonotoneBijection::Power { alpha } => (*alpha == 1.0).then_some(1.0),
            MonotoneBijection::PiecewiseLinear { breakpoints } => {
                let slope = |w: &[(f64, f64)]| (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                let first = slope(&breakpoints[..2]);
                breakpoints
                    .windows(2)
                    .all(|w| (slope(w) - first).abs() <= 1e-12 * first.abs())
                    .then_some(first)
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        self.linear_slope().is_some()
    }

    /// `self ∘ inner`. Powers compose to powers and piecewise-linear maps to
    /// piecewise-linear maps; mixing the two kinds is only representable
    /// when one side is the identity.
    pub fn after(&self, inner: &MonotoneBijection) -> Result<MonotoneBijection> {
        use MonotoneBijection::*;
        match (self, inner) {
            (Power { alpha: a }, Power { alpha: b }) => Ok(Power { alpha: a * b }),
            (Power { alpha }, other) | (other, Power { alpha }) if *alpha == 1.0 => Ok(other.clone()),
            (PiecewiseLinear { breakpoints: outer }, PiecewiseLinear { breakpoints: inner_bp }) => {
                let mut ts: Vec<f64> = inner_bp.iter().map(|p| p.0).collect();
                let inner_inv = inner.inverse();
                ts.extend(outer.iter().map(|p| inner_inv.eval(p.0)));
                ts.sort_by(f64::total_cmp);
                ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1.0));
                let breakpoints = ts.into_iter().map(|t| (t, self.eval(inner.eval(t)))).collect();
                Self::piecewise_linear(breakpoints)
            }
            _ => Err(Error::CatalogComposition(format!("{self:?} after {inner:?}"))),
        }
    }
}
