//! Grid discretization of a continuous family of `Sym(2)` matrices whose
//! off-diagonal entry vanishes on `[0, ½]`. On that half each grid point
//! contributes `Real ⊕ Real` (two central atoms); above it a full `Sym(2)`.
//! The pointwise power `x(t) ↦ x(t)^{λ(t)}` with `λ = 1` on `(½, 1]` is an
//! order isomorphism that is not linear as soon as `λ ≠ 1` somewhere.

use std::sync::Arc;

use super::form::{EngagedMap, OrderIsoForm};
use super::monotone::MonotoneBijection;
use crate::algebra::{AlgebraDescriptor, FactorDescriptor};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::algebra::Element;

/// Grid points `t_k = (k + 1) / n`, `k = 0..n`.
pub fn grid_points(n_grid: usize) -> Vec<f64> {
    (0..n_grid).map(|k| (k + 1) as f64 / n_grid as f64).collect()
}

pub fn grid_algebra(n_grid: usize) -> Result<Arc<AlgebraDescriptor>> {
    let mut factors = Vec::new();
    for t in grid_points(n_grid) {
        if t <= 0.5 {
            factors.extend([FactorDescriptor::Real, FactorDescriptor::Real]);
        } else {
            factors.push(FactorDescriptor::Sym { n: 2 });
        }
    }
    AlgebraDescriptor::shared(factors)
}

pub fn grid_power_demo(n_grid: usize, lambda: impl Fn(f64) -> f64) -> Result<OrderIsoForm> {
    if n_grid == 0 {
        return Err(Error::Precondition("n_grid must be at least 1".into()));
    }
    let grid = grid_points(n_grid);
    for &t in &grid {
        let value = lambda(t);
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::LambdaNotPositive { t, value });
        }
    }
    let mut f_p = Vec::new();
    for &t in &grid {
        let value = lambda(t);
        if t <= 0.5 {
            let power = MonotoneBijection::power(value)?;
            f_p.extend([power.clone(), power]);
        } else if value != 1.0 {
            return Err(Error::LambdaNotOneOnEngaged { t, value });
        }
    }
    let algebra = grid_algebra(n_grid)?;
    let engaged_factors: Vec<FactorDescriptor> = algebra.factors().iter().copied().filter(|f| f.dim() > 1).collect();
    let engaged = if engaged_factors.is_empty() {
        None
    } else {
        let e = AlgebraDescriptor::shared(engaged_factors)?;
        Some(EngagedMap { y: Element::unit(&e), j: LinearOperator::identity(&e) })
    };
    let count = f_p.len();
    OrderIsoForm::new(Arc::clone(&algebra), algebra, (0..count).collect(), f_p, engaged)
}
