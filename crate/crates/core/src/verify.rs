//! Sampling oracles that check the main modules from first principles.
//!
//! Every trial draws its inputs from `trial_rng(seed, trial)`, so a check is
//! reproducible and its trials can be fanned out in any order. Reports from
//! disjoint trial ranges merge with [`SampleReport::merge`].

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{inner_product, AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::operator::quadratic_rep;
use crate::par::{any_indexed, map_indexed, Backend};
use crate::sampling::{random_element, random_positive, trial_rng};
use crate::spectral::{is_positive, min_eigenvalue, order_unit_norm, sqrt};

pub const FAST_TRIALS: usize = 1_000;
pub const THOROUGH_TRIALS: usize = 10_000;

/// Relative slack on the minimum eigenvalue of `f(z) − f(x)`.
pub const ORDER_TOL: f64 = 1e-9;
/// Relative slack on additivity and homogeneity defects.
pub const LINEARITY_TOL: f64 = 1e-8;
/// Distance from `span{x}` that refutes extremality.
pub const EXTREMALITY_TOL: f64 = 1e-7;

/// At most this many failures are kept verbatim; all are counted.
const RECORDED_FAILURES: usize = 16;

const HOMOGENEITY_FACTORS: [f64; 3] = [0.5, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub trials: usize,
    pub seed: u64,
    pub backend: Backend,
}

impl SampleConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        SampleConfig { trials, seed, backend: Backend::default() }
    }

    pub fn with_backend(self, backend: Backend) -> Self {
        SampleConfig { backend, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub inputs: Vec<Vec<f64>>,
    pub predicate: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub check: String,
    pub trials: usize,
    pub tolerance: f64,
    pub failure_count: usize,
    /// The earliest failing trials, by index.
    pub failures: Vec<Failure>,
    pub max_violation: f64,
}

impl SampleReport {
    fn empty(check: &str, tolerance: f64) -> Self {
        SampleReport {
            check: check.to_string(),
            trials: 0,
            tolerance,
            failure_count: 0,
            failures: Vec::new(),
            max_violation: 0.0,
        }
    }

    fn from_trials(check: &str, tolerance: f64, trials: Vec<Vec<Failure>>) -> Self {
        let mut report = Self::empty(check, tolerance);
        report.trials = trials.len();
        for violations in trials {
            for v in violations {
                report.max_violation = report.max_violation.max(v.magnitude);
                if v.magnitude > tolerance {
                    report.failure_count += 1;
                    if report.failures.len() < RECORDED_FAILURES {
                        report.failures.push(v);
                    }
                }
            }
        }
        report
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Combines reports over disjoint trial ranges of the same check.
    pub fn merge(mut self, other: SampleReport) -> SampleReport {
        self.trials += other.trials;
        self.failure_count += other.failure_count;
        self.max_violation = self.max_violation.max(other.max_violation);
        self.failures.extend(other.failures);
        self.failures.sort_by(|a, b| a.trial.cmp(&b.trial).then_with(|| a.predicate.cmp(&b.predicate)));
        self.failures.truncate(RECORDED_FAILURES);
        self
    }
}

fn magnitude(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn map_failure(trial: usize, inputs: &[&Element], err: Error) -> Failure {
    Failure {
        trial,
        inputs: inputs.iter().map(|x| x.coords().to_vec()).collect(),
        predicate: format!("map failed: {err}"),
        magnitude: f64::INFINITY,
    }
}

/// Checks `f(x) ≤ f(x + w²)` on random pairs `x = v²`. The violation is the
/// negative part of `λ_min(f(x + w²) − f(x))` relative to `1 + ‖f‖`.
pub fn check_order_preserving<F>(f: F, domain: &Arc<AlgebraDescriptor>, config: SampleConfig) -> SampleReport
where
    F: Fn(&Element) -> Result<Element> + Sync + Send,
{
    let trials = map_indexed(config.backend, config.trials, |trial| {
        let mut rng = trial_rng(config.seed, trial as u64);
        let x = random_positive(domain, &mut rng);
        let z = &x + &random_positive(domain, &mut rng);
        let (fx, fz) = match (f(&x), f(&z)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return vec![map_failure(trial, &[&x, &z], e)],
        };
        let diff = match fz.checked_sub(&fx) {
            Ok(d) => d,
            Err(e) => return vec![map_failure(trial, &[&x, &z], e)],
        };
        let scale = 1.0 + order_unit_norm(&fx).max(order_unit_norm(&fz));
        let violation = magnitude((-min_eigenvalue(&diff)).max(0.0) / scale);
        vec![Failure {
            trial,
            inputs: vec![x.into_coords(), z.into_coords()],
            predicate: "f(x) <= f(x + w^2)".into(),
            magnitude: violation,
        }]
    });
    SampleReport::from_trials("order_preserving", ORDER_TOL, trials)
}

/// Additivity `f(x + z) = f(x) + f(z)` and homogeneity `f(αx) = αf(x)`,
/// `α ∈ {½, 2, 3}` in turn, on random cone points.
pub fn check_linearity_blackbox<F>(f: F, domain: &Arc<AlgebraDescriptor>, config: SampleConfig) -> SampleReport
where
    F: Fn(&Element) -> Result<Element> + Sync + Send,
{
    let trials = map_indexed(config.backend, config.trials, |trial| {
        let mut rng = trial_rng(config.seed, trial as u64);
        let x = random_positive(domain, &mut rng);
        let z = random_positive(domain, &mut rng);
        let alpha = HOMOGENEITY_FACTORS[trial % HOMOGENEITY_FACTORS.len()];
        let xz = &x + &z;
        let ax = x.scale(alpha);
        let images = [&x, &z, &xz, &ax].map(&f);
        let [fx, fz, fxz, fax] = match images {
            [Ok(a), Ok(b), Ok(c), Ok(d)] => [a, b, c, d],
            [a, b, c, d] => {
                let err = [a, b, c, d].into_iter().find_map(|r| r.err()).expect("one image failed");
                return vec![map_failure(trial, &[&x, &z], err)];
            }
        };
        let additivity = fxz.distance(&(&fx + &fz)) / (1.0 + fx.coord_norm() + fz.coord_norm());
        let homogeneity = fax.distance(&fx.scale(alpha)) / (1.0 + alpha * fx.coord_norm());
        let inputs = vec![x.into_coords(), z.into_coords()];
        vec![
            Failure {
                trial,
                inputs: inputs.clone(),
                predicate: "f(x + z) = f(x) + f(z)".into(),
                magnitude: magnitude(additivity),
            },
            Failure {
                trial,
                inputs,
                predicate: format!("f({alpha} x) = {alpha} f(x)"),
                magnitude: magnitude(homogeneity),
            },
        ]
    });
    SampleReport::from_trials("linearity", LINEARITY_TOL, trials)
}

/// Sampling test of extremality of `x` in the cone, independent of the
/// rank test in `is_atom`. Draws `y = U_{x^{1/2}} w` with `0 ≤ w ≤ e`,
/// which covers the order interval `[0, x]`, and reports `false` as soon as
/// some `y` is farther than `1e-7` from `span{x}`. `true` only means no
/// counterexample was found.
pub fn extreme_vector_oracle(x: &Element, trials: usize, seed: u64, backend: Backend) -> Result<bool> {
    if !is_positive(x) {
        return Err(Error::Precondition("oracle input must lie in the cone".into()));
    }
    let norm = order_unit_norm(x);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("oracle input must have unit norm, got {norm}")));
    }
    let u = quadratic_rep(&sqrt(x)?);
    let xx = inner_product(x, x)?;
    let algebra = x.algebra();
    let refuted = any_indexed(backend, trials, |trial| {
        let mut rng = trial_rng(seed, trial as u64);
        let w = random_unit_interval_point(algebra, &mut rng);
        let y = u.apply(&w).expect("same algebra");
        let lambda = inner_product(&y, x).expect("same algebra") / xx;
        y.distance(&x.scale(lambda)) > EXTREMALITY_TOL
    });
    Ok(!refuted)
}

/// `w = s · a² / ⟨a, a⟩` with `s ∈ [0, 1]`. The trace form dominates the
/// square of the order-unit norm on every supported factor, so `0 ≤ w ≤ e`.
fn random_unit_interval_point(algebra: &Arc<AlgebraDescriptor>, rng: &mut impl Rng) -> Element {
    let a = random_element(algebra, rng);
    let aa = inner_product(&a, &a).expect("same algebra");
    let s: f64 = rng.random();
    a.square().scale(s / aa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FactorDescriptor::{self, Real, Spin, Sym};
    use crate::operator::LinearOperator;
    use crate::sampling::seeded_rng;

    fn alg(f: Vec<FactorDescriptor>) -> Arc<AlgebraDescriptor> {
        AlgebraDescriptor::shared(f).unwrap()
    }

    fn el(a: &Arc<AlgebraDescriptor>, c: &[f64]) -> Element {
        Element::new(Arc::clone(a), c.to_vec()).unwrap()
    }

    #[test]
    fn unit_interval_sampler_stays_in_interval() {
        let a = alg(vec![Real, Spin { n: 3 }, Sym { n: 4 }]);
        let mut rng = seeded_rng(0);
        for _ in 0..200 {
            let w = random_unit_interval_point(&a, &mut rng);
            assert!(is_positive(&w));
            assert!(is_positive(&(&Element::unit(&a) - &w)));
        }
    }

    #[test]
    fn oracle_examples() {
        let s2 = alg(vec![Sym { n: 2 }]);
        let e11 = el(&s2, &[1.0, 0.0, 0.0]);
        assert!(extreme_vector_oracle(&e11, THOROUGH_TRIALS, 0, Backend::default()).unwrap());
        assert!(!extreme_vector_oracle(&Element::unit(&s2), THOROUGH_TRIALS, 0, Backend::default()).unwrap());
        assert!(extreme_vector_oracle(&Element::unit(&s2).scale(0.5), 10, 0, Backend::default()).is_err());

        let r = alg(vec![Real, Sym { n: 2 }]);
        assert!(extreme_vector_oracle(&Element::factor_unit(&r, 0), THOROUGH_TRIALS, 0, Backend::default()).unwrap());
        assert!(!extreme_vector_oracle(&Element::unit(&r), THOROUGH_TRIALS, 0, Backend::default()).unwrap());
    }

    #[test]
    fn identity_is_order_preserving_and_linear() {
        let a = alg(vec![Sym { n: 3 }, Real]);
        let id = |x: &Element| Ok(x.clone());
        let r = check_order_preserving(id, &a, SampleConfig::new(FAST_TRIALS, 1));
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.trials, FAST_TRIALS);
        assert!(check_linearity_blackbox(id, &a, SampleConfig::new(FAST_TRIALS, 1)).passed());
    }

    #[test]
    fn squaring_is_not_monotone_on_sym2() {
        let s2 = alg(vec![Sym { n: 2 }]);
        let r = check_order_preserving(|x: &Element| Ok(x.square()), &s2, SampleConfig::new(FAST_TRIALS, 0));
        assert!(!r.passed());
        assert!(r.max_violation > ORDER_TOL);
        assert!(!r.failures.is_empty() && r.failures.len() <= RECORDED_FAILURES);
    }

    #[test]
    fn coordinate_squaring_is_monotone_but_not_linear() {
        let rr = alg(vec![Real, Real]);
        let sq = |x: &Element| Ok(x.square());
        assert!(check_order_preserving(sq, &rr, SampleConfig::new(FAST_TRIALS, 0)).passed());
        let lin = check_linearity_blackbox(sq, &rr, SampleConfig::new(FAST_TRIALS, 0));
        assert!(lin.max_violation > 1e-3);
    }

    #[test]
    fn quadratic_rep_is_linear() {
        let s3 = alg(vec![Sym { n: 3 }]);
        let mut rng = seeded_rng(7);
        let y = random_positive(&s3, &mut rng);
        let u: LinearOperator = quadratic_rep(&y);
        let r = check_linearity_blackbox(|x: &Element| u.apply(x), &s3, SampleConfig::new(FAST_TRIALS, 2));
        assert!(r.passed(), "{}", r.max_violation);
    }

    #[test]
    fn backends_produce_identical_reports() {
        let s2 = alg(vec![Sym { n: 2 }]);
        let f = |x: &Element| Ok(x.square());
        let cfg = SampleConfig::new(300, 4);
        let a = check_order_preserving(f, &s2, cfg.with_backend(Backend::Sequential));
        let b = check_order_preserving(f, &s2, cfg.with_backend(Backend::Parallel));
        assert_eq!(a, b);
    }

    #[test]
    fn failing_maps_are_reported() {
        let s2 = alg(vec![Sym { n: 2 }]);
        let r = check_order_preserving(|_: &Element| Err(Error::DisengagedAtoms), &s2, SampleConfig::new(5, 0));
        assert_eq!(r.failure_count, 5);
        assert!(r.failures[0].predicate.starts_with("map failed"));
    }

    #[test]
    fn merge_is_associative() {
        let s2 = alg(vec![Sym { n: 2 }]);
        let f = |x: &Element| Ok(x.square());
        let parts: Vec<SampleReport> =
            (0..3).map(|s| check_order_preserving(f, &s2, SampleConfig::new(40, s))).collect();
        let left = parts[0].clone().merge(parts[1].clone()).merge(parts[2].clone());
        let right = parts[0].clone().merge(parts[1].clone().merge(parts[2].clone()));
        assert_eq!(left, right);
        assert_eq!(left.trials, 120);
    }
}
