//! Seeded random elements, orthogonal matrices and descriptors.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraDescriptor, Element, FactorDescriptor};

/// RNG for one trial; depends only on `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Element with independent standard normal coordinates.
pub fn random_element(algebra: &Arc<AlgebraDescriptor>, rng: &mut impl Rng) -> Element {
    let coords = (0..algebra.total_dim()).map(|_| rng.sample(StandardNormal)).collect();
    Element::from_parts(Arc::clone(algebra), coords)
}

/// A random square `v²`, which lies in the cone.
pub fn random_positive(algebra: &Arc<AlgebraDescriptor>, rng: &mut impl Rng) -> Element {
    random_element(algebra, rng).square()
}

/// `w² + 0.1e`, an interior point.
pub fn random_interior(algebra: &Arc<AlgebraDescriptor>, rng: &mut impl Rng) -> Element {
    &random_positive(algebra, rng) + &Element::unit(algebra).scale(0.1)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random descriptor with `1..=max_factors` factors, always containing at
/// least one dim-1 factor and one factor of dimension > 1.
pub fn random_mixed_descriptor(rng: &mut impl Rng, max_factors: usize) -> Arc<AlgebraDescriptor> {
    let count = rng.random_range(2..=max_factors.max(2));
    let mut factors = vec![random_scalar_factor(rng), random_simple_factor(rng)];
    while factors.len() < count {
        let f = if rng.random_bool(0.4) { random_scalar_factor(rng) } else { random_simple_factor(rng) };
        factors.push(f);
    }
    // shuffle so dim-1 factors are not always first
    for i in (1..factors.len()).rev() {
        let j = rng.random_range(0..=i);
        factors.swap(i, j);
    }
    AlgebraDescriptor::shared(factors).expect("generated factors are valid")
}

fn random_scalar_factor(rng: &mut impl Rng) -> FactorDescriptor {
    if rng.random_bool(0.5) {
        FactorDescriptor::Real
    } else {
        FactorDescriptor::Sym { n: 1 }
    }
}

fn random_simple_factor(rng: &mut impl Rng) -> FactorDescriptor {
    if rng.random_bool(0.5) {
        FactorDescriptor::Spin { n: rng.random_range(2..=5) }
    } else {
        FactorDescriptor::Sym { n: rng.random_range(2..=4) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{is_positive, min_eigenvalue};

    #[test]
    fn trial_streams_are_reproducible() {
        let a: Vec<f64> = (0..4).map(|_| trial_rng(3, 9).random()).collect();
        let b: Vec<f64> = (0..4).map(|_| trial_rng(3, 9).random()).collect();
        assert_eq!(a, b);
        let c: f64 = trial_rng(3, 10).random();
        assert_ne!(a[0], c);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = seeded_rng(1);
        let q = random_orthogonal(6, &mut rng);
        assert!((q.transpose() * &q - DMatrix::identity(6, 6)).amax() < 1e-13);
    }

    #[test]
    fn generated_elements_sit_where_claimed() {
        let mut rng = seeded_rng(2);
        for _ in 0..20 {
            let a = random_mixed_descriptor(&mut rng, 4);
            assert!(a.factors().iter().any(|f| f.dim() == 1));
            assert!(a.factors().iter().any(|f| f.dim() > 1));
            assert!(is_positive(&random_positive(&a, &mut rng)));
            assert!(min_eigenvalue(&random_interior(&a, &mut rng)) > 0.099);
        }
    }
}
