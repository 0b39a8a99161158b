//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigenvalues (unsorted) and, when requested, eigenvectors as columns.
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
}

fn off_diagonal_mass(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Sweeps until the off-diagonal Frobenius mass drops below
/// `1e-14 · ‖A‖_F`, at most 100 sweeps.
pub fn symmetric_eigen(matrix: &DMatrix<f64>, with_vectors: bool) -> SymmetricEigen {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "jacobi needs a square matrix");
    let mut a = matrix.clone();
    let mut v = with_vectors.then(|| DMatrix::<f64>::identity(n, n));
    let scale = a.norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // A ← JᵀAJ with J the (p,q) rotation
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    SymmetricEigen { eigenvalues: (0..n).map(|i| a[(i, i)]).collect(), eigenvectors: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&m + m.transpose()) * 0.5
    }

    #[test]
    fn diagonal_is_fixed_point() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![5.0, -1.0]));
        let e = symmetric_eigen(&m, true);
        assert_eq!(e.eigenvalues, vec![5.0, -1.0]);
        assert_eq!(e.eigenvectors.unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn agrees_with_nalgebra_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=12 {
            let m = random_symmetric(n, &mut rng);
            let mut ours = symmetric_eigen(&m, false).eigenvalues;
            let mut theirs: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            ours.sort_by(f64::total_cmp);
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn reconstructs_with_orthonormal_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_symmetric(7, &mut rng);
        let e = symmetric_eigen(&m, true);
        let v = e.eigenvectors.unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.eigenvalues));
        assert!((&v * d * v.transpose() - &m).amax() < 1e-13);
        assert!((v.transpose() * &v - DMatrix::identity(7, 7)).amax() < 1e-13);
    }

    #[test]
    fn zero_matrix() {
        let e = symmetric_eigen(&DMatrix::zeros(3, 3), true);
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }
}
