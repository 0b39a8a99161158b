//! Spectral theory: decomposition into orthogonal idempotents, the order
//! unit norm, positivity, functional calculus and atomic refinement.

mod jacobi;

use std::sync::Arc;

use nalgebra::DMatrix;

pub use jacobi::{symmetric_eigen, SymmetricEigen};

use crate::algebra::{matrix_to_sym, sym_to_matrix, Element, FactorDescriptor};
use crate::error::{Error, Result};

/// Eigenvalues closer than `CLUSTER_TOL · (1 + ‖x‖)` share one idempotent.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Slack on the minimum eigenvalue for cone membership.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Eigenvalues closer than this to zero make an element non-invertible.
pub const INVERTIBILITY_TOL: f64 = 1e-10;

/// `x = Σ λᵢ pᵢ` with pairwise orthogonal idempotents summing to `e`.
/// Eigenvalues are in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub idempotents: Vec<Element>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> Element {
        let mut acc = Element::zero(self.idempotents[0].algebra());
        for (l, p) in self.eigenvalues.iter().zip(&self.idempotents) {
            acc = &acc + &p.scale(*l);
        }
        acc
    }
}

/// One eigenvalue with a factor-local idempotent of the given rank.
struct Piece {
    eigenvalue: f64,
    idempotent: Element,
    rank: usize,
}

fn block_element(x: &Element, factor: usize, block: &[f64]) -> Element {
    let mut coords = vec![0.0; x.coords().len()];
    coords[x.algebra().block(factor)].copy_from_slice(block);
    Element::from_parts(Arc::clone(x.algebra()), coords)
}

fn sym_atom(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(v[i] * v[j]);
        }
    }
    out
}

fn pieces(x: &Element) -> Vec<Piece> {
    let a = x.algebra();
    let mut out = Vec::new();
    for (i, &factor) in a.factors().iter().enumerate() {
        let b = x.block(i);
        match factor {
            FactorDescriptor::Real => out.push(Piece {
                eigenvalue: b[0],
                idempotent: Element::factor_unit(a, i),
                rank: 1,
            }),
            FactorDescriptor::Spin { .. } => {
                let s = b[0];
                let norm_u = b[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm_u == 0.0 {
                    out.push(Piece { eigenvalue: s, idempotent: Element::factor_unit(a, i), rank: 2 });
                } else {
                    for sign in [1.0, -1.0] {
                        let mut block = vec![0.5; b.len()];
                        for k in 1..b.len() {
                            block[k] = 0.5 * sign * b[k] / norm_u;
                        }
                        out.push(Piece {
                            eigenvalue: s + sign * norm_u,
                            idempotent: block_element(x, i, &block),
                            rank: 1,
                        });
                    }
                }
            }
            FactorDescriptor::Sym { n } => {
                let eig = symmetric_eigen(&sym_to_matrix(n, b), true);
                let v = eig.eigenvectors.expect("vectors requested");
                for (k, &l) in eig.eigenvalues.iter().enumerate() {
                    let col: Vec<f64> = v.column(k).iter().copied().collect();
                    out.push(Piece { eigenvalue: l, idempotent: block_element(x, i, &sym_atom(&col)), rank: 1 });
                }
            }
        }
    }
    out
}

/// All eigenvalues of `x` with multiplicity, unsorted.
pub fn eigenvalues_with_multiplicity(x: &Element) -> Vec<f64> {
    let a = x.algebra();
    let mut out = Vec::with_capacity(a.rank());
    for (i, &factor) in a.factors().iter().enumerate() {
        let b = x.block(i);
        match factor {
            FactorDescriptor::Real => out.push(b[0]),
            FactorDescriptor::Spin { .. } => {
                let norm_u = b[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                out.push(b[0] + norm_u);
                out.push(b[0] - norm_u);
            }
            FactorDescriptor::Sym { n } => {
                out.extend(symmetric_eigen(&sym_to_matrix(n, b), false).eigenvalues);
            }
        }
    }
    out
}

pub fn spectral_decomposition(x: &Element) -> SpectralDecomposition {
    let mut pieces = pieces(x);
    pieces.sort_by(|p, q| q.eigenvalue.total_cmp(&p.eigenvalue));
    let norm = pieces.iter().map(|p| p.eigenvalue.abs()).fold(0.0, f64::max);
    let tol = CLUSTER_TOL * (1.0 + norm);

    let mut eigenvalues = Vec::new();
    let mut idempotents: Vec<Element> = Vec::new();
    let mut weighted = 0.0;
    let mut rank = 0usize;
    let mut last = f64::NAN;
    for piece in pieces {
        if rank > 0 && last - piece.eigenvalue > tol {
            eigenvalues.push(weighted / rank as f64);
            weighted = 0.0;
            rank = 0;
        }
        if rank == 0 {
            idempotents.push(piece.idempotent);
        } else {
            let p = idempotents.last_mut().expect("open cluster");
            *p = &*p + &piece.idempotent;
        }
        weighted += piece.eigenvalue * piece.rank as f64;
        rank += piece.rank;
        last = piece.eigenvalue;
    }
    eigenvalues.push(weighted / rank as f64);
    SpectralDecomposition { eigenvalues, idempotents }
}

/// Distinct eigenvalues in descending order.
pub fn spectrum(x: &Element) -> Vec<f64> {
    spectral_decomposition(x).eigenvalues
}

pub fn min_eigenvalue(x: &Element) -> f64 {
    eigenvalues_with_multiplicity(x).into_iter().fold(f64::INFINITY, f64::min)
}

/// `‖x‖ = inf{λ > 0 : −λe ≤ x ≤ λe}`, the spectral radius.
pub fn order_unit_norm(x: &Element) -> f64 {
    eigenvalues_with_multiplicity(x).into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Cone membership: minimum eigenvalue ≥ `−POSITIVITY_TOL · max(1, ‖x‖)`.
pub fn is_positive(x: &Element) -> bool {
    let eig = eigenvalues_with_multiplicity(x);
    let norm = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    min >= -POSITIVITY_TOL * norm.max(1.0)
}

/// Interior of the cone: every eigenvalue strictly above `threshold`.
pub fn is_positive_interior(x: &Element, threshold: f64) -> bool {
    min_eigenvalue(x) > threshold
}

/// `Σ φ(λᵢ) pᵢ`. Fails naming the first eigenvalue on which `φ` is not finite.
pub fn functional_calculus(x: &Element, phi: impl Fn(f64) -> f64) -> Result<Element> {
    let d = spectral_decomposition(x);
    let mut acc = Element::zero(x.algebra());
    for (&l, p) in d.eigenvalues.iter().zip(&d.idempotents) {
        let v = phi(l);
        if !v.is_finite() {
            return Err(Error::OutsideDomain { eigenvalue: l });
        }
        acc = &acc + &p.scale(v);
    }
    Ok(acc)
}

fn positivity_guard(d: &SpectralDecomposition) -> Result<()> {
    let norm = d.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    match d.eigenvalues.last() {
        Some(&min) if min < -POSITIVITY_TOL * norm.max(1.0) => Err(Error::OutsideDomain { eigenvalue: min }),
        _ => Ok(()),
    }
}

fn invertibility_guard(d: &SpectralDecomposition) -> Result<()> {
    match d.eigenvalues.iter().find(|l| l.abs() <= INVERTIBILITY_TOL) {
        Some(&l) => Err(Error::OutsideDomain { eigenvalue: l }),
        None => Ok(()),
    }
}

fn combine(d: &SpectralDecomposition, phi: impl Fn(f64) -> f64) -> Element {
    let mut acc = Element::zero(d.idempotents[0].algebra());
    for (&l, p) in d.eigenvalues.iter().zip(&d.idempotents) {
        acc = &acc + &p.scale(phi(l));
    }
    acc
}

/// Square root on the cone; tiny negative eigenvalues are clamped to zero.
pub fn sqrt(x: &Element) -> Result<Element> {
    let d = spectral_decomposition(x);
    positivity_guard(&d)?;
    Ok(combine(&d, |l| l.max(0.0).sqrt()))
}

pub fn inv(x: &Element) -> Result<Element> {
    let d = spectral_decomposition(x);
    invertibility_guard(&d)?;
    Ok(combine(&d, |l| 1.0 / l))
}

/// `x^α`. Integer exponents work on any element (negative ones need
/// invertibility); non-integer positive exponents need `x ≥ 0` and use
/// `0^α = 0`; non-integer negative exponents need the interior.
pub fn pow(x: &Element, alpha: f64) -> Result<Element> {
    let d = spectral_decomposition(x);
    let integral = alpha.fract() == 0.0 && alpha.abs() < i32::MAX as f64;
    if integral {
        if alpha < 0.0 {
            invertibility_guard(&d)?;
        }
        return Ok(combine(&d, |l| l.powi(alpha as i32)));
    }
    positivity_guard(&d)?;
    if alpha < 0.0 {
        invertibility_guard(&d)?;
    }
    Ok(combine(&d, |l| if l <= 0.0 { 0.0 } else { l.powf(alpha) }))
}

/// Splits every idempotent of `d` into orthogonal atoms, so that
/// `x = Σ λᵢ aᵢ`. Zero eigenvalues are kept, so the atoms sum to `e`.
/// A whole spin unit splits along the first vector direction.
pub fn atomic_refinement(d: &SpectralDecomposition) -> Vec<(f64, Element)> {
    let mut out = Vec::new();
    for (&l, p) in d.eigenvalues.iter().zip(&d.idempotents) {
        let a = p.algebra();
        for (i, &factor) in a.factors().iter().enumerate() {
            let b = p.block(i);
            match factor {
                FactorDescriptor::Real => {
                    if b[0] > 0.5 {
                        out.push((l, Element::factor_unit(a, i)));
                    }
                }
                FactorDescriptor::Spin { .. } => {
                    if b[0] > 0.75 {
                        for sign in [1.0, -1.0] {
                            let mut block = vec![0.0; b.len()];
                            block[0] = 0.5;
                            block[1] = 0.5 * sign;
                            out.push((l, block_element(p, i, &block)));
                        }
                    } else if b[0] > 0.25 {
                        out.push((l, block_element(p, i, b)));
                    }
                }
                FactorDescriptor::Sym { n } => {
                    let eig = symmetric_eigen(&sym_to_matrix(n, b), true);
                    let v = eig.eigenvectors.expect("vectors requested");
                    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
                        if mu > 0.5 {
                            let col: Vec<f64> = v.column(k).iter().copied().collect();
                            let m = DMatrix::from_fn(n, n, |r, c| col[r] * col[c]);
                            let mut block = vec![0.0; b.len()];
                            matrix_to_sym(&m, &mut block);
                            out.push((l, block_element(p, i, &block)));
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;

    fn alg(f: Vec<FactorDescriptor>) -> Arc<AlgebraDescriptor> {
        AlgebraDescriptor::shared(f).unwrap()
    }

    fn el(a: &Arc<AlgebraDescriptor>, c: &[f64]) -> Element {
        Element::new(Arc::clone(a), c.to_vec()).unwrap()
    }

    #[test]
    fn unit_has_single_eigenvalue() {
        let a = alg(vec![FactorDescriptor::Real, FactorDescriptor::Spin { n: 3 }, FactorDescriptor::Sym { n: 3 }]);
        let e = Element::unit(&a);
        let d = spectral_decomposition(&e);
        assert_eq!(d.eigenvalues, vec![1.0]);
        assert!(d.idempotents[0].max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn spin_decomposition_by_hand() {
        let a = alg(vec![FactorDescriptor::Spin { n: 2 }]);
        let d = spectral_decomposition(&el(&a, &[2.0, 1.0, 0.0]));
        assert_eq!(d.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(d.idempotents[0].coords(), &[0.5, 0.5, 0.0]);
        assert_eq!(d.idempotents[1].coords(), &[0.5, -0.5, 0.0]);
    }

    #[test]
    fn sym_diagonal_decomposition() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let x = el(&a, &[5.0, 0.0, -1.0]);
        let d = spectral_decomposition(&x);
        assert_eq!(d.eigenvalues, vec![5.0, -1.0]);
        assert_eq!(d.idempotents[0].coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(d.idempotents[1].coords(), &[0.0, 0.0, 1.0]);
        assert_eq!(order_unit_norm(&x), 5.0);
        assert!(!is_positive(&x));
    }

    #[test]
    fn inverse_of_diagonal() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let x = inv(&el(&a, &[2.0, 0.0, 4.0])).unwrap();
        assert!(x.max_abs_diff(&el(&a, &[0.5, 0.0, 0.25])) < 1e-15);
    }

    #[test]
    fn sqrt_of_unit_and_domain_errors() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let e = Element::unit(&a);
        assert_eq!(sqrt(&e).unwrap(), e);
        let x = el(&a, &[5.0, 0.0, -1.0]);
        assert_eq!(sqrt(&x).unwrap_err(), Error::OutsideDomain { eigenvalue: -1.0 });
        let singular = el(&a, &[1.0, 0.0, 0.0]);
        assert_eq!(inv(&singular).unwrap_err(), Error::OutsideDomain { eigenvalue: 0.0 });
        assert!(functional_calculus(&x, f64::ln).unwrap_err().to_string().contains("-1"));
    }

    #[test]
    fn pow_conventions() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let p = el(&a, &[1.0, 0.0, 0.0]);
        assert_eq!(pow(&p, 0.5).unwrap(), p);
        let x = el(&a, &[4.0, 0.0, -2.0]);
        assert!(pow(&x, 1.5).is_err());
        assert!(pow(&x, 2.0).unwrap().max_abs_diff(&x.square()) < 1e-14);
        assert!(pow(&x, -1.0).unwrap().max_abs_diff(&inv(&x).unwrap()) < 1e-15);
    }

    #[test]
    fn refinement_of_unit_in_sym2() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let atoms = atomic_refinement(&spectral_decomposition(&Element::unit(&a)));
        assert_eq!(atoms.len(), 2);
        let total = &atoms[0].1 + &atoms[1].1;
        assert!(total.max_abs_diff(&Element::unit(&a)) < 1e-14);
    }

    #[test]
    fn refinement_of_rank_one() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let atoms = atomic_refinement(&spectral_decomposition(&el(&a, &[3.0, 0.0, 0.0])));
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].0, 3.0);
        assert_eq!(atoms[0].1.coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(atoms[1].0, 0.0);
    }

    #[test]
    fn refinement_of_spin_unit() {
        let a = alg(vec![FactorDescriptor::Spin { n: 3 }]);
        let atoms = atomic_refinement(&spectral_decomposition(&Element::unit(&a)));
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].1.coords(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!((&atoms[0].1 + &atoms[1].1).coords(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn clustering_merges_across_factors() {
        let a = alg(vec![FactorDescriptor::Real, FactorDescriptor::Sym { n: 2 }]);
        let x = el(&a, &[2.0, 2.0, 0.0, 1.0]);
        let d = spectral_decomposition(&x);
        assert_eq!(d.eigenvalues, vec![2.0, 1.0]);
        assert_eq!(d.idempotents[0].coords(), &[1.0, 1.0, 0.0, 0.0]);
    }
}
