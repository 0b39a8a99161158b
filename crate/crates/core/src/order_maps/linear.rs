//! Linear order isomorphisms: Jordan homomorphism tests, the factorization
//! `T = U_y J`, and random Jordan isomorphisms.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{matrix_to_sym, sym_to_matrix, AlgebraDescriptor, Element, FactorDescriptor};
use crate::error::{Error, Result};
use crate::operator::{quadratic_rep, LinearOperator, RCOND_CUTOFF};
use crate::sampling::{random_orthogonal, seeded_rng};
use crate::spectral::{inv, min_eigenvalue, sqrt};

pub const HOMOMORPHISM_TOL: f64 = 1e-9;

/// Minimum eigenvalue of `Te` for an interior point.
pub const INTERIOR_TOL: f64 = 1e-9;

/// Unital and multiplicative on every pair of basis elements.
pub fn is_jordan_homomorphism(j: &LinearOperator) -> bool {
    let (dom, cod) = (j.domain(), j.codomain());
    let e = Element::unit(dom);
    match j.apply(&e) {
        Ok(je) if je.max_abs_diff(&Element::unit(cod)) <= HOMOMORPHISM_TOL => {}
        _ => return false,
    }
    let norm = j.norm();
    let tol = HOMOMORPHISM_TOL * (1.0 + norm * norm);
    let n = dom.total_dim();
    let images: Vec<Element> = (0..n)
        .map(|k| j.apply(&Element::basis(dom, k)).expect("basis lives in domain"))
        .collect();
    for a in 0..n {
        let ba = Element::basis(dom, a);
        for b in a..n {
            let prod = ba.jordan(&Element::basis(dom, b)).expect("same algebra");
            let lhs = j.apply(&prod).expect("product lives in domain");
            let rhs = images[a].jordan(&images[b]).expect("same codomain");
            if lhs.max_abs_diff(&rhs) > tol {
                return false;
            }
        }
    }
    true
}

pub fn is_jordan_isomorphism(j: &LinearOperator) -> bool {
    j.is_square() && j.rcond() >= RCOND_CUTOFF && is_jordan_homomorphism(j)
}

/// Factors a unital-positive linear map as `T = U_y J` with `y = (Te)^{1/2}`
/// and `J = U_{y⁻¹} T` a Jordan isomorphism. The pair is unique.
pub fn factorize_linear_order_iso(t: &LinearOperator) -> Result<(Element, LinearOperator)> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch("order isomorphisms are square".into()));
    }
    let te = t.apply(&Element::unit(t.domain()))?;
    let min = min_eigenvalue(&te);
    if min.is_nan() || min <= INTERIOR_TOL {
        return Err(Error::NotInterior { min_eigenvalue: min });
    }
    let y = sqrt(&te)?;
    let j = quadratic_rep(&inv(&y)?).compose(t)?;
    if !is_jordan_isomorphism(&j) {
        return Err(Error::NotJordanIsomorphism);
    }
    Ok((y, j))
}

/// Matrix of a factor isomorphism on factor coordinates.
fn factor_automorphism(factor: FactorDescriptor, rng: &mut impl Rng) -> DMatrix<f64> {
    match factor {
        FactorDescriptor::Real | FactorDescriptor::Sym { n: 1 } => DMatrix::identity(1, 1),
        FactorDescriptor::Spin { n } => {
            let r = random_orthogonal(n, rng);
            let mut m = DMatrix::zeros(n + 1, n + 1);
            m[(0, 0)] = 1.0;
            m.view_mut((1, 1), (n, n)).copy_from(&r);
            m
        }
        FactorDescriptor::Sym { n } => {
            let q = random_orthogonal(n, rng);
            let dim = factor.dim();
            let mut m = DMatrix::zeros(dim, dim);
            let mut basis = vec![0.0; dim];
            let mut image = vec![0.0; dim];
            for k in 0..dim {
                basis[k] = 1.0;
                let x = sym_to_matrix(n, &basis);
                matrix_to_sym(&(q.transpose() * x * &q), &mut image);
                m.column_mut(k).copy_from_slice(&image);
                basis[k] = 0.0;
            }
            m
        }
    }
}

/// Random Jordan isomorphism `A → B` when `B` lists the factors of `A` up
/// to permutation (with `Sym(1)` identified with `Real`). Each factor is
/// sent to a randomly chosen isomorphic factor, through a random
/// orthogonal conjugation (Sym) or rotation of the vector part (Spin).
pub fn random_jordan_isomorphism(
    domain: &Arc<AlgebraDescriptor>,
    codomain: &Arc<AlgebraDescriptor>,
    rng: &mut impl Rng,
) -> Result<LinearOperator> {
    let mut targets: Vec<Vec<usize>> = Vec::new();
    let mut classes: Vec<FactorDescriptor> = Vec::new();
    for (i, f) in codomain.factors().iter().enumerate() {
        let c = f.canonical();
        match classes.iter().position(|&k| k == c) {
            Some(k) => targets[k].push(i),
            None => {
                classes.push(c);
                targets.push(vec![i]);
            }
        }
    }
    for t in &mut targets {
        t.shuffle(rng);
    }

    let mut matrix = DMatrix::zeros(codomain.total_dim(), domain.total_dim());
    for (i, f) in domain.factors().iter().enumerate() {
        let k = classes
            .iter()
            .position(|&c| c == f.canonical())
            .ok_or(Error::NotOrderIsomorphic)?;
        let target = targets[k].pop().ok_or(Error::NotOrderIsomorphic)?;
        let block = factor_automorphism(*f, rng);
        let (rows, cols) = (codomain.block(target), domain.block(i));
        matrix.view_mut((rows.start, cols.start), (rows.len(), cols.len())).copy_from(&block);
    }
    if targets.iter().any(|t| !t.is_empty()) {
        return Err(Error::NotOrderIsomorphic);
    }
    LinearOperator::new(Arc::clone(domain), Arc::clone(codomain), matrix)
}

/// Random Jordan automorphism of `A`, including a random permutation of
/// mutually isomorphic factors.
pub fn random_jordan_automorphism(algebra: &Arc<AlgebraDescriptor>, seed: u64) -> LinearOperator {
    let mut rng = seeded_rng(seed);
    random_jordan_isomorphism(algebra, algebra, &mut rng).expect("an algebra is isomorphic to itself")
}
