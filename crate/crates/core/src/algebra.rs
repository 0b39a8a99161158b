//! Algebra descriptors, elements and the Jordan product.
//!
//! An algebra is a finite direct sum of simple factors: the reals, spin
//! factors `Spin(n) = ℝ ⊕ ℝⁿ` and real symmetric matrices `Sym(n)`.
//! Coordinates are laid out factor by factor:
//!
//! * `Real`: a single scalar.
//! * `Spin(n)`: `(s, u₁, …, uₙ)`.
//! * `Sym(n)`: the upper triangle in row-major order. An off-diagonal
//!   coordinate `c` at slot `(i, j)` is the matrix entry at both `(i, j)`
//!   and `(j, i)`, so reconstruction is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple factor of a Euclidean Jordan algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorDescriptor {
    Real,
    Spin { n: usize },
    Sym { n: usize },
}

impl FactorDescriptor {
    pub fn dim(&self) -> usize {
        match *self {
            FactorDescriptor::Real => 1,
            FactorDescriptor::Spin { n } => n + 1,
            FactorDescriptor::Sym { n } => n * (n + 1) / 2,
        }
    }

    /// Number of atoms in a Jordan frame of the factor.
    pub fn rank(&self) -> usize {
        match *self {
            FactorDescriptor::Real => 1,
            FactorDescriptor::Spin { .. } => 2,
            FactorDescriptor::Sym { n } => n,
        }
    }

    /// Representative of the isomorphism class within the supported
    /// catalog. `Sym(1)` is the reals; everything else is its own class.
    pub fn canonical(&self) -> FactorDescriptor {
        match *self {
            FactorDescriptor::Sym { n: 1 } => FactorDescriptor::Real,
            other => other,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FactorDescriptor::Real => Ok(()),
            FactorDescriptor::Spin { n } if n >= 2 => Ok(()),
            FactorDescriptor::Spin { n } => Err(Error::InvalidDescriptor(format!(
                "spin factor needs n >= 2, got {n}"
            ))),
            FactorDescriptor::Sym { n } if n >= 1 => Ok(()),
            FactorDescriptor::Sym { .. } => {
                Err(Error::InvalidDescriptor("sym factor needs n >= 1".into()))
            }
        }
    }
}

impl fmt::Display for FactorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorDescriptor::Real => write!(f, "Real"),
            FactorDescriptor::Spin { n } => write!(f, "Spin({n})"),
            FactorDescriptor::Sym { n } => write!(f, "Sym({n})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    factors: Vec<FactorDescriptor>,
}

/// Ordered direct sum of simple factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraFile", into = "AlgebraFile")]
pub struct AlgebraDescriptor {
    factors: Vec<FactorDescriptor>,
    offsets: Vec<usize>,
    total_dim: usize,
}

impl TryFrom<AlgebraFile> for AlgebraDescriptor {
    type Error = Error;

    fn try_from(file: AlgebraFile) -> Result<Self> {
        AlgebraDescriptor::new(file.factors)
    }
}

impl From<AlgebraDescriptor> for AlgebraFile {
    fn from(a: AlgebraDescriptor) -> Self {
        AlgebraFile { factors: a.factors }
    }
}

impl AlgebraDescriptor {
    pub fn new(factors: Vec<FactorDescriptor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDescriptor("no factors".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut total_dim = 0;
        for f in &factors {
            offsets.push(total_dim);
            total_dim += f.dim();
        }
        Ok(AlgebraDescriptor { factors, offsets, total_dim })
    }

    /// Convenience constructor returning a shared handle.
    pub fn shared(factors: Vec<FactorDescriptor>) -> Result<Arc<Self>> {
        Self::new(factors).map(Arc::new)
    }

    pub fn factors(&self) -> &[FactorDescriptor] {
        &self.factors
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(FactorDescriptor::rank).sum()
    }

    /// Coordinate range of factor `i`.
    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.factors[i].dim()
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// A coordinate vector in an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    algebra: Arc<AlgebraDescriptor>,
    coords: Vec<f64>,
}

impl Element {
    pub fn new(algebra: Arc<AlgebraDescriptor>, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != algebra.total_dim() {
            return Err(Error::CoordinateLength { expected: algebra.total_dim(), got: coords.len() });
        }
        Ok(Element { algebra, coords })
    }

    pub(crate) fn from_parts(algebra: Arc<AlgebraDescriptor>, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), algebra.total_dim());
        Element { algebra, coords }
    }

    pub fn zero(algebra: &Arc<AlgebraDescriptor>) -> Self {
        Element { coords: vec![0.0; algebra.total_dim()], algebra: Arc::clone(algebra) }
    }

    /// The unit `e`: identity matrices, `(1, 0, …, 0)` spin blocks, and 1 on reals.
    pub fn unit(algebra: &Arc<AlgebraDescriptor>) -> Self {
        let mut x = Self::zero(algebra);
        for i in 0..algebra.factors().len() {
            write_factor_unit(algebra.factors()[i], &mut x.coords[algebra.block(i)]);
        }
        x
    }

    /// Unit of factor `i`, padded with zeros elsewhere.
    pub fn factor_unit(algebra: &Arc<AlgebraDescriptor>, i: usize) -> Self {
        let mut x = Self::zero(algebra);
        write_factor_unit(algebra.factors()[i], &mut x.coords[algebra.block(i)]);
        x
    }

    /// Standard coordinate basis vector.
    pub fn basis(algebra: &Arc<AlgebraDescriptor>, k: usize) -> Self {
        let mut x = Self::zero(algebra);
        x.coords[k] = 1.0;
        x
    }

    pub fn algebra(&self) -> &Arc<AlgebraDescriptor> {
        &self.algebra
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.coords[self.algebra.block(i)]
    }

    pub fn same_algebra(&self, other: &Element) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra
    }

    fn check(&self, other: &Element) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn jordan(&self, other: &Element) -> Result<Element> {
        jordan_product(self, other)
    }

    pub fn square(&self) -> Element {
        let mut out = vec![0.0; self.coords.len()];
        product_into(&self.algebra, &self.coords, &self.coords, &mut out);
        Element::from_parts(Arc::clone(&self.algebra), out)
    }

    pub fn inner(&self, other: &Element) -> Result<f64> {
        inner_product(self, other)
    }

    pub fn scale(&self, c: f64) -> Element {
        self.map_coords(|v| c * v)
    }

    pub fn map_coords(&self, f: impl Fn(f64) -> f64) -> Element {
        Element::from_parts(Arc::clone(&self.algebra), self.coords.iter().map(|&v| f(v)).collect())
    }

    /// Euclidean norm of the coordinate vector.
    pub fn coord_norm(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest coordinate difference; `∞` on algebra mismatch.
    pub fn max_abs_diff(&self, other: &Element) -> f64 {
        if !self.same_algebra(other) {
            return f64::INFINITY;
        }
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Euclidean coordinate distance; `∞` on algebra mismatch.
    pub fn distance(&self, other: &Element) -> f64 {
        if !self.same_algebra(other) {
            return f64::INFINITY;
        }
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Element {
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| f(a, b)).collect();
        Element::from_parts(Arc::clone(&self.algebra), coords)
    }
}

fn write_factor_unit(factor: FactorDescriptor, block: &mut [f64]) {
    match factor {
        FactorDescriptor::Real | FactorDescriptor::Spin { .. } => block[0] = 1.0,
        FactorDescriptor::Sym { n } => {
            for i in 0..n {
                block[sym_index(n, i, i)] = 1.0;
            }
        }
    }
}

/// Position of matrix entry `(i, j)`, `i <= j`, in the upper-triangle layout.
pub(crate) fn sym_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

pub(crate) fn sym_to_matrix(n: usize, block: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = block[k];
            m[(j, i)] = block[k];
            k += 1;
        }
    }
    m
}

pub(crate) fn matrix_to_sym(m: &DMatrix<f64>, block: &mut [f64]) {
    let n = m.nrows();
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            block[k] = m[(i, j)];
            k += 1;
        }
    }
}

fn factor_product(factor: FactorDescriptor, a: &[f64], b: &[f64], out: &mut [f64]) {
    match factor {
        FactorDescriptor::Real => out[0] = a[0] * b[0],
        FactorDescriptor::Spin { .. } => {
            let (s, u) = (a[0], &a[1..]);
            let (t, v) = (b[0], &b[1..]);
            out[0] = s * t + u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
            for k in 0..u.len() {
                out[k + 1] = s * v[k] + t * u[k];
            }
        }
        FactorDescriptor::Sym { n } => {
            let x = sym_to_matrix(n, a);
            let y = sym_to_matrix(n, b);
            let xy = &x * &y;
            let sym = (&xy + xy.transpose()) * 0.5;
            matrix_to_sym(&sym, out);
        }
    }
}

fn factor_inner(factor: FactorDescriptor, a: &[f64], b: &[f64]) -> f64 {
    match factor {
        FactorDescriptor::Real => a[0] * b[0],
        FactorDescriptor::Spin { .. } => 2.0 * a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>(),
        FactorDescriptor::Sym { n } => {
            // trace(XY) = Σ diagonal products + 2 Σ off-diagonal products
            let mut acc = 0.0;
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let w = if i == j { 1.0 } else { 2.0 };
                    acc += w * a[k] * b[k];
                    k += 1;
                }
            }
            acc
        }
    }
}

pub(crate) fn product_into(algebra: &AlgebraDescriptor, a: &[f64], b: &[f64], out: &mut [f64]) {
    for (i, &factor) in algebra.factors().iter().enumerate() {
        let r = algebra.block(i);
        factor_product(factor, &a[r.clone()], &b[r.clone()], &mut out[r]);
    }
}

/// Jordan product `x ∘ y`.
pub fn jordan_product(x: &Element, y: &Element) -> Result<Element> {
    x.check(y)?;
    let mut out = vec![0.0; x.coords.len()];
    product_into(&x.algebra, &x.coords, &y.coords, &mut out);
    Ok(Element::from_parts(Arc::clone(&x.algebra), out))
}

/// Trace-form inner product.
pub fn inner_product(x: &Element, y: &Element) -> Result<f64> {
    x.check(y)?;
    let a = &x.algebra;
    Ok(a.factors()
        .iter()
        .enumerate()
        .map(|(i, &f)| factor_inner(f, &x.coords[a.block(i)], &y.coords[a.block(i)]))
        .sum())
}

/// Jordan triple product `{x,y,z} = (x∘y)∘z + (z∘y)∘x − (x∘z)∘y`.
pub fn triple_product(x: &Element, y: &Element, z: &Element) -> Result<Element> {
    x.check(y)?;
    x.check(z)?;
    let xy = x.jordan(y)?;
    let zy = z.jordan(y)?;
    let xz = x.jordan(z)?;
    let a = xy.jordan(z)?;
    let b = zy.jordan(x)?;
    let c = xz.jordan(y)?;
    Ok(a.zip_with(&b, |p, q| p + q).zip_with(&c, |p, q| p - q))
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Element> for &Element {
            type Output = Element;

            /// Panics on algebra mismatch; use the `checked_*` methods otherwise.
            fn $method(self, rhs: &Element) -> Element {
                assert!(self.same_algebra(rhs), "algebra mismatch");
                self.zip_with(rhs, |a, b| a $op b)
            }
        }

        impl $trait<Element> for Element {
            type Output = Element;

            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl Mul<&Element> for f64 {
    type Output = Element;

    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

impl Mul<Element> for f64 {
    type Output = Element;

    fn mul(self, rhs: Element) -> Element {
        rhs.scale(self)
    }
}

impl Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(f: Vec<FactorDescriptor>) -> Arc<AlgebraDescriptor> {
        AlgebraDescriptor::shared(f).unwrap()
    }

    fn el(a: &Arc<AlgebraDescriptor>, c: &[f64]) -> Element {
        Element::new(Arc::clone(a), c.to_vec()).unwrap()
    }

    #[test]
    fn dims_and_offsets() {
        let a = alg(vec![
            FactorDescriptor::Real,
            FactorDescriptor::Spin { n: 4 },
            FactorDescriptor::Sym { n: 3 },
        ]);
        assert_eq!(a.total_dim(), 1 + 5 + 6);
        assert_eq!(a.offsets(), &[0, 1, 6]);
        assert_eq!(a.rank(), 1 + 2 + 3);
        assert!(AlgebraDescriptor::new(vec![]).is_err());
        assert!(AlgebraDescriptor::new(vec![FactorDescriptor::Spin { n: 1 }]).is_err());
        assert!(AlgebraDescriptor::new(vec![FactorDescriptor::Sym { n: 0 }]).is_err());
    }

    #[test]
    fn spin_product_by_hand() {
        let a = alg(vec![FactorDescriptor::Spin { n: 2 }]);
        let p = el(&a, &[2.0, 1.0, 0.0]).jordan(&el(&a, &[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn sym_product_by_hand() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let p = el(&a, &[1.0, 0.0, 0.0]).jordan(&el(&a, &[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.5, 0.0]);
    }

    #[test]
    fn inner_products() {
        let s3 = alg(vec![FactorDescriptor::Sym { n: 3 }]);
        let e = Element::unit(&s3);
        assert_eq!(inner_product(&e, &e).unwrap(), 3.0);

        let sp = alg(vec![FactorDescriptor::Spin { n: 4 }]);
        let e = Element::unit(&sp);
        assert_eq!(inner_product(&e, &e).unwrap(), 2.0);

        // off-diagonal coordinate 1 is the matrix [[0,1],[1,0]]; trace of its square is 2
        let s2 = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let e12 = el(&s2, &[0.0, 1.0, 0.0]);
        assert_eq!(inner_product(&e12, &e12).unwrap(), 2.0);
    }

    #[test]
    fn triple_product_cases() {
        let s2 = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let e = Element::unit(&s2);
        let p = el(&s2, &[1.0, 0.0, 0.0]);
        assert_eq!(triple_product(&p, &e, &p).unwrap(), p);
        let y = el(&s2, &[0.3, -1.2, 2.5]);
        assert!(triple_product(&e, &y, &e).unwrap().max_abs_diff(&y) < 1e-15);
        let x = el(&s2, &[1.5, 0.7, -0.4]);
        assert!(triple_product(&x, &e, &x).unwrap().max_abs_diff(&x.square()) < 1e-14);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = alg(vec![FactorDescriptor::Sym { n: 2 }]);
        let b = alg(vec![FactorDescriptor::Spin { n: 2 }]);
        let err = jordan_product(&Element::unit(&a), &Element::unit(&b)).unwrap_err();
        assert_eq!(err.to_string(), "algebra mismatch");
        assert!(inner_product(&Element::unit(&a), &Element::unit(&b)).is_err());
    }

    #[test]
    fn sym_layout_round_trip() {
        let n = 4;
        let block: Vec<f64> = (0..10).map(|k| k as f64 - 3.5).collect();
        let m = sym_to_matrix(n, &block);
        assert_eq!(m[(1, 3)], block[sym_index(n, 1, 3)]);
        let mut back = vec![0.0; 10];
        matrix_to_sym(&m, &mut back);
        assert_eq!(back, block);
    }

    #[test]
    fn descriptor_file_format() {
        let a: AlgebraDescriptor = serde_json::from_str(
            r#"{"factors":[{"kind":"real"},{"kind":"spin","n":3},{"kind":"sym","n":2}]}"#,
        )
        .unwrap();
        assert_eq!(a.total_dim(), 1 + 4 + 3);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"factors":[{"kind":"real"},{"kind":"spin","n":3},{"kind":"sym","n":2}]}"#);
        assert!(serde_json::from_str::<AlgebraDescriptor>(r#"{"factors":[]}"#).is_err());
    }
}
