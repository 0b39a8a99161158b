//! Projections, atoms and the center; the splitting of an algebra into its
//! disengaged part (a sum of central atoms, each spanning a copy of ℝ) and
//! its engaged part (everything else).

use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::operator::{multiplication_operator, quadratic_rep, LinearOperator, RANK_CUTOFF};
use crate::sampling::trial_rng;
use crate::spectral::spectral_decomposition;

pub const STRUCTURE_TOL: f64 = 1e-10;

/// Minimum separation of center eigenvalues in a usable random draw.
const CENTER_GAP: f64 = 1e-6;
const CENTER_RETRIES: u64 = 20;

pub fn is_projection(p: &Element) -> bool {
    p.square().distance(p) <= STRUCTURE_TOL * (1.0 + p.coord_norm())
}

/// A non-zero projection `p` with `U_p M = ℝp`, i.e. `rank U_p = 1`.
pub fn is_atom(p: &Element) -> bool {
    is_projection(p) && p.coord_norm() > STRUCTURE_TOL && quadratic_rep(p).rank() == 1
}

/// `p ∘ q = 0`.
pub fn is_orthogonal(p: &Element, q: &Element) -> bool {
    match p.jordan(q) {
        Ok(pq) => pq.coord_norm() <= STRUCTURE_TOL * (1.0 + p.coord_norm() * q.coord_norm()),
        Err(_) => false,
    }
}

fn basis_multiplications(algebra: &Arc<AlgebraDescriptor>) -> Vec<DMatrix<f64>> {
    (0..algebra.total_dim())
        .map(|k| multiplication_operator(&Element::basis(algebra, k)).matrix().clone())
        .collect()
}

/// `L_x` commutes with `L_b` for every basis element `b`.
pub fn is_central(x: &Element) -> bool {
    let lx = multiplication_operator(x);
    let lx = lx.matrix();
    let tol = STRUCTURE_TOL * (1.0 + x.coord_norm());
    basis_multiplications(x.algebra())
        .iter()
        .all(|lb| (lx * lb - lb * lx).amax() <= tol)
}

/// Orthonormal (in coordinates) basis of the center, computed as the null
/// space of `x ↦ ([L_x, L_b])_b`.
pub fn center_basis(algebra: &Arc<AlgebraDescriptor>) -> Vec<Element> {
    let n = algebra.total_dim();
    let ls = basis_multiplications(algebra);
    let block = n * n;
    let mut system = DMatrix::zeros(n * block, n);
    for (k, lk) in ls.iter().enumerate() {
        for (j, lj) in ls.iter().enumerate() {
            let comm = lk * lj - lj * lk;
            system.view_mut((j * block, k), (block, 1)).copy_from_slice(comm.as_slice());
        }
    }

    let svd = system.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (row, &s) in svd.singular_values.iter().enumerate() {
        if max == 0.0 || s <= RANK_CUTOFF * max {
            let coords: Vec<f64> = v_t.row(row).iter().copied().collect();
            out.push(Element::from_parts(Arc::clone(algebra), coords));
        }
    }
    out
}

/// Minimal idempotents of the center: the spectral frame of a random
/// central element, redrawn while two center eigenvalues are closer than
/// `1e-6`.
pub fn minimal_central_idempotents(algebra: &Arc<AlgebraDescriptor>, seed: u64) -> Result<Vec<Element>> {
    let basis = center_basis(algebra);
    for attempt in 0..CENTER_RETRIES {
        let mut rng = trial_rng(seed, attempt);
        let mut c = Element::zero(algebra);
        for z in &basis {
            let g: f64 = StandardNormal.sample(&mut rng);
            c = &c + &z.scale(g);
        }
        let d = spectral_decomposition(&c);
        let separated = d.eigenvalues.windows(2).all(|w| w[0] - w[1] > CENTER_GAP);
        if d.eigenvalues.len() == basis.len() && separated {
            return Ok(d.idempotents);
        }
    }
    Err(Error::DegenerateCenterDraws)
}

/// The engaged summand `U_{p_E} M`, as the sub-list of factors of
/// dimension > 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EngagedPart {
    pub descriptor: Arc<AlgebraDescriptor>,
    pub factor_indices: Vec<usize>,
    /// Coordinate inclusion of the engaged part into the full algebra.
    pub embedding: LinearOperator,
}

impl EngagedPart {
    fn new(algebra: &Arc<AlgebraDescriptor>, factor_indices: Vec<usize>) -> Option<Self> {
        if factor_indices.is_empty() {
            return None;
        }
        let factors = factor_indices.iter().map(|&i| algebra.factors()[i]).collect();
        let descriptor = AlgebraDescriptor::shared(factors).expect("sub-list of valid factors");
        let mut matrix = DMatrix::zeros(algebra.total_dim(), descriptor.total_dim());
        for (sub, &i) in factor_indices.iter().enumerate() {
            for (r, c) in algebra.block(i).zip(descriptor.block(sub)) {
                matrix[(r, c)] = 1.0;
            }
        }
        let embedding = LinearOperator::new(Arc::clone(&descriptor), Arc::clone(algebra), matrix)
            .expect("shape built from descriptors");
        Some(EngagedPart { descriptor, factor_indices, embedding })
    }

    /// Engaged component `x_E` of `x`, in engaged coordinates.
    pub fn restrict(&self, x: &Element) -> Element {
        let full = x.algebra();
        let mut coords = Vec::with_capacity(self.descriptor.total_dim());
        for &i in &self.factor_indices {
            coords.extend_from_slice(&x.coords()[full.block(i)]);
        }
        Element::from_parts(Arc::clone(&self.descriptor), coords)
    }

    pub fn embed(&self, x: &Element) -> Result<Element> {
        self.embedding.apply(x)
    }
}

/// `M = M_D ⊕ M_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub algebra: Arc<AlgebraDescriptor>,
    pub p_d: Element,
    pub p_e: Element,
    /// Central atoms, ordered by the factor they span.
    pub disengaged_atoms: Vec<Element>,
    /// Coordinate index of each disengaged atom's one-dimensional summand.
    pub disengaged_coordinates: Vec<usize>,
    pub engaged: Option<EngagedPart>,
}

impl Decomposition {
    fn assemble(algebra: &Arc<AlgebraDescriptor>, atoms: Vec<(usize, Element)>) -> Self {
        let mut p_d = Element::zero(algebra);
        for (_, a) in &atoms {
            p_d = &p_d + a;
        }
        let p_e = &Element::unit(algebra) - &p_d;
        let disengaged: Vec<usize> = atoms.iter().map(|(i, _)| *i).collect();
        let engaged_indices =
            (0..algebra.factors().len()).filter(|i| !disengaged.contains(i)).collect();
        Decomposition {
            algebra: Arc::clone(algebra),
            p_d,
            p_e,
            disengaged_coordinates: disengaged.iter().map(|&i| algebra.offsets()[i]).collect(),
            disengaged_atoms: atoms.into_iter().map(|(_, a)| a).collect(),
            engaged: EngagedPart::new(algebra, engaged_indices),
        }
    }

    /// Disengaged coordinates `x_p` with `U_p x = x_p p`.
    pub fn disengaged_values(&self, x: &Element) -> Vec<f64> {
        self.disengaged_coordinates.iter().map(|&k| x.coords()[k]).collect()
    }
}

/// Factor shortcut: every supported factor is simple, so the central atoms
/// are exactly the units of the one-dimensional factors.
pub fn decompose_by_factors(algebra: &Arc<AlgebraDescriptor>) -> Decomposition {
    let atoms = algebra
        .factors()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.dim() == 1)
        .map(|(i, _)| (i, Element::factor_unit(algebra, i)))
        .collect();
    Decomposition::assemble(algebra, atoms)
}

/// Center pipeline: minimal central idempotents `c` with `rank U_c = 1`
/// are the disengaged atoms. Each central idempotent is matched against
/// the factor units, and any disagreement is reported.
pub fn decompose_engaged_disengaged(algebra: &Arc<AlgebraDescriptor>, seed: u64) -> Result<Decomposition> {
    let central = minimal_central_idempotents(algebra, seed)?;
    if central.len() != algebra.factors().len() {
        return Err(Error::PipelineDisagreement(format!(
            "{} minimal central idempotents for {} factors",
            central.len(),
            algebra.factors().len()
        )));
    }
    let mut atoms = Vec::new();
    let mut seen = vec![false; algebra.factors().len()];
    for c in central {
        let factor = (0..algebra.factors().len())
            .find(|&i| c.max_abs_diff(&Element::factor_unit(algebra, i)) <= 1e-8)
            .ok_or_else(|| Error::PipelineDisagreement("central idempotent is not a factor unit".into()))?;
        if std::mem::replace(&mut seen[factor], true) {
            return Err(Error::PipelineDisagreement(format!("factor {factor} matched twice")));
        }
        let is_atom = quadratic_rep(&c).rank() == 1;
        if is_atom != (algebra.factors()[factor].dim() == 1) {
            return Err(Error::PipelineDisagreement(format!(
                "factor {factor} ({}) classified as {}",
                algebra.factors()[factor],
                if is_atom { "disengaged" } else { "engaged" }
            )));
        }
        if is_atom {
            atoms.push((factor, c));
        }
    }
    atoms.sort_by_key(|(i, _)| *i);
    Ok(Decomposition::assemble(algebra, atoms))
}

/// A codimension-one ideal `ker φ_p` attached to a central atom `p`, where
/// `U_p x = φ_p(x) p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codim1Ideal {
    pub atom: Element,
    pub functional: Vec<f64>,
}

impl Codim1Ideal {
    pub fn eval(&self, x: &Element) -> f64 {
        self.functional.iter().zip(x.coords()).map(|(a, b)| a * b).sum()
    }
}

pub fn codim1_ideals(algebra: &Arc<AlgebraDescriptor>, seed: u64) -> Result<Vec<Codim1Ideal>> {
    let d = decompose_engaged_disengaged(algebra, seed)?;
    Ok(d.disengaged_atoms
        .into_iter()
        .map(|p| {
            let u = quadratic_rep(&p);
            let pp: f64 = p.coords().iter().map(|v| v * v).sum();
            let functional = (0..algebra.total_dim())
                .map(|col| p.coords().iter().enumerate().map(|(r, pr)| pr * u.matrix()[(r, col)]).sum::<f64>() / pp)
                .collect();
            Codim1Ideal { atom: p, functional }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FactorDescriptor::{self, Real, Spin, Sym};

    fn alg(f: Vec<FactorDescriptor>) -> Arc<AlgebraDescriptor> {
        AlgebraDescriptor::shared(f).unwrap()
    }

    fn el(a: &Arc<AlgebraDescriptor>, c: &[f64]) -> Element {
        Element::new(Arc::clone(a), c.to_vec()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let s2 = alg(vec![Sym { n: 2 }]);
        assert!(is_projection(&Element::unit(&s2)));
        assert!(!is_projection(&Element::unit(&s2).scale(0.5)));
        let sp = alg(vec![Spin { n: 2 }]);
        assert!(is_projection(&el(&sp, &[0.5, 0.5, 0.0])));
    }

    #[test]
    fn atom_examples() {
        let s3 = alg(vec![Sym { n: 3 }]);
        assert!(is_atom(&el(&s3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])));
        assert!(!is_atom(&el(&s3, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0])));
        assert!(!is_atom(&Element::zero(&s3)));
        let rs = alg(vec![Real, Sym { n: 2 }]);
        assert!(is_atom(&Element::factor_unit(&rs, 0)));
    }

    #[test]
    fn central_examples() {
        let s2 = alg(vec![Sym { n: 2 }]);
        assert!(is_central(&Element::unit(&s2)));
        assert!(!is_central(&el(&s2, &[1.0, 0.0, 0.0])));
        let rs = alg(vec![Real, Sym { n: 2 }]);
        assert!(is_central(&Element::factor_unit(&rs, 0)));
    }

    #[test]
    fn center_dimensions() {
        assert_eq!(center_basis(&alg(vec![Sym { n: 3 }])).len(), 1);
        assert_eq!(center_basis(&alg(vec![Real, Real])).len(), 2);
        assert_eq!(center_basis(&alg(vec![Real, Sym { n: 2 }])).len(), 2);
        assert_eq!(center_basis(&alg(vec![Spin { n: 3 }, Sym { n: 3 }, Real])).len(), 3);
        for z in center_basis(&alg(vec![Spin { n: 3 }, Sym { n: 2 }])) {
            assert!(is_central(&z));
        }
    }

    #[test]
    fn minimal_central_idempotent_examples() {
        let s3 = alg(vec![Sym { n: 3 }]);
        let c = minimal_central_idempotents(&s3, 0).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].max_abs_diff(&Element::unit(&s3)) < 1e-12);

        let a = alg(vec![Real, Real, Sym { n: 2 }]);
        let mut c = minimal_central_idempotents(&a, 0).unwrap();
        assert_eq!(c.len(), 3);
        c.sort_by(|p, q| q.coords().partial_cmp(p.coords()).unwrap());
        for (p, i) in c.iter().zip(0..3) {
            assert!(p.max_abs_diff(&Element::factor_unit(&a, i)) < 1e-12, "{p:?}");
        }

        let sp = alg(vec![Spin { n: 3 }]);
        assert_eq!(minimal_central_idempotents(&sp, 0).unwrap().len(), 1);
    }

    #[test]
    fn decomposition_examples() {
        let a = alg(vec![Real, Real, Sym { n: 3 }]);
        let d = decompose_engaged_disengaged(&a, 3).unwrap();
        assert_eq!(d.disengaged_atoms.len(), 2);
        assert_eq!(d.disengaged_coordinates, vec![0, 1]);
        assert!(d.p_d.max_abs_diff(&el(&a, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])) < 1e-12);
        assert_eq!(d.engaged.as_ref().unwrap().descriptor.factors(), &[Sym { n: 3 }]);
        assert!(is_central(&d.p_d) && is_projection(&d.p_d));

        let s4 = alg(vec![Sym { n: 4 }]);
        let d = decompose_engaged_disengaged(&s4, 3).unwrap();
        assert!(d.disengaged_atoms.is_empty());
        assert_eq!(d.p_d.coord_norm(), 0.0);

        let r = alg(vec![Real]);
        let d = decompose_engaged_disengaged(&r, 3).unwrap();
        assert!(d.engaged.is_none());
        assert!(d.p_d.max_abs_diff(&Element::unit(&r)) < 1e-12);
    }

    #[test]
    fn shortcut_matches_pipeline() {
        let a = alg(vec![Spin { n: 2 }, Sym { n: 1 }, Real, Sym { n: 2 }]);
        let fast = decompose_by_factors(&a);
        let slow = decompose_engaged_disengaged(&a, 9).unwrap();
        assert_eq!(fast.disengaged_coordinates, slow.disengaged_coordinates);
        assert!(fast.p_d.max_abs_diff(&slow.p_d) < 1e-12);
        assert_eq!(fast.engaged, slow.engaged);
    }

    #[test]
    fn engaged_restrict_and_embed() {
        let a = alg(vec![Real, Spin { n: 2 }, Real]);
        let d = decompose_by_factors(&a);
        let x = el(&a, &[7.0, 1.0, 2.0, 3.0, 8.0]);
        let part = d.engaged.unwrap();
        let xe = part.restrict(&x);
        assert_eq!(xe.coords(), &[1.0, 2.0, 3.0]);
        assert_eq!(part.embed(&xe).unwrap().coords(), &[0.0, 1.0, 2.0, 3.0, 0.0]);
        assert_eq!(d.disengaged_coordinates, vec![0, 4]);
    }

    #[test]
    fn codim1_examples() {
        let a = alg(vec![Real, Sym { n: 2 }]);
        let ideals = codim1_ideals(&a, 0).unwrap();
        assert_eq!(ideals.len(), 1);
        let x = el(&a, &[2.5, 1.0, 4.0, -1.0]);
        assert!((ideals[0].eval(&x) - 2.5).abs() < 1e-12);

        assert!(codim1_ideals(&alg(vec![Sym { n: 3 }]), 0).unwrap().is_empty());
        assert_eq!(codim1_ideals(&alg(vec![Real, Real]), 0).unwrap().len(), 2);
    }
}
