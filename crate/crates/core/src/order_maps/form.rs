//! Order isomorphisms in classified form
//! `f(x) = (f_p(x_p) σ(p))_p + U_y J x_E`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linear::{factorize_linear_order_iso, is_jordan_isomorphism, random_jordan_isomorphism, INTERIOR_TOL};
use super::monotone::MonotoneBijection;
use crate::algebra::{AlgebraDescriptor, Element, FactorDescriptor};
use crate::error::{Error, Result};
use crate::operator::{quadratic_rep, LinearOperator, MatrixFile};
use crate::sampling::{random_interior, random_positive, seeded_rng};
use crate::spectral::{is_positive, min_eigenvalue};
use crate::structure::{decompose_by_factors, Decomposition};

/// Linear part `U_y J` acting between the engaged parts.
#[derive(Debug, Clone, PartialEq)]
pub struct EngagedMap {
    pub y: Element,
    pub j: LinearOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderIsoForm {
    domain: Arc<AlgebraDescriptor>,
    codomain: Arc<AlgebraDescriptor>,
    /// `sigma[i]` is the codomain disengaged atom receiving domain atom `i`.
    sigma: Vec<usize>,
    /// Indexed by domain disengaged atom.
    f_p: Vec<MonotoneBijection>,
    engaged: Option<EngagedMap>,
    linear: Option<LinearOperator>,
    domain_layout: Decomposition,
    codomain_layout: Decomposition,
}

impl OrderIsoForm {
    pub fn new(
        domain: Arc<AlgebraDescriptor>,
        codomain: Arc<AlgebraDescriptor>,
        sigma: Vec<usize>,
        f_p: Vec<MonotoneBijection>,
        engaged: Option<EngagedMap>,
    ) -> Result<Self> {
        let domain_layout = decompose_by_factors(&domain);
        let codomain_layout = decompose_by_factors(&codomain);
        let count = domain_layout.disengaged_atoms.len();
        if codomain_layout.disengaged_atoms.len() != count {
            return Err(Error::InvalidForm(format!(
                "{count} disengaged atoms in the domain, {} in the codomain",
                codomain_layout.disengaged_atoms.len()
            )));
        }
        if sigma.len() != count || f_p.len() != count {
            return Err(Error::InvalidForm(format!(
                "need {count} entries in sigma and f_p, got {} and {}",
                sigma.len(),
                f_p.len()
            )));
        }
        let mut hit = vec![false; count];
        for &s in &sigma {
            if s >= count || std::mem::replace(&mut hit[s], true) {
                return Err(Error::InvalidForm("sigma is not a bijection".into()));
            }
        }

        let linear = match (&domain_layout.engaged, &codomain_layout.engaged, &engaged) {
            (None, None, None) => None,
            (Some(de), Some(ce), Some(EngagedMap { y, j })) => {
                if y.algebra().as_ref() != ce.descriptor.as_ref() {
                    return Err(Error::InvalidForm("y must live in the codomain's engaged part".into()));
                }
                if j.domain().as_ref() != de.descriptor.as_ref() || j.codomain().as_ref() != ce.descriptor.as_ref() {
                    return Err(Error::InvalidForm("J must map engaged part to engaged part".into()));
                }
                let min = min_eigenvalue(y);
                if min.is_nan() || min <= INTERIOR_TOL {
                    return Err(Error::InvalidForm(format!("y is not interior (minimum eigenvalue {min:.3e})")));
                }
                if !is_jordan_isomorphism(j) {
                    return Err(Error::NotJordanIsomorphism);
                }
                Some(quadratic_rep(y).compose(j)?)
            }
            _ => return Err(Error::InvalidForm("engaged parts and linear part do not line up".into())),
        };

        Ok(OrderIsoForm { domain, codomain, sigma, f_p, engaged, linear, domain_layout, codomain_layout })
    }

    /// The identity of `A₊`.
    pub fn identity(algebra: &Arc<AlgebraDescriptor>) -> Self {
        let layout = decompose_by_factors(algebra);
        let count = layout.disengaged_atoms.len();
        let engaged = layout.engaged.as_ref().map(|e| EngagedMap {
            y: Element::unit(&e.descriptor),
            j: LinearOperator::identity(&e.descriptor),
        });
        Self::new(
            Arc::clone(algebra),
            Arc::clone(algebra),
            (0..count).collect(),
            vec![MonotoneBijection::IDENTITY; count],
            engaged,
        )
        .expect("identity form is valid")
    }

    pub fn domain(&self) -> &Arc<AlgebraDescriptor> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<AlgebraDescriptor> {
        &self.codomain
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn f_p(&self) -> &[MonotoneBijection] {
        &self.f_p
    }

    pub fn engaged(&self) -> Option<&EngagedMap> {
        self.engaged.as_ref()
    }

    /// `U_y J` between the engaged parts.
    pub fn engaged_operator(&self) -> Option<&LinearOperator> {
        self.linear.as_ref()
    }

    pub fn domain_layout(&self) -> &Decomposition {
        &self.domain_layout
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.algebra().as_ref() != self.domain.as_ref() {
            return Err(Error::AlgebraMismatch);
        }
        if !is_positive(x) {
            return Err(Error::NotInCone { min_eigenvalue: min_eigenvalue(x) });
        }
        let mut coords = vec![0.0; self.codomain.total_dim()];
        let xs = self.domain_layout.disengaged_values(x);
        for (i, &v) in xs.iter().enumerate() {
            coords[self.codomain_layout.disengaged_coordinates[self.sigma[i]]] = self.f_p[i].eval(v);
        }
        if let (Some(de), Some(ce), Some(t)) = (&self.domain_layout.engaged, &self.codomain_layout.engaged, &self.linear) {
            let image = t.apply(&de.restrict(x))?;
            let mut offset = 0;
            for &fi in &ce.factor_indices {
                let block = self.codomain.block(fi);
                let len = block.len();
                coords[block].copy_from_slice(&image.coords()[offset..offset + len]);
                offset += len;
            }
        }
        Element::new(Arc::clone(&self.codomain), coords)
    }

    pub fn invert(&self) -> Result<OrderIsoForm> {
        let count = self.sigma.len();
        let mut sigma = vec![0; count];
        let mut f_p = vec![MonotoneBijection::IDENTITY; count];
        for (i, &s) in self.sigma.iter().enumerate() {
            sigma[s] = i;
            f_p[s] = self.f_p[i].inverse();
        }
        let engaged = match &self.linear {
            Some(t) => {
                let (y, j) = factorize_linear_order_iso(&t.invert()?)?;
                Some(EngagedMap { y, j })
            }
            None => None,
        };
        OrderIsoForm::new(Arc::clone(&self.codomain), Arc::clone(&self.domain), sigma, f_p, engaged)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &OrderIsoForm) -> Result<OrderIsoForm> {
        if inner.codomain.as_ref() != self.domain.as_ref() {
            return Err(Error::AlgebraMismatch);
        }
        let sigma = inner.sigma.iter().map(|&s| self.sigma[s]).collect();
        let f_p = inner
            .f_p
            .iter()
            .zip(&inner.sigma)
            .map(|(g, &s)| self.f_p[s].after(g))
            .collect::<Result<Vec<_>>>()?;
        let engaged = match (&self.linear, &inner.linear) {
            (Some(outer), Some(inner_op)) => {
                let (y, j) = factorize_linear_order_iso(&outer.compose(inner_op)?)?;
                Some(EngagedMap { y, j })
            }
            _ => None,
        };
        OrderIsoForm::new(Arc::clone(&inner.domain), Arc::clone(&self.codomain), sigma, f_p, engaged)
    }

    /// True iff every `f_p` is `t ↦ c·t`. Forced whenever the domain has no
    /// central atoms.
    pub fn check_linearity(&self) -> bool {
        self.f_p.iter().all(MonotoneBijection::is_linear)
    }

    /// The form as one matrix on full coordinates, when it is linear.
    pub fn to_linear_operator(&self) -> Option<LinearOperator> {
        let mut m = DMatrix::zeros(self.codomain.total_dim(), self.domain.total_dim());
        for (i, f) in self.f_p.iter().enumerate() {
            let row = self.codomain_layout.disengaged_coordinates[self.sigma[i]];
            let col = self.domain_layout.disengaged_coordinates[i];
            m[(row, col)] = f.linear_slope()?;
        }
        if let (Some(de), Some(ce), Some(t)) = (&self.domain_layout.engaged, &self.codomain_layout.engaged, &self.linear) {
            let full = ce.embedding.matrix() * t.matrix() * de.embedding.matrix().transpose();
            m += full;
        }
        Some(LinearOperator::new(Arc::clone(&self.domain), Arc::clone(&self.codomain), m).expect("shape from descriptors"))
    }

    pub fn to_file(&self) -> FormFile {
        FormFile {
            domain: (*self.domain).clone(),
            codomain: (*self.codomain).clone(),
            sigma: self.sigma.iter().copied().enumerate().collect(),
            f_p: self.f_p.clone(),
            y: self.engaged.as_ref().map(|e| e.y.coords().to_vec()),
            j: self.engaged.as_ref().map(|e| e.j.to_file()),
        }
    }

    pub fn from_file(file: FormFile) -> Result<Self> {
        let domain = Arc::new(file.domain);
        let codomain = Arc::new(file.codomain);
        let count = file.sigma.len();
        let mut sigma = vec![usize::MAX; count];
        for (from, to) in file.sigma {
            if from >= count || sigma[from] != usize::MAX {
                return Err(Error::InvalidForm("sigma pairs must cover each domain atom once".into()));
            }
            sigma[from] = to;
        }
        let de = decompose_by_factors(&domain).engaged;
        let ce = decompose_by_factors(&codomain).engaged;
        let engaged = match (file.y, file.j, de, ce) {
            (None, None, _, _) => None,
            (Some(y), Some(j), Some(de), Some(ce)) => Some(EngagedMap {
                y: Element::new(Arc::clone(&ce.descriptor), y)?,
                j: LinearOperator::from_file(de.descriptor, ce.descriptor, &j)?,
            }),
            _ => return Err(Error::InvalidForm("y and J must both be present exactly when there is an engaged part".into())),
        };
        Self::new(domain, codomain, sigma, file.f_p, engaged)
    }
}

/// On-disk layout of an [`OrderIsoForm`]. `f_p` is indexed by domain
/// disengaged atom (the one-dimensional factors in order); `y` and `J` are
/// in engaged-part coordinates and absent when there is no engaged part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFile {
    pub domain: AlgebraDescriptor,
    pub codomain: AlgebraDescriptor,
    pub sigma: Vec<(usize, usize)>,
    pub f_p: Vec<MonotoneBijection>,
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    #[serde(rename = "J", default)]
    pub j: Option<MatrixFile>,
}

fn engaged_signature(layout: &Decomposition) -> Vec<FactorDescriptor> {
    let mut sig: Vec<FactorDescriptor> = layout
        .engaged
        .as_ref()
        .map(|e| e.descriptor.factors().iter().map(FactorDescriptor::canonical).collect())
        .unwrap_or_default();
    sig.sort();
    sig
}

/// Samples the general classified form between `A₊` and `B₊`: random
/// interior `y = w² + 0.1e`, random Jordan isomorphism `J`, random `σ`, and
/// `f_p = Power(α)` with `α ∈ [0.3, 3]` (or `α = 1` when linear maps are
/// requested).
pub fn random_order_iso(
    domain: &Arc<AlgebraDescriptor>,
    codomain: &Arc<AlgebraDescriptor>,
    seed: u64,
    allow_nonlinear: bool,
) -> Result<OrderIsoForm> {
    let dl = decompose_by_factors(domain);
    let cl = decompose_by_factors(codomain);
    if dl.disengaged_atoms.len() != cl.disengaged_atoms.len() || engaged_signature(&dl) != engaged_signature(&cl) {
        return Err(Error::NotOrderIsomorphic);
    }
    let mut rng = seeded_rng(seed);
    let count = dl.disengaged_atoms.len();
    let mut sigma: Vec<usize> = (0..count).collect();
    sigma.shuffle(&mut rng);
    let f_p = (0..count)
        .map(|_| {
            let alpha = if allow_nonlinear { rng.random_range(0.3..=3.0) } else { 1.0 };
            MonotoneBijection::power(alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let engaged = match (&dl.engaged, &cl.engaged) {
        (Some(de), Some(ce)) => {
            let j = random_jordan_isomorphism(&de.descriptor, &ce.descriptor, &mut rng)?;
            let y = random_interior(&ce.descriptor, &mut rng);
            Some(EngagedMap { y, j })
        }
        _ => None,
    };
    let form = OrderIsoForm::new(Arc::clone(domain), Arc::clone(codomain), sigma, f_p, engaged)?;
    if dl.disengaged_atoms.is_empty() {
        assert!(form.check_linearity(), "forms without central atoms are linear");
    }
    Ok(form)
}

/// `x ↦ S x + b` agreeing with the form on the translated cone `x + A₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRepresentation {
    pub linear: LinearOperator,
    pub offset: Element,
}

const AFFINITY_SAMPLES: u64 = 100;
const AFFINITY_TOL: f64 = 1e-8;

/// Affine representation of a form on `x + A₊` for a domain without
/// central atoms, checked on 100 random `y ≥ 0`.
pub fn affinity_on_translated_cone(form: &OrderIsoForm, x: &Element, seed: u64) -> Result<AffineRepresentation> {
    if !form.domain_layout.disengaged_atoms.is_empty() {
        return Err(Error::DisengagedAtoms);
    }
    if x.algebra().as_ref() != form.domain.as_ref() {
        return Err(Error::AlgebraMismatch);
    }
    if !is_positive(x) {
        return Err(Error::NotInCone { min_eigenvalue: min_eigenvalue(x) });
    }
    let s = form.to_linear_operator().expect("no disengaged atoms means linear");
    let offset = form.apply(x)?.checked_sub(&s.apply(x)?)?;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..AFFINITY_SAMPLES {
        let y = random_positive(&form.domain, &mut rng);
        let xy = x + &y;
        let lhs = form.apply(&xy)?;
        let rhs = &s.apply(&xy)? + &offset;
        worst = worst.max(lhs.distance(&rhs) / (1.0 + lhs.coord_norm()));
    }
    if worst > AFFINITY_TOL {
        return Err(Error::AffinityViolated { violation: worst });
    }
    Ok(AffineRepresentation { linear: s, offset })
}
