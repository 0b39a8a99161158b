//! Acceptance suite: ten property checks at fixed seeds and tolerances.
//! Shared by the `acceptance` test target and the `selftest` command.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;

use crate::algebra::{AlgebraDescriptor, Element, FactorDescriptor};
use crate::error::Error;
use crate::operator::{quadratic_rep, LinearOperator};
use crate::order_maps::{
    factorize_linear_order_iso, grid_power_demo, random_jordan_automorphism, random_order_iso, EngagedMap,
    MonotoneBijection, OrderIsoForm,
};
use crate::par::{map_indexed, Backend};
use crate::sampling::{random_element, random_interior, random_mixed_descriptor, random_positive, trial_rng};
use crate::spectral::{atomic_refinement, eigenvalues_with_multiplicity, inv, order_unit_norm, spectral_decomposition};
use crate::structure::{codim1_ideals, decompose_by_factors, decompose_engaged_disengaged, is_atom, is_central};
use crate::verify::{check_linearity_blackbox, check_order_preserving, extreme_vector_oracle, SampleConfig, THOROUGH_TRIALS};

pub const JORDAN_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
pub const FRAME_TOL: f64 = 1e-10;
pub const UNIT_REP_TOL: f64 = 1e-12;
pub const INVERSE_REP_TOL: f64 = 1e-8;
pub const FACTORIZATION_TOL: f64 = 1e-8;
pub const CENTRAL_TOL: f64 = 1e-10;
pub const ROUND_TRIP_TOL: f64 = 1e-8;
pub const ADDITIVITY_WITNESS: f64 = 1e-3;
pub const MULTIPLICATIVE_TOL: f64 = 1e-9;
pub const JORDAN_AXIOM_SECONDS: f64 = 5.0;
pub const SUITE_SECONDS: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2}. {} ({:.2}s): {}", self.id, self.name, self.seconds, self.detail)
    }
}

fn outcome(id: u8, name: &'static str, start: Instant, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn alg(factors: Vec<FactorDescriptor>) -> Arc<AlgebraDescriptor> {
    AlgebraDescriptor::shared(factors).expect("fixed descriptors are valid")
}

fn mixed_algebra() -> Arc<AlgebraDescriptor> {
    alg(vec![FactorDescriptor::Real, FactorDescriptor::Sym { n: 3 }, FactorDescriptor::Spin { n: 4 }])
}

/// Jordan identity, commutativity and the norm conditions
/// `‖x∘y‖ ≤ ‖x‖‖y‖`, `‖x²‖ = ‖x‖²`, `‖x²‖ ≤ ‖x² + y²‖` on 1000 random pairs
/// per factor kind.
pub fn jordan_axioms(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let algebras = [
        alg(vec![FactorDescriptor::Real]),
        alg(vec![FactorDescriptor::Spin { n: 5 }]),
        alg(vec![FactorDescriptor::Sym { n: 4 }]),
    ];
    let mut worst = [0.0f64; 4];
    let mut commutative = true;
    for (k, a) in algebras.iter().enumerate() {
        let rows = map_indexed(backend, 1000, |trial| {
            let mut rng = trial_rng(100 + k as u64, trial as u64);
            let x = random_element(a, &mut rng);
            let y = random_element(a, &mut rng);
            let x2 = x.square();
            let lhs = x.jordan(&y.jordan(&x2).unwrap()).unwrap();
            let rhs = x.jordan(&y).unwrap().jordan(&x2).unwrap();
            let (nx, ny) = (order_unit_norm(&x), order_unit_norm(&y));
            let identity = order_unit_norm(&(&lhs - &rhs)) / (1.0 + nx * nx * ny);
            let square_norm = (order_unit_norm(&x2) - nx * nx).abs() / (1.0 + nx * nx);
            let sum = &x2 + &y.square();
            let monotone = (order_unit_norm(&x2) - order_unit_norm(&sum)).max(0.0) / (1.0 + order_unit_norm(&sum));
            let xy = x.jordan(&y).unwrap();
            let banach = (order_unit_norm(&xy) - nx * ny).max(0.0) / (1.0 + nx * ny);
            let comm = xy == y.jordan(&x).unwrap();
            ([identity, square_norm, monotone, banach], comm)
        });
        for (v, comm) in rows {
            commutative &= comm;
            for (w, vi) in worst.iter_mut().zip(v) {
                *w = w.max(vi);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst.iter().all(|&w| w <= JORDAN_TOL) && commutative && elapsed < JORDAN_AXIOM_SECONDS;
    outcome(
        1,
        "Jordan axioms",
        start,
        passed,
        format!(
            "identity {:.2e}, ‖x²‖=‖x‖² {:.2e}, ‖x²‖≤‖x²+y²‖ {:.2e}, ‖x∘y‖≤‖x‖‖y‖ {:.2e}, commutative {commutative}, {elapsed:.2}s (limit {JORDAN_AXIOM_SECONDS}s)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// Reconstruction `x = Σλᵢpᵢ` and frame laws on 1000 random elements of each
/// test algebra.
pub fn spectral_reconstruction(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let algebras = [alg(vec![FactorDescriptor::Sym { n: 5 }]), alg(vec![FactorDescriptor::Spin { n: 7 }]), mixed_algebra()];
    let mut recon: f64 = 0.0;
    let mut frame: f64 = 0.0;
    for (k, a) in algebras.iter().enumerate() {
        let e = Element::unit(a);
        let rows = map_indexed(backend, 1000, |trial| {
            let mut rng = trial_rng(200 + k as u64, trial as u64);
            let x = random_element(a, &mut rng);
            let d = spectral_decomposition(&x);
            let r = d.reconstruct().distance(&x) / (1.0 + x.coord_norm());
            let mut sum = Element::zero(a);
            let mut f: f64 = 0.0;
            for (i, p) in d.idempotents.iter().enumerate() {
                sum = &sum + p;
                for (j, q) in d.idempotents.iter().enumerate().skip(i) {
                    let pq = p.jordan(q).unwrap();
                    let expected = if i == j { p.clone() } else { Element::zero(a) };
                    f = f.max(pq.max_abs_diff(&expected));
                }
            }
            (r, f.max(sum.max_abs_diff(&e)))
        });
        for (r, f) in rows {
            recon = recon.max(r);
            frame = frame.max(f);
        }
    }
    outcome(
        2,
        "Spectral reconstruction",
        start,
        recon <= RECONSTRUCTION_TOL && frame <= FRAME_TOL,
        format!("reconstruction {recon:.2e} (tol {RECONSTRUCTION_TOL:e}), frame laws {frame:.2e} (tol {FRAME_TOL:e})"),
    )
}

/// `U_e = I` and `U_x U_{x⁻¹} = I` for 500 random invertible `x`. Draws
/// with `min|λ| < 10⁻² max|λ|` are redrawn.
pub fn quadratic_representation(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let a = mixed_algebra();
    let id = LinearOperator::identity(&a);
    let unit_err = quadratic_rep(&Element::unit(&a)).max_abs_diff(&id);
    let errs = map_indexed(backend, 500, |trial| {
        let mut rng = trial_rng(300, trial as u64);
        let x = loop {
            let x = random_element(&a, &mut rng);
            let eig = eigenvalues_with_multiplicity(&x);
            let max = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let min = eig.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
            if min >= 1e-2 * max {
                break x;
            }
        };
        let product = quadratic_rep(&x).compose(&quadratic_rep(&inv(&x).unwrap())).unwrap();
        product.max_abs_diff(&id)
    });
    let worst = errs.into_iter().fold(0.0, f64::max);
    outcome(
        3,
        "Quadratic representation",
        start,
        unit_err <= UNIT_REP_TOL && worst <= INVERSE_REP_TOL,
        format!("‖U_e − I‖ {unit_err:.2e} (tol {UNIT_REP_TOL:e}), ‖U_x U_x⁻¹ − I‖ {worst:.2e} (tol {INVERSE_REP_TOL:e})"),
    )
}

fn factorization_algebras() -> Vec<Arc<AlgebraDescriptor>> {
    use FactorDescriptor::*;
    vec![
        alg(vec![Sym { n: 3 }]),
        alg(vec![Spin { n: 4 }]),
        mixed_algebra(),
        alg(vec![Sym { n: 1 }, Spin { n: 2 }, Real, Sym { n: 2 }]),
    ]
}

/// Round trips `U_y J ↦ (y, J)` and rejection of corrupted maps.
pub fn factorization_uniqueness(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let algebras = factorization_algebras();
    let errs = map_indexed(backend, 500, |trial| {
        let a = &algebras[trial % algebras.len()];
        let mut rng = trial_rng(400, trial as u64);
        let y = random_interior(a, &mut rng);
        let j = random_jordan_automorphism(a, rng.random());
        let t = quadratic_rep(&y).compose(&j).unwrap();
        match factorize_linear_order_iso(&t) {
            Ok((y2, j2)) => y2.max_abs_diff(&y).max(j2.max_abs_diff(&j)),
            Err(_) => f64::INFINITY,
        }
    });
    let worst = errs.into_iter().fold(0.0, f64::max);

    let rejections = map_indexed(backend, 50, |trial| {
        let a = &algebras[trial % algebras.len()];
        let mut rng = trial_rng(401, trial as u64);
        let y = random_interior(a, &mut rng);
        let j = random_jordan_automorphism(a, rng.random());
        let n = a.total_dim();
        let (t, want_interior) = match trial % 4 {
            // Te = −y²
            0 => (quadratic_rep(&y).compose(&j).unwrap().scale(-1.0), true),
            // Te = a² with a singular
            1 => {
                let d = spectral_decomposition(&y);
                let atoms = atomic_refinement(&d);
                let mut s = Element::zero(a);
                for (l, p) in atoms.iter().skip(1) {
                    s = &s + &p.scale(*l);
                }
                (quadratic_rep(&s).compose(&j).unwrap(), true)
            }
            // unital residual J + u vᵀ with v ⟂ e, not multiplicative
            _ => {
                let e = Element::unit(a);
                let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let ee: f64 = e.coords().iter().map(|c| c * c).sum();
                let ve: f64 = v.iter().zip(e.coords()).map(|(p, q)| p * q).sum();
                for (vi, ei) in v.iter_mut().zip(e.coords()) {
                    *vi -= ve / ee * ei;
                }
                let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let perturb = DMatrix::from_fn(n, n, |r, c| 0.3 * u[r] * v[c]);
                let residual = LinearOperator::new(Arc::clone(a), Arc::clone(a), j.matrix() + perturb).unwrap();
                (quadratic_rep(&y).compose(&residual).unwrap(), false)
            }
        };
        matches!(
            (factorize_linear_order_iso(&t), want_interior),
            (Err(Error::NotInterior { .. }), true) | (Err(Error::NotJordanIsomorphism), false)
        )
    });
    let rejected = rejections.iter().filter(|&&ok| ok).count();
    outcome(
        4,
        "Factorization uniqueness",
        start,
        worst <= FACTORIZATION_TOL && rejected == 50,
        format!("500 round trips, worst error {worst:.2e} (tol {FACTORIZATION_TOL:e}); {rejected}/50 corrupted maps rejected with the right diagnostic"),
    )
}

/// Pipeline and factor shortcut agree on 20 random mixed descriptors.
pub fn engaged_disengaged(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let results = map_indexed(backend, 20, |k| {
        let mut rng = trial_rng(500, k as u64);
        let a = random_mixed_descriptor(&mut rng, 4);
        let d = match decompose_engaged_disengaged(&a, k as u64) {
            Ok(d) => d,
            Err(e) => return Err(format!("{a}: {e}")),
        };
        let expected: Vec<usize> = (0..a.factors().len()).filter(|&i| a.factors()[i].dim() == 1).collect();
        if d.disengaged_atoms.len() != expected.len() {
            return Err(format!("{a}: {} disengaged atoms, expected {}", d.disengaged_atoms.len(), expected.len()));
        }
        for (atom, &i) in d.disengaged_atoms.iter().zip(&expected) {
            if atom.max_abs_diff(&Element::factor_unit(&a, i)) > CENTRAL_TOL {
                return Err(format!("{a}: atom for factor {i} is off"));
            }
        }
        if !is_central(&d.p_d) {
            return Err(format!("{a}: p_D not central"));
        }
        let shortcut = decompose_by_factors(&a);
        if shortcut.p_d.max_abs_diff(&d.p_d) > CENTRAL_TOL
            || shortcut.disengaged_coordinates != d.disengaged_coordinates
            || shortcut.engaged != d.engaged
        {
            return Err(format!("{a}: pipeline and shortcut disagree"));
        }
        Ok(())
    });
    let errors: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    outcome(
        5,
        "Engaged/disengaged decomposition",
        start,
        errors.is_empty(),
        if errors.is_empty() { "20/20 descriptors agree".into() } else { errors.join("; ") },
    )
}

fn squaring_form(a: &Arc<AlgebraDescriptor>) -> OrderIsoForm {
    let layout = decompose_by_factors(a);
    let count = layout.disengaged_atoms.len();
    let engaged = layout.engaged.map(|e| EngagedMap {
        y: Element::unit(&e.descriptor),
        j: LinearOperator::identity(&e.descriptor),
    });
    OrderIsoForm::new(
        Arc::clone(a),
        Arc::clone(a),
        (0..count).collect(),
        vec![MonotoneBijection::power(2.0).expect("valid exponent"); count],
        engaged,
    )
    .expect("squaring form is valid")
}

/// Forms on an algebra without central atoms are linear; with a central
/// atom the squaring form is a non-linear order isomorphism.
pub fn linearity_dichotomy(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let engaged_only = alg(vec![FactorDescriptor::Sym { n: 3 }, FactorDescriptor::Spin { n: 4 }]);
    let mut worst_linear: f64 = 0.0;
    for seed in 0..20 {
        let f = random_order_iso(&engaged_only, &engaged_only, 600 + seed, true).expect("isomorphic");
        let r = check_linearity_blackbox(|x| f.apply(x), &engaged_only, SampleConfig { trials: 200, seed, backend });
        worst_linear = worst_linear.max(r.max_violation);
    }

    let with_atom = alg(vec![FactorDescriptor::Real, FactorDescriptor::Sym { n: 3 }]);
    let sq = squaring_form(&with_atom);
    let order = check_order_preserving(|x| sq.apply(x), &with_atom, SampleConfig { trials: THOROUGH_TRIALS, seed: 601, backend });
    let lin = check_linearity_blackbox(|x| sq.apply(x), &with_atom, SampleConfig { trials: 100, seed: 602, backend });
    let additivity = lin
        .failures
        .iter()
        .filter(|f| f.predicate.starts_with("f(x + z)"))
        .map(|f| f.magnitude)
        .fold(0.0, f64::max);
    outcome(
        6,
        "Linearity dichotomy",
        start,
        worst_linear <= crate::verify::LINEARITY_TOL && order.passed() && order.trials == THOROUGH_TRIALS && additivity > ADDITIVITY_WITNESS,
        format!(
            "Sym(3)⊕Spin(4): 20 forms, worst linearity defect {worst_linear:.2e}; Real⊕Sym(3) squaring: {} order failures in {} trials, additivity violation {additivity:.3}",
            order.failure_count, order.trials
        ),
    )
}

/// Codomain for a random domain: the same factors shuffled, with
/// `Real` and `Sym(1)` swapped at random.
fn shuffled_codomain(a: &AlgebraDescriptor, rng: &mut impl Rng) -> Arc<AlgebraDescriptor> {
    let mut factors: Vec<FactorDescriptor> = a
        .factors()
        .iter()
        .map(|f| match f {
            FactorDescriptor::Real | FactorDescriptor::Sym { n: 1 } if rng.random_bool(0.5) => FactorDescriptor::Sym { n: 1 },
            FactorDescriptor::Real | FactorDescriptor::Sym { n: 1 } => FactorDescriptor::Real,
            other => *other,
        })
        .collect();
    for i in (1..factors.len()).rev() {
        let j = rng.random_range(0..=i);
        factors.swap(i, j);
    }
    alg(factors)
}

/// `F ∘ F⁻¹ = id` on 500 points for 200 random forms, and order
/// preservation of `F` and `F⁻¹`.
pub fn classification_round_trip(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let results = map_indexed(backend, 200, |k| {
        let mut rng = trial_rng(700, k as u64);
        let a = random_mixed_descriptor(&mut rng, 4);
        let b = shuffled_codomain(&a, &mut rng);
        let f = random_order_iso(&a, &b, rng.random(), true).map_err(|e| e.to_string())?;
        let g = f.invert().map_err(|e| e.to_string())?;
        let id = f.compose(&g).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let x = random_positive(&b, &mut rng);
            let back = id.apply(&x).map_err(|e| e.to_string())?;
            worst = worst.max(back.distance(&x) / (1.0 + x.coord_norm()));
        }
        let cfg = SampleConfig { trials: 200, seed: k as u64, backend: Backend::Sequential };
        let forward = check_order_preserving(|x| f.apply(x), &a, cfg);
        let backward = check_order_preserving(|x| g.apply(x), &b, cfg);
        Ok::<_, String>((worst, forward.failure_count + backward.failure_count))
    });
    let mut worst: f64 = 0.0;
    let mut order_failures = 0;
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((w, o)) => {
                worst = worst.max(w);
                order_failures += o;
            }
            Err(e) => errors.push(e),
        }
    }
    outcome(
        7,
        "Classification round trip",
        start,
        errors.is_empty() && worst <= ROUND_TRIP_TOL && order_failures == 0,
        format!(
            "200 forms: worst ‖F∘F⁻¹(x) − x‖ {worst:.2e} (tol {ROUND_TRIP_TOL:e}), {order_failures} order failures, {} construction errors",
            errors.len()
        ),
    )
}

/// Every isomorphism class of supported algebras with total dimension at
/// most `max_dim`, as sorted factor lists (`Sym(1)` folded into `Real`).
pub fn algebras_up_to_dim(max_dim: usize) -> Vec<Arc<AlgebraDescriptor>> {
    let mut kinds = vec![FactorDescriptor::Real];
    kinds.extend((2..max_dim).map(|n| FactorDescriptor::Spin { n }).filter(|f| f.dim() <= max_dim));
    kinds.extend((2..=max_dim).map(|n| FactorDescriptor::Sym { n }).filter(|f| f.dim() <= max_dim));

    fn extend(
        kinds: &[FactorDescriptor],
        start: usize,
        remaining: usize,
        current: &mut Vec<FactorDescriptor>,
        out: &mut Vec<Arc<AlgebraDescriptor>>,
    ) {
        if !current.is_empty() {
            out.push(AlgebraDescriptor::shared(current.clone()).expect("valid factors"));
        }
        for i in start..kinds.len() {
            if kinds[i].dim() <= remaining {
                current.push(kinds[i]);
                extend(kinds, i, remaining - kinds[i].dim(), current, out);
                current.pop();
            }
        }
    }

    let mut out = Vec::new();
    extend(&kinds, 0, max_dim, &mut Vec::new(), &mut out);
    out
}

/// Test projections for an algebra: one generic atom per factor, the sum
/// of two atoms inside each factor of rank ≥ 2 and across each pair of
/// adjacent factors, and the unit. Atoms come from a standard frame moved
/// by a random Jordan automorphism.
pub fn projection_family(a: &Arc<AlgebraDescriptor>, seed: u64) -> Vec<Element> {
    let j = random_jordan_automorphism(a, seed);
    let frame = atomic_refinement(&spectral_decomposition(&Element::unit(a)));
    let atoms: Vec<Element> = frame.into_iter().map(|(_, p)| j.apply(&p).expect("same algebra")).collect();
    let owner = |p: &Element| (0..a.factors().len()).find(|&i| p.block(i).iter().any(|v| v.abs() > 1e-12)).expect("non-zero atom");
    let mut per_factor: Vec<Vec<&Element>> = vec![Vec::new(); a.factors().len()];
    for p in &atoms {
        per_factor[owner(p)].push(p);
    }

    let mut family = Vec::new();
    for ps in &per_factor {
        family.push(ps[0].clone());
        if ps.len() >= 2 {
            family.push(ps[0] + ps[1]);
        }
    }
    for w in per_factor.windows(2) {
        family.push(w[0][0] + w[1][0]);
    }
    family.push(Element::unit(a));
    family
}

/// `is_atom` and the sampling extremality oracle agree on the projection
/// family of every algebra of total dimension ≤ 10, for seeds 0–4.
pub fn atoms_are_extreme(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let algebras = algebras_up_to_dim(10);
    let mut checked = 0usize;
    let mut disagreements = Vec::new();
    for (k, a) in algebras.iter().enumerate() {
        for p in projection_family(a, 800 + k as u64) {
            let atom = is_atom(&p);
            for seed in 0..5 {
                checked += 1;
                match extreme_vector_oracle(&p, THOROUGH_TRIALS, seed, backend) {
                    Ok(extreme) if extreme == atom => {}
                    Ok(extreme) => disagreements.push(format!("{a}: is_atom {atom}, oracle {extreme}, seed {seed}")),
                    Err(e) => disagreements.push(format!("{a}: {e}")),
                }
            }
        }
    }
    outcome(
        8,
        "Atoms are extreme vectors",
        start,
        disagreements.is_empty(),
        format!(
            "{} algebras, {checked} (projection, seed) pairs, {} disagreements{}",
            algebras.len(),
            disagreements.len(),
            disagreements.first().map(|d| format!(" (first: {d})")).unwrap_or_default()
        ),
    )
}

/// One codimension-one ideal per dim-1 factor, with multiplicative
/// functionals.
pub fn codimension_one_ideals(backend: Backend) -> CriterionOutcome {
    let start = Instant::now();
    let results = map_indexed(backend, 20, |k| {
        let mut rng = trial_rng(900, k as u64);
        let a = random_mixed_descriptor(&mut rng, 4);
        let expected = a.factors().iter().filter(|f| f.dim() == 1).count();
        let ideals = codim1_ideals(&a, k as u64).map_err(|e| e.to_string())?;
        if ideals.len() != expected {
            return Err(format!("{a}: {} ideals, expected {expected}", ideals.len()));
        }
        let mut worst: f64 = 0.0;
        for ideal in &ideals {
            for _ in 0..100 {
                let x = random_element(&a, &mut rng);
                let y = random_element(&a, &mut rng);
                let prod = ideal.eval(&x) * ideal.eval(&y);
                let lhs = ideal.eval(&x.jordan(&y).unwrap());
                worst = worst.max((lhs - prod).abs() / (1.0 + prod.abs()));
            }
        }
        Ok(worst)
    });
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(w) => worst = worst.max(w),
            Err(e) => errors.push(e),
        }
    }
    outcome(
        9,
        "Codimension-one ideals",
        start,
        errors.is_empty() && worst <= MULTIPLICATIVE_TOL,
        format!("20 descriptors, worst multiplicativity defect {worst:.2e} (tol {MULTIPLICATIVE_TOL:e}){}", if errors.is_empty() { String::new() } else { format!("; {}", errors.join("; ")) }),
    )
}

/// Witness of the grid demo's failure of homogeneity, for printing.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityWitness {
    pub alpha: f64,
    pub x: Vec<f64>,
    pub f_alpha_x: Vec<f64>,
    pub alpha_f_x: Vec<f64>,
    pub defect: f64,
}

/// Exact witness for the grid demo: `x = e`, `α = 2`. The first scalar slot
/// maps `2 ↦ 2^λ` while `2·f(e)` has `2` there.
pub fn grid_homogeneity_witness(form: &OrderIsoForm) -> crate::Result<HomogeneityWitness> {
    let x = Element::unit(form.domain());
    let alpha = 2.0;
    let fax = form.apply(&x.scale(alpha))?;
    let afx = form.apply(&x)?.scale(alpha);
    Ok(HomogeneityWitness {
        alpha,
        defect: fax.distance(&afx),
        x: x.into_coords(),
        f_alpha_x: fax.into_coords(),
        alpha_f_x: afx.into_coords(),
    })
}

pub fn grid_lambda(t: f64) -> f64 {
    if t <= 0.5 {
        2.0
    } else {
        1.0
    }
}

/// Grid demo with `n = 8` and `λ = 2` on the scalar half: order preserving,
/// not homogeneous. `suite_start` carries the start of the whole run for
/// the overall time limit.
pub fn grid_power(backend: Backend, suite_start: Instant) -> CriterionOutcome {
    let start = Instant::now();
    let form = match grid_power_demo(8, grid_lambda) {
        Ok(f) => f,
        Err(e) => return outcome(10, "Grid power demo", start, false, e.to_string()),
    };
    let a = Arc::clone(form.domain());
    let order = check_order_preserving(|x| form.apply(x), &a, SampleConfig { trials: 1000, seed: 1000, backend });
    let lin = check_linearity_blackbox(|x| form.apply(x), &a, SampleConfig { trials: 300, seed: 1001, backend });
    let homogeneity_failures = lin.failures.iter().filter(|f| !f.predicate.starts_with("f(x + z)")).count();
    let witness = grid_homogeneity_witness(&form);
    let total = suite_start.elapsed().as_secs_f64();
    let (witness_ok, witness_text) = match &witness {
        Ok(w) => (
            w.defect > ADDITIVITY_WITNESS,
            format!("f(2e) has {} in slot 0, 2f(e) has {}", w.f_alpha_x[0], w.alpha_f_x[0]),
        ),
        Err(e) => (false, e.to_string()),
    };
    outcome(
        10,
        "Grid power demo",
        start,
        order.passed() && !form.check_linearity() && homogeneity_failures > 0 && witness_ok && total < SUITE_SECONDS,
        format!(
            "{} order failures in {} trials; homogeneity failures sampled: {homogeneity_failures}; witness: {witness_text}; suite time {total:.1}s (limit {SUITE_SECONDS}s)",
            order.failure_count, order.trials
        ),
    )
}

pub fn run_all(backend: Backend) -> Vec<CriterionOutcome> {
    let suite_start = Instant::now();
    let mut out = vec![
        jordan_axioms(backend),
        spectral_reconstruction(backend),
        quadratic_representation(backend),
        factorization_uniqueness(backend),
        engaged_disengaged(backend),
        linearity_dichotomy(backend),
        classification_round_trip(backend),
        atoms_are_extreme(backend),
        codimension_one_ideals(backend),
    ];
    out.push(grid_power(backend, suite_start));
    out
}
