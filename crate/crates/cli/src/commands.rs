use std::fs;
use std::path::Path;
use std::sync::Arc;

use jbw_core::acceptance::{grid_homogeneity_witness, run_all};
use jbw_core::order_maps::{factorize_linear_order_iso, grid_power_demo, FormFile, OrderIsoForm};
use jbw_core::par::Backend;
use jbw_core::spectral::{min_eigenvalue, spectral_decomposition};
use jbw_core::structure::{center_basis, decompose_engaged_disengaged, Decomposition};
use jbw_core::verify::{check_linearity_blackbox, check_order_preserving, SampleConfig, SampleReport};
use jbw_core::{AlgebraDescriptor, Element, Error, LinearOperator, MatrixFile};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::report::{fmt_vec, Report, Status};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Malformed(String),
    Precondition(String),
}

impl CliError {
    pub fn into_report(self, command: &'static str) -> Report {
        match self {
            CliError::Malformed(m) => Report::failed(command, Status::MalformedInput, m),
            CliError::Precondition(m) => Report::failed(command, Status::PreconditionFailed, m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::AlgebraMismatch
            | Error::InvalidDescriptor(_)
            | Error::CoordinateLength { .. }
            | Error::ShapeMismatch(_)
            | Error::InvalidMonotone(_)
            | Error::InvalidForm(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> CliResult<Arc<AlgebraDescriptor>> {
    Ok(Arc::new(read_json::<AlgebraDescriptor>(path)?))
}

fn load_element(algebra: &Arc<AlgebraDescriptor>, path: &Path) -> CliResult<Element> {
    Ok(Element::new(Arc::clone(algebra), read_json(path)?)?)
}

fn factors_value(algebra: &AlgebraDescriptor) -> Value {
    serde_json::to_value(algebra).expect("descriptors serialize")["factors"].clone()
}

fn coords(elements: &[Element]) -> Vec<Vec<f64>> {
    elements.iter().map(|e| e.coords().to_vec()).collect()
}

pub fn analyze(algebra: &Path, seed: u64) -> CliResult<Report> {
    let a = load_algebra(algebra)?;
    let center = center_basis(&a).len();
    let d = decompose_engaged_disengaged(&a, seed)?;
    let mut r = Report::new("analyze");
    r.line(format!("algebra: {a}"));
    r.line(format!("dimension {}, rank {}", a.total_dim(), a.rank()));
    r.line(format!("center dimension: {center}"));
    r.line(format!("disengaged atoms: {}", d.disengaged_atoms.len()));
    for p in &d.disengaged_atoms {
        r.line(format!("  {}", fmt_vec(p.coords())));
    }
    r.line(format!("p_D: {}", fmt_vec(d.p_d.coords())));
    let engaged = d.engaged.as_ref().map(|e| e.descriptor.to_string());
    r.line(format!("engaged part: {}", engaged.as_deref().unwrap_or("none")));

    r.field("factors", factors_value(&a));
    r.field("total_dim", a.total_dim());
    r.field("rank", a.rank());
    r.field("center_dimension", center);
    r.field("disengaged_atoms", coords(&d.disengaged_atoms));
    r.field("p_d", d.p_d.coords());
    r.field("engaged", d.engaged.as_ref().map(|e| factors_value(&e.descriptor)));
    Ok(r)
}

pub fn spectrum(algebra: &Path, element: &Path) -> CliResult<Report> {
    let a = load_algebra(algebra)?;
    let x = load_element(&a, element)?;
    let d = spectral_decomposition(&x);
    let e = Element::unit(&a);
    // trace of an idempotent is its rank
    let multiplicities: Vec<usize> = d.idempotents.iter().map(|p| p.inner(&e).expect("same algebra").round() as usize).collect();
    let mut r = Report::new("spectrum");
    r.line(format!("algebra: {a}"));
    for ((l, p), m) in d.eigenvalues.iter().zip(&d.idempotents).zip(&multiplicities) {
        r.line(format!("λ = {l:.9} (multiplicity {m}): {}", fmt_vec(p.coords())));
    }
    let min = min_eigenvalue(&x);
    r.line(format!("min eigenvalue {min:.9}"));
    r.field("eigenvalues", &d.eigenvalues);
    r.field("multiplicities", &multiplicities);
    r.field("idempotents", coords(&d.idempotents));
    r.field("min_eigenvalue", min);
    Ok(r)
}

pub fn factorize(algebra: &Path, map: &Path) -> CliResult<Report> {
    let a = load_algebra(algebra)?;
    let file: MatrixFile = read_json(map)?;
    let t = LinearOperator::from_file(Arc::clone(&a), Arc::clone(&a), &file)?;
    let (y, j) = factorize_linear_order_iso(&t)?;
    let mut r = Report::new("factorize");
    r.line(format!("algebra: {a}"));
    r.line(format!("y = {}", fmt_vec(y.coords())));
    r.line("J =");
    for row in j.matrix().row_iter() {
        let row: Vec<f64> = row.iter().copied().collect();
        r.line(format!("  {}", fmt_vec(&row)));
    }
    r.field("y", y.coords());
    r.field("J", j.to_file());
    Ok(r)
}

fn decomposition_value(d: &Decomposition) -> Value {
    json!({
        "factors": factors_value(&d.algebra),
        "p_d": d.p_d.coords(),
        "p_e": d.p_e.coords(),
        "disengaged_atoms": coords(&d.disengaged_atoms),
        "disengaged_coordinates": d.disengaged_coordinates,
        "engaged": d.engaged.as_ref().map(|e| json!({
            "factors": factors_value(&e.descriptor),
            "factor_indices": e.factor_indices,
            "embedding": e.embedding.to_file(),
        })),
    })
}

pub fn decompose(algebra: &Path, seed: u64) -> CliResult<Report> {
    let a = load_algebra(algebra)?;
    let d = decompose_engaged_disengaged(&a, seed)?;
    let mut r = Report::new("decompose");
    r.line(format!("algebra: {a}"));
    r.line(format!("p_D = {}", fmt_vec(d.p_d.coords())));
    r.line(format!("p_E = {}", fmt_vec(d.p_e.coords())));
    r.line(format!("disengaged coordinates: {:?}", d.disengaged_coordinates));
    match &d.engaged {
        Some(e) => r.line(format!("engaged: {} (factors {:?})", e.descriptor, e.factor_indices)),
        None => r.line("engaged: none"),
    }
    r.field("decomposition", decomposition_value(&d));
    Ok(r)
}

fn report_lines(r: &mut Report, s: &SampleReport) {
    let verdict = if s.passed() { "pass" } else { "FAIL" };
    r.line(format!(
        "{}: {verdict}, {} failures in {} trials, max violation {:.3e} (tol {:e})",
        s.check, s.failure_count, s.trials, s.max_violation, s.tolerance
    ));
    if let Some(f) = s.failures.first() {
        r.line(format!("  first failure: trial {}, {} off by {:.3e}", f.trial, f.predicate, f.magnitude));
    }
}

fn sample_form(r: &mut Report, form: &OrderIsoForm, config: SampleConfig) -> bool {
    let domain = Arc::clone(form.domain());
    let order = check_order_preserving(|x| form.apply(x), &domain, config);
    let linearity = check_linearity_blackbox(|x| form.apply(x), &domain, config);
    report_lines(r, &order);
    report_lines(r, &linearity);
    r.line(format!("linear: {}", linearity.passed()));
    r.field("order_preserving", order.passed());
    r.field("linear", linearity.passed());
    r.field("order_report", &order);
    r.field("linearity_report", &linearity);
    order.passed()
}

pub fn verify_oiso(form: &Path, config: SampleConfig) -> CliResult<Report> {
    let file: FormFile = read_json(form)?;
    let f = OrderIsoForm::from_file(file)?;
    let mut r = Report::new("verify-oiso");
    r.line(format!("{} → {}", f.domain(), f.codomain()));
    r.field("seed", config.seed);
    r.field("trials", config.trials);
    if !sample_form(&mut r, &f, config) {
        r.status = Status::VerificationFailed;
    }
    Ok(r)
}

pub fn demo_nonlinear(grid: usize, lambda: f64, config: SampleConfig) -> CliResult<Report> {
    let form = grid_power_demo(grid, |t| if t <= 0.5 { lambda } else { 1.0 })?;
    let mut r = Report::new("demo-nonlinear");
    r.line(format!("grid {grid}, λ = {lambda} on t ≤ ½, 1 above"));
    r.line(format!("algebra: {}", form.domain()));
    r.field("grid", grid);
    r.field("lambda", lambda);
    r.field("seed", config.seed);
    r.field("trials", config.trials);
    if !sample_form(&mut r, &form, config) {
        r.status = Status::VerificationFailed;
    }
    let w = grid_homogeneity_witness(&form)?;
    r.line(format!("witness: x = e, α = {}", w.alpha));
    r.line(format!("  f(αx)  = {}", fmt_vec(&w.f_alpha_x)));
    r.line(format!("  αf(x)  = {}", fmt_vec(&w.alpha_f_x)));
    r.line(format!("  defect = {:.6}", w.defect));
    r.field(
        "witness",
        json!({ "alpha": w.alpha, "x": w.x, "f_alpha_x": w.f_alpha_x, "alpha_f_x": w.alpha_f_x, "defect": w.defect }),
    );
    Ok(r)
}

/// Timings stay out of the structured document so reruns diff cleanly.
pub fn selftest(backend: Backend) -> Report {
    let outcomes = run_all(backend);
    let mut r = Report::new("selftest");
    for o in &outcomes {
        r.line(o.to_string());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    r.line(format!("{passed}/{} criteria passed", outcomes.len()));
    let criteria: Vec<Value> = outcomes.iter().map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed })).collect();
    r.field("criteria", criteria);
    r.field("passed", passed);
    if passed != outcomes.len() {
        r.status = Status::VerificationFailed;
    }
    r
}
