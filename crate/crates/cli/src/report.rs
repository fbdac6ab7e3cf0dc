//! JSON views of the library reports.

use nalgebra::Matrix3;
use serde_json::{json, Value};

use stokes_spectra::buckling_oracle::{MpsResult, StarDomain};
use stokes_spectra::semidiff_3d::SemiDiffReport;
use stokes_spectra::shape_deriv_2d::{HessianReport, StreamCoefficients};
use stokes_spectra::validation::{Check, Relation, SuiteReport};
use stokes_spectra::Error;

use crate::output::{fmt_num, num, nums};

fn matrix(m: &Matrix3<f64>) -> Value {
    Value::Array(
        (0..3)
            .map(|i| nums(&[m[(i, 0)], m[(i, 1)], m[(i, 2)]]))
            .collect(),
    )
}

pub fn hessian(r: &HessianReport) -> Value {
    json!({
        "value": num(r.value),
        "per_mode": r.per_mode.iter().map(|(n, v)| json!({"n": n, "value": num(*v)})).collect::<Vec<_>>(),
        "i_value": num(r.i_value),
        "h_half_norm": num(r.h_half_norm),
        "coercivity_ratio": r.coercivity_ratio.map(num),
    })
}

pub fn stream(c: &StreamCoefficients) -> Value {
    json!({
        "modes": c.modes.iter().map(|m| json!({
            "n": m.n,
            "a": num(m.a),
            "b": num(m.b),
            "c": num(m.c),
            "d": num(m.d),
        })).collect::<Vec<_>>(),
    })
}

pub fn semidiff(r: &SemiDiffReport) -> Value {
    json!({
        "m": matrix(&r.m),
        "mhat": matrix(&r.mhat),
        "spectrum": nums(&r.spectrum),
        "eigenvectors": matrix(&r.eigenvectors),
        "trace": num(r.trace),
        "semidiff_f": num(r.semidiff_f),
        "semidiff_lambda": num(r.semidiff_lambda),
        "eigen_residual": num(r.eigen_residual),
        "assembly_agreement": r.assembly_agreement.map(num),
    })
}

pub fn buckling(r: &MpsResult, domain: &StarDomain) -> Value {
    let d = &r.diagnostics;
    let area = domain.area();
    json!({
        "lambda": num(r.lambda),
        "sigma_min": num(r.sigma_min),
        "area": num(area),
        "f": num(area * r.lambda),
        "coefficients": nums(&r.coefficients),
        "diagnostics": {
            "n_boundary": d.n_boundary,
            "n_interior": d.n_interior,
            "n_columns": d.n_columns,
            "rank": d.rank,
            "condition_estimate": num(d.condition_estimate),
            "sigma_evaluations": d.sigma_evaluations,
        },
    })
}

fn check(c: &Check) -> Value {
    json!({
        "name": c.name,
        "measured": num(c.measured),
        "bound": num(c.bound),
        "relation": match c.relation {
            Relation::AtMost => "at_most",
            Relation::AtLeast => "at_least",
        },
        "passed": c.passed,
        "error": c.error,
    })
}

pub fn suites(test: &str, reports: &[SuiteReport]) -> Value {
    json!({
        "test": test,
        "passed": reports.iter().all(SuiteReport::passed),
        "suites": reports.iter().map(|r| json!({
            "suite": r.suite.name(),
            "passed": r.passed(),
            "checks": r.checks.iter().map(check).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "DOMAIN_ERROR",
        Error::Bracket { .. } => "BRACKET_ERROR",
        Error::Precondition(_) => "PRECONDITION",
        Error::ModeNotAllowed { .. } => "MODE_NOT_ALLOWED",
        Error::NoEigenvalueInBracket { .. } => "NO_EIGENVALUE_IN_BRACKET",
        Error::IllConditioned(_) => "ILL_CONDITIONED",
        Error::InvalidDomain(_) => "INVALID_DOMAIN",
        Error::InvalidConfig(_) => "INVALID_CONFIG",
        Error::Degenerate(_) => "DEGENERATE",
        Error::Certificate { .. } => "CERTIFICATE_FAILURE",
        Error::Parse(_) => "PARSE_ERROR",
    }
}

pub fn error(e: &Error) -> Value {
    let mut body = json!({
        "code": error_code(e),
        "message": e.to_string(),
    });
    let extra = match e {
        Error::ModeNotAllowed { mode } => Some(("mode", json!(mode))),
        Error::NoEigenvalueInBracket { best_sigma, .. } => {
            Some(("best_sigma", json!(fmt_num(*best_sigma))))
        }
        Error::Certificate { mu1 } => Some(("mu1", json!(fmt_num(*mu1)))),
        _ => None,
    };
    if let Some((k, v)) = extra {
        body[k] = v;
    }
    json!({ "error": body })
}
