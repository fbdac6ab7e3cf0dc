//! Semi-differential of `lambda_1` and of `F(Omega) = |Omega|^{2/3}
//! lambda_1(Omega)` at the unit ball, where `lambda_1` has multiplicity 3.
//!
//! The derivative in the direction `Phi` is the lowest eigenvalue of a 3x3
//! matrix built from the boundary traces `(grad U_i) nu` weighted by
//! `phi = <Phi, nu>`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;

use crate::ball_spectrum::{a_squared, boundary_gradient_u, lambda1_ball};
use crate::field::{dot, norm, EigenField};
use crate::linalg::{sym3_eigen, SymEigen3};
use crate::poly3::Poly3;
use crate::quadrature::SphereRule;
use crate::specfun::omega;
use crate::{Error, Result};

/// Scalar normal trace `phi` on the unit sphere.
#[derive(Clone)]
pub enum SpherePerturbation {
    Polynomial(Poly3),
    /// Arbitrary evaluator; `degree_hint` sizes the quadrature when the
    /// integrand is known to be polynomial.
    Evaluator {
        f: Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>,
        degree_hint: Option<usize>,
    },
}

impl fmt::Debug for SpherePerturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial(p) => write!(f, "Polynomial({p})"),
            Self::Evaluator { degree_hint, .. } => {
                write!(f, "Evaluator {{ degree_hint: {degree_hint:?} }}")
            }
        }
    }
}

impl SpherePerturbation {
    pub fn polynomial(p: Poly3) -> Self {
        Self::Polynomial(p)
    }

    pub fn evaluator<F: Fn([f64; 3]) -> f64 + Send + Sync + 'static>(
        f: F,
        degree_hint: Option<usize>,
    ) -> Self {
        Self::Evaluator {
            f: Arc::new(f),
            degree_hint,
        }
    }

    /// Named presets `yz`, `xy`, `xz`, `one`, `x`.
    pub fn preset(name: &str) -> Result<Self> {
        let p = match name {
            "yz" => Poly3::monomial(1.0, 0, 1, 1),
            "xy" => Poly3::monomial(1.0, 1, 1, 0),
            "xz" => Poly3::monomial(1.0, 1, 0, 1),
            "one" => Poly3::constant(1.0),
            "x" => Poly3::x(),
            other => return Err(Error::Parse(format!("unknown preset '{other}'"))),
        };
        Ok(Self::Polynomial(p))
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        match self {
            Self::Polynomial(q) => q.eval(p),
            Self::Evaluator { f, .. } => f(p),
        }
    }

    /// Quadrature exact for `phi` times the quadratic boundary weights.
    pub fn rule(&self) -> SphereRule {
        let hint = match self {
            Self::Polynomial(q) => Some(q.degree() as usize),
            Self::Evaluator { degree_hint, .. } => *degree_hint,
        };
        match hint {
            Some(d) => SphereRule::for_degree(d + 2),
            None => SphereRule::default(),
        }
    }

    pub fn integral(&self) -> f64 {
        match self {
            Self::Polynomial(q) => q.integrate_sphere(),
            Self::Evaluator { .. } => self.rule().integrate(|p| self.eval([p.x, p.y, p.z])),
        }
    }
}

/// `M_ij = -int <(grad U_i) nu, (grad U_j) nu> phi` from the monomial
/// structure: with `s = psi'(1) = sin omega`,
/// `M = s^2 [[-(y^2+z^2), xy, -xz], [xy, -(x^2+z^2), -yz], [-xz, -yz, -(x^2+y^2)]]`
/// integrated against `phi`.
pub fn matrix_m_closed_form(phi: &Poly3) -> Matrix3<f64> {
    let s2 = omega().sin().powi(2);
    let m = |a, b, c| phi.mul(&Poly3::monomial(1.0, a, b, c)).integrate_sphere();
    let (xx, yy, zz) = (m(2, 0, 0), m(0, 2, 0), m(0, 0, 2));
    let (xy, xz, yz) = (m(1, 1, 0), m(1, 0, 1), m(0, 1, 1));
    Matrix3::new(
        -(yy + zz),
        xy,
        -xz,
        xy,
        -(xx + zz),
        -yz,
        -xz,
        -yz,
        -(xx + yy),
    ) * s2
}

/// `M_ij` by direct quadrature of the boundary gradients.
pub fn matrix_m_quadrature(phi: &SpherePerturbation) -> Result<Matrix3<f64>> {
    let rule = phi.rule();
    let nodes = rule.nodes();
    let mut out = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let mut vals = Vec::with_capacity(nodes.len());
            for (q, w) in &nodes {
                let p = [q.x, q.y, q.z];
                let gi = boundary_gradient_u(i + 1, p)?;
                let gj = boundary_gradient_u(j + 1, p)?;
                vals.push(-w * dot(&gi, &gj) * phi.eval(p));
            }
            let v = crate::quadrature::compensated_sum(vals);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// `M`, preferring the closed form when `phi` is polynomial.
pub fn matrix_m(phi: &SpherePerturbation) -> Result<Matrix3<f64>> {
    match phi {
        SpherePerturbation::Polynomial(p) => Ok(matrix_m_closed_form(p)),
        SpherePerturbation::Evaluator { .. } => matrix_m_quadrature(phi),
    }
}

/// `M_hat = (2/3) int phi I + M / sin^2(omega)`.
pub fn matrix_mhat(phi: &SpherePerturbation) -> Result<Matrix3<f64>> {
    Ok(mhat_from_m(&matrix_m(phi)?, phi.integral()))
}

fn mhat_from_m(m: &Matrix3<f64>, integral: f64) -> Matrix3<f64> {
    Matrix3::identity() * (2.0 / 3.0 * integral) + m / omega().sin().powi(2)
}

/// Everything the semi-differential at the ball depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiDiffReport {
    pub m: Matrix3<f64>,
    pub mhat: Matrix3<f64>,
    /// Eigenvalues of `mhat`, ascending.
    pub spectrum: [f64; 3],
    pub eigenvectors: Matrix3<f64>,
    pub trace: f64,
    /// `omega^2 |B_3|^{-1/3} mu_1(mhat)`.
    pub semidiff_f: f64,
    /// `mu_1(M) / A^2`.
    pub semidiff_lambda: f64,
    /// `max_k |mhat v_k - mu_k v_k|`.
    pub eigen_residual: f64,
    /// Max entry difference between the closed-form and quadrature
    /// assemblies of `M`; `None` when `phi` is not polynomial.
    pub assembly_agreement: Option<f64>,
}

pub fn semidiff_f(phi: &SpherePerturbation) -> Result<SemiDiffReport> {
    let m = matrix_m(phi)?;
    let assembly_agreement = match phi {
        SpherePerturbation::Polynomial(_) => Some((m - matrix_m_quadrature(phi)?).amax()),
        SpherePerturbation::Evaluator { .. } => None,
    };
    let mhat = mhat_from_m(&m, phi.integral());
    let eig: SymEigen3 = sym3_eigen(&mhat);
    let m_eig = sym3_eigen(&m);
    let vol = 4.0 * PI / 3.0;
    Ok(SemiDiffReport {
        m,
        mhat,
        spectrum: eig.values,
        eigenvectors: eig.vectors,
        trace: mhat.trace(),
        semidiff_f: lambda1_ball() * vol.powf(-1.0 / 3.0) * eig.values[0],
        semidiff_lambda: m_eig.values[0] / a_squared(),
        eigen_residual: eig.residual(&mhat),
        assembly_agreement,
    })
}

/// Margin below which the witness certifies non-optimality.
pub const CERTIFICATE_THRESHOLD: f64 = -10.0;

/// Runs the witness `Phi = z e_y` (so `phi = yz`) and checks that the
/// semi-differential of `F` is strictly negative.
pub fn nonoptimality_certificate() -> Result<SemiDiffReport> {
    let report = semidiff_f(&SpherePerturbation::preset("yz")?)?;
    if report.spectrum[0] >= 0.0 || report.semidiff_f >= CERTIFICATE_THRESHOLD {
        return Err(Error::Certificate {
            mu1: report.spectrum[0],
        });
    }
    Ok(report)
}

/// `(max - min) / mean` of `|(grad u) nu|` over `samples` boundary points;
/// zero when `|(grad u) nu|` is constant.
pub fn necessary_condition_residual<const D: usize, F: EigenField<D>>(
    field: &F,
    samples: usize,
) -> Result<f64> {
    if samples < 64 {
        return Err(Error::Precondition(format!(
            "need at least 64 boundary samples, got {samples}"
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for p in field.boundary_points(samples) {
        let g = norm(&field.boundary_gradient(p)?);
        lo = lo.min(g);
        hi = hi.max(g);
        sum += g;
    }
    let mean = sum / samples as f64;
    if mean <= 1e-14 {
        return Err(Error::Degenerate(format!(
            "mean boundary gradient {mean:e} is zero"
        )));
    }
    Ok((hi - lo) / mean)
}
