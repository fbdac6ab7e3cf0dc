//! First and second shape derivatives of `lambda_1` and of
//! `F(Omega) = |Omega| lambda_1(Omega)` at the unit disk, for normal boundary
//! perturbations `phi(theta) = sum alpha_n cos(n theta) + beta_n sin(n theta)`.

use std::f64::consts::PI;

use crate::disk_spectrum::{boundary_gradient_disk, lambda1_disk};
use crate::quadrature::{compensated_sum, CircleRule, GaussLegendre};
use crate::specfun::{j11, jn, jn_prime, jn_ratio, MAX_ORDER};
use crate::{Error, Result};

/// Default Fourier truncation.
pub const DEFAULT_N: usize = 64;

/// Highest mode accepted (the formulas need `J_{n+1}`).
pub const MAX_MODE: usize = MAX_ORDER as usize - 1;

/// Largest `n` accepted by [`gamma`].
pub const GAMMA_MAX: usize = 200;

/// Tolerance on `alpha_0, alpha_1, beta_1` for the second-order formulas.
pub const RIGID_TOL: f64 = 1e-14;

/// Truncated Fourier series of the normal trace on the unit circle.
/// `beta[0]` is unused and kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPerturbation2D {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl BoundaryPerturbation2D {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let n = alpha.len().max(beta.len()).max(1);
        if n - 1 > MAX_MODE {
            return Err(Error::InvalidConfig(format!(
                "Fourier truncation {} exceeds the supported maximum {MAX_MODE}",
                n - 1
            )));
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "non-finite Fourier coefficient".into(),
            ));
        }
        let mut a = alpha;
        let mut b = beta;
        a.resize(n, 0.0);
        b.resize(n, 0.0);
        b[0] = 0.0;
        Ok(Self { alpha: a, beta: b })
    }

    pub fn zero() -> Self {
        Self {
            alpha: vec![0.0],
            beta: vec![0.0],
        }
    }

    /// Sparse construction from `(n, value)` pairs; repeated modes add up.
    pub fn from_modes(cos: &[(usize, f64)], sin: &[(usize, f64)]) -> Result<Self> {
        let top = cos.iter().chain(sin).map(|(n, _)| *n).max().unwrap_or(0);
        if top > MAX_MODE {
            return Err(Error::InvalidConfig(format!(
                "mode {top} exceeds {MAX_MODE}"
            )));
        }
        if let Some((n, _)) = sin.iter().find(|(n, _)| *n == 0) {
            return Err(Error::InvalidConfig(format!(
                "sin mode {n} is identically zero"
            )));
        }
        let mut alpha = vec![0.0; top + 1];
        let mut beta = vec![0.0; top + 1];
        for (n, v) in cos {
            alpha[*n] += v;
        }
        for (n, v) in sin {
            beta[*n] += v;
        }
        Self::new(alpha, beta)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            alpha: vec![c],
            beta: vec![0.0],
        }
    }

    pub fn cos(n: usize) -> Self {
        Self::from_modes(&[(n, 1.0)], &[]).expect("mode within range")
    }

    pub fn sin(n: usize) -> Self {
        Self::from_modes(&[], &[(n, 1.0)]).expect("mode within range")
    }

    /// Highest stored mode.
    pub fn n_max(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self, n: usize) -> f64 {
        self.alpha.get(n).copied().unwrap_or(0.0)
    }

    pub fn beta(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.beta.get(n).copied().unwrap_or(0.0)
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        compensated_sum((0..=self.n_max()).map(|n| {
            let (s, c) = (n as f64 * theta).sin_cos();
            self.alpha[n] * c + self.beta[n] * s
        }))
    }

    /// `phi'(theta)`.
    pub fn deriv(&self, theta: f64) -> f64 {
        compensated_sum((1..=self.n_max()).map(|n| {
            let nf = n as f64;
            let (s, c) = (nf * theta).sin_cos();
            nf * (-self.alpha[n] * s + self.beta[n] * c)
        }))
    }

    /// `int phi = 2 pi alpha_0`.
    pub fn integral(&self) -> f64 {
        2.0 * PI * self.alpha[0]
    }

    /// `int phi^2 = 2 pi alpha_0^2 + pi sum_{n>=1} (alpha_n^2 + beta_n^2)`.
    pub fn square_integral(&self) -> f64 {
        let tail = compensated_sum(
            (1..=self.n_max()).map(|n| self.alpha[n].powi(2) + self.beta[n].powi(2)),
        );
        2.0 * PI * self.alpha[0].powi(2) + PI * tail
    }

    /// `sum_{n>=2} n (alpha_n^2 + beta_n^2)`.
    pub fn h_half_norm(&self) -> f64 {
        compensated_sum(
            (2..=self.n_max()).map(|n| n as f64 * (self.alpha[n].powi(2) + self.beta[n].powi(2))),
        )
    }

    /// `max |phi|` on a 1024-point grid.
    pub fn max_abs(&self) -> f64 {
        CircleRule::new(1024)
            .nodes()
            .map(|t| self.eval(t).abs())
            .fold(0.0, f64::max)
    }

    /// Split into the dilation/translation part (modes 0 and 1) and the rest.
    pub fn split_rigid(&self) -> (Self, Self) {
        let k = self.n_max().min(1);
        let mut rigid_a = self.alpha[..=k].to_vec();
        let mut rigid_b = self.beta[..=k].to_vec();
        rigid_a.resize(2, 0.0);
        rigid_b.resize(2, 0.0);
        let mut rest_a = self.alpha.clone();
        let mut rest_b = self.beta.clone();
        rest_a[0] = 0.0;
        if rest_a.len() > 1 {
            rest_a[1] = 0.0;
            rest_b[1] = 0.0;
        }
        (
            Self {
                alpha: rigid_a,
                beta: rigid_b,
            },
            Self {
                alpha: rest_a,
                beta: rest_b,
            },
        )
    }

    /// Rejects modes 0 and 1, on which the second-order formulas are not stated.
    pub fn check_orthogonal(&self) -> Result<()> {
        if self.alpha[0].abs() > RIGID_TOL {
            return Err(Error::ModeNotAllowed { mode: 0 });
        }
        if self.n_max() >= 1 && (self.alpha[1].abs() > RIGID_TOL || self.beta[1].abs() > RIGID_TOL)
        {
            return Err(Error::ModeNotAllowed { mode: 1 });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            alpha: self.alpha.iter().map(|v| v * s).collect(),
            beta: self.beta.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.alpha.len().max(other.alpha.len());
        let alpha = (0..n).map(|k| self.alpha(k) + other.alpha(k)).collect();
        let beta = (0..n).map(|k| self.beta(k) + other.beta(k)).collect();
        Self { alpha, beta }
    }
}

/// `-int |(grad u) nu|^2 phi = -2 j_{1,1}^2 alpha_0`.
pub fn d1_lambda(phi: &BoundaryPerturbation2D) -> f64 {
    -2.0 * lambda1_disk() * phi.alpha(0)
}

/// `lambda_1 int phi - |B_2| int |(grad u) nu|^2 phi`, with the boundary
/// integral done by quadrature on the exact boundary gradient.
pub fn d1_f(phi: &BoundaryPerturbation2D) -> f64 {
    let rule = CircleRule::new(256.max(4 * phi.n_max() + 8));
    let weighted = rule.integrate(|t| {
        let g = boundary_gradient_disk(t);
        (g[0] * g[0] + g[1] * g[1]) * phi.eval(t)
    });
    lambda1_disk() * phi.integral() - PI * weighted
}

/// `gamma_n = J_n(j_{1,1}) / (j_{1,1} J_{n+1}(j_{1,1}))`.
pub fn gamma(n: usize) -> Result<f64> {
    if !(2..=GAMMA_MAX).contains(&n) {
        return Err(Error::Domain(format!(
            "gamma_n needs 2 <= n <= {GAMMA_MAX}, got {n}"
        )));
    }
    let k = j11();
    Ok(1.0 / (k * jn_ratio(n as u32, k)))
}

/// `2 pi j_{1,1}^4 gamma_n`: the Hessian weight of `alpha_n^2 + beta_n^2`.
pub fn hessian_weight(n: usize) -> Result<f64> {
    Ok(2.0 * PI * j11().powi(4) * gamma(n)?)
}

/// Coefficients of one active mode of the stream function of `u'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamMode {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// `psi' = sum_n (a_n cos + b_n sin) J_n(j_{1,1} r) + (c_n cos + d_n sin) r^n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamCoefficients {
    pub modes: Vec<StreamMode>,
}

/// Solves for `(a_n, b_n, c_n, d_n)` from the clamped boundary data.
pub fn stream_coefficients(phi: &BoundaryPerturbation2D) -> Result<StreamCoefficients> {
    phi.check_orthogonal()?;
    let k = j11();
    let mut modes = Vec::new();
    for n in 2..=phi.n_max() {
        let (al, be) = (phi.alpha(n), phi.beta(n));
        if al == 0.0 && be == 0.0 {
            continue;
        }
        let jnk = jn(n as u32, k);
        let denom = PI.sqrt() * (n as f64 * jnk - k * jn_prime(n as u32, k));
        let a = k * al / denom;
        let b = k * be / denom;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!(
                "stream coefficients of mode {n} overflow"
            )));
        }
        modes.push(StreamMode {
            n,
            a,
            b,
            c: -jnk * a,
            d: -jnk * b,
        });
    }
    Ok(StreamCoefficients { modes })
}

/// Radial factors `(R, R', R'')` of the Bessel and power parts of mode `n`.
fn radial(n: usize, r: f64) -> ([f64; 3], [f64; 3]) {
    let k = j11();
    let nu = n as u32;
    let x = k * r;
    let j = jn(nu, x);
    let jp = jn_prime(nu, x);
    let nf = n as f64;
    // Bessel's equation, rewritten to stay finite at r = 0 for n >= 2
    let jpp = if x == 0.0 {
        if n == 2 {
            0.25
        } else {
            0.0
        }
    } else {
        -jp / x - (1.0 - nf * nf / (x * x)) * j
    };
    let bessel = [j, k * jp, k * k * jpp];
    let power = [
        r.powi(n as i32),
        nf * r.powi(n as i32 - 1),
        nf * (nf - 1.0) * r.powi(n as i32 - 2),
    ];
    (bessel, power)
}

impl StreamCoefficients {
    fn fold<F: Fn(&StreamMode, [f64; 3], [f64; 3], f64, f64) -> f64>(
        &self,
        r: f64,
        theta: f64,
        f: F,
    ) -> f64 {
        compensated_sum(self.modes.iter().map(|m| {
            let (bes, pow) = radial(m.n, r);
            let (s, c) = (m.n as f64 * theta).sin_cos();
            f(m, bes, pow, c, s)
        }))
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        self.fold(r, theta, |m, bes, pow, c, s| {
            (m.a * c + m.b * s) * bes[0] + (m.c * c + m.d * s) * pow[0]
        })
    }

    pub fn d_r(&self, r: f64, theta: f64) -> f64 {
        self.fold(r, theta, |m, bes, pow, c, s| {
            (m.a * c + m.b * s) * bes[1] + (m.c * c + m.d * s) * pow[1]
        })
    }

    pub fn d_rr(&self, r: f64, theta: f64) -> f64 {
        self.fold(r, theta, |m, bes, pow, c, s| {
            (m.a * c + m.b * s) * bes[2] + (m.c * c + m.d * s) * pow[2]
        })
    }

    pub fn d_theta(&self, r: f64, theta: f64) -> f64 {
        self.fold(r, theta, |m, bes, pow, c, s| {
            let nf = m.n as f64;
            nf * ((-m.a * s + m.b * c) * bes[0] + (-m.c * s + m.d * c) * pow[0])
        })
    }

    pub fn d_rtheta(&self, r: f64, theta: f64) -> f64 {
        self.fold(r, theta, |m, bes, pow, c, s| {
            let nf = m.n as f64;
            nf * ((-m.a * s + m.b * c) * bes[1] + (-m.c * s + m.d * c) * pow[1])
        })
    }

    pub fn d_thetatheta(&self, r: f64, theta: f64) -> f64 {
        self.fold(r, theta, |m, bes, pow, c, s| {
            let nf = m.n as f64;
            -nf * nf * ((m.a * c + m.b * s) * bes[0] + (m.c * c + m.d * s) * pow[0])
        })
    }

    /// Cartesian value at `(x, y)`, for finite-difference checks.
    pub fn value_xy(&self, x: f64, y: f64) -> f64 {
        self.value(x.hypot(y), y.atan2(x))
    }

    /// `curl psi' = (-d_y psi', d_x psi')` in Cartesian components.
    pub fn curl(&self, r: f64, theta: f64) -> [f64; 2] {
        // curl psi = -(psi_theta / r) e_r + psi_r e_theta
        let pr = self.d_r(r, theta);
        let pt_over_r = if r == 0.0 {
            0.0
        } else {
            self.d_theta(r, theta) / r
        };
        let (s, c) = theta.sin_cos();
        let ur = -pt_over_r;
        let ut = pr;
        [ur * c - ut * s, ur * s + ut * c]
    }

    /// Eigenfunction derivative `u' = -curl psi'`, the sign for which
    /// `u' = -((grad u) nu) phi` on the circle.
    pub fn eigenfunction_derivative(&self, r: f64, theta: f64) -> [f64; 2] {
        let v = self.curl(r, theta);
        [-v[0], -v[1]]
    }

    /// Squared Frobenius norm of the Hessian of `psi'`, which equals
    /// `|grad u'|^2`.
    pub fn hessian_norm_sq(&self, r: f64, theta: f64) -> f64 {
        let prr = self.d_rr(r, theta);
        let pr = self.d_r(r, theta);
        let pt = self.d_theta(r, theta);
        let prt = self.d_rtheta(r, theta);
        let ptt = self.d_thetatheta(r, theta);
        let h_rt = prt / r - pt / (r * r);
        let h_tt = pr / r + ptt / (r * r);
        prr * prr + 2.0 * h_rt * h_rt + h_tt * h_tt
    }

    /// `|grad psi'|^2 = |u'|^2`.
    pub fn gradient_norm_sq(&self, r: f64, theta: f64) -> f64 {
        let pr = self.d_r(r, theta);
        let pt = self.d_theta(r, theta);
        pr * pr + pt * pt / (r * r)
    }

    pub fn max_mode(&self) -> usize {
        self.modes.iter().map(|m| m.n).max().unwrap_or(0)
    }
}

/// `psi'(r, theta)`.
pub fn stream_derivative(coeffs: &StreamCoefficients, r: f64, theta: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&r) {
        return Err(Error::Domain(format!(
            "radius {r} outside the closed unit disk"
        )));
    }
    Ok(coeffs.value(r, theta))
}

/// `I` from its series:
/// `-j^2 sum [((n - j^2) J_n - j J_n') / (n J_n - j J_n')] (alpha_n^2 + beta_n^2)`,
/// where the bracket simplifies to `1 - j^2 gamma_n`.
pub fn quadratic_form_i(phi: &BoundaryPerturbation2D) -> Result<f64> {
    phi.check_orthogonal()?;
    let k2 = j11() * j11();
    let terms = (2..=phi.n_max())
        .map(|n| Ok((1.0 - k2 * gamma(n)?) * (phi.alpha(n).powi(2) + phi.beta(n).powi(2))))
        .collect::<Result<Vec<f64>>>()?;
    Ok(-k2 * compensated_sum(terms))
}

/// `I = int |grad u'|^2 - lambda_1 int |u'|^2` by tensor-product quadrature
/// (Gauss-Legendre in `r`, trapezoid in `theta`).
pub fn quadratic_form_i_direct(phi: &BoundaryPerturbation2D, n_radial: usize) -> Result<f64> {
    let coeffs = stream_coefficients(phi)?;
    let lam = lambda1_disk();
    let rule = CircleRule::new(4 * coeffs.max_mode() + 8);
    let gl = GaussLegendre::new(n_radial);
    Ok(compensated_sum(gl.mapped(0.0, 1.0).into_iter().map(
        |(r, w)| {
            w * r
                * rule.integrate(|t| {
                    coeffs.hessian_norm_sq(r, t) - lam * coeffs.gradient_norm_sq(r, t)
                })
        },
    )))
}

/// Second-order report at the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianReport {
    /// `<d^2 F(B_2) phi, phi>`.
    pub value: f64,
    /// `(n, 2 pi j^4 gamma_n (alpha_n^2 + beta_n^2))`, ascending in `n`.
    pub per_mode: Vec<(usize, f64)>,
    pub i_value: f64,
    pub h_half_norm: f64,
    /// `value / h_half_norm`, `None` for `phi = 0`.
    pub coercivity_ratio: Option<f64>,
}

/// `<d^2 F(B_2) phi, phi> = 2 pi j_{1,1}^4 sum gamma_n (alpha_n^2 + beta_n^2)`.
pub fn d2_f(phi: &BoundaryPerturbation2D) -> Result<HessianReport> {
    phi.check_orthogonal()?;
    let mut per_mode = Vec::new();
    for n in 2..=phi.n_max() {
        let s = phi.alpha(n).powi(2) + phi.beta(n).powi(2);
        if s != 0.0 {
            per_mode.push((n, hessian_weight(n)? * s));
        }
    }
    let value = compensated_sum(per_mode.iter().map(|(_, v)| *v));
    let h = phi.h_half_norm();
    Ok(HessianReport {
        value,
        per_mode,
        i_value: quadratic_form_i(phi)?,
        h_half_norm: h,
        coercivity_ratio: (h > 0.0).then(|| value / h),
    })
}

/// `2 lambda int phi^2 - (2 lambda / pi) (int phi)^2 + 2 pi I`.
pub fn d2_f_from_i(phi: &BoundaryPerturbation2D, i_value: f64) -> f64 {
    let lam = lambda1_disk();
    2.0 * lam * phi.square_integral() - 2.0 * lam / PI * phi.integral().powi(2) + 2.0 * PI * i_value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk_spectrum::{boundary_gradient_norm_sq, c1};
    use crate::fd;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn perturbation_integrals() {
        let phi = BoundaryPerturbation2D::from_modes(&[(0, 0.5), (3, 2.0)], &[(2, -1.0)]).unwrap();
        let rule = CircleRule::new(64);
        assert!(close(
            rule.integrate(|t| phi.eval(t)),
            phi.integral(),
            1e-13
        ));
        assert!(close(
            rule.integrate(|t| phi.eval(t).powi(2)),
            phi.square_integral(),
            1e-12
        ));
        let h = 1e-5;
        assert!(close(
            fd::d1_o4(|t| phi.eval(t), 0.3, h),
            phi.deriv(0.3),
            1e-9
        ));
        assert_eq!(phi.h_half_norm(), 2.0 + 12.0);
        assert!(BoundaryPerturbation2D::from_modes(&[(200, 1.0)], &[]).is_err());
        assert!(BoundaryPerturbation2D::new(vec![f64::NAN], vec![]).is_err());
    }

    #[test]
    fn split_rigid_and_precondition() {
        let phi = BoundaryPerturbation2D::from_modes(&[(0, 1.0), (1, 2.0), (4, 3.0)], &[(1, 5.0)])
            .unwrap();
        let (rigid, rest) = phi.split_rigid();
        assert_eq!(rigid.alpha(0), 1.0);
        assert_eq!(rigid.beta(1), 5.0);
        assert_eq!(rest.alpha(4), 3.0);
        assert!(rest.check_orthogonal().is_ok());
        assert_eq!(
            phi.check_orthogonal(),
            Err(Error::ModeNotAllowed { mode: 0 })
        );
        assert_eq!(
            BoundaryPerturbation2D::sin(1).check_orthogonal(),
            Err(Error::ModeNotAllowed { mode: 1 })
        );
        assert_eq!(rigid.add(&rest), phi);
    }

    #[test]
    fn d1_lambda_examples() {
        let k2 = lambda1_disk();
        assert!(close(
            d1_lambda(&BoundaryPerturbation2D::constant(1.0)),
            -2.0 * k2,
            1e-12
        ));
        assert!((-2.0 * k2 + 29.363_941_284_247_786).abs() <= 1e-10);
        assert_eq!(d1_lambda(&BoundaryPerturbation2D::cos(1)), 0.0);
        let phi = BoundaryPerturbation2D::from_modes(&[(0, 3.0), (5, 1.0)], &[]).unwrap();
        assert!(close(d1_lambda(&phi), -6.0 * k2, 1e-12));
        // scaling law: d/dt j^2 / (1 + t)^2 at t = 0
        let dt = 1e-6_f64;
        let fd = (k2 / (1.0 + dt).powi(2) - k2 / (1.0 - dt).powi(2)) / (2.0 * dt);
        assert!(close(fd, -2.0 * k2, 1e-6));
    }

    #[test]
    fn d1_f_vanishes() {
        assert!(d1_f(&BoundaryPerturbation2D::constant(1.0)).abs() <= 1e-10);
        assert!(d1_f(&BoundaryPerturbation2D::cos(2)).abs() <= 1e-10);
    }

    #[test]
    fn gamma_examples() {
        for n in 2..=100 {
            assert!(gamma(n).unwrap() > 0.0, "n={n}");
        }
        let k = j11();
        let g80 = gamma(80).unwrap() * k * k / (2.0 * 81.0);
        assert!((g80 - 1.0).abs() <= 0.05);
        for n in [150, 180, GAMMA_MAX] {
            let ratio = gamma(n).unwrap() * k * k / (2.0 * (n as f64 + 1.0));
            assert!((ratio - 1.0).abs() <= 1e-3, "n={n} {ratio}");
        }
        let g2 = gamma(2).unwrap();
        assert!(close(g2, jn(2, k) / (k * jn(3, k)), 1e-15));
        assert!(close(g2, 0.25, 1e-13));
        assert!(gamma(1).is_err());
        assert!(gamma(0).is_err());
    }

    #[test]
    fn stream_coefficient_examples() {
        let k = j11();
        let s = stream_coefficients(&BoundaryPerturbation2D::cos(2)).unwrap();
        assert_eq!(s.modes.len(), 1);
        let m = s.modes[0];
        let a2 = k / (PI.sqrt() * k * jn(3, k));
        assert!(close(m.a, a2, 1e-13 * a2.abs()));
        assert!(close(m.c, -jn(2, k) * a2, 1e-13 * a2.abs()));
        assert_eq!((m.b, m.d), (0.0, 0.0));

        let s = stream_coefficients(&BoundaryPerturbation2D::sin(3)).unwrap();
        let m = s.modes[0];
        assert_eq!((m.n, m.a, m.c), (3, 0.0, 0.0));
        assert!(m.b != 0.0 && m.d != 0.0);
        assert!(close(m.d / m.b, -jn(3, k), 1e-15));

        // n J_n - j J_n' = j J_{n+1}
        for n in 2..40u32 {
            let lhs = f64::from(n) * jn(n, k) - k * jn_prime(n, k);
            assert!(close(lhs, k * jn(n + 1, k), 1e-12 * lhs.abs()), "n={n}");
        }
        assert!(stream_coefficients(&BoundaryPerturbation2D::constant(1.0)).is_err());
    }

    #[test]
    fn stream_boundary_values() {
        let phi = BoundaryPerturbation2D::from_modes(&[(2, 1.0), (4, -0.3)], &[(3, 0.7)]).unwrap();
        let s = stream_coefficients(&phi).unwrap();
        let k = j11();
        for i in 0..64 {
            let t = 2.0 * PI * i as f64 / 64.0;
            assert!(s.value(1.0, t).abs() <= 1e-12);
            assert!(s.d_theta(1.0, t).abs() <= 1e-11);
            assert!(close(s.d_r(1.0, t), -k / PI.sqrt() * phi.eval(t), 1e-11));
        }
    }

    #[test]
    fn eigenfunction_derivative_boundary_condition() {
        let phi = BoundaryPerturbation2D::from_modes(&[(2, 1.0), (6, 0.4)], &[(3, -0.5)]).unwrap();
        let s = stream_coefficients(&phi).unwrap();
        for i in 0..256 {
            let t = 2.0 * PI * i as f64 / 256.0;
            let up = s.eigenfunction_derivative(1.0, t);
            let g = boundary_gradient_disk(t);
            let f = phi.eval(t);
            assert!(close(up[0], -g[0] * f, 1e-9) && close(up[1], -g[1] * f, 1e-9));
        }
    }

    #[test]
    fn stream_function_is_buckling_solution() {
        let s = stream_coefficients(&BoundaryPerturbation2D::cos(2)).unwrap();
        let lam = lambda1_disk();
        let h = 0.01;
        let psi = |p: [f64; 2]| s.value_xy(p[0], p[1]);
        let lap = |p: [f64; 2]| fd::laplacian_o4(psi, p, h);
        for p in [[0.2, 0.1], [-0.3, 0.4], [0.1, -0.5]] {
            let bi = fd::laplacian_o4(lap, p, h);
            let res = bi + lam * lap(p);
            assert!(res.abs() <= 1e-5, "{res}");
        }
    }

    #[test]
    fn hessian_examples() {
        let k = j11();
        let r = d2_f(&BoundaryPerturbation2D::cos(2)).unwrap();
        let want = 2.0 * PI * k.powi(4) * gamma(2).unwrap();
        assert!(close(r.value, want, 1e-12 * want));
        assert!(close(r.value, 338.601_267_652_309_7, 1e-9));
        assert_eq!(r.h_half_norm, 2.0);

        let a = d2_f(&BoundaryPerturbation2D::cos(2)).unwrap().value;
        let b = d2_f(&BoundaryPerturbation2D::sin(7)).unwrap().value;
        let both = BoundaryPerturbation2D::from_modes(&[(2, 1.0)], &[(7, 1.0)]).unwrap();
        assert!(close(d2_f(&both).unwrap().value, a + b, 1e-12 * (a + b)));

        let c0 = (2..=64)
            .map(|n| hessian_weight(n).unwrap() / n as f64)
            .fold(f64::INFINITY, f64::min);
        assert!(c0 > 0.0);
        assert!(d2_f(&BoundaryPerturbation2D::constant(1.0)).is_err());
    }

    #[test]
    fn i_consistency_with_d2f() {
        for phi in [
            BoundaryPerturbation2D::cos(2),
            BoundaryPerturbation2D::from_modes(&[(3, 0.5), (9, -1.0)], &[(4, 2.0)]).unwrap(),
        ] {
            let i = quadratic_form_i(&phi).unwrap();
            let d2 = d2_f(&phi).unwrap().value;
            assert!(close(d2_f_from_i(&phi, i), d2, 1e-10 * d2.abs().max(1.0)));
        }
    }

    #[test]
    fn i_direct_matches_series() {
        for phi in [
            BoundaryPerturbation2D::cos(2),
            BoundaryPerturbation2D::sin(3),
        ] {
            let series = quadratic_form_i(&phi).unwrap();
            let direct = quadratic_form_i_direct(&phi, 48).unwrap();
            assert!(close(series, direct, 1e-6), "{series} {direct}");
        }
    }

    #[test]
    fn ono_identity_at_disk() {
        // d_r |d_r u|^2 at r = 1 against -2 H |(grad u) nu|^2 with H = 1, grad p = 0
        let k = j11();
        let c = c1();
        let dr_u = |r: f64| fd::d1_o4(|s| c * jn(1, k * s), r, 1e-4);
        let lhs = fd::d1_o4(|r| dr_u(r).powi(2), 1.0, 1e-3);
        let rhs = -2.0 * boundary_gradient_norm_sq();
        assert!(close(lhs, rhs, 1e-6 * rhs.abs()), "{lhs} {rhs}");
        // tangential derivative of |(grad u) nu|^2 is zero
        let tang = fd::d1(
            |t| {
                let g = boundary_gradient_disk(t);
                g[0] * g[0] + g[1] * g[1]
            },
            0.3,
            1e-4,
        );
        assert!(tang.abs() <= 1e-9);
    }
}
