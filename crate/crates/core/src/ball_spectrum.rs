//! First Dirichlet-Stokes eigenspace of the unit ball and the curl
//! eigenfields it is built from.
//!
//! `psi(r) = j_1(omega r) / r`, where `omega` is the first positive root of
//! `tan x = x`. The eigenspace is spanned by `U_i = psi(r) L_i x` with
//! `L_1 x = (0, z, -y)`, `L_2 x = (-z, 0, x)`, `L_3 x = (-y, x, 0)`.

use std::f64::consts::PI;

use crate::field::{sphere_points, EigenField};
use crate::specfun::omega;
use crate::{Error, Result};

/// Below this radius `psi` and `psi'` come from their Taylor series.
pub const R_SWITCH: f64 = 0.25;
const SERIES_TERMS: usize = 20;

/// `lambda_1(B_3) = omega^2`.
pub fn lambda1_ball() -> f64 {
    let w = omega();
    w * w
}

/// `A^2 = (4 pi / 3) sin^2(omega) / omega^2 = int |U_i|^2`.
pub fn a_squared() -> f64 {
    let w = omega();
    4.0 * PI / 3.0 * w.sin().powi(2) / (w * w)
}

/// Radial profile `psi` and the curl-field profiles `F = (r^2 psi)'`,
/// `G = -omega r^2 psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub omega: f64,
}

impl Default for RadialProfile {
    fn default() -> Self {
        Self { omega: omega() }
    }
}

impl RadialProfile {
    /// `omega sum_k (-(omega r)^2 / 2)^k / (k! (2k+3)!!)` and `psi'`.
    fn series(&self, r: f64) -> (f64, f64) {
        let w = self.omega;
        let q = -(w * r).powi(2) / 2.0;
        let mut term = 1.0 / 3.0;
        let mut psi = term;
        for k in 1..SERIES_TERMS {
            let kf = k as f64;
            term *= q / (kf * (2.0 * kf + 3.0));
            psi += term;
        }
        (w * psi, r * self.series_dpsi_over_r(r))
    }

    /// `psi'(r) / r` from the differentiated series; regular at the origin.
    fn series_dpsi_over_r(&self, r: f64) -> f64 {
        let w = self.omega;
        let q = -(w * r).powi(2) / 2.0;
        let mut term = -(w * w) / 30.0;
        let mut acc = 2.0 * term;
        for k in 2..SERIES_TERMS {
            let kf = k as f64;
            term *= q / (kf * (2.0 * kf + 3.0));
            acc += 2.0 * kf * term;
        }
        w * acc
    }

    pub fn psi(&self, r: f64) -> f64 {
        if r < R_SWITCH {
            return self.series(r).0;
        }
        let w = self.omega;
        let (s, c) = (w * r).sin_cos();
        s / (w * w * r.powi(3)) - c / (w * r * r)
    }

    pub fn dpsi(&self, r: f64) -> f64 {
        if r < R_SWITCH {
            return self.series(r).1;
        }
        let w = self.omega;
        let (s, c) = (w * r).sin_cos();
        3.0 * c / (w * r.powi(3)) - 3.0 * s / (w * w * r.powi(4)) + s / (r * r)
    }

    /// `F(r) = cos(wr)/(wr) - sin(wr)/(w^2 r^2) + sin(wr)`.
    pub fn f(&self, r: f64) -> f64 {
        if r < R_SWITCH {
            return r * self.f_over_r(r);
        }
        let w = self.omega;
        let (s, c) = (w * r).sin_cos();
        c / (w * r) - s / (w * w * r * r) + s
    }

    /// `G(r) = -(sin(wr)/(wr) - cos(wr))`.
    pub fn g(&self, r: f64) -> f64 {
        if r < R_SWITCH {
            return r * r * self.g_over_r2(r);
        }
        let w = self.omega;
        let (s, c) = (w * r).sin_cos();
        -(s / (w * r) - c)
    }

    /// `F / r = r psi' + 2 psi`, regular at the origin.
    pub fn f_over_r(&self, r: f64) -> f64 {
        r * self.dpsi(r) + 2.0 * self.psi(r)
    }

    /// `G / r^2 = -omega psi`.
    pub fn g_over_r2(&self, r: f64) -> f64 {
        -self.omega * self.psi(r)
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "field index must be 1, 2 or 3, got {i}"
        )))
    }
}

fn check_in_ball(p: &[f64; 3]) -> Result<f64> {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if r > 1.0 + 1e-12 || !r.is_finite() {
        return Err(Error::Domain(format!(
            "point at radius {r} outside the closed unit ball"
        )));
    }
    Ok(r)
}

/// `L_i x`.
pub fn rotation_field(i: usize, p: &[f64; 3]) -> [f64; 3] {
    let [x, y, z] = *p;
    match i {
        1 => [0.0, z, -y],
        2 => [-z, 0.0, x],
        _ => [-y, x, 0.0],
    }
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit(i: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[i - 1] = 1.0;
    e
}

/// `U_i(p) = psi(|p|) L_i p`.
pub fn eval_u(i: usize, p: [f64; 3]) -> Result<[f64; 3]> {
    check_index(i)?;
    let r = check_in_ball(&p)?;
    let psi = RadialProfile::default().psi(r);
    Ok(rotation_field(i, &p).map(|v| psi * v))
}

/// `(grad U_i) nu = psi'(1) L_i p` on the unit sphere, with `psi'(1) = sin omega`.
pub fn boundary_gradient_u(i: usize, p: [f64; 3]) -> Result<[f64; 3]> {
    check_index(i)?;
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if (r - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "point at radius {r} is not on the unit sphere"
        )));
    }
    let s = omega().sin();
    Ok(rotation_field(i, &p).map(|v| s * v))
}

/// One of the three unnormalized basis fields `U_i` (norm `A`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEigenField {
    pub index: usize,
}

impl BallEigenField {
    pub fn new(index: usize) -> Result<Self> {
        check_index(index)?;
        Ok(Self { index })
    }
}

impl EigenField<3> for BallEigenField {
    fn eigenvalue(&self) -> f64 {
        lambda1_ball()
    }

    fn value(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        eval_u(self.index, x)
    }

    fn boundary_gradient(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        boundary_gradient_u(self.index, x)
    }

    fn boundary_points(&self, count: usize) -> Vec<[f64; 3]> {
        sphere_points(count)
    }
}

/// Sign of the curl eigenvalue `+-omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurlSign {
    Plus,
    Minus,
}

impl CurlSign {
    pub fn value(self) -> f64 {
        match self {
            CurlSign::Plus => 1.0,
            CurlSign::Minus => -1.0,
        }
    }
}

/// `u_{i,+-} = (r psi' + 2 psi) e_i - (psi'/r) x_i x +- omega psi (e_i x x)`.
pub fn eval_curl_field_cartesian(i: usize, sign: CurlSign, p: [f64; 3]) -> Result<[f64; 3]> {
    check_index(i)?;
    let r = check_in_ball(&p)?;
    let prof = RadialProfile::default();
    let psi = prof.psi(r);
    let dpsi_over_r = if r < R_SWITCH {
        prof.series_dpsi_over_r(r)
    } else {
        prof.dpsi(r) / r
    };
    let a = prof.f_over_r(r);
    let e = unit(i);
    let ex = cross(&e, &p);
    let s = sign.value() * prof.omega * psi;
    let xi = p[i - 1];
    Ok([0, 1, 2].map(|k| a * e[k] - dpsi_over_r * xi * p[k] + s * ex[k]))
}

/// Curl eigenfield in the spherical frame, converted to Cartesian
/// components. On the polar axis the frame is undefined and the Cartesian
/// closed form is used.
pub fn eval_curl_field(i: usize, sign: CurlSign, p: [f64; 3]) -> Result<[f64; 3]> {
    check_index(i)?;
    let r = check_in_ball(&p)?;
    let rho = p[0].hypot(p[1]);
    if rho <= 1e-12 || r == 0.0 {
        return eval_curl_field_cartesian(i, sign, p);
    }
    let prof = RadialProfile::default();
    let (st, ct) = (rho / r, p[2] / r);
    let (sp, cp) = (p[1] / rho, p[0] / rho);
    let fr = prof.f_over_r(r);
    let gr = r * prof.g_over_r2(r);
    let rad = 2.0 * prof.psi(r);
    let pm = sign.value();
    let (ur, ut, uf) = match i {
        1 => (
            rad * st * cp,
            fr * ct * cp + pm * gr * sp,
            pm * gr * ct * cp - fr * sp,
        ),
        2 => (
            rad * st * sp,
            fr * ct * sp - pm * gr * cp,
            pm * gr * ct * sp + fr * cp,
        ),
        _ => (rad * ct, -fr * st, -pm * gr * st),
    };
    let er = [st * cp, st * sp, ct];
    let et = [ct * cp, ct * sp, -st];
    let ef = [-sp, cp, 0.0];
    Ok([0, 1, 2].map(|k| ur * er[k] + ut * et[k] + uf * ef[k]))
}

/// Curl eigenfield `u_{i,+-}` as an evaluator bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurlEigenField {
    pub index: usize,
    pub sign: CurlSign,
}

impl CurlEigenField {
    pub fn new(index: usize, sign: CurlSign) -> Result<Self> {
        check_index(index)?;
        Ok(Self { index, sign })
    }

    pub fn value(&self, p: [f64; 3]) -> Result<[f64; 3]> {
        eval_curl_field(self.index, self.sign, p)
    }

    /// `<u, nu> * r`, the scalar `2 psi(r) x_i`.
    pub fn radial_moment(&self, p: [f64; 3]) -> Result<f64> {
        let u = self.value(p)?;
        Ok(u[0] * p[0] + u[1] * p[1] + u[2] * p[2])
    }

    /// Central-difference curl.
    pub fn curl_fd(&self, p: [f64; 3], h: f64) -> Result<[f64; 3]> {
        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut a = p;
            let mut b = p;
            a[j] += h;
            b[j] -= h;
            let ua = self.value(a)?;
            let ub = self.value(b)?;
            for k in 0..3 {
                jac[k][j] = (ua[k] - ub[k]) / (2.0 * h);
            }
        }
        Ok([
            jac[2][1] - jac[1][2],
            jac[0][2] - jac[2][0],
            jac[1][0] - jac[0][1],
        ])
    }

    /// Constant `kappa_i` with `(u_{i,+} - u_{i,-}) / 2 = kappa_i U_i`:
    /// `-omega` for `i = 1, 2` and `+omega` for `i = 3`.
    pub fn kappa(index: usize) -> Result<f64> {
        check_index(index)?;
        let w = omega();
        Ok(if index == 3 { w } else { -w })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;
    use crate::field::ball_points;
    use crate::quadrature::{integrate_ball, SphereRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball_integral<F: Fn([f64; 3]) -> f64>(f: F) -> f64 {
        integrate_ball(f, 30, &SphereRule::new(12, 25))
    }

    #[test]
    fn lambda1_examples() {
        let w = omega();
        assert!((lambda1_ball() - 20.190_728_556_426_63).abs() <= 1e-12);
        // spherical Bessel j_1 vanishes at omega
        assert!((w.sin() / (w * w) - w.cos() / w).abs() <= 1e-15);
        assert!(lambda1_ball() > PI * PI);
        assert!((a_squared() - 0.197_670_891_476_547_8).abs() <= 1e-14);
    }

    #[test]
    fn profile_values() {
        let p = RadialProfile::default();
        let w = p.omega;
        assert!((p.psi(0.0) - w / 3.0).abs() <= 1e-15);
        assert!(p.psi(1.0).abs() <= 1e-15);
        assert!((p.dpsi(1.0) - w.sin()).abs() <= 1e-14);
        assert!(p.g(1.0).abs() <= 1e-15);
        assert!(p.f(1.0).abs() > 0.5);
        assert_eq!(p.dpsi(0.0), 0.0);
    }

    #[test]
    fn series_matches_closed_form_at_switch() {
        let p = RadialProfile::default();
        let w = p.omega;
        let r = R_SWITCH;
        let (s, c) = (w * r).sin_cos();
        let closed = s / (w * w * r.powi(3)) - c / (w * r * r);
        let (ps, dps) = p.series(r);
        assert!((ps - closed).abs() <= 1e-13);
        let dclosed = 3.0 * c / (w * r.powi(3)) - 3.0 * s / (w * w * r.powi(4)) + s / (r * r);
        assert!((dps - dclosed).abs() <= 1e-13);
        assert!((p.series_dpsi_over_r(r) - dps / r).abs() <= 1e-13);
        for r in [0.3, 0.6, 0.95] {
            assert!((p.series(r).0 - p.psi(r)).abs() <= 1e-13);
        }
    }

    #[test]
    fn profile_odes() {
        // the closed forms obey F'' + w^2 F = 2 psi' and G'' + w^2 G = -2 w psi
        let p = RadialProfile::default();
        let w = p.omega;
        for r in [0.3, 0.5, 0.8] {
            let f2 = fd::d2_o4(|s| p.f(s), r, 1e-3);
            let g2 = fd::d2_o4(|s| p.g(s), r, 1e-3);
            assert!((f2 + w * w * p.f(r) - 2.0 * p.dpsi(r)).abs() <= 1e-7);
            assert!((g2 + w * w * p.g(r) + 2.0 * w * p.psi(r)).abs() <= 1e-7);
            assert!((fd::d1_o4(|s| s * s * p.psi(s), r, 1e-3) - p.f(r)).abs() <= 1e-10);
            assert!((p.g(r) + w * r * r * p.psi(r)).abs() <= 1e-14);
        }
    }

    #[test]
    fn eval_u_examples() {
        let v = eval_u(3, [0.0, 0.0, 1.0]).unwrap();
        assert!(v.iter().all(|c| c.abs() <= 1e-12));
        for p in ball_points(20, 1.0, 1) {
            assert_eq!(eval_u(1, p).unwrap()[0], 0.0);
        }
        let w = omega();
        let v = eval_u(2, [0.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, [0.0; 3]);
        let v = eval_u(3, [1e-3, 0.0, 0.0]).unwrap();
        assert!((v[1] / 1e-3 - w / 3.0).abs() <= 1e-5);
        assert!(eval_u(1, [1.0, 1.0, 0.0]).is_err());
        assert!(eval_u(4, [0.0; 3]).is_err());
    }

    #[test]
    fn normalization_and_orthogonality() {
        for i in 1..=3 {
            let n = ball_integral(|p| {
                let u = eval_u(i, p).unwrap();
                u.iter().map(|v| v * v).sum()
            });
            assert!((n - a_squared()).abs() <= 1e-9, "i={i} {n}");
            for j in (i + 1)..=3 {
                let ip = ball_integral(|p| {
                    let u = eval_u(i, p).unwrap();
                    let v = eval_u(j, p).unwrap();
                    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
                });
                assert!(ip.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn dirichlet_divergence_and_eigen_equation() {
        for i in 1..=3 {
            let f = BallEigenField::new(i).unwrap();
            for p in sphere_points(500) {
                let u = f.value(p).unwrap();
                assert!(crate::field::norm(&u) <= 1e-11);
            }
            for p in ball_points(100, 0.95, 2) {
                assert!(f.divergence_fd(p, 1e-5).unwrap().abs() <= 1e-8);
            }
            for p in ball_points(10, 0.9, 3) {
                assert!(f.eigen_residual_fd(p, 1e-3).unwrap() <= 1e-5);
            }
        }
    }

    #[test]
    fn boundary_gradient_examples() {
        let s = omega().sin();
        let g = boundary_gradient_u(1, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(g, [0.0, s, 0.0]);
        assert!((s + 0.976_119_639_580_204_7).abs() <= 1e-14);
        for p in sphere_points(400) {
            for i in 1..=3 {
                let g = boundary_gradient_u(i, p).unwrap();
                assert!((g[0] * p[0] + g[1] * p[1] + g[2] * p[2]).abs() <= 1e-12);
            }
            let g = boundary_gradient_u(1, p).unwrap();
            let want = s * s * (p[1] * p[1] + p[2] * p[2]);
            let got = g[1] * g[1] + g[2] * g[2];
            assert!((got - want).abs() <= 1e-12 * want.max(1e-300) + 1e-300);
        }
        // against a one-sided radial difference of U_1
        let p = [0.48, -0.6, 0.64];
        let h = 1e-5;
        let a = eval_u(1, p.map(|v| v * (1.0 - h))).unwrap();
        let b = eval_u(1, p.map(|v| v * (1.0 - 2.0 * h))).unwrap();
        let g = boundary_gradient_u(1, p).unwrap();
        for k in 0..3 {
            let fd = -(4.0 * a[k] - b[k]) / (2.0 * h);
            assert!((fd - g[k]).abs() <= 1e-8);
        }
        assert!(boundary_gradient_u(1, [0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn frame_matches_cartesian() {
        for p in
            ball_points(50, 1.0, 4)
                .into_iter()
                .chain([[0.0, 0.0, 0.5], [0.0, 0.0, -1.0], [0.0; 3]])
        {
            for i in 1..=3 {
                for s in [CurlSign::Plus, CurlSign::Minus] {
                    let a = eval_curl_field(i, s, p).unwrap();
                    let b = eval_curl_field_cartesian(i, s, p).unwrap();
                    for k in 0..3 {
                        assert!((a[k] - b[k]).abs() <= 1e-12, "{i} {s:?} {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn curl_fields_are_eigenfields() {
        let w = omega();
        for i in 1..=3 {
            for s in [CurlSign::Plus, CurlSign::Minus] {
                let f = CurlEigenField::new(i, s).unwrap();
                for p in ball_points(50, 0.95, 5) {
                    let c = f.curl_fd(p, 1e-5).unwrap();
                    let u = f.value(p).unwrap();
                    let res = (0..3)
                        .map(|k| (c[k] - s.value() * w * u[k]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    assert!(res <= 1e-7, "{res}");
                    let div = (0..3)
                        .map(|k| fd::partial(|q| f.value(q).unwrap()[k], p, k, 1e-5))
                        .sum::<f64>();
                    assert!(div.abs() <= 1e-8);
                }
                for p in sphere_points(100) {
                    assert!(f.radial_moment(p).unwrap().abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn radial_moment_is_dirichlet_laplace_eigenfunction() {
        let lam = lambda1_ball();
        for i in 1..=3 {
            let f = CurlEigenField::new(i, CurlSign::Plus).unwrap();
            for p in ball_points(10, 0.9, 6) {
                let v = f.radial_moment(p).unwrap();
                let lap = fd::laplacian_o4(|q| f.radial_moment(q).unwrap(), p, 1e-3);
                assert!((-lap - lam * v).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn difference_is_proportional_to_u() {
        for i in 1..=3 {
            let kappa = CurlEigenField::kappa(i).unwrap();
            let mut seen = Vec::new();
            for p in ball_points(50, 0.95, 7) {
                let a = eval_curl_field(i, CurlSign::Plus, p).unwrap();
                let b = eval_curl_field(i, CurlSign::Minus, p).unwrap();
                let u = eval_u(i, p).unwrap();
                let k = (0..3)
                    .filter(|&k| u[k].abs() > 1e-3)
                    .map(|k| (a[k] - b[k]) / 2.0 / u[k])
                    .next()
                    .unwrap();
                seen.push(k);
            }
            let lo = seen.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = seen.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(hi - lo <= 1e-8);
            assert!((lo - kappa).abs() <= 1e-8);
        }
    }

    #[test]
    fn libre_combination_vanishes_iff_opposite() {
        let fields: Vec<(usize, CurlSign)> = (1..=3)
            .flat_map(|i| [(i, CurlSign::Plus), (i, CurlSign::Minus)])
            .collect();
        let boundary_max = |coef: &[f64; 6]| {
            sphere_points(200)
                .into_iter()
                .map(|p| {
                    let mut acc = [0.0; 3];
                    for (c, (i, s)) in coef.iter().zip(&fields) {
                        let u = eval_curl_field(*i, *s, p).unwrap();
                        for k in 0..3 {
                            acc[k] += c * u[k];
                        }
                    }
                    crate::field::norm(&acc)
                })
                .fold(0.0, f64::max)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let a: [f64; 3] = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
            let exact = [a[0], -a[0], a[1], -a[1], a[2], -a[2]];
            assert!(boundary_max(&exact) <= 1e-8);
            let generic: [f64; 6] = [0; 6].map(|_| rng.gen_range(-1.0..1.0));
            assert!(boundary_max(&generic) > 1e-3);
        }
    }
}
