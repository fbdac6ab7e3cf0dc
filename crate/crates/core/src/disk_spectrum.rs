//! Exact Dirichlet-Stokes eigenpairs of the unit disk.
//!
//! Eigenvalues are `lambda_{j,k} = j_{|j|+1,k}^2`. For `j = 0` the field is
//! purely azimuthal; for `j != 0` it is the curl of the stream function
//! `(J_|j|(k r) - J_|j|(k) r^|j|) Y(theta)`, which satisfies the clamped
//! condition exactly when `k` is a zero of `J_{|j|+1}`.

use std::f64::consts::PI;

use crate::field::{circle_points, EigenField};
use crate::specfun::{bessel_zero, j11, jn, jn_over_x, jn_prime};
use crate::{Error, Result};

/// Slack allowed on `r <= 1` before an evaluation is rejected.
pub const RADIUS_SLACK: f64 = 1e-12;

/// `lambda_1(B_2) = j_{1,1}^2`.
pub fn lambda1_disk() -> f64 {
    let j = j11();
    j * j
}

/// `c_1 = 1 / (sqrt(pi) |J_0(j_{1,1})|)`.
pub fn c1() -> f64 {
    1.0 / (PI.sqrt() * jn(0, j11()).abs())
}

/// `f(r) = J_1(j_{1,1} r) / r`, with `f(0) = j_{1,1} / 2`.
pub fn radial_profile(r: f64) -> f64 {
    let k = j11();
    k * jn_over_x(1, k * r)
}

/// `f'(1) = j_{1,1} J_0(j_{1,1})`.
pub fn radial_profile_slope() -> f64 {
    let k = j11();
    k * jn(0, k)
}

/// `(grad u) nu` of the ground state at the boundary point of angle `theta`.
pub fn boundary_gradient_disk(theta: f64) -> [f64; 2] {
    let a = c1() * radial_profile_slope();
    [-a * theta.sin(), a * theta.cos()]
}

/// `|(grad u) nu|^2 = j_{1,1}^2 / pi`, constant along the circle.
pub fn boundary_gradient_norm_sq() -> f64 {
    let a = c1() * radial_profile_slope();
    a * a
}

/// `(j, k, m)`: angular index, radial index, and for `j != 0` the member
/// `m in {1, 2}` of the two-dimensional eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiskEigenIndex {
    pub j: i32,
    pub k: u32,
    pub m: u8,
}

impl DiskEigenIndex {
    pub fn new(j: i32, k: u32, m: u8) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("radial index k must be positive".into()));
        }
        if j != 0 && m != 1 && m != 2 {
            return Err(Error::Domain(format!("m must be 1 or 2, got {m}")));
        }
        if j.unsigned_abs() + 1 > crate::specfun::MAX_ORDER {
            return Err(Error::Domain(format!("angular index {j} too large")));
        }
        Ok(Self {
            j,
            k,
            m: if j == 0 { 1 } else { m },
        })
    }

    pub fn ground() -> Self {
        Self { j: 0, k: 1, m: 1 }
    }

    pub fn multiplicity(&self) -> usize {
        if self.j == 0 {
            1
        } else {
            2
        }
    }

    /// `j_{|j|+1,k}^2`.
    pub fn eigenvalue(&self) -> Result<f64> {
        let z = bessel_zero(self.j.unsigned_abs() + 1, self.k)?.value;
        Ok(z * z)
    }
}

/// `Y_{j,1} = cos(j theta)/sqrt(pi)`, `Y_{j,2} = sin(j theta)/sqrt(pi)`,
/// with `Y_{j,3} = Y_{j,1}`.
pub fn y_harmonic(j: i32, m: u8, theta: f64) -> f64 {
    let a = f64::from(j) * theta;
    if m % 2 == 1 {
        a.cos() / PI.sqrt()
    } else {
        a.sin() / PI.sqrt()
    }
}

/// One eigenfunction `phi_{0,k}` or `phi_{j,k,m}` of the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskEigenField {
    pub index: DiskEigenIndex,
    pub lambda: f64,
    sqrt_lambda: f64,
    jn_at_k: f64,
}

impl DiskEigenField {
    pub fn new(index: DiskEigenIndex) -> Result<Self> {
        let lambda = index.eigenvalue()?;
        let sqrt_lambda = lambda.sqrt();
        let jn_at_k = jn(index.j.unsigned_abs(), sqrt_lambda);
        Ok(Self {
            index,
            lambda,
            sqrt_lambda,
            jn_at_k,
        })
    }

    /// Value in polar coordinates, returned in Cartesian components.
    pub fn eval_polar(&self, r: f64, theta: f64) -> Result<[f64; 2]> {
        if !(0.0..=1.0 + RADIUS_SLACK).contains(&r) {
            return Err(Error::Domain(format!(
                "radius {r} outside the closed unit disk"
            )));
        }
        let (ur, ut) = self.polar_components(r, theta);
        let (s, c) = theta.sin_cos();
        Ok([ur * c - ut * s, ur * s + ut * c])
    }

    fn polar_components(&self, r: f64, theta: f64) -> (f64, f64) {
        let k = self.sqrt_lambda;
        let DiskEigenIndex { j, m, .. } = self.index;
        if j == 0 {
            let a = -jn_prime(0, k * r) / (PI.sqrt() * self.jn_at_k.abs());
            return (0.0, a);
        }
        let n = j.unsigned_abs();
        let nf = f64::from(n);
        let denom = k * self.jn_at_k.abs();
        // (J_n(kr) - J_n(k) r^n) / r, regular at the origin
        let g_over_r = k * jn_over_x(n, k * r) - self.jn_at_k * r.powi(n as i32 - 1);
        let sign = if m == 1 { 1.0 } else { -1.0 };
        let ur = g_over_r / denom * f64::from(j) * sign * y_harmonic(j, m, theta);
        let ang = (-k * jn_prime(n, k * r) + nf * self.jn_at_k * r.powi(n as i32 - 1)) / denom;
        let ut = ang * y_harmonic(j, m + 1, theta);
        (ur, ut)
    }

    /// `(grad u) nu = d_r u` at `r = 1`, Cartesian components.
    pub fn boundary_gradient_polar(&self, theta: f64) -> [f64; 2] {
        let k = self.sqrt_lambda;
        let DiskEigenIndex { j, m, .. } = self.index;
        let (s, c) = theta.sin_cos();
        let a = if j == 0 {
            // d/dr [J_1(k r)] / (sqrt(pi) |J_0(k)|) = k J_0(k) / ...
            k * jn(0, k) / (PI.sqrt() * self.jn_at_k.abs())
        } else {
            // the radial part has a double zero at r = 1
            let n = j.unsigned_abs();
            let nf = f64::from(n);
            let jn_k = self.jn_at_k;
            let jp = jn_prime(n, k);
            let jpp = -jp / k - (1.0 - nf * nf / (k * k)) * jn_k;
            (-k * k * jpp + nf * (nf - 1.0) * jn_k) / (k * jn_k.abs()) * y_harmonic(j, m + 1, theta)
        };
        [-a * s, a * c]
    }
}

impl EigenField<2> for DiskEigenField {
    fn eigenvalue(&self) -> f64 {
        self.lambda
    }

    fn value(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let r = x[0].hypot(x[1]);
        self.eval_polar(r, x[1].atan2(x[0]))
    }

    fn boundary_gradient(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let r = x[0].hypot(x[1]);
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "point at radius {r} is not on the unit circle"
            )));
        }
        Ok(self.boundary_gradient_polar(x[1].atan2(x[0])))
    }

    fn boundary_points(&self, count: usize) -> Vec<[f64; 2]> {
        circle_points(count)
    }
}

/// `u = c_1 J_1(j_{1,1} r) (-sin theta, cos theta)`, normalized in `L^2`.
pub fn ground_state_disk() -> DiskEigenField {
    DiskEigenField::new(DiskEigenIndex::ground()).expect("ground state index is valid")
}

pub fn eval_disk_eigenfunction(idx: DiskEigenIndex, r: f64, theta: f64) -> Result<[f64; 2]> {
    DiskEigenField::new(idx)?.eval_polar(r, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{CircleRule, GaussLegendre};
    use crate::specfun::bessel_zero;

    fn disk_inner(a: &DiskEigenField, b: &DiskEigenField) -> f64 {
        let gl = GaussLegendre::new(40);
        let circle = CircleRule::new(64);
        gl.mapped(0.0, 1.0)
            .iter()
            .map(|(r, w)| {
                w * r
                    * circle.integrate(|t| {
                        let u = a.eval_polar(*r, t).unwrap();
                        let v = b.eval_polar(*r, t).unwrap();
                        u[0] * v[0] + u[1] * v[1]
                    })
            })
            .sum()
    }

    #[test]
    fn lambda1_examples() {
        assert!((lambda1_disk() - 14.681_970_642_123_893).abs() <= 1e-12);
        let j01 = bessel_zero(0, 1).unwrap().value;
        assert!(lambda1_disk() > j01 * j01);
        assert!((j01 * j01 - 5.783_185_962_946_784).abs() <= 1e-12);
        assert_eq!(DiskEigenIndex::ground().eigenvalue().unwrap(), {
            let z = bessel_zero(1, 1).unwrap().value;
            z * z
        });
    }

    #[test]
    fn ground_state_normalized_and_clamped() {
        let u = ground_state_disk();
        assert!((disk_inner(&u, &u) - 1.0).abs() <= 1e-10);
        for k in 0..32 {
            let t = 0.2 * k as f64;
            let v = u.eval_polar(1.0, t).unwrap();
            assert!(v[0].abs().max(v[1].abs()) <= 1e-12);
        }
        assert_eq!(u.eval_polar(0.0, 0.3).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn radial_profile_series_matches_direct() {
        let r = 1e-4;
        let direct = jn(1, j11() * r) / r;
        assert!((radial_profile(r) - direct).abs() <= 1e-10);
        assert!((radial_profile(0.0) - j11() / 2.0).abs() <= 1e-15);
    }

    #[test]
    fn boundary_gradient_examples() {
        let want = lambda1_disk() / PI;
        assert!((boundary_gradient_norm_sq() - want).abs() <= 1e-13);
        assert!((want - 4.673_416_404_048_213).abs() <= 1e-10);
        for k in 0..256 {
            let t = 2.0 * PI * k as f64 / 256.0;
            let g = boundary_gradient_disk(t);
            let n2 = g[0] * g[0] + g[1] * g[1];
            assert!((PI * n2 - lambda1_disk()).abs() <= 1e-10);
            assert!((g[0] * t.cos() + g[1] * t.sin()).abs() <= 1e-13);
        }
        let u = ground_state_disk();
        let g = u.boundary_gradient_polar(0.4);
        let h = boundary_gradient_disk(0.4);
        assert!((g[0] - h[0]).abs() <= 1e-14 && (g[1] - h[1]).abs() <= 1e-14);
    }

    #[test]
    fn index_zero_matches_ground_state() {
        let idx = DiskEigenIndex::new(0, 1, 1).unwrap();
        for (r, t) in [(0.3, 0.1), (0.9, 2.0), (0.05, -1.0)] {
            let a = eval_disk_eigenfunction(idx, r, t).unwrap();
            let s = t.sin_cos();
            let b = c1() * jn(1, j11() * r);
            assert!((a[0] + b * s.0).abs() <= 1e-12);
            assert!((a[1] - b * s.1).abs() <= 1e-12);
        }
    }

    #[test]
    fn higher_modes_are_clamped() {
        for (j, m) in [(1, 1), (1, 2), (-1, 1), (2, 2), (-3, 2)] {
            let f = DiskEigenField::new(DiskEigenIndex::new(j, 1, m).unwrap()).unwrap();
            for k in 0..16 {
                let v = f.eval_polar(1.0, 0.4 * k as f64).unwrap();
                assert!(v[0].abs().max(v[1].abs()) <= 1e-11, "j={j} m={m}");
            }
        }
    }

    #[test]
    fn modes_are_orthogonal() {
        let g = ground_state_disk();
        let a = DiskEigenField::new(DiskEigenIndex::new(1, 1, 1).unwrap()).unwrap();
        let b = DiskEigenField::new(DiskEigenIndex::new(1, 1, 2).unwrap()).unwrap();
        assert!(disk_inner(&a, &g).abs() <= 1e-9);
        assert!(disk_inner(&a, &b).abs() <= 1e-9);
    }

    #[test]
    fn origin_is_regular() {
        let f = DiskEigenField::new(DiskEigenIndex::new(1, 1, 1).unwrap()).unwrap();
        let a = f.eval_polar(0.0, 0.0).unwrap();
        let b = f.eval_polar(0.0, 1.3).unwrap();
        let c = f.value([1e-9, 1e-9]).unwrap();
        assert!((a[0] - b[0]).abs() <= 1e-14 && (a[1] - b[1]).abs() <= 1e-14);
        assert!((a[0] - c[0]).abs() <= 1e-7 && (a[1] - c[1]).abs() <= 1e-7);
    }

    #[test]
    fn divergence_free_and_eigen_equation() {
        let fields = [
            ground_state_disk(),
            DiskEigenField::new(DiskEigenIndex::new(2, 1, 1).unwrap()).unwrap(),
        ];
        for f in &fields {
            for p in [[0.1, 0.2], [-0.5, 0.3], [0.4, -0.6], [0.0, 0.7]] {
                assert!(f.divergence_fd(p, 1e-5).unwrap().abs() <= 1e-8);
            }
        }
        let g = &fields[0];
        for p in [[0.1, 0.2], [-0.5, 0.3], [0.4, -0.6]] {
            assert!(g.eigen_residual_fd(p, 1e-3).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn boundary_gradient_of_higher_mode_matches_fd() {
        let f = DiskEigenField::new(DiskEigenIndex::new(2, 1, 2).unwrap()).unwrap();
        let t = 0.7;
        let h = 1e-5;
        let a = f.eval_polar(1.0 - h, t).unwrap();
        let b = f.eval_polar(1.0 - 2.0 * h, t).unwrap();
        let g = f.boundary_gradient_polar(t);
        // one-sided second-order difference at r = 1 where u = 0
        for i in 0..2 {
            let fd = -(4.0 * a[i] - b[i]) / (2.0 * h);
            assert!(
                (fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1.0),
                "{fd} {}",
                g[i]
            );
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DiskEigenIndex::new(0, 0, 1).is_err());
        assert!(DiskEigenIndex::new(2, 1, 3).is_err());
        assert!(eval_disk_eigenfunction(DiskEigenIndex::ground(), 1.1, 0.0).is_err());
    }
}
