//! Method of particular solutions for the clamped buckling problem
//! `Delta^2 psi + Lambda Delta psi = 0`, `psi = d_nu psi = 0`, on star domains
//! `r < 1 + t phi(theta)`. Its smallest eigenvalue is the first Dirichlet-Stokes
//! eigenvalue, so this gives an independent check of the disk shape
//! derivatives.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fd::richardson;
use crate::linalg::{jacobi_svd, PivotedQr};
use crate::quadrature::CircleRule;
use crate::shape_deriv_2d::BoundaryPerturbation2D;
use crate::specfun::{jn_sequence, MAX_ORDER};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_240_611;

/// Star-shaped domain `r < R(theta) = 1 + t phi(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarDomain {
    pub phi: BoundaryPerturbation2D,
    pub t: f64,
}

impl StarDomain {
    /// Rejects domains with `R <= 0.1` somewhere on a 1024-point grid.
    pub fn new(phi: BoundaryPerturbation2D, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "amplitude t = {t} is not finite"
            )));
        }
        let d = Self { phi, t };
        let r_min = CircleRule::new(1024)
            .nodes()
            .map(|th| d.radius(th))
            .fold(f64::INFINITY, f64::min);
        if r_min.is_nan() || r_min <= 0.1 {
            return Err(Error::InvalidDomain(format!(
                "min R(theta) = {r_min} <= 0.1"
            )));
        }
        Ok(d)
    }

    pub fn unit_disk() -> Self {
        Self {
            phi: BoundaryPerturbation2D::zero(),
            t: 0.0,
        }
    }

    pub fn radius(&self, theta: f64) -> f64 {
        1.0 + self.t * self.phi.eval(theta)
    }

    pub fn radius_deriv(&self, theta: f64) -> f64 {
        self.t * self.phi.deriv(theta)
    }

    /// Exact `|Omega_t| = pi + t int phi + (t^2 / 2) int phi^2`.
    pub fn area(&self) -> f64 {
        PI + self.t * self.phi.integral() + 0.5 * self.t * self.t * self.phi.square_integral()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsConfig {
    pub n_modes: usize,
    pub m_boundary: usize,
    pub m_interior: usize,
    pub seed: u64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub scan_step: f64,
    pub tol: f64,
    /// Relative pivot threshold for truncating the stacked basis.
    pub rank_rtol: f64,
}

impl Default for MpsConfig {
    fn default() -> Self {
        Self::with_modes(24)
    }
}

impl MpsConfig {
    /// Defaults with `8 n` boundary and `2 n` interior points.
    pub fn with_modes(n_modes: usize) -> Self {
        Self {
            n_modes,
            m_boundary: 8 * n_modes,
            m_interior: 2 * n_modes,
            seed: DEFAULT_SEED,
            lambda_lo: 8.0,
            lambda_hi: 30.0,
            scan_step: 0.25,
            tol: 1e-9,
            rank_rtol: 1e-14,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_modes == 0 || self.n_modes + 1 > MAX_ORDER as usize {
            return bad(format!(
                "n_modes = {} outside 1..{}",
                self.n_modes,
                MAX_ORDER - 1
            ));
        }
        if self.m_boundary < 2 * (2 * self.n_modes + 1) {
            return bad(format!(
                "m_boundary = {} < 2 (2 n_modes + 1) = {}",
                self.m_boundary,
                2 * (2 * self.n_modes + 1)
            ));
        }
        if self.m_interior == 0 {
            return bad("m_interior must be positive".into());
        }
        if !(self.lambda_lo > 0.0 && self.lambda_hi > self.lambda_lo && self.lambda_hi.is_finite())
        {
            return bad(format!(
                "bad bracket [{}, {}]",
                self.lambda_lo, self.lambda_hi
            ));
        }
        if !(self.scan_step > 0.0 && self.scan_step < self.lambda_hi - self.lambda_lo) {
            return bad(format!("bad scan step {}", self.scan_step));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("bad tolerance {}", self.tol));
        }
        if !(self.rank_rtol > 0.0 && self.rank_rtol < 1.0) {
            return bad(format!("bad rank tolerance {}", self.rank_rtol));
        }
        Ok(())
    }

    pub fn n_columns(&self) -> usize {
        2 + 4 * self.n_modes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsDiagnostics {
    pub n_boundary: usize,
    pub n_interior: usize,
    pub n_columns: usize,
    /// Numerical rank of the stacked, column-scaled matrix.
    pub rank: usize,
    /// `|R_00| / |R_kk|` at the last retained pivot.
    pub condition_estimate: f64,
    pub sigma_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsResult {
    pub lambda: f64,
    pub sigma_min: f64,
    /// Coefficients in [`basis_columns`] order.
    pub coefficients: Vec<f64>,
    pub diagnostics: MpsDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Bessel,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Value and polar gradient `(d_r, d_theta / r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValue {
    pub value: f64,
    pub grad: [f64; 2],
}

/// `J_n(sqrt(Lambda) r) trig(n theta)` or `r^n trig(n theta)`.
pub fn buckling_basis(
    lambda: f64,
    n: usize,
    kind: BasisKind,
    trig: Trig,
    r: f64,
    theta: f64,
) -> Result<BasisValue> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Domain(format!("Lambda = {lambda} must be positive")));
    }
    if n + 1 > MAX_ORDER as usize {
        return Err(Error::Domain(format!("order {n} too large")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    let k = lambda.sqrt();
    let seq = jn_sequence(n + 1, k * r);
    let (radial, d_radial, over_r) = radial_parts(&seq, k, n, kind, r);
    let (s, c) = (n as f64 * theta).sin_cos();
    let (tv, dt) = match trig {
        Trig::Cos => (c, -(n as f64) * s),
        Trig::Sin => (s, n as f64 * c),
    };
    Ok(BasisValue {
        value: radial * tv,
        grad: [d_radial * tv, over_r * dt],
    })
}

// (f(r), f'(r), f(r)/r) from `seq = [J_0(kr), ..., J_{n+1}(kr)]`
fn radial_parts(seq: &[f64], k: f64, n: usize, kind: BasisKind, r: f64) -> (f64, f64, f64) {
    match kind {
        BasisKind::Bessel => {
            let d = if n == 0 {
                -seq[1]
            } else {
                0.5 * (seq[n - 1] - seq[n + 1])
            };
            let over_r = match n {
                0 => 0.0,
                1 if r == 0.0 => 0.5 * k,
                _ if r == 0.0 => 0.0,
                _ => seq[n] / r,
            };
            (seq[n], k * d, over_r)
        }
        BasisKind::Poly => match n {
            0 => (1.0, 0.0, 0.0),
            _ => {
                let p = r.powi(n as i32 - 1);
                (p * r, n as f64 * p, p)
            }
        },
    }
}

/// Column order of the collocation matrix: `(n, kind, trig)`, with `n = 0`
/// contributing cosine columns only.
pub fn basis_columns(n_modes: usize) -> Vec<(usize, BasisKind, Trig)> {
    let mut out = vec![
        (0, BasisKind::Bessel, Trig::Cos),
        (0, BasisKind::Poly, Trig::Cos),
    ];
    for n in 1..=n_modes {
        for kind in [BasisKind::Bessel, BasisKind::Poly] {
            for trig in [Trig::Cos, Trig::Sin] {
                out.push((n, kind, trig));
            }
        }
    }
    out
}

/// Collocation geometry for one domain and configuration.
#[derive(Debug, Clone)]
pub struct Collocation {
    cfg: MpsConfig,
    /// `(r, theta, nu_r, nu_theta)` per boundary node.
    boundary: Vec<[f64; 4]>,
    interior: Vec<(f64, f64)>,
}

/// Smallest generalized singular value and the data needed to recover the
/// coefficient vector.
#[derive(Debug, Clone)]
pub struct SigmaEval {
    pub lambda: f64,
    pub sigma: f64,
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub condition_estimate: f64,
}

impl Collocation {
    pub fn new(domain: &StarDomain, cfg: &MpsConfig) -> Result<Self> {
        cfg.validate()?;
        let rule = CircleRule::new(cfg.m_boundary);
        let boundary = rule
            .nodes()
            .map(|th| {
                let r = domain.radius(th);
                let dr = domain.radius_deriv(th);
                let h = r.hypot(dr);
                [r, th, r / h, -dr / h]
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let interior = (0..cfg.m_interior)
            .map(|_| {
                let u: f64 = rng.gen();
                let v: f64 = rng.gen();
                (0.5 * u.sqrt(), 2.0 * PI * v)
            })
            .collect();
        Ok(Self {
            cfg: cfg.clone(),
            boundary,
            interior,
        })
    }

    fn matrix(&self, lambda: f64) -> Result<DMatrix<f64>> {
        let cols = basis_columns(self.cfg.n_modes);
        let mb = self.boundary.len();
        let rows = 2 * mb + self.interior.len();
        let k = lambda.sqrt();
        let mut a = DMatrix::<f64>::zeros(rows, cols.len());
        let n_modes = self.cfg.n_modes;
        let mut fill = |row: usize, r: f64, theta: f64, normal: Option<(usize, f64, f64)>| {
            let seq = jn_sequence(n_modes + 1, k * r);
            for (j, &(n, kind, trig)) in cols.iter().enumerate() {
                let nf = n as f64;
                let (f, df, over_r) = radial_parts(&seq, k, n, kind, r);
                let (s, c) = (nf * theta).sin_cos();
                let (tv, dt) = match trig {
                    Trig::Cos => (c, -nf * s),
                    Trig::Sin => (s, nf * c),
                };
                a[(row, j)] = f * tv;
                if let Some((nrow, nu_r, nu_t)) = normal {
                    a[(nrow, j)] = (nu_r * df * tv + nu_t * over_r * dt) / k;
                }
            }
        };
        for (i, b) in self.boundary.iter().enumerate() {
            fill(i, b[0], b[1], Some((mb + i, b[2], b[3])));
        }
        for (i, &(r, th)) in self.interior.iter().enumerate() {
            fill(2 * mb + i, r, th, None);
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::IllConditioned(format!(
                "non-finite basis entries at Lambda = {lambda}"
            )));
        }
        Ok(a)
    }

    /// `sigma(Lambda) = min_c |B c| / |I c|` over the boundary rows `B` and
    /// interior rows `I`.
    pub fn sigma(&self, lambda: f64) -> Result<SigmaEval> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("Lambda = {lambda} must be positive")));
        }
        let mut a = self.matrix(lambda)?;
        let n = a.ncols();
        let scale: Vec<f64> = (0..n)
            .map(|j| {
                let s = a.column(j).norm();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        for (j, s) in scale.iter().enumerate() {
            a.column_mut(j).unscale_mut(*s);
        }
        let qr = PivotedQr::new(&a);
        let rank = qr.rank(self.cfg.rank_rtol);
        if rank < n / 2 {
            return Err(Error::IllConditioned(format!(
                "stacked collocation matrix has rank {rank} of {n} at Lambda = {lambda}"
            )));
        }
        let mb = 2 * self.boundary.len();
        let qb = qr.q.view((0, 0), (mb, rank)).clone_owned();
        let rb = qb.qr().r();
        let svd = jacobi_svd(&rb, 1e-12);
        let s = svd.singular_values[0].min(1.0);
        let sigma = if s < 1.0 {
            s / (1.0 - s * s).sqrt()
        } else {
            f64::INFINITY
        };

        let y = svd.v.column(0).clone_owned();
        let r11 = qr.r.view((0, 0), (rank, rank)).clone_owned();
        let z = r11
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::IllConditioned("singular leading triangle".into()))?;
        let mut coefficients = vec![0.0; n];
        for (kk, zk) in z.iter().enumerate() {
            let j = qr.perm[kk];
            coefficients[j] = zk / scale[j];
        }
        let condition_estimate = qr.r[(0, 0)].abs() / qr.r[(rank - 1, rank - 1)].abs();
        Ok(SigmaEval {
            lambda,
            sigma,
            coefficients,
            rank,
            condition_estimate,
        })
    }

    /// `psi` for a coefficient vector in [`basis_columns`] order.
    pub fn eval_psi(
        &self,
        lambda: f64,
        coefficients: &[f64],
        r: f64,
        theta: f64,
    ) -> Result<BasisValue> {
        let mut out = BasisValue {
            value: 0.0,
            grad: [0.0, 0.0],
        };
        for (&(n, kind, trig), c) in basis_columns(self.cfg.n_modes).iter().zip(coefficients) {
            let b = buckling_basis(lambda, n, kind, trig, r, theta)?;
            out.value += c * b.value;
            out.grad[0] += c * b.grad[0];
            out.grad[1] += c * b.grad[1];
        }
        Ok(out)
    }
}

/// `sigma(Lambda)` on a fresh collocation.
pub fn sigma(domain: &StarDomain, cfg: &MpsConfig, lambda: f64) -> Result<f64> {
    Ok(Collocation::new(domain, cfg)?.sigma(lambda)?.sigma)
}

fn golden_section(
    col: &Collocation,
    mut a: f64,
    mut b: f64,
    tol: f64,
    evals: &mut usize,
) -> Result<SigmaEval> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = col.sigma(x1)?;
    let mut f2 = col.sigma(x2)?;
    *evals += 2;
    while b - a > tol {
        if f1.sigma <= f2.sigma {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = col.sigma(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = col.sigma(x2)?;
        }
        *evals += 1;
    }
    Ok(if f1.sigma <= f2.sigma { f1 } else { f2 })
}

/// Threshold below which a local minimum of `sigma` is an eigenvalue.
pub const SIGMA_ACCEPT: f64 = 1e-4;

/// Scans the bracket and polishes up to `max_count` eigenvalues in
/// ascending order.
pub fn scan_buckling(
    domain: &StarDomain,
    cfg: &MpsConfig,
    max_count: usize,
) -> Result<Vec<MpsResult>> {
    let col = Collocation::new(domain, cfg)?;
    let steps = ((cfg.lambda_hi - cfg.lambda_lo) / cfg.scan_step).floor() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| cfg.lambda_lo + i as f64 * cfg.scan_step)
        .collect();
    let mut evals = 0;
    let mut best_sigma = f64::INFINITY;
    let mut found = Vec::new();
    let mut prev: Option<f64> = None;
    let mut cur = col.sigma(grid[0])?.sigma;
    evals += 1;
    for i in 0..grid.len() - 1 {
        let next = col.sigma(grid[i + 1])?.sigma;
        evals += 1;
        if next.is_nan() {
            return Err(Error::IllConditioned(format!(
                "sigma is NaN at Lambda = {}",
                grid[i + 1]
            )));
        }
        if let Some(p) = prev {
            if cur <= p && cur <= next {
                let hit = golden_section(&col, grid[i - 1], grid[i + 1], cfg.tol, &mut evals)?;
                best_sigma = best_sigma.min(hit.sigma);
                if hit.sigma < SIGMA_ACCEPT {
                    found.push(MpsResult {
                        lambda: hit.lambda,
                        sigma_min: hit.sigma,
                        coefficients: hit.coefficients,
                        diagnostics: MpsDiagnostics {
                            n_boundary: cfg.m_boundary,
                            n_interior: cfg.m_interior,
                            n_columns: cfg.n_columns(),
                            rank: hit.rank,
                            condition_estimate: hit.condition_estimate,
                            sigma_evaluations: evals,
                        },
                    });
                    if found.len() == max_count {
                        break;
                    }
                }
            }
        }
        prev = Some(cur);
        cur = next;
    }
    if found.is_empty() {
        return Err(Error::NoEigenvalueInBracket {
            lo: cfg.lambda_lo,
            hi: cfg.lambda_hi,
            best_sigma,
        });
    }
    Ok(found)
}

/// Smallest buckling eigenvalue in the configured bracket.
pub fn solve_buckling(domain: &StarDomain, cfg: &MpsConfig) -> Result<MpsResult> {
    Ok(scan_buckling(domain, cfg, 1)?.remove(0))
}

/// Finite-difference estimate at steps `h` and `h / 2` with its Richardson
/// extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub h: f64,
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-3..=0.1).contains(&h) {
        return Err(Error::Precondition(format!(
            "step h = {h} outside [1e-3, 0.1]"
        )));
    }
    Ok(())
}

fn lambda_at(phi: &BoundaryPerturbation2D, t: f64, cfg: &MpsConfig) -> Result<(f64, f64)> {
    let d = StarDomain::new(phi.clone(), t)?;
    Ok((solve_buckling(&d, cfg)?.lambda, d.area()))
}

/// Central difference of `lambda_1(Omega_t)` at `t = 0`.
pub fn fd_first_derivative(
    phi: &BoundaryPerturbation2D,
    h: f64,
    cfg: &MpsConfig,
) -> Result<FdEstimate> {
    check_step(h)?;
    let central = |s: f64| -> Result<f64> {
        Ok((lambda_at(phi, s, cfg)?.0 - lambda_at(phi, -s, cfg)?.0) / (2.0 * s))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(FdEstimate {
        h,
        coarse,
        fine,
        extrapolated: richardson(coarse, fine, 2),
    })
}

/// Second central difference of `F = |Omega_t| lambda_1(Omega_t)` at `t = 0`.
pub fn fd_second_derivative_f(
    phi: &BoundaryPerturbation2D,
    h: f64,
    cfg: &MpsConfig,
) -> Result<FdEstimate> {
    check_step(h)?;
    phi.check_orthogonal()?;
    let f = |s: f64| -> Result<f64> {
        let (l, area) = lambda_at(phi, s, cfg)?;
        Ok(l * area)
    };
    let f0 = f(0.0)?;
    let second = |s: f64| -> Result<f64> { Ok((f(s)? + f(-s)? - 2.0 * f0) / (s * s)) };
    let coarse = second(h)?;
    let fine = second(0.5 * h)?;
    Ok(FdEstimate {
        h,
        coarse,
        fine,
        extrapolated: richardson(coarse, fine, 2),
    })
}
