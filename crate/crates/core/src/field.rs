//! Evaluator bundle shared by the disk and ball eigenfields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fd;
use crate::Result;

/// A vector eigenfield on the unit disk (`D = 2`) or unit ball (`D = 3`),
/// in Cartesian coordinates.
pub trait EigenField<const D: usize> {
    fn eigenvalue(&self) -> f64;

    fn value(&self, x: [f64; D]) -> Result<[f64; D]>;

    /// `(grad u) nu` at a boundary point; on the unit sphere `nu = x`.
    fn boundary_gradient(&self, x: [f64; D]) -> Result<[f64; D]>;

    /// Deterministic boundary sample of `count` points.
    fn boundary_points(&self, count: usize) -> Vec<[f64; D]>;

    /// Central-difference Jacobian, `jac[i][j] = d u_i / d x_j`.
    fn jacobian_fd(&self, x: [f64; D], h: f64) -> Result<[[f64; D]; D]> {
        let mut jac = [[0.0; D]; D];
        for j in 0..D {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let up = self.value(xp)?;
            let um = self.value(xm)?;
            for i in 0..D {
                jac[i][j] = (up[i] - um[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    fn divergence_fd(&self, x: [f64; D], h: f64) -> Result<f64> {
        let jac = self.jacobian_fd(x, h)?;
        Ok((0..D).map(|i| jac[i][i]).sum())
    }

    /// `max_i |(-Delta u - lambda u)_i|` with fourth-order differences.
    fn eigen_residual_fd(&self, x: [f64; D], h: f64) -> Result<f64> {
        let u = self.value(x)?;
        let lam = self.eigenvalue();
        let mut worst = 0.0_f64;
        for (i, ui) in u.iter().enumerate() {
            // out-of-domain stencil points surface as NaN and fail the check
            let lap = fd::laplacian_o4(|y| self.value(y).map(|v| v[i]).unwrap_or(f64::NAN), x, h);
            worst = worst.max((-lap - lam * ui).abs());
        }
        Ok(worst)
    }
}

/// `factor * field`; same eigenvalue, scaled traces.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<'a, F> {
    pub field: &'a F,
    pub factor: f64,
}

impl<const D: usize, F: EigenField<D>> EigenField<D> for Scaled<'_, F> {
    fn eigenvalue(&self) -> f64 {
        self.field.eigenvalue()
    }

    fn value(&self, x: [f64; D]) -> Result<[f64; D]> {
        Ok(self.field.value(x)?.map(|v| v * self.factor))
    }

    fn boundary_gradient(&self, x: [f64; D]) -> Result<[f64; D]> {
        Ok(self.field.boundary_gradient(x)?.map(|v| v * self.factor))
    }

    fn boundary_points(&self, count: usize) -> Vec<[f64; D]> {
        self.field.boundary_points(count)
    }
}

/// `count` equispaced points on the unit circle.
pub fn circle_points(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

/// Fibonacci lattice of `count` points on the unit sphere.
pub fn sphere_points(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * k as f64;
            [s * a.cos(), s * a.sin(), z]
        })
        .collect()
}

/// `n` seeded uniform points in the open ball of radius `rmax`.
pub fn ball_points(n: usize, rmax: f64, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [0, 1, 2].map(|_| rng.gen_range(-rmax..rmax));
        if p.iter().map(|v| v * v).sum::<f64>() < rmax * rmax {
            out.push(p);
        }
    }
    out
}

/// `n` seeded uniform points in the open disk of radius `rmax`.
pub fn disk_points(n: usize, rmax: f64, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [0, 1].map(|_| rng.gen_range(-rmax..rmax));
        if p[0] * p[0] + p[1] * p[1] < rmax * rmax {
            out.push(p);
        }
    }
    out
}

pub(crate) fn norm<const D: usize>(v: &[f64; D]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
