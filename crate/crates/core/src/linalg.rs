//! Small dense kernels: closed-form symmetric 3x3 eigen-decomposition,
//! rank-revealing Householder QR and one-sided Jacobi SVD.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};

/// Eigenpairs of a symmetric 3x3 matrix, eigenvalues ascending, eigenvectors
/// as the matching columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen3 {
    pub values: [f64; 3],
    pub vectors: Matrix3<f64>,
}

impl SymEigen3 {
    /// `max_k |A v_k - mu_k v_k|`.
    pub fn residual(&self, a: &Matrix3<f64>) -> f64 {
        (0..3)
            .map(|k| {
                let v = self.vectors.column(k);
                (a * v - v * self.values[k]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues from the trigonometric solution of the characteristic cubic,
/// eigenvectors from row cross products, then a Rayleigh-quotient polish.
pub fn sym3_eigen(a: &Matrix3<f64>) -> SymEigen3 {
    let a = (a + a.transpose()) * 0.5;
    let scale = a.amax();
    if scale == 0.0 {
        return SymEigen3 {
            values: [0.0; 3],
            vectors: Matrix3::identity(),
        };
    }
    let s = a / scale;
    let values = sym3_values(&s);

    // the most isolated eigenvalue gets its vector from cross products; the
    // other two come from an exact 2x2 solve in its orthogonal complement
    let iso = if values[1] - values[0] > values[2] - values[1] {
        0
    } else {
        2
    };
    let v_iso = null_vector(&(s - Matrix3::identity() * values[iso]));
    let (u, w) = complement(&v_iso);
    let b = Matrix2::new(
        u.dot(&(s * u)),
        u.dot(&(s * w)),
        w.dot(&(s * u)),
        w.dot(&(s * w)),
    );
    let (c, sn) = jacobi_rotation(b[(0, 0)], b[(0, 1)], b[(1, 1)]);
    let p = u * c - w * sn;
    let q = u * sn + w * c;

    let mut pairs = [(0.0, v_iso), (0.0, p), (0.0, q)];
    for pair in pairs.iter_mut() {
        pair.0 = pair.1.dot(&(s * pair.1)) * scale;
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut vectors = Matrix3::zeros();
    let mut out = [0.0; 3];
    for (k, (mu, v)) in pairs.iter().enumerate() {
        out[k] = *mu;
        // fix a sign so results are reproducible
        let sign = if v
            .iter()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { *x } else { m })
            < 0.0
        {
            -1.0
        } else {
            1.0
        };
        vectors.set_column(k, &(v * sign));
    }
    SymEigen3 {
        values: out,
        vectors,
    }
}

fn sym3_values(a: &Matrix3<f64>) -> [f64; 3] {
    let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let q = a.trace() / 3.0;
    let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
    if p2 == 0.0 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let b = (a - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    let mut v = [lo, mid, hi];
    v.sort_by(f64::total_cmp);
    v
}

fn null_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    let r0 = m.row(0).transpose();
    let r1 = m.row(1).transpose();
    let r2 = m.row(2).transpose();
    let cands = [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)];
    let best = cands
        .iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .copied()
        .unwrap_or_else(Vector3::zeros);
    let n = best.norm();
    if n > 0.0 {
        best / n
    } else {
        Vector3::x()
    }
}

fn complement(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let u = if v.x.abs() > v.y.abs() {
        Vector3::new(-v.z, 0.0, v.x) / (v.x * v.x + v.z * v.z).sqrt()
    } else {
        Vector3::new(0.0, v.z, -v.y) / (v.y * v.y + v.z * v.z).sqrt()
    };
    (u, v.cross(&u))
}

/// `(c, s)` such that the rotation diagonalizes `[[a, b], [b, d]]`.
fn jacobi_rotation(a: f64, b: f64, d: f64) -> (f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0);
    }
    let tau = (d - a) / (2.0 * b);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let t = if tau == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// Householder QR with column pivoting on the largest remaining column norm:
/// `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Thin `Q` (m x min(m, n)).
    pub q: DMatrix<f64>,
    /// Upper-trapezoidal `R` (min(m, n) x n).
    pub r: DMatrix<f64>,
    /// `perm[k]` is the original index of the k-th pivoted column.
    pub perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        let kmax = m.min(n);
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut norms: Vec<f64> = (0..n).map(|j| work.column(j).norm_squared()).collect();
        let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(kmax);

        for k in 0..kmax {
            // recompute norms exactly to avoid downdate cancellation
            for (j, nj) in norms.iter_mut().enumerate().skip(k) {
                *nj = work.view((k, j), (m - k, 1)).norm_squared();
            }
            let piv = (k..n)
                .max_by(|&x, &y| norms[x].total_cmp(&norms[y]).then(y.cmp(&x)))
                .unwrap_or(k);
            if piv != k {
                work.swap_columns(k, piv);
                perm.swap(k, piv);
                norms.swap(k, piv);
            }
            let x = work.view((k, k), (m - k, 1)).clone_owned();
            let alpha = x.norm();
            let mut v = DVector::from_column_slice(x.as_slice());
            if alpha == 0.0 {
                reflectors.push(DVector::zeros(m - k));
                continue;
            }
            let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            v[0] += sign * alpha;
            let vn = v.norm();
            v /= vn;
            for j in k..n {
                reflect(&mut work, &v, k, j);
            }
            reflectors.push(v);
        }

        let mut q = DMatrix::<f64>::zeros(m, kmax);
        for j in 0..kmax {
            q[(j, j)] = 1.0;
        }
        for k in (0..kmax).rev() {
            let v = &reflectors[k];
            for j in 0..kmax {
                reflect(&mut q, v, k, j);
            }
        }
        let r = work.rows(0, kmax).upper_triangle();
        Self { q, r, perm }
    }

    /// Number of pivots with `|R_kk| > rtol * |R_00|`.
    pub fn rank(&self, rtol: f64) -> usize {
        let k = self.r.nrows().min(self.r.ncols());
        if k == 0 {
            return 0;
        }
        let r00 = self.r[(0, 0)].abs();
        if r00 == 0.0 {
            return 0;
        }
        (0..k)
            .take_while(|&i| self.r[(i, i)].abs() > rtol * r00)
            .count()
    }
}

// column j, rows k.., of m  <-  (I - 2 v v^T) applied in place
fn reflect(m: &mut DMatrix<f64>, v: &DVector<f64>, k: usize, j: usize) {
    let rows = m.nrows();
    let col = &mut m.as_mut_slice()[j * rows + k..(j + 1) * rows];
    let v = v.as_slice();
    let d = 2.0 * v.iter().zip(col.iter()).map(|(a, b)| a * b).sum::<f64>();
    for (c, vi) in col.iter_mut().zip(v) {
        *c -= d * vi;
    }
}

/// One-sided Jacobi SVD of `a` (m x n): singular values ascending and the
/// matching right singular vectors as columns of `v`.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
    pub sweeps: usize,
}

pub fn jacobi_svd(a: &DMatrix<f64>, tol: f64) -> JacobiSvd {
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut sweeps = 0;
    for _ in 0..60 {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = u.column(p).dot(&u.column(q));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut u, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| u.column(j).norm()).collect();
    order.sort_by(|&x, &y| norms[x].total_cmp(&norms[y]).then(x.cmp(&y)));
    let singular_values = order.iter().map(|&j| norms[j]).collect();
    let v = DMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    JacobiSvd {
        singular_values,
        v,
        sweeps,
    }
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let rows = m.nrows();
    let (left, right) = m.as_mut_slice().split_at_mut(q * rows);
    let cp = &mut left[p * rows..(p + 1) * rows];
    let cq = &mut right[..rows];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (mp, mq) = (*a, *b);
        *a = c * mp - s * mq;
        *b = s * mp + c * mq;
    }
}
