//! Quadrature on the unit circle, on intervals, and on the unit sphere.
//!
//! All sums are accumulated in node order with Neumaier compensation, so
//! results are reproducible bit for bit.

use std::f64::consts::PI;

use nalgebra::Vector3;

/// Compensated (Neumaier) sum in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Equispaced trapezoid rule on `[0, 2 pi)`: exact for trigonometric
/// polynomials of degree `< m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleRule {
    pub m: usize,
}

impl Default for CircleRule {
    fn default() -> Self {
        Self { m: 256 }
    }
}

impl CircleRule {
    pub fn new(m: usize) -> Self {
        assert!(m > 0, "circle rule needs at least one node");
        Self { m }
    }

    pub fn node(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.m as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |k| self.node(k))
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.weight() * compensated_sum(self.nodes().map(f))
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `int_a^b f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * compensated_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(mid + half * x)),
        )
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = if (1.0 - x * x).abs() < 1e-300 {
        // P_n'(±1) = (±1)^(n-1) n (n+1) / 2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// Product rule on the unit sphere: Gauss-Legendre in `cos(theta)` times a
/// uniform rule in the azimuth. Integrates `x^a y^b z^c` exactly when
/// `a + b + c <= 2 n_polar - 1` and `a + b + c < n_azimuthal`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    polar: GaussLegendre,
    n_azimuthal: usize,
}

impl Default for SphereRule {
    fn default() -> Self {
        Self::new(32, 65)
    }
}

impl SphereRule {
    pub fn new(n_polar: usize, n_azimuthal: usize) -> Self {
        assert!(n_azimuthal > 0, "sphere rule needs azimuthal nodes");
        Self {
            polar: GaussLegendre::new(n_polar),
            n_azimuthal,
        }
    }

    /// Smallest rule that is exact for polynomial integrands of `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1, degree + 1)
    }

    pub fn n_polar(&self) -> usize {
        self.polar.len()
    }

    pub fn n_azimuthal(&self) -> usize {
        self.n_azimuthal
    }

    /// `(point, weight)` pairs; weights sum to `4 pi`.
    pub fn nodes(&self) -> Vec<(Vector3<f64>, f64)> {
        let dphi = 2.0 * PI / self.n_azimuthal as f64;
        let mut out = Vec::with_capacity(self.polar.len() * self.n_azimuthal);
        for (ct, w) in self.polar.nodes.iter().zip(&self.polar.weights) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..self.n_azimuthal {
                let phi = dphi * k as f64;
                out.push((Vector3::new(st * phi.cos(), st * phi.sin(), *ct), w * dphi));
            }
        }
        out
    }

    /// Surface integral of `f` over the unit sphere.
    pub fn integrate<F: Fn(&Vector3<f64>) -> f64>(&self, f: F) -> f64 {
        compensated_sum(self.nodes().iter().map(|(p, w)| w * f(p)))
    }
}

/// `int_{B_3} f` with `n_radial` Gauss-Legendre nodes in `r` and `rule` on
/// each shell.
pub fn integrate_ball<F: Fn([f64; 3]) -> f64>(f: F, n_radial: usize, rule: &SphereRule) -> f64 {
    let nodes = rule.nodes();
    compensated_sum(
        GaussLegendre::new(n_radial)
            .mapped(0.0, 1.0)
            .into_iter()
            .flat_map(|(r, w)| {
                let f = &f;
                nodes
                    .iter()
                    .map(move |(q, v)| w * v * r * r * f([r * q.x, r * q.y, r * q.z]))
            }),
    )
}

fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `int_{S^2} x^a y^b z^c dsigma`: zero if any exponent is odd, otherwise
/// `4 pi (a-1)!! (b-1)!! (c-1)!! / (a+b+c+1)!!`.
pub fn moment_sphere(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    let (a, b, c) = (i64::from(a), i64::from(b), i64::from(c));
    4.0 * PI * double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1)
        / double_factorial(a + b + c + 1)
}
