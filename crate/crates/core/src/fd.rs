//! Finite-difference stencils used by the residual checks.

/// Second-order central first derivative.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Fourth-order central first derivative.
pub fn d1_o4<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative.
pub fn d2_o4<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Partial derivative along axis `k` of `f: R^D -> R` (second order).
pub fn partial<const D: usize, F: Fn([f64; D]) -> f64>(f: F, x: [f64; D], k: usize, h: f64) -> f64 {
    d1(
        |t| {
            let mut y = x;
            y[k] = t;
            f(y)
        },
        x[k],
        h,
    )
}

/// Fourth-order Laplacian of `f: R^D -> R`.
pub fn laplacian_o4<const D: usize, F: Fn([f64; D]) -> f64>(f: F, x: [f64; D], h: f64) -> f64 {
    (0..D)
        .map(|k| {
            d2_o4(
                |t| {
                    let mut y = x;
                    y[k] = t;
                    f(y)
                },
                x[k],
                h,
            )
        })
        .sum()
}

/// Richardson extrapolation of an order-`p` estimate from steps `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64, p: i32) -> f64 {
    let k = 2f64.powi(p);
    (k * fine - coarse) / (k - 1.0)
}
