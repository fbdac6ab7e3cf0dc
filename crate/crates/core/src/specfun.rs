//! Bessel functions of the first kind and the two root constants `j11`
//! (first positive zero of `J_1`) and `omega` (first positive root of
//! `tan x = x`) on which every other module is built.
//!
//! `J_n(x)` is evaluated by its ascending power series for `x <= 8`, where
//! the largest term stays below `1e2` and no digits are lost to cancellation.
//! Beyond that, Miller's backward recurrence normalised by
//! `J_0 + 2 (J_2 + J_4 + ...) = 1` is used.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest order accepted by the public evaluators.
pub const MAX_ORDER: u32 = 200;

/// Arguments at or below this use the power series.
pub const SERIES_LIMIT: f64 = 8.0;

const BISECTION_WIDTH: f64 = 1e-6;
const NEWTON_MAX_STEPS: usize = 20;

fn check_args(n: u32, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    if n > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {n} exceeds {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Bessel function of the first kind `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_args(n, x)?;
    Ok(jn(n, x))
}

/// Derivative `J_n'(x)`, from `J_0' = -J_1` and `2 J_n' = J_{n-1} - J_{n+1}`.
pub fn bessel_j_prime(n: u32, x: f64) -> Result<f64> {
    check_args(n, x)?;
    Ok(jn_prime(n, x))
}

/// `J_n(x) / x` for `n >= 1`, finite at `x = 0` (limit `1/2` for `n = 1`,
/// `0` for `n >= 2`).
pub fn bessel_j_over_x(n: u32, x: f64) -> Result<f64> {
    check_args(n, x)?;
    if n == 0 {
        return Err(Error::Domain("J_0(x)/x is singular at the origin".into()));
    }
    Ok(jn_over_x(n, x))
}

/// `J_0(x), ..., J_{n_max}(x)`; bit-identical to calling [`bessel_j`] per order.
pub fn bessel_j_sequence(n_max: u32, x: f64) -> Result<Vec<f64>> {
    check_args(n_max, x)?;
    Ok(jn_sequence(n_max as usize, x))
}

pub(crate) fn jn(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(n, x, 0)
    } else {
        miller(n as usize, x)[n as usize]
    }
}

pub(crate) fn jn_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -jn(1, x)
    } else {
        0.5 * (jn(n - 1, x) - jn(n + 1, x))
    }
}

pub(crate) fn jn_over_x(n: u32, x: f64) -> f64 {
    debug_assert!(n >= 1);
    if x <= SERIES_LIMIT {
        series(n, x, 1)
    } else {
        jn(n, x) / x
    }
}

pub(crate) fn jn_sequence(n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x <= SERIES_LIMIT {
        (0..=n_max).map(|n| series(n as u32, x, 0)).collect()
    } else {
        let mut all = miller(n_max, x);
        all.truncate(n_max + 1);
        all
    }
}

/// `sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)`, divided by `x^shift`.
fn series(n: u32, x: f64, shift: u32) -> f64 {
    let half = 0.5 * x;
    // Leading term (x/2)^n / n!, or (x/2)^(n-1) / (2 n!) when one power of x
    // is divided out.
    // is divided out. Interleaved so n! never overflows.
    let mut term = if shift == 0 { 1.0 } else { 0.5 };
    for i in 1..=n {
        let f = if i <= n - shift { half } else { 1.0 };
        term *= f / f64::from(i);
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 1.0_f64;
    loop {
        term *= -q / (k * (k + f64::from(n)));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// `J_{n+1}(x) / J_n(x)` from the backward continued fraction
/// `q_{m-1} = 1 / (2m/x - q_m)`; stays finite where both values underflow.
/// Requires `J_n(x) != 0`, e.g. `0 < x < j_{n,1}`.
pub(crate) fn jn_ratio(n: u32, x: f64) -> f64 {
    let top = n as usize + 40 + (4.0 * x) as usize;
    let mut q = 0.0;
    for m in ((n as usize + 1)..=top).rev() {
        q = 1.0 / (2.0 * m as f64 / x - q);
    }
    q
}

/// Miller's backward recurrence; returns at least `n_max + 1` values.
fn miller(n_max: usize, x: f64) -> Vec<f64> {
    let top = n_max.max(x.ceil() as usize);
    let mut start = top + 30 + (60.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0; start + 2];
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    vals[start] = cur;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        vals[k - 1] = cur;
        if cur.abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            next *= 1e-250;
            cur *= 1e-250;
        }
    }
    let mut norm = vals[0];
    let mut k = 2;
    while k <= start {
        norm += 2.0 * vals[k];
        k += 2;
    }
    for v in vals.iter_mut() {
        *v /= norm;
    }
    vals
}

/// Which root a [`RootConstant`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// First positive zero of `J_1`.
    J1FirstZero,
    /// First positive root of `tan x = x`.
    TanEqX,
    /// `index`-th positive zero of `J_order`.
    BesselZero { order: u32, index: u32 },
}

/// A root located by bisection followed by Newton polishing.
#[derive(Debug, Clone, PartialEq)]
pub struct RootConstant {
    pub value: f64,
    pub kind: RootKind,
    /// `|f(value)|` at convergence.
    pub residual: f64,
    /// `|f|` after each Newton step, starting with the bisection midpoint.
    pub newton_residuals: Vec<f64>,
}

/// Bisection on `[lo, hi]` down to width `1e-6`, then Newton until `|f|`
/// stops decreasing or drops below `tol`.
pub fn bracket_and_polish<F, D>(f: F, df: D, lo: f64, hi: f64, tol: f64) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok((a, vec![0.0]));
    }
    if fb == 0.0 {
        return Ok((b, vec![0.0]));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    while b - a > BISECTION_WIDTH {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok((m, vec![0.0]));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    let mut fx = f(x);
    let mut trace = vec![fx.abs()];
    for _ in 0..NEWTON_MAX_STEPS {
        if fx.abs() <= tol * 1e-3 {
            break;
        }
        let step = fx / df(x);
        let x_new = x - step;
        let f_new = f(x_new);
        if f_new.abs() >= fx.abs() {
            break;
        }
        x = x_new;
        fx = f_new;
        trace.push(fx.abs());
    }
    if fx.abs() > tol {
        return Err(Error::Bracket { lo, hi });
    }
    Ok((x, trace))
}

const ROOT_TOL: f64 = 1e-13;

/// First positive zero of `J_1`, bracketed in `(3, 4)`.
pub fn root_j1() -> RootConstant {
    let (value, newton_residuals) =
        bracket_and_polish(|x| jn(1, x), |x| jn_prime(1, x), 3.0, 4.0, ROOT_TOL)
            .expect("J_1 changes sign on (3, 4)");
    RootConstant {
        value,
        kind: RootKind::J1FirstZero,
        residual: jn(1, value).abs(),
        newton_residuals,
    }
}

/// First positive root of `tan x = x`, located as the zero of
/// `sin x - x cos x` on `(pi, 3 pi / 2)` to stay clear of the pole.
pub fn root_tan_eq_x() -> RootConstant {
    let g = |x: f64| x.sin() - x * x.cos();
    let dg = |x: f64| x * x.sin();
    let (value, newton_residuals) = bracket_and_polish(
        g,
        dg,
        std::f64::consts::PI,
        1.5 * std::f64::consts::PI,
        ROOT_TOL,
    )
    .expect("sin x - x cos x changes sign on (pi, 3pi/2)");
    RootConstant {
        value,
        kind: RootKind::TanEqX,
        residual: g(value).abs(),
        newton_residuals,
    }
}

/// `index`-th positive zero `j_{order,index}` of `J_order` (index starts at 1).
pub fn bessel_zero(order: u32, index: u32) -> Result<RootConstant> {
    if index == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    check_args(order, 0.0)?;
    let step = 0.1;
    let mut a = if order == 0 { step } else { f64::from(order) };
    let mut fa = jn(order, a);
    let mut found = 0;
    while a < 400.0 {
        let b = a + step;
        let fb = jn(order, b);
        if fa.signum() != fb.signum() && fa != 0.0 {
            found += 1;
            if found == index {
                let (value, newton_residuals) =
                    bracket_and_polish(|x| jn(order, x), |x| jn_prime(order, x), a, b, ROOT_TOL)?;
                return Ok(RootConstant {
                    value,
                    kind: RootKind::BesselZero { order, index },
                    residual: jn(order, value).abs(),
                    newton_residuals,
                });
            }
        }
        a = b;
        fa = fb;
    }
    Err(Error::Domain(format!(
        "zero {index} of J_{order} not found below 400"
    )))
}

/// Cached `j_{1,1}`.
pub fn j11() -> f64 {
    static J11: OnceLock<f64> = OnceLock::new();
    *J11.get_or_init(|| root_j1().value)
}

/// Cached `omega`, the first positive root of `tan x = x`.
pub fn omega() -> f64 {
    static OMEGA: OnceLock<f64> = OnceLock::new();
    *OMEGA.get_or_init(|| root_tan_eq_x().value)
}
