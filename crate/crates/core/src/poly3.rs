//! Polynomials in `x, y, z` with exact integrals over the unit sphere.

use std::collections::BTreeMap;
use std::fmt;

use crate::quadrature::moment_sphere;
use crate::{Error, Result};

/// Sparse polynomial: exponents `(a, b, c)` mapped to coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly3 {
    terms: BTreeMap<(u32, u32, u32), f64>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0, 0)
    }

    pub fn monomial(coef: f64, a: u32, b: u32, c: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(coef, a, b, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(1.0, 1, 0, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1.0, 0, 1, 0)
    }

    pub fn z() -> Self {
        Self::monomial(1.0, 0, 0, 1)
    }

    pub fn add_term(&mut self, coef: f64, a: u32, b: u32, c: u32) {
        let e = self.terms.entry((a, b, c)).or_insert(0.0);
        *e += coef;
        if *e == 0.0 {
            self.terms.remove(&(a, b, c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), f64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b, c)| a + b + c)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|((a, b, c), k)| {
                k * p[0].powi(*a as i32) * p[1].powi(*b as i32) * p[2].powi(*c as i32)
            })
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b, c), k) in other.terms() {
            out.add_term(k, a, b, c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for ((a, b, c), k) in self.terms() {
            out.add_term(k * s, a, b, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b, c), k) in self.terms() {
            for ((d, e, f), l) in other.terms() {
                out.add_term(k * l, a + d, b + e, c + f);
            }
        }
        out
    }

    /// Exact `int_{S^2} p dsigma`.
    pub fn integrate_sphere(&self) -> f64 {
        self.terms
            .iter()
            .map(|((a, b, c), k)| k * moment_sphere(*a, *b, *c))
            .sum()
    }

    /// Parses `c*x^a*y^b*z^c +- ...`; factors may appear in any order and
    /// a bare number or variable is a valid term.
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let chars: Vec<char> = s.chars().collect();
        let mut out = Self::zero();
        let mut start = 0;
        let mut i = 0;
        let mut terms = Vec::new();
        while i <= chars.len() {
            let split = i == chars.len()
                || (i > start
                    && (chars[i] == '+' || chars[i] == '-')
                    && !matches!(chars[i - 1], 'e' | 'E' | '*' | '^'));
            if split {
                terms.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
            i += 1;
        }
        for t in terms {
            let (coef, a, b, c) = parse_term(&t)?;
            out.add_term(coef, a, b, c);
        }
        Ok(out)
    }
}

fn parse_term(t: &str) -> Result<(f64, u32, u32, u32)> {
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("empty term in '{t}'")));
    }
    let mut coef = sign;
    let mut exps = [0u32; 3];
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in '{t}'")));
        }
        let var = match factor.chars().next() {
            Some('x') => Some(0),
            Some('y') => Some(1),
            Some('z') => Some(2),
            _ => None,
        };
        match var {
            Some(k) => {
                let e = match &factor[1..] {
                    "" => 1,
                    rest => rest
                        .strip_prefix('^')
                        .and_then(|v| v.parse::<u32>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad exponent in '{factor}'")))?,
                };
                exps[k] += e;
            }
            None => {
                let v: f64 = factor
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad factor '{factor}'")))?;
                if !v.is_finite() {
                    return Err(Error::Parse(format!("non-finite coefficient '{factor}'")));
                }
                coef *= v;
            }
        }
    }
    Ok((coef, exps[0], exps[1], exps[2]))
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b, c), k)) in self.terms.iter().enumerate() {
            match (i, *k < 0.0) {
                (0, _) => write!(f, "{k:?}")?,
                (_, true) => write!(f, " - {:?}", -k)?,
                (_, false) => write!(f, " + {k:?}")?,
            }
            for (name, e) in [("x", a), ("y", b), ("z", c)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// `<Phi, nu> = x P_1 + y P_2 + z P_3` on the unit sphere.
pub fn normal_trace(field: &[Poly3; 3]) -> Poly3 {
    Poly3::x()
        .mul(&field[0])
        .add(&Poly3::y().mul(&field[1]))
        .add(&Poly3::z().mul(&field[2]))
}
