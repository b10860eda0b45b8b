//! Exact univariate polynomials in the monomial basis.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num::{One, Zero};

use super::point::{rat, rat_text, rat_to_f64, Rational};

/// Polynomial with rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial1D {
    coefficients: Vec<Rational>,
}

impl Polynomial1D {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.len() > 1 && coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(Rational::zero());
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self::new(vec![Rational::zero()])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x - root`
    pub fn linear_factor(root: &Rational) -> Self {
        Self::new(vec![-root.clone(), Rational::one()])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0].is_zero()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64, 1))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Value of the `n`-th derivative at `x`.
    pub fn eval_deriv(&self, n: usize, x: &Rational) -> Rational {
        self.nth_derivative(n).eval(x)
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut c = vec![Rational::zero()];
        c.extend(
            self.coefficients
                .iter()
                .enumerate()
                .map(|(k, a)| a / rat(k as i64 + 1, 1)),
        );
        Self::new(c)
    }

    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * s).collect())
    }

    /// `p(a*x + b)`
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Self {
        let inner = Self::new(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for c in self.coefficients.iter().rev() {
            acc = &(&acc * &inner) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coefficients.iter().map(rat_to_f64).collect()
    }
}

impl Add for &Polynomial1D {
    type Output = Polynomial1D;
    fn add(self, rhs: &Polynomial1D) -> Polynomial1D {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        let z = Rational::zero();
        Polynomial1D::new(
            (0..n)
                .map(|k| {
                    self.coefficients.get(k).unwrap_or(&z) + rhs.coefficients.get(k).unwrap_or(&z)
                })
                .collect(),
        )
    }
}

impl Sub for &Polynomial1D {
    type Output = Polynomial1D;
    fn sub(self, rhs: &Polynomial1D) -> Polynomial1D {
        self + &rhs.scale(&rat(-1, 1))
    }
}

impl Mul for &Polynomial1D {
    type Output = Polynomial1D;
    fn mul(self, rhs: &Polynomial1D) -> Polynomial1D {
        let mut c = vec![Rational::zero(); self.coefficients.len() + rhs.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in rhs.coefficients.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial1D::new(c)
    }
}

impl fmt::Display for Polynomial1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(rat_text).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Horner evaluation of `f64` coefficients.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative_f64(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Real roots of a polynomial in the open interval `(a, b)`.
///
/// The interval is split at the roots of the derivative (found recursively),
/// so each piece is monotone and holds at most one root, which is then
/// bracketed by bisection.
pub fn real_roots_in(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut breaks = vec![a];
    breaks.extend(real_roots_in(&derivative_f64(&c), a, b));
    breaks.push(b);
    let mut roots = Vec::new();
    for w in breaks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(&c, lo), horner(&c, hi));
        if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
            if fhi == 0.0 && hi < b {
                roots.push(hi);
            }
            continue;
        }
        let rising = fhi > flo;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = horner(&c, mid);
            if (fm > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    roots
}

/// `∫_a^b |p|` using the real roots inside the interval.
pub fn l1_norm_on(coeffs: &[f64], a: f64, b: f64) -> f64 {
    let anti: Vec<f64> = std::iter::once(0.0)
        .chain(coeffs.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)))
        .collect();
    let mut pts = vec![a];
    pts.extend(real_roots_in(coeffs, a, b));
    pts.push(b);
    pts.windows(2)
        .map(|w| (horner(&anti, w[1]) - horner(&anti, w[0])).abs())
        .sum()
}

/// `max_{[a,b]} |p|` from endpoint values and interior critical points.
pub fn linf_norm_on(coeffs: &[f64], a: f64, b: f64) -> f64 {
    let mut best = horner(coeffs, a).abs().max(horner(coeffs, b).abs());
    for r in real_roots_in(&derivative_f64(coeffs), a, b) {
        best = best.max(horner(coeffs, r).abs());
    }
    best
}
