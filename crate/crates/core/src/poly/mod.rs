//! Dense complex polynomials, rational maps and evaluation on the Riemann sphere.

mod rational;
mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use rational::homogeneous_poly;
pub use rational::{rat_combine, rat_derivative, rat_make, CombineOp, RationalMap};
pub use roots::{cluster_roots, poly_roots, root_clusters, RootCluster};

/// Complex scalar used throughout the crate.
pub type Complex = Complex64;

/// Trailing coefficients with magnitude at most `TRIM_EPS * max|coeff|` are dropped.
/// Ratio below which a low-order coefficient is negligible next to the first significant one.
const LOW_ORDER_RATIO: f64 = 1e-8;

pub const TRIM_EPS: f64 = 1e-12;
/// Roots of numerator and denominator closer than `CANCEL_TOL * (1 + |r|)` cancel.
pub const CANCEL_TOL: f64 = 1e-9;
/// Maximum Aberth–Ehrlich sweeps.
pub const ROOT_MAX_SWEEPS: usize = 200;
/// Normalized residual accepted for a computed root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("root solver did not converge within {sweeps} sweeps (worst residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("zero denominator")]
    ZeroDenominator,
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(Complex),
    Infinity,
}

impl ExtComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtComplex::Finite(Complex::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// `1/z` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        match *self {
            ExtComplex::Infinity => ExtComplex::Finite(Complex::new(0.0, 0.0)),
            ExtComplex::Finite(z) if z == Complex::new(0.0, 0.0) => ExtComplex::Infinity,
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
        }
    }

    /// Chordal-style closeness: both infinite, or finite and within `tol * (1 + |a|)`.
    pub fn approx_eq(&self, other: &ExtComplex, tol: f64) -> bool {
        match (self, other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => true,
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => (a - b).norm() <= tol * (1.0 + a.norm()),
            _ => false,
        }
    }
}

impl From<Complex> for ExtComplex {
    fn from(z: Complex) -> Self {
        ExtComplex::Finite(z)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Infinity => write!(f, "inf"),
            ExtComplex::Finite(z) => write!(f, "{}", fmt_complex(*z)),
        }
    }
}

pub(crate) fn fmt_complex(z: Complex) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Dense polynomial with ascending complex coefficients.
///
/// The coefficient vector never ends in a negligible entry: anything at or
/// below [`TRIM_EPS`] times the largest coefficient magnitude is removed when
/// the polynomial is built. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = TRIM_EPS * max;
        while let Some(last) = coeffs.last() {
            if last.norm() <= cut {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(Complex::new(1.0, 0.0), 1)
    }

    pub fn monomial(c: Complex, degree: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// Monic polynomial with the given roots, `Π (z - r)`.
    pub fn from_roots(roots: &[Complex]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            acc.mul(&Polynomial::new(vec![-r, Complex::new(1.0, 0.0)]))
        })
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> Complex {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Number of low-order coefficients that vanish (multiplicity of the root at 0).
    ///
    /// A leading run of coefficients counts as zero when each is at or below [`TRIM_EPS`]
    /// times the largest magnitude and also negligible next to the first coefficient above it.
    pub fn low_order_zeros(&self) -> usize {
        let cut = TRIM_EPS * self.max_norm();
        let m = self.coeffs.iter().take_while(|c| c.norm() <= cut).count();
        let Some(first) = self.coeffs.get(m) else { return m };
        let local = LOW_ORDER_RATIO * first.norm();
        self.coeffs[..m].iter().take_while(|c| c.norm() <= local).count()
    }

    /// Divide by `z^m`, dropping the `m` lowest coefficients.
    pub fn shift_down(&self, m: usize) -> Self {
        Self::new(self.coeffs.iter().skip(m).copied().collect())
    }

    /// Multiply by `z^m`.
    pub fn shift_up(&self, m: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex::new(0.0, 0.0); m];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { coeffs }
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Horner evaluation at a finite point.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Evaluation on the Riemann sphere.
    pub fn eval_ext(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Finite(z) => ExtComplex::Finite(self.eval(z)),
            ExtComplex::Infinity => match self.degree() {
                Some(d) if d >= 1 => ExtComplex::Infinity,
                _ => ExtComplex::Finite(self.leading()),
            },
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Coefficients reversed against a formal degree: `z^deg · p(1/z)`.
    pub fn reversed(&self, deg: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); deg + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i <= deg {
                coeffs[deg - i] = c;
            }
        }
        Self::new(coeffs)
    }

    /// `p(q(z))` for polynomial `q`.
    pub fn compose(&self, q: &Polynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| acc.mul(q).add(&Self::constant(c)))
    }

    /// Exact quotient by `(z - r)`; the remainder is discarded.
    ///
    /// For `|r| > 1` the division runs on the reversed coefficients, which keeps
    /// the deflation forward-stable for large roots.
    pub fn deflate(&self, r: Complex) -> Self {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return Self::zero(),
        };
        if r.norm() <= 1.0 {
            let mut q = vec![Complex::new(0.0, 0.0); n];
            let mut acc = Complex::new(0.0, 0.0);
            for i in (1..=n).rev() {
                acc = acc * r + self.coeffs[i];
                q[i - 1] = acc;
            }
            Self::new(q)
        } else {
            // p(z) = (z - r) q(z)  <=>  rev(p)(w) = (1 - r w) rev(q)(w)
            let inv = r.inv();
            let mut q = vec![Complex::new(0.0, 0.0); n];
            let mut acc = Complex::new(0.0, 0.0);
            // rev(q)(w) = rev(p)(w) / (-r) / (w - 1/r); synthetic division from the top of rev(p).
            let rev: Vec<Complex> = self.coeffs.iter().rev().copied().collect();
            let mut rq = vec![Complex::new(0.0, 0.0); n];
            for i in (1..=n).rev() {
                acc = acc * inv + rev[i];
                rq[i - 1] = acc;
            }
            let s = -inv;
            for (i, c) in rq.iter().enumerate() {
                q[n - 1 - i] = *c * s;
            }
            Self::new(q)
        }
    }

    /// Largest coefficient-wise difference relative to the larger coefficient norm.
    pub fn relative_distance(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_norm().max(other.max_norm()).max(f64::MIN_POSITIVE);
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
            / scale
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Polynomial {
    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        self + rhs
    }

    pub fn sub(&self, rhs: &Polynomial) -> Polynomial {
        self - rhs
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        self * rhs
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, &c)| match i {
                0 => format!("({})", fmt_complex(c)),
                1 => format!("({})z", fmt_complex(c)),
                _ => format!("({})z^{}", fmt_complex(c), i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Horner evaluation of `p` at `z` on the Riemann sphere.
pub fn poly_eval(p: &Polynomial, z: ExtComplex) -> ExtComplex {
    p.eval_ext(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(poly_eval(&p, c(2.0, 0.0).into()), ExtComplex::Finite(c(3.0, 0.0)));
        assert_eq!(poly_eval(&p, c(0.0, 1.0).into()), ExtComplex::Finite(c(-2.0, 0.0)));
        let cube = Polynomial::monomial(c(1.0, 0.0), 3);
        assert_eq!(poly_eval(&cube, ExtComplex::Infinity), ExtComplex::Infinity);
        let k = Polynomial::constant(c(4.0, -1.0));
        assert_eq!(poly_eval(&k, ExtComplex::Infinity), ExtComplex::Finite(c(4.0, -1.0)));
    }

    #[test]
    fn trimming_is_idempotent() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-14, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        let q = Polynomial::new(p.coeffs().to_vec());
        assert_eq!(p, q);
        assert!(Polynomial::new(vec![c(0.0, 0.0); 3]).is_zero());
    }

    #[test]
    fn deflate_small_and_large_roots() {
        for r in [c(0.3, -0.2), c(4.0, 1.5)] {
            let q = Polynomial::from_real(&[1.0, -2.0, 0.5]);
            let p = q.mul(&Polynomial::new(vec![-r, c(1.0, 0.0)]));
            let back = p.deflate(r);
            assert!(back.relative_distance(&q) < 1e-14, "{back} vs {q}");
        }
    }

    #[test]
    fn compose_and_reverse() {
        let p = Polynomial::from_real(&[0.0, 0.0, 1.0]);
        let q = Polynomial::from_real(&[1.0, 1.0]);
        assert_eq!(p.compose(&q), Polynomial::from_real(&[1.0, 2.0, 1.0]));
        let r = Polynomial::from_real(&[2.0, 3.0, 1.0]).reversed(2);
        assert_eq!(r, Polynomial::from_real(&[1.0, 3.0, 2.0]));
        assert_eq!(Polynomial::from_real(&[0.0, 0.0, 5.0, 1.0]).low_order_zeros(), 2);
    }

    #[test]
    fn ext_recip() {
        assert_eq!(ExtComplex::Infinity.recip(), ExtComplex::finite(0.0, 0.0));
        assert_eq!(ExtComplex::finite(0.0, 0.0).recip(), ExtComplex::Infinity);
        assert_eq!(ExtComplex::finite(2.0, 0.0).recip(), ExtComplex::finite(0.5, 0.0));
    }
}
