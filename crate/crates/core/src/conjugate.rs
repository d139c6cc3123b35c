//! Möbius conjugation to the palindromic normal form `z^n P(z) / P̂(z)`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::builder::{catalog, instantiate, BuildError, MethodCatalogEntry, MethodKind, SchemeContext};
use crate::poly::homogeneous_poly;
use crate::poly::{poly_roots, rat_make, Complex, ExtComplex, PolyError, Polynomial, RationalMap};

/// Relative tolerance on mirrored coefficients.
pub const PALINDROME_TOL: f64 = 1e-9;
/// Tolerance for the fixed-point checks at `0`, `1` and `∞`.
pub const FIX_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConjugateError {
    #[error("c must be nonzero")]
    ZeroC,
    #[error("singular Möbius matrix")]
    SingularMobius,
    #[error("map does not fix 0, 1 and infinity")]
    NotFixingOneZeroInfinity,
    #[error("map is not palindromic: {0}")]
    NotPalindromic(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `z ↦ (a z + b) / (c z + d)` with `ad - bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

fn one() -> Complex {
    Complex::new(1.0, 0.0)
}

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

impl Mobius {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, ConjugateError> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(ConjugateError::SingularMobius);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Mobius { a: one(), b: zero(), c: zero(), d: one() }
    }

    /// `ι(z) = 1/z`.
    pub fn iota() -> Self {
        Mobius { a: zero(), b: one(), c: one(), d: zero() }
    }

    /// `ς(z) = -z`.
    pub fn varsigma() -> Self {
        Mobius { a: -one(), b: zero(), c: zero(), d: one() }
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Self {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn apply(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Infinity => {
                if self.c.norm() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Largest entry distance after scaling both matrices to unit determinant.
    pub fn distance(&self, other: &Mobius) -> f64 {
        let s1 = self.determinant().sqrt();
        let s2 = other.determinant().sqrt();
        let e1 = [self.a / s1, self.b / s1, self.c / s1, self.d / s1];
        let e2 = [other.a / s2, other.b / s2, other.c / s2, other.d / s2];
        let plus = e1.iter().zip(&e2).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let minus = e1.iter().zip(&e2).map(|(x, y)| (x + y).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }
}

/// `τ(z) = (z + √c)/(z - √c)`, principal branch: `√c ↦ ∞`, `-√c ↦ 0`, `∞ ↦ 1`.
pub fn standard_tau(c: Complex) -> Result<Mobius, ConjugateError> {
    if c.norm() == 0.0 {
        return Err(ConjugateError::ZeroC);
    }
    let s = c.sqrt();
    Mobius::new(one(), s, one(), -s)
}

/// `M ∘ R ∘ M⁻¹`, by homogeneous composition.
pub fn mobius_conjugate(r: &RationalMap, m: &Mobius) -> Result<RationalMap, ConjugateError> {
    let inv = m.inverse();
    let deg = r.degree();
    let an = Polynomial::new(vec![inv.b, inv.a]);
    let ad = Polynomial::new(vec![inv.d, inv.c]);
    let n1 = homogeneous_poly(r.num(), deg, &an, &ad);
    let d1 = homogeneous_poly(r.den(), deg, &an, &ad);
    let num = n1.scale(m.a).add(&d1.scale(m.b));
    let den = n1.scale(m.c).add(&d1.scale(m.d));
    Ok(rat_make(num, den)?)
}

/// The operator `sign · z^n P(z)/P̂(z)` with `P(z) = a_k + a_(k-1) z + … + a_1 z^(k-1) + z^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorForm {
    pub n: usize,
    pub k: usize,
    /// `a_1..a_k`.
    pub a: Vec<Complex>,
    /// Roots of `P`.
    pub roots: Vec<Complex>,
    /// `+1`, or `-1` after a degenerate cancellation.
    pub sign: i8,
    /// `1 + a_1 + … + a_k = 0`, or a reduced form with sign `-1`.
    pub degenerate: bool,
}

impl OperatorForm {
    /// Build a form from coefficients, computing roots and the degenerate flag.
    pub fn new(n: usize, a: Vec<Complex>) -> Result<Self, ConjugateError> {
        Self::with_sign(n, a, 1)
    }

    pub fn with_sign(n: usize, a: Vec<Complex>, sign: i8) -> Result<Self, ConjugateError> {
        let k = a.len();
        if k > 0 && a[k - 1].norm() == 0.0 {
            return Err(ConjugateError::NotPalindromic("a_k must be nonzero".into()));
        }
        let p = p_poly(&a);
        let roots = if k == 0 { Vec::new() } else { poly_roots(&p)? };
        let sum = a.iter().fold(one(), |acc, x| acc + x);
        let scale = a.iter().fold(1.0, |acc, x| acc + x.norm());
        let degenerate = sign < 0 || sum.norm() <= PALINDROME_TOL * scale;
        Ok(OperatorForm { n, k, a, roots, sign, degenerate })
    }

    /// `P(z) = a_k + … + a_1 z^(k-1) + z^k`.
    pub fn p(&self) -> Polynomial {
        p_poly(&self.a)
    }

    /// `P̂(z) = 1 + a_1 z + … + a_k z^k`.
    pub fn p_hat(&self) -> Polynomial {
        p_hat_poly(&self.a)
    }

    pub fn coefficient_sum(&self) -> Complex {
        self.a.iter().fold(one(), |acc, x| acc + x)
    }

    /// The reduced rational map; a degenerate form loses its common factor here.
    pub fn map(&self) -> Result<RationalMap, ConjugateError> {
        normal_form_map(self.n, &self.a, self.sign)
    }

    /// `sign · z^n Π (z - r_i)/(1 - r_i z)`, evaluated from the roots.
    pub fn eval_product(&self, z: Complex) -> Complex {
        self.roots
            .iter()
            .fold(z.powu(self.n as u32) * self.sign as f64, |acc, r| acc * (z - r) / (one() - r * z))
    }
}

/// The reduced map `sign · z^n P(z)/P̂(z)` straight from coefficients, without computing roots.
pub fn normal_form_map(n: usize, a: &[Complex], sign: i8) -> Result<RationalMap, ConjugateError> {
    let num = p_poly(a).shift_up(n).scale(Complex::new(sign as f64, 0.0));
    Ok(rat_make(num, p_hat_poly(a))?)
}

fn p_poly(a: &[Complex]) -> Polynomial {
    let mut coeffs: Vec<Complex> = a.iter().rev().copied().collect();
    coeffs.push(one());
    Polynomial::new(coeffs)
}

fn p_hat_poly(a: &[Complex]) -> Polynomial {
    let mut coeffs = vec![one()];
    coeffs.extend_from_slice(a);
    Polynomial::new(coeffs)
}

impl fmt::Display for OperatorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{sign}z^{} ({}) / ({})", self.n, self.p(), self.p_hat())
    }
}

/// Read `n`, `k` and `a_1..a_k` off a map that fixes `0`, `1` (or sends it to `-1`) and `∞`.
pub fn extract_normal_form(r: &RationalMap) -> Result<OperatorForm, ConjugateError> {
    let at_zero = r.eval(ExtComplex::finite(0.0, 0.0));
    let at_inf = r.eval(ExtComplex::Infinity);
    let at_one = r.eval_c(one());
    if !at_zero.approx_eq(&ExtComplex::finite(0.0, 0.0), FIX_TOL) || !at_inf.is_infinite() {
        return Err(ConjugateError::NotFixingOneZeroInfinity);
    }
    let sign: i8 = if (at_one - 1.0).norm() <= FIX_TOL {
        1
    } else if (at_one + 1.0).norm() <= FIX_TOL {
        -1
    } else {
        return Err(ConjugateError::NotFixingOneZeroInfinity);
    };

    let n = r.num().low_order_zeros();
    let q = r.num().shift_down(n);
    let den = r.den();
    let k = q.deg();
    if den.deg() != k {
        return Err(ConjugateError::NotPalindromic(format!(
            "numerator factor has degree {k}, denominator {}",
            den.deg()
        )));
    }
    // den is normalized so its constant term is 1; the mirror of it is sign * q
    let s = Complex::new(sign as f64, 0.0);
    let scale = den.max_norm().max(q.max_norm());
    for i in 0..=k {
        let mismatch = (q.coeff(k - i) - s * den.coeff(i)).norm();
        if mismatch > PALINDROME_TOL * scale {
            return Err(ConjugateError::NotPalindromic(format!(
                "coefficient {i} differs from its mirror by {mismatch:.3e}"
            )));
        }
    }
    let a: Vec<Complex> = (1..=k).map(|i| den.coeff(i)).collect();
    OperatorForm::with_sign(n, a, sign)
}

/// Sampled test of `R(1/z) = 1/R(z)` away from zeros and poles of `R`.
pub fn check_iota_symmetry(r: &RationalMap, trials: usize) -> bool {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x10_7a);
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > 100 * trials {
            return false;
        }
        let z = Complex::from_polar(rng.gen_range(0.3..2.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let w = r.eval_c(z);
        let v = r.eval_c(z.inv());
        let ok = |x: Complex| x.re.is_finite() && x.im.is_finite() && x.norm() > 1e-6 && x.norm() < 1e6;
        if !ok(w) || !ok(v) {
            continue;
        }
        done += 1;
        if (v - w.inv()).norm() > PALINDROME_TOL * (1.0 + w.inv().norm()) {
            return false;
        }
    }
    true
}

/// Conjugated operator of a catalog method on `z^2 - c`.
///
/// Schemes are instantiated and conjugated by [`standard_tau`]; post-conjugation
/// entries are built from their stored normal form.
pub fn conjugated_operator(
    entry: &MethodCatalogEntry,
    params: &[Complex],
    c: Complex,
) -> Result<RationalMap, ConjugateError> {
    match entry.kind {
        MethodKind::Scheme(_) => {
            let r = instantiate_method(entry, params, 2, c)?;
            mobius_conjugate(&r, &standard_tau(c)?)
        }
        MethodKind::PostConjugation(_) => {
            let spec = entry.form(params)?;
            OperatorForm::new(spec.n, spec.a)?.map()
        }
    }
}

/// Instantiate a catalog scheme on `z^d - c` with positional parameter values.
pub fn instantiate_method(
    entry: &MethodCatalogEntry,
    params: &[Complex],
    d: usize,
    c: Complex,
) -> Result<RationalMap, ConjugateError> {
    let scheme = entry.scheme()?;
    if params.len() != entry.params.len() {
        return Err(BuildError::InvalidParameter(format!(
            "{} expects {} parameter(s), got {}",
            entry.name,
            entry.params.len(),
            params.len()
        ))
        .into());
    }
    let ctx = entry
        .params
        .iter()
        .zip(params)
        .fold(SchemeContext::new(d, c)?, |ctx, (name, v)| ctx.bind(name, *v));
    Ok(instantiate(&scheme, &ctx)?)
}

/// Normal form of a catalog method at the given parameters.
pub fn method_form(name: &str, params: &[Complex], c: Complex) -> Result<OperatorForm, ConjugateError> {
    let entry = catalog(name)?;
    extract_normal_form(&conjugated_operator(entry, params, c)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn tau_sends_roots_to_zero_and_infinity() {
        let t = standard_tau(c(1.0, 0.0)).unwrap();
        assert!(t.apply(ExtComplex::finite(1.0, 0.0)).is_infinite());
        assert!(t.apply(ExtComplex::finite(-1.0, 0.0)).approx_eq(&ExtComplex::finite(0.0, 0.0), 1e-15));
        assert!(t.apply(ExtComplex::Infinity).approx_eq(&ExtComplex::finite(1.0, 0.0), 1e-15));
        let t = standard_tau(c(4.0, 0.0)).unwrap();
        assert!(t.apply(ExtComplex::finite(2.0, 0.0)).is_infinite());
        let t = standard_tau(c(-1.0, 0.0)).unwrap();
        assert!(t.apply(ExtComplex::finite(0.0, 1.0)).is_infinite());
        assert_eq!(standard_tau(c(0.0, 0.0)), Err(ConjugateError::ZeroC));
        assert!(t.compose(&t.inverse()).distance(&Mobius::identity()) < 1e-12);
    }

    #[test]
    fn identity_conjugation_is_trivial() {
        let r = OperatorForm::new(3, vec![c(2.0, 0.0)]).unwrap().map().unwrap();
        let s = mobius_conjugate(&r, &Mobius::identity()).unwrap();
        assert!(s.approx_eq(&r, 1e-14));
    }

    #[test]
    fn chebyshev_at_zero() {
        let r = OperatorForm::new(3, vec![c(2.0, 0.0)]).unwrap().map().unwrap();
        let f = extract_normal_form(&r).unwrap();
        assert_eq!((f.n, f.k, f.sign, f.degenerate), (3, 1, 1, false));
        assert!((f.a[0] - 2.0).norm() < 1e-14);
        assert!((f.roots[0] + 2.0).norm() < 1e-14);
    }

    #[test]
    fn pure_power() {
        let r = RationalMap::from_poly(Polynomial::from_real(&[0.0, 0.0, 1.0]));
        let f = extract_normal_form(&r).unwrap();
        assert_eq!((f.n, f.k, f.degenerate), (2, 0, false));
    }

    #[test]
    fn degenerate_input_keeps_its_sign() {
        // z^2 (z - 1)/(1 - z)
        let raw = OperatorForm::new(2, vec![c(-1.0, 0.0)]).unwrap();
        assert!(raw.degenerate);
        let f = extract_normal_form(&raw.map().unwrap()).unwrap();
        assert_eq!((f.n, f.k, f.sign), (2, 0, -1));
        assert!(f.degenerate);
    }

    #[test]
    fn non_palindromic_rejected() {
        // fixes 0, 1 and ∞ but the coefficients are not mirrored
        let r = rat_make(
            Polynomial::from_real(&[0.0, 0.0, 2.0, 1.0, 1.0]),
            Polynomial::from_real(&[1.0, 0.5, 2.5]),
        )
        .unwrap();
        assert!(matches!(extract_normal_form(&r), Err(ConjugateError::NotPalindromic(_))));
        let r = RationalMap::from_poly(Polynomial::from_real(&[1.0, 0.0, 1.0]));
        assert_eq!(extract_normal_form(&r), Err(ConjugateError::NotFixingOneZeroInfinity));
    }

    #[test]
    fn iota_symmetry_examples() {
        let z3 = RationalMap::from_poly(Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]));
        assert!(check_iota_symmetry(&z3, 20));
        let z2p1 = RationalMap::from_poly(Polynomial::from_real(&[1.0, 0.0, 1.0]));
        assert!(!check_iota_symmetry(&z2p1, 20));
    }
}
