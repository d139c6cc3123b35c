//! Fixed points, critical points, multipliers and the coefficient–root identities.

use serde::Serialize;
use thiserror::Error;

use crate::conjugate::{mobius_conjugate, ConjugateError, Mobius, OperatorForm};
use crate::poly::{rat_make, root_clusters, Complex, ExtComplex, PolyError, Polynomial, RationalMap};

/// `|λ| ≤ SUPERATTRACTING_TOL` counts as superattracting.
pub const SUPERATTRACTING_TOL: f64 = 1e-10;
/// `||λ| - 1| ≤ INDIFFERENT_BAND` counts as indifferent.
pub const INDIFFERENT_BAND: f64 = 1e-8;
/// Tolerance for `R(z) = z` and for cycle membership.
pub const FIXED_TOL: f64 = 1e-8;
/// Largest denominator tried when matching an indifferent multiplier to a root of unity.
const PARABOLIC_MAX_Q: u32 = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("points do not form a cycle of the map")]
    NotACycle,
    #[error("P(1) = 0")]
    PoleAtOne,
    #[error("P(-1) = 0")]
    PoleAtMinusOne,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Conjugate(#[from] ConjugateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedClass {
    Superattracting,
    Attracting,
    Indifferent,
    ParabolicCandidate,
    Repelling,
}

/// Classify a multiplier with the superattracting threshold and the indifference band.
pub fn classify_multiplier(lambda: Complex) -> FixedClass {
    let m = lambda.norm();
    if m <= SUPERATTRACTING_TOL {
        FixedClass::Superattracting
    } else if (m - 1.0).abs() <= INDIFFERENT_BAND {
        let turns = lambda.arg() / std::f64::consts::TAU;
        let rational = (1..=PARABOLIC_MAX_Q).any(|q| {
            let x = turns * q as f64;
            (x - x.round()).abs() <= INDIFFERENT_BAND * q as f64
        });
        if rational {
            FixedClass::ParabolicCandidate
        } else {
            FixedClass::Indifferent
        }
    } else if m < 1.0 {
        FixedClass::Attracting
    } else {
        FixedClass::Repelling
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointRecord {
    pub point: ExtComplex,
    pub multiplicity: usize,
    pub multiplier: Complex,
    pub class: FixedClass,
    /// Not one of the images `0`, `∞` of the roots.
    pub strange: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointRecord {
    pub point: ExtComplex,
    pub multiplicity: usize,
    pub free: bool,
    /// The critical point at `1/κ`, when there is one.
    pub partner: Option<ExtComplex>,
}

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

fn is_origin(z: Complex) -> bool {
    z.norm() <= 1e-12
}

/// `w ↦ 1/R(1/w)`, the map in the chart at infinity.
pub fn chart_at_infinity(r: &RationalMap) -> Result<RationalMap, AnalysisError> {
    Ok(mobius_conjugate(r, &Mobius::iota())?)
}

/// Derivative of `R` at `z` read in the charts `w = 1/z` wherever the source or the image is `∞`.
pub fn local_derivative(r: &RationalMap, z: ExtComplex) -> Result<Complex, AnalysisError> {
    let image = r.eval(z);
    let src_inf = z.is_infinite();
    let dst_inf = image.is_infinite();
    let iota = rat_make(Polynomial::one(), Polynomial::z())?;
    let mut m = r.clone();
    if src_inf {
        m = m.compose(&iota)?;
    }
    if dst_inf {
        m = iota.compose(&m)?;
    }
    let at = if src_inf { zero() } else { z.as_finite().unwrap_or_default() };
    Ok(m.derivative()?.eval_c(at))
}

/// Fixed points of `R` with multipliers and classes.
///
/// Finite ones are the roots of `num - z·den`; `∞` is fixed when `deg num > deg den`.
pub fn fixed_points(r: &RationalMap) -> Result<Vec<FixedPointRecord>, AnalysisError> {
    let g = r.num().sub(&r.den().shift_up(1));
    let mut out = Vec::new();
    if !g.is_zero() && g.deg() >= 1 {
        for k in root_clusters(&g)? {
            let z = ExtComplex::Finite(k.center);
            let lambda = local_derivative(r, z)?;
            out.push(FixedPointRecord {
                point: z,
                multiplicity: k.multiplicity,
                multiplier: lambda,
                class: classify_multiplier(lambda),
                strange: !is_origin(k.center),
            });
        }
    }
    if r.num().deg() > r.den().deg() {
        let lambda = local_derivative(r, ExtComplex::Infinity)?;
        out.push(FixedPointRecord {
            point: ExtComplex::Infinity,
            multiplicity: 1,
            multiplier: lambda,
            class: classify_multiplier(lambda),
            strange: false,
        });
    }
    Ok(out)
}

/// Zeros of `N'D - ND'`, the finite critical points including multiple poles.
fn wronskian(r: &RationalMap) -> Polynomial {
    let (n, d) = (r.num(), r.den());
    n.derivative().mul(d).sub(&n.mul(&d.derivative()))
}

/// Critical points of `R` with multiplicity; `∞` is read in the chart `w = 1/z`.
///
/// Multiplicities add up to `2 deg R - 2`.
pub fn critical_points(r: &RationalMap) -> Result<Vec<CriticalPointRecord>, AnalysisError> {
    let mut pts: Vec<(ExtComplex, usize)> = Vec::new();
    let w = wronskian(r);
    if !w.is_zero() && w.deg() >= 1 {
        for k in root_clusters(&w)? {
            let z = if is_origin(k.center) { zero() } else { k.center };
            pts.push((ExtComplex::Finite(z), k.multiplicity));
        }
    }
    let at_inf = wronskian(&chart_at_infinity(r)?).low_order_zeros();
    if at_inf > 0 {
        pts.push((ExtComplex::Infinity, at_inf));
    }
    let records = pts
        .iter()
        .map(|&(point, multiplicity)| {
            let free = match point {
                ExtComplex::Infinity => false,
                ExtComplex::Finite(z) => !is_origin(z),
            };
            let partner = if free {
                let target = point.recip();
                pts.iter().map(|(q, _)| *q).find(|q| q.approx_eq(&target, 1e-6))
            } else {
                None
            };
            CriticalPointRecord { point, multiplicity, free, partner }
        })
        .collect();
    Ok(records)
}

/// Product of the derivatives along a cycle, charted at `∞`.
pub fn multiplier_of_cycle(r: &RationalMap, cycle: &[ExtComplex]) -> Result<Complex, AnalysisError> {
    if cycle.is_empty() {
        return Err(AnalysisError::NotACycle);
    }
    let mut product = Complex::new(1.0, 0.0);
    for (i, &z) in cycle.iter().enumerate() {
        let next = cycle[(i + 1) % cycle.len()];
        let image = r.eval(z);
        let close = match (image, next) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => true,
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => (a - b).norm() <= FIXED_TOL * (1.0 + b.norm()),
            // compare near ∞ in the chart
            (a, b) => a.recip().approx_eq(&b.recip(), FIXED_TOL),
        };
        if !close {
            return Err(AnalysisError::NotACycle);
        }
        product *= local_derivative(r, z)?;
    }
    Ok(product)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoebiusSign {
    Plus,
    Minus,
}

/// Closed form of `Σ (1 + r_j)/(1 - r_j)` (sign `+`) or `Σ (1 - r_j)/(1 + r_j)` (sign `-`)
/// over the roots of `P(z) = a_k + … + a_1 z^(k-1) + z^k`, from `a = [a_1, …, a_k]`.
pub fn moebius_sum(a: &[Complex], sign: MoebiusSign) -> Result<Complex, AnalysisError> {
    let k = a.len() as f64;
    let s = match sign {
        MoebiusSign::Plus => 1.0,
        MoebiusSign::Minus => -1.0,
    };
    let mut weighted = zero();
    let mut total = Complex::new(1.0, 0.0);
    let mut scale = 1.0;
    let mut pow = 1.0;
    for (j, aj) in a.iter().enumerate() {
        pow *= s;
        weighted += aj * (pow * (j + 1) as f64);
        total += aj * pow;
        scale += aj.norm();
    }
    if total.norm() <= 1e-14 * scale {
        return Err(match sign {
            MoebiusSign::Plus => AnalysisError::PoleAtOne,
            MoebiusSign::Minus => AnalysisError::PoleAtMinusOne,
        });
    }
    Ok(Complex::new(k, 0.0) - weighted * 2.0 / total)
}

/// What happens at `z = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinusOneStatus {
    /// `-1` is a fixed point.
    Fixed,
    /// `-1 ↦ 1` and `1` is fixed.
    PreimageOfOne,
    /// `{1, -1}` is a 2-cycle.
    TwoCycle,
    /// `1 ↦ -1` and `-1` is fixed.
    OneIsPreimageOfMinusOne,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorReport {
    /// Order of convergence at `0` and `∞`.
    pub n: usize,
    pub k: usize,
    pub sign: i8,
    pub degenerate: bool,
    /// `n + k` before any degenerate cancellation.
    pub n_plus_k_original: usize,
    pub minus_one: MinusOneStatus,
    pub one_is_fixed: bool,
    pub strange_fixed_points: Vec<FixedPointRecord>,
    /// Multiplier of the 2-cycle `{1, -1}` when there is one.
    pub two_cycle_multiplier: Option<Complex>,
}

/// Structural report of a normal-form operator.
pub fn classify_operator(form: &OperatorForm) -> Result<OperatorReport, AnalysisError> {
    let r = form.map()?;
    let one = Complex::new(1.0, 0.0);
    let near = |a: Complex, b: Complex| (a - b).norm() <= FIXED_TOL;
    let at_one = r.eval_c(one);
    let at_minus = r.eval_c(-one);
    let one_fixed = near(at_one, one);
    let minus_one = if near(at_minus, -one) && one_fixed {
        MinusOneStatus::Fixed
    } else if near(at_minus, one) && one_fixed {
        MinusOneStatus::PreimageOfOne
    } else if near(at_minus, one) && near(at_one, -one) {
        MinusOneStatus::TwoCycle
    } else if near(at_one, -one) && near(at_minus, -one) {
        MinusOneStatus::OneIsPreimageOfMinusOne
    } else {
        MinusOneStatus::Other
    };
    let two_cycle_multiplier = if minus_one == MinusOneStatus::TwoCycle {
        Some(multiplier_of_cycle(&r, &[ExtComplex::Finite(one), ExtComplex::Finite(-one)])?)
    } else {
        None
    };
    let n_plus_k_original = form.n + form.k + usize::from(form.sign < 0);
    let strange_fixed_points = fixed_points(&r)?.into_iter().filter(|f| f.strange).collect();
    Ok(OperatorReport {
        n: form.n,
        k: form.k,
        sign: form.sign,
        degenerate: form.degenerate,
        n_plus_k_original,
        minus_one,
        one_is_fixed: one_fixed,
        strange_fixed_points,
        two_cycle_multiplier,
    })
}
