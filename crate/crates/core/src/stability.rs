//! Stability regions of the strange fixed points `z = 1` and `z = -1` for families whose
//! coefficients depend linearly on one parameter.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{local_derivative, AnalysisError};
use crate::builder::{catalog, BuildError, MethodKind};
use crate::conjugate::{
    conjugated_operator, extract_normal_form, normal_form_map, ConjugateError, Mobius, OperatorForm,
};
use crate::poly::{Complex, ExtComplex, RationalMap};

/// Width of the band around a region boundary reported as [`Verdict::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-6;
/// Tolerance of the linearity certificate.
pub const LINEARITY_TOL: f64 = 1e-8;
/// `|O'| ≤ ORACLE_SUPERATTRACTING` counts as superattracting in [`classify_strange_at`].
pub const ORACLE_SUPERATTRACTING: f64 = 1e-9;
/// `||O'| - 1| ≤ ORACLE_INDIFFERENT` counts as indifferent in [`classify_strange_at`].
pub const ORACLE_INDIFFERENT: f64 = 1e-8;

const SAMPLE_POINTS: [f64; 5] = [0.0, 1.0, 0.37, 1.29, -0.53];
const CERTIFY_POINTS: [(f64, f64); 2] = [(0.0, 1.0), (0.61, -0.47)];
const REAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("coefficients do not depend linearly on the parameter")]
    NonlinearDependence,
    #[error("linear coefficients are not real")]
    NonRealCoefficients,
    #[error("family changes shape: expected k = {expected}, found (n, k) = ({n}, {k})")]
    ShapeChanged { expected: usize, n: usize, k: usize },
    #[error("family could not be evaluated at enough parameters: {0}")]
    Family(String),
    #[error("the multiplier denominator vanishes for every parameter")]
    DegenerateFamily,
    #[error("target is not a fixed point of the operator")]
    NotAFixedPoint,
    #[error("family `{0}` does not have exactly one parameter")]
    NotOneParameter(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Conjugate(#[from] ConjugateError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    #[serde(rename = "z=1")]
    One,
    #[serde(rename = "z=-1")]
    MinusOne,
}

impl Target {
    pub fn point(self) -> Complex {
        match self {
            Target::One => Complex::new(1.0, 0.0),
            Target::MinusOne => Complex::new(-1.0, 0.0),
        }
    }
}

/// `a_j(α) = A_j + B_j α` for `j = 1..k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearCoeffs {
    pub n: usize,
    pub k: usize,
    pub a_coef: Vec<f64>,
    pub b_coef: Vec<f64>,
}

/// The four sums whose ratio `(X + αY)/(X' + αY')` is the multiplier at the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregates {
    pub x: f64,
    pub y: f64,
    pub xp: f64,
    pub yp: f64,
}

impl Aggregates {
    pub fn multiplier(&self, alpha: Complex) -> Complex {
        (alpha * self.y + self.x) / (alpha * self.yp + self.xp)
    }
}

impl LinearCoeffs {
    pub fn coefficients(&self, alpha: Complex) -> Vec<Complex> {
        self.a_coef.iter().zip(&self.b_coef).map(|(a, b)| alpha * b + a).collect()
    }

    fn aggregates(&self, alternate: bool) -> Aggregates {
        let nk = (self.n + self.k) as f64;
        let mut g = Aggregates { x: nk, y: 0.0, xp: 1.0, yp: 0.0 };
        for j in 1..=self.k {
            let s = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
            let w = s * (nk - 2.0 * j as f64);
            g.x += w * self.a_coef[j - 1];
            g.y += w * self.b_coef[j - 1];
            g.xp += s * self.a_coef[j - 1];
            g.yp += s * self.b_coef[j - 1];
        }
        g
    }

    /// `A, B, A', B'`.
    pub fn z1_aggregates(&self) -> Aggregates {
        self.aggregates(false)
    }

    /// `C, D, C', D'`.
    pub fn zm1_aggregates(&self) -> Aggregates {
        self.aggregates(true)
    }
}

fn coeff_close(a: Complex, b: Complex) -> bool {
    (a - b).norm() <= LINEARITY_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Recover `A_j`, `B_j` from a one-parameter family of normal forms and certify linearity.
///
/// The family is sampled at two real parameters (`0` and `1` unless the form is
/// unavailable or changes shape there) and checked at `α = i` and one more complex point.
pub fn linearize<F>(family: F, k: usize) -> Result<LinearCoeffs, StabilityError>
where
    F: Fn(Complex) -> Result<OperatorForm, ConjugateError>,
{
    let mut samples: Vec<(f64, OperatorForm)> = Vec::new();
    let mut last_err = None;
    for &t in &SAMPLE_POINTS {
        match family(Complex::new(t, 0.0)) {
            Ok(f) if f.k == k => samples.push((t, f)),
            Ok(f) => last_err = Some(StabilityError::ShapeChanged { expected: k, n: f.n, k: f.k }),
            Err(e) => last_err = Some(StabilityError::Family(e.to_string())),
        }
        if samples.len() == 2 {
            break;
        }
    }
    if samples.len() < 2 {
        return Err(last_err.unwrap_or_else(|| StabilityError::Family("no samples".into())));
    }
    let (t0, f0) = &samples[0];
    let (t1, f1) = &samples[1];
    if f0.n != f1.n {
        return Err(StabilityError::ShapeChanged { expected: k, n: f1.n, k: f1.k });
    }
    let mut a_coef = Vec::with_capacity(k);
    let mut b_coef = Vec::with_capacity(k);
    for j in 0..k {
        let b = (f1.a[j] - f0.a[j]) / (t1 - t0);
        let a = f0.a[j] - b * *t0;
        let scale = 1.0 + a.norm() + b.norm();
        if a.im.abs() > REAL_TOL * scale || b.im.abs() > REAL_TOL * scale {
            return Err(StabilityError::NonRealCoefficients);
        }
        a_coef.push(a.re);
        b_coef.push(b.re);
    }
    let lc = LinearCoeffs { n: f0.n, k, a_coef, b_coef };
    for &(re, im) in &CERTIFY_POINTS {
        let alpha = Complex::new(re, im);
        let f = family(alpha).map_err(|_| StabilityError::NonlinearDependence)?;
        if f.k != k || f.n != lc.n {
            return Err(StabilityError::NonlinearDependence);
        }
        let predicted = lc.coefficients(alpha);
        if !predicted.iter().zip(&f.a).all(|(p, q)| coeff_close(*p, *q)) {
            return Err(StabilityError::NonlinearDependence);
        }
    }
    Ok(lc)
}

/// The one-parameter family of normal forms of a catalog method on `z^2 - c`.
///
/// Post-conjugation entries keep their stored coefficients without cancelling common factors.
pub fn method_family(
    name: &str,
    c: Complex,
) -> Result<impl Fn(Complex) -> Result<OperatorForm, ConjugateError>, StabilityError> {
    let entry = catalog(name)?;
    if entry.params.len() != 1 {
        return Err(StabilityError::NotOneParameter(name.to_string()));
    }
    Ok(move |alpha: Complex| match entry.kind {
        MethodKind::Scheme(_) => extract_normal_form(&conjugated_operator(entry, &[alpha], c)?),
        MethodKind::PostConjugation(_) => {
            let spec = entry.form(&[alpha])?;
            OperatorForm::new(spec.n, spec.a)
        }
    })
}

/// A parameter-to-operator map for a one-parameter catalog method on `z^2 - c`, for sweeps.
///
/// Families that linearize are rebuilt from `A_j + B_j α`; post-conjugation entries use
/// their stored form and other schemes are instantiated and conjugated at every parameter.
/// Parameters where the operator does not exist give `None`.
pub fn operator_family(
    name: &str,
    c: Complex,
) -> Result<Box<dyn Fn(Complex) -> Option<RationalMap> + Send + Sync>, StabilityError> {
    let entry = catalog(name)?;
    if entry.params.len() != 1 {
        return Err(StabilityError::NotOneParameter(name.to_string()));
    }
    let family = method_family(name, c)?;
    let shape = SAMPLE_POINTS.iter().find_map(|&t| family(Complex::new(t, 0.0)).ok());
    if let Some(f) = shape {
        if let Ok(lc) = linearize(&family, f.k) {
            return Ok(Box::new(move |alpha| normal_form_map(lc.n, &lc.coefficients(alpha), 1).ok()));
        }
    }
    Ok(match entry.kind {
        MethodKind::PostConjugation(_) => Box::new(move |alpha| {
            let spec = entry.form(&[alpha]).ok()?;
            normal_form_map(spec.n, &spec.a, 1).ok()
        }),
        MethodKind::Scheme(_) => Box::new(move |alpha| conjugated_operator(entry, &[alpha], c).ok()),
    })
}

/// The M4 family in the coordinate `α = (5β - 1)/β`, where its last coefficient is `α`.
pub fn m4_alpha_family(alpha: Complex) -> Result<OperatorForm, ConjugateError> {
    let re = |x: f64| Complex::new(x, 0.0);
    OperatorForm::new(4, vec![re(6.0), re(14.0), re(14.0), alpha])
}

/// `β = 1/(5 - α)`, the map from the linear M4 coordinate back to the raw one.
pub fn m4_beta_of_alpha() -> Mobius {
    let re = |x: f64| Complex::new(x, 0.0);
    Mobius::new(re(0.0), re(1.0), re(-1.0), re(5.0)).expect("nonsingular")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    Circle,
    HalfPlane,
    Constant,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttractingSide {
    Inside,
    Outside,
    /// `Re α` below the threshold.
    Left,
    /// `Re α` above the threshold.
    Right,
    Everywhere,
    EverywhereSuperattracting,
    /// Indifferent for every parameter.
    Boundary,
    Nowhere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Attracting,
    Repelling,
    Boundary,
    NotFixed,
}

/// Where the target fixed point attracts, in the parameter plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRegion {
    pub target: Target,
    pub kind: RegionKind,
    pub center: Complex,
    pub radius: f64,
    /// Real-part threshold of a half-plane.
    pub threshold: Option<f64>,
    pub side: AttractingSide,
    pub superattracting: Option<Complex>,
    pub aggregates: Option<Aggregates>,
}

impl StabilityRegion {
    fn new(target: Target, kind: RegionKind, side: AttractingSide, g: Option<Aggregates>) -> Self {
        StabilityRegion {
            target,
            kind,
            center: Complex::new(0.0, 0.0),
            radius: 0.0,
            threshold: None,
            side,
            superattracting: None,
            aggregates: g,
        }
    }

    /// The region's verdict at `alpha`; within [`BOUNDARY_BAND`] of the boundary it is `Boundary`.
    pub fn classify(&self, alpha: Complex) -> Verdict {
        let signed = match self.kind {
            RegionKind::NotApplicable => return Verdict::NotFixed,
            RegionKind::Constant => {
                return match self.side {
                    AttractingSide::Everywhere | AttractingSide::EverywhereSuperattracting => Verdict::Attracting,
                    AttractingSide::Boundary => Verdict::Boundary,
                    _ => Verdict::Repelling,
                }
            }
            RegionKind::Circle => {
                let d = (alpha - self.center).norm() - self.radius;
                if self.side == AttractingSide::Inside {
                    -d
                } else {
                    d
                }
            }
            RegionKind::HalfPlane => {
                let d = alpha.re - self.threshold.unwrap_or(0.0);
                if self.side == AttractingSide::Left {
                    -d
                } else {
                    d
                }
            }
        };
        if signed.abs() <= BOUNDARY_BAND {
            Verdict::Boundary
        } else if signed > 0.0 {
            Verdict::Attracting
        } else {
            Verdict::Repelling
        }
    }

    /// Image of a circular boundary under `m`, and the attracting side after mapping.
    pub fn circle_image(&self, m: &Mobius) -> Option<MappedBoundary> {
        if self.kind != RegionKind::Circle {
            return None;
        }
        let on = |t: f64| m.apply(ExtComplex::Finite(self.center + Complex::from_polar(self.radius, t)));
        let pts = [on(0.3), on(2.4), on(4.4)];
        let probe = m.apply(ExtComplex::Finite(self.center));
        let inside_is_attracting = self.side == AttractingSide::Inside;
        match (pts[0].as_finite(), pts[1].as_finite(), pts[2].as_finite()) {
            (Some(p), Some(q), Some(r)) => match circumcircle(p, q, r) {
                Some((center, radius)) => {
                    let probe_inside = match probe.as_finite() {
                        Some(z) => (z - center).norm() < radius,
                        None => false,
                    };
                    let side = if probe_inside == inside_is_attracting {
                        AttractingSide::Inside
                    } else {
                        AttractingSide::Outside
                    };
                    Some(MappedBoundary::Circle { center, radius, side })
                }
                None => Some(MappedBoundary::Line { point: p, direction: (q - p) / (q - p).norm() }),
            },
            _ => {
                let finite: Vec<Complex> = pts.iter().filter_map(|z| z.as_finite()).collect();
                let p = finite[0];
                let q = finite[1];
                Some(MappedBoundary::Line { point: p, direction: (q - p) / (q - p).norm() })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "shape")]
pub enum MappedBoundary {
    Circle { center: Complex, radius: f64, side: AttractingSide },
    Line { point: Complex, direction: Complex },
}

fn circumcircle(p: Complex, q: Complex, r: Complex) -> Option<(Complex, f64)> {
    let (b, c) = (q - p, r - p);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    if d.abs() <= 1e-14 * (b.norm() * c.norm()).max(1e-300) {
        return None;
    }
    let (bb, cc) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * bb - b.im * cc) / d;
    let uy = (b.re * cc - c.re * bb) / d;
    let u = Complex::new(ux, uy);
    Some((p + u, u.norm()))
}

fn region_from(target: Target, g: Aggregates) -> Result<StabilityRegion, StabilityError> {
    let Aggregates { x, y, xp, yp } = g;
    let scale = 1.0 + x.abs() + y.abs() + xp.abs() + yp.abs();
    let zero = |v: f64| v.abs() <= 1e-12 * scale;
    if zero(xp) && zero(yp) {
        return Err(StabilityError::DegenerateFamily);
    }
    let superattracting = if zero(y) { None } else { Some(Complex::new(-x / y, 0.0)) };
    let constant = |ratio: f64| {
        let side = if ratio <= 1e-12 {
            AttractingSide::EverywhereSuperattracting
        } else if (ratio - 1.0).abs() <= 1e-12 {
            AttractingSide::Boundary
        } else if ratio < 1.0 {
            AttractingSide::Everywhere
        } else {
            AttractingSide::Nowhere
        };
        StabilityRegion::new(target, RegionKind::Constant, side, Some(g))
    };
    if zero(y) && zero(yp) {
        return Ok(constant(x.abs() / xp.abs()));
    }
    if zero(xp * y - x * yp) {
        // numerator and denominator are proportional
        let ratio = if zero(yp) { x.abs() / xp.abs() } else { y.abs() / yp.abs() };
        let mut region = constant(ratio);
        if ratio > 1e-12 {
            region.superattracting = None;
        }
        return Ok(region);
    }
    let d2 = y * y - yp * yp;
    let mut region = if !zero(d2) {
        let c = (x * y - xp * yp) / d2;
        let r = (xp * y - x * yp) / d2;
        let side = if d2 > 0.0 { AttractingSide::Inside } else { AttractingSide::Outside };
        let mut reg = StabilityRegion::new(target, RegionKind::Circle, side, Some(g));
        reg.center = Complex::new(-c, 0.0);
        reg.radius = r.abs();
        reg
    } else if zero(y - yp) {
        if zero(x - xp) {
            return Ok(constant(1.0));
        }
        let threshold = -(x + xp) / (2.0 * y);
        let side = if (x - xp) * y > 0.0 { AttractingSide::Left } else { AttractingSide::Right };
        let mut reg = StabilityRegion::new(target, RegionKind::HalfPlane, side, Some(g));
        reg.threshold = Some(threshold);
        reg
    } else {
        if zero(x + xp) {
            return Ok(constant(1.0));
        }
        let threshold = (xp - x) / (2.0 * y);
        let side = if (x + xp) * y > 0.0 { AttractingSide::Left } else { AttractingSide::Right };
        let mut reg = StabilityRegion::new(target, RegionKind::HalfPlane, side, Some(g));
        reg.threshold = Some(threshold);
        reg
    };
    region.superattracting = superattracting;
    Ok(region)
}

/// Where `z = 1` attracts, from `A, B, A', B'`.
pub fn stability_region_z1(lc: &LinearCoeffs) -> Result<StabilityRegion, StabilityError> {
    region_from(Target::One, lc.z1_aggregates())
}

/// Where `z = -1` attracts, from `C, D, C', D'`; not applicable when `n + k` is even.
pub fn stability_region_zm1(lc: &LinearCoeffs) -> Result<StabilityRegion, StabilityError> {
    if (lc.n + lc.k).is_multiple_of(2) {
        return Ok(StabilityRegion::new(Target::MinusOne, RegionKind::NotApplicable, AttractingSide::Nowhere, None));
    }
    region_from(Target::MinusOne, lc.zm1_aggregates())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrangeClass {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl StrangeClass {
    /// The region verdict this class corresponds to.
    pub fn verdict(self) -> Verdict {
        match self {
            StrangeClass::Superattracting | StrangeClass::Attracting => Verdict::Attracting,
            StrangeClass::Indifferent => Verdict::Boundary,
            StrangeClass::Repelling => Verdict::Repelling,
        }
    }
}

/// `|O'(target)|` evaluated directly on the operator.
pub fn strange_multiplier(form: &OperatorForm, target: Target) -> Result<Complex, StabilityError> {
    let r = form.map()?;
    let z = target.point();
    match r.eval(ExtComplex::Finite(z)).as_finite() {
        Some(w) if (w - z).norm() <= 1e-9 => {}
        _ => return Err(StabilityError::NotAFixedPoint),
    }
    Ok(local_derivative(&r, ExtComplex::Finite(z))?)
}

/// Classify the target fixed point by its multiplier.
pub fn classify_strange_at(form: &OperatorForm, target: Target) -> Result<StrangeClass, StabilityError> {
    let m = strange_multiplier(form, target)?.norm();
    Ok(if m <= ORACLE_SUPERATTRACTING {
        StrangeClass::Superattracting
    } else if (m - 1.0).abs() <= ORACLE_INDIFFERENT {
        StrangeClass::Indifferent
    } else if m < 1.0 {
        StrangeClass::Attracting
    } else {
        StrangeClass::Repelling
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn one() -> Complex {
        c(1.0, 0.0)
    }

    fn near(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + b.abs())
    }

    #[test]
    fn chebyshev_halley_circle() {
        let lc = linearize(method_family("chebyshev-halley", one()).unwrap(), 1).unwrap();
        assert_eq!((lc.n, lc.k), (3, 1));
        assert!(near(lc.a_coef[0], 2.0) && near(lc.b_coef[0], -2.0), "{lc:?}");
        let g = lc.z1_aggregates();
        assert!(near(g.x, 8.0) && near(g.y, -4.0) && near(g.xp, 3.0) && near(g.yp, -2.0));
        let r = stability_region_z1(&lc).unwrap();
        assert_eq!((r.kind, r.side), (RegionKind::Circle, AttractingSide::Inside));
        assert!(near(r.center.re, 13.0 / 6.0) && near(r.radius, 1.0 / 3.0));
        assert!(near(r.superattracting.unwrap().re, 2.0));
        assert_eq!(stability_region_zm1(&lc).unwrap().kind, RegionKind::NotApplicable);
    }

    #[test]
    fn king_circle() {
        let lc = linearize(method_family("king", one()).unwrap(), 2).unwrap();
        assert!(near(lc.a_coef[0], 4.0) && near(lc.b_coef[0], 1.0));
        assert!(near(lc.a_coef[1], 5.0) && near(lc.b_coef[1], 2.0));
        let r = stability_region_z1(&lc).unwrap();
        assert!(near(r.center.re, -226.0 / 55.0) && near(r.radius, 16.0 / 55.0));
        assert_eq!(r.side, AttractingSide::Inside);
        assert!(near(r.superattracting.unwrap().re, -4.0));
    }

    #[test]
    fn c_family_outside() {
        let lc = linearize(method_family("c-family", one()).unwrap(), 3).unwrap();
        let r = stability_region_z1(&lc).unwrap();
        assert_eq!(r.side, AttractingSide::Outside);
        assert!(near(r.center.re, 3.0) && near(r.radius, 8.0), "{r:?}");
        assert_eq!(r.classify(c(12.0, 0.0)), Verdict::Attracting);
        assert_eq!(r.classify(c(3.0, 1.0)), Verdict::Repelling);
    }

    #[test]
    fn os4_superattracting_everywhere() {
        let lc = linearize(method_family("os4", one()).unwrap(), 4).unwrap();
        let r = stability_region_z1(&lc).unwrap();
        assert_eq!(r.side, AttractingSide::EverywhereSuperattracting);
    }

    #[test]
    fn os3_is_nonlinear_and_os5_degenerate() {
        let e = linearize(method_family("os3", one()).unwrap(), 4).unwrap_err();
        assert_eq!(e, StabilityError::NonlinearDependence);
        let lc = linearize(method_family("os5", one()).unwrap(), 4).unwrap();
        assert_eq!(stability_region_z1(&lc), Err(StabilityError::DegenerateFamily));
    }

    #[test]
    fn synthetic_minus_one_half_plane() {
        let fam = |a: Complex| OperatorForm::new(2, vec![a]);
        let lc = linearize(fam, 1).unwrap();
        let g = lc.zm1_aggregates();
        assert!(near(g.x, 3.0) && near(g.y, -1.0) && near(g.xp, 1.0) && near(g.yp, -1.0));
        let r = stability_region_zm1(&lc).unwrap();
        assert_eq!((r.kind, r.side), (RegionKind::HalfPlane, AttractingSide::Right));
        assert!(near(r.threshold.unwrap(), 2.0));
        let constant = |_: Complex| OperatorForm::new(2, vec![c(5.0, 0.0)]);
        let lc = linearize(constant, 1).unwrap();
        let r = stability_region_zm1(&lc).unwrap();
        assert_eq!(r.kind, RegionKind::Constant);
        assert_eq!(r.side, AttractingSide::Everywhere);
        let form = OperatorForm::new(2, vec![c(5.0, 0.0)]).unwrap();
        assert_eq!(classify_strange_at(&form, Target::MinusOne).unwrap(), StrangeClass::Attracting);
    }

    #[test]
    fn oracle_examples() {
        let f = |a: f64| method_family("chebyshev-halley", one()).unwrap()(c(a, 0.0)).unwrap();
        assert_eq!(classify_strange_at(&f(2.0), Target::One).unwrap(), StrangeClass::Superattracting);
        assert_eq!(classify_strange_at(&f(0.0), Target::One).unwrap(), StrangeClass::Repelling);
        assert_eq!(classify_strange_at(&f(13.0 / 6.0 + 1.0 / 3.0), Target::One).unwrap(), StrangeClass::Indifferent);
        assert_eq!(classify_strange_at(&f(0.0), Target::MinusOne), Err(StabilityError::NotAFixedPoint));
    }

    #[test]
    fn m4_region_in_beta() {
        let lc = linearize(m4_alpha_family, 4).unwrap();
        let r = stability_region_z1(&lc).unwrap();
        let m = m4_beta_of_alpha();
        let img = r.circle_image(&m).unwrap();
        let raw = method_family("m4", one()).unwrap();
        for &alpha in &[c(r.center.re + 0.5 * r.radius, 0.2), c(r.center.re + 2.0 * r.radius + 1.0, 0.3)] {
            let beta = m.apply(ExtComplex::Finite(alpha)).as_finite().unwrap();
            let class = classify_strange_at(&raw(beta).unwrap(), Target::One).unwrap().verdict();
            let MappedBoundary::Circle { center, radius, side } = &img else { panic!("{img:?}") };
            let inside = (beta - center).norm() < *radius;
            let attracting = inside == (*side == AttractingSide::Inside);
            assert_eq!(class == Verdict::Attracting, attracting, "{alpha} {beta}");
        }
    }

    #[test]
    fn operator_family_matches_conjugation() {
        for name in ["chebyshev-halley", "king", "amat", "os3", "chun"] {
            let fam = operator_family(name, one()).unwrap();
            let entry = catalog(name).unwrap();
            let alpha = c(0.7, -0.4);
            let direct = conjugated_operator(entry, &[alpha], one()).unwrap();
            assert!(fam(alpha).unwrap().approx_eq(&direct, 1e-9), "{name}");
        }
    }
}
