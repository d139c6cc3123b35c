use super::{parse_scheme, BuildError, Scheme};
use crate::poly::Complex;

/// A normal-form operator given directly by its degree `n` and coefficients `a_1..a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSpec {
    pub n: usize,
    pub a: Vec<Complex>,
}

#[derive(Debug, Clone, Copy)]
pub enum MethodKind {
    /// DSL source of a multi-step scheme.
    Scheme(&'static str),
    /// Producer of the already conjugated operator from the parameter values.
    PostConjugation(fn(&[Complex]) -> Result<FormSpec, BuildError>),
}

#[derive(Debug, Clone, Copy)]
pub struct MethodCatalogEntry {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub kind: MethodKind,
    /// Normal form `(n, k)` on `z^2 - c`, when the operator has one.
    pub expected_nk: Option<(usize, usize)>,
    /// Assembled only from the combinators that preserve `λ^d`-oddness.
    pub newton_like: bool,
    pub doc: &'static str,
}

impl MethodCatalogEntry {
    pub fn is_post_conjugation(&self) -> bool {
        matches!(self.kind, MethodKind::PostConjugation(_))
    }

    pub fn scheme(&self) -> Result<Scheme, BuildError> {
        match self.kind {
            MethodKind::Scheme(text) => parse_scheme(text),
            MethodKind::PostConjugation(_) => Err(BuildError::PostConjugation(self.name.to_string())),
        }
    }

    /// Normal form of a post-conjugation entry at the given parameter values.
    pub fn form(&self, params: &[Complex]) -> Result<FormSpec, BuildError> {
        match self.kind {
            MethodKind::PostConjugation(f) => {
                if params.len() != self.params.len() {
                    return Err(BuildError::InvalidParameter(format!(
                        "{} expects {} parameter(s)",
                        self.name,
                        self.params.len()
                    )));
                }
                f(params)
            }
            MethodKind::Scheme(_) => Err(BuildError::InvalidParameter(format!(
                "{} is a scheme; instantiate and conjugate it instead",
                self.name
            ))),
        }
    }
}

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn c_family(p: &[Complex]) -> Result<FormSpec, BuildError> {
    let c = p[0];
    Ok(FormSpec { n: 3, a: vec![re(4.0), re(5.0), re(2.0) - c * 4.0] })
}

fn m4(p: &[Complex]) -> Result<FormSpec, BuildError> {
    let beta = p[0];
    if beta.norm() == 0.0 {
        return Err(BuildError::InvalidParameter("m4 needs beta != 0".into()));
    }
    Ok(FormSpec { n: 4, a: vec![re(6.0), re(14.0), re(14.0), (beta * 5.0 - 1.0) / beta] })
}

fn os_head(a: Complex) -> Vec<Complex> {
    vec![a + 6.0, a * 4.0 + 14.0, a * 5.0 + 14.0]
}

fn os2(p: &[Complex]) -> Result<FormSpec, BuildError> {
    Ok(FormSpec { n: 5, a: os_head(p[0]) })
}

fn os3(p: &[Complex]) -> Result<FormSpec, BuildError> {
    let a = p[0];
    let q = a * a * 9.0 + a * 76.0 + 196.0;
    if q.norm() == 0.0 {
        return Err(BuildError::InvalidParameter("os3 is undefined where 196+76a+9a^2 = 0".into()));
    }
    let t = a * 5.0 + 14.0;
    let mut coeffs = os_head(a);
    coeffs.push(t * t * 5.0 / q);
    Ok(FormSpec { n: 4, a: coeffs })
}

fn os4(p: &[Complex]) -> Result<FormSpec, BuildError> {
    let b = p[0];
    Ok(FormSpec { n: 4, a: vec![re(2.0), re(-2.0), re(-6.0), b * 4.0 - 3.0] })
}

fn os5(p: &[Complex]) -> Result<FormSpec, BuildError> {
    let a = p[0];
    let mut coeffs = os_head(a);
    coeffs.push(-(a * 2.0 + 7.0) * 5.0);
    Ok(FormSpec { n: 4, a: coeffs })
}

const NEWTON: &str = "next = z - p(z)/p'(z);";

const TRAUB: &str = "\
y = z - p(z)/p'(z);
next = y - p(y)/p'(z);";

const STEFFENSEN: &str = "next = z - p(z)*p(z)/(p(z + p(z)) - p(z));";

const TRAUB_STEFFENSEN: &str = "next = z - gamma*p(z)*p(z)/(p(z + gamma*p(z)) - p(z));";

const OSTROWSKI: &str = "\
y = z - p(z)/p'(z);
next = y - p(y)/p'(z) * p(z)/(p(z) - 2*p(y));";

/// King's two-step family with its parameter shifted by 2, so that `beta` is
/// the coordinate of the conjugated operator `z^4 (5+2b+(4+b)z+z^2)/(1+(4+b)z+(5+2b)z^2)`.
const KING: &str = "\
y = z - p(z)/p'(z);
next = y - p(y)/p'(z) * (p(z) + (beta + 2)*p(y))/(p(z) + beta*p(y));";

const JARRATT: &str = "\
y = z - 2/3*p(z)/p'(z);
j = (3*p'(y) + p'(z))/(2*(3*p'(y) - p'(z)));
next = z - j*p(z)/p'(z);";

const WANG: &str = "\
y = z - 2/3*p(z)/p'(z);
j = (3*p'(y) + p'(z))/(6*p'(y) - 2*p'(z));
w = z - j*p(z)/p'(z);
next = w - p(w)/p'(w);";

const AMAT: &str = "\
u = p(z)/p'(z);
h = (p'(z - 2/3*u) - p'(z))/p'(z);
next = z - u + 3/4*u*h*(1 + beta*h)/(1 + (3/2 + beta)*h);";

const CHUN: &str = "\
y = z - 2/3*p(z)/p'(z);
j = (3*p'(y) + p'(z))/(6*p'(y) - 2*p'(z));
w = z - j*p(z)/p'(z);
next = w - p(w)/(alpha*(w - z)*(w - y) + 3/2*j*p'(y) + (1 - 3/2*j)*p'(z));";

const CHEBYSHEV_HALLEY: &str = "\
y = z - p(z)/p'(z);
l = p(z)*p''(z)/(p'(z)*p'(z));
next = y - 1/2*l/(1 - alpha*l)*p(z)/p'(z);";

static CATALOG: [MethodCatalogEntry; 17] = [
    MethodCatalogEntry {
        name: "newton",
        params: &[],
        kind: MethodKind::Scheme(NEWTON),
        expected_nk: Some((2, 0)),
        newton_like: true,
        doc: "Newton's method, order 2.",
    },
    MethodCatalogEntry {
        name: "traub",
        params: &[],
        kind: MethodKind::Scheme(TRAUB),
        expected_nk: Some((3, 1)),
        newton_like: true,
        doc: "Traub's two-step scheme with frozen derivative, order 3.",
    },
    MethodCatalogEntry {
        name: "steffensen",
        params: &[],
        kind: MethodKind::Scheme(STEFFENSEN),
        expected_nk: None,
        newton_like: false,
        doc: "Steffensen's derivative-free method, w = x + f(x).",
    },
    MethodCatalogEntry {
        name: "traub-steffensen",
        params: &["gamma"],
        kind: MethodKind::Scheme(TRAUB_STEFFENSEN),
        expected_nk: None,
        newton_like: false,
        doc: "Traub-Steffensen method, w = x + gamma f(x).",
    },
    MethodCatalogEntry {
        name: "ostrowski",
        params: &[],
        kind: MethodKind::Scheme(OSTROWSKI),
        expected_nk: Some((4, 0)),
        newton_like: true,
        doc: "Ostrowski's two-step method, order 4.",
    },
    MethodCatalogEntry {
        name: "king",
        params: &["beta"],
        kind: MethodKind::Scheme(KING),
        expected_nk: Some((4, 2)),
        newton_like: true,
        doc: "King's family, order 4, with beta shifted by -2 from the two-step form; beta = -2 is Ostrowski.",
    },
    MethodCatalogEntry {
        name: "jarratt",
        params: &[],
        kind: MethodKind::Scheme(JARRATT),
        expected_nk: Some((4, 0)),
        newton_like: true,
        doc: "Jarratt's method, order 4.",
    },
    MethodCatalogEntry {
        name: "wang",
        params: &[],
        kind: MethodKind::Scheme(WANG),
        expected_nk: Some((8, 0)),
        newton_like: true,
        doc: "Jarratt step followed by a Newton step.",
    },
    MethodCatalogEntry {
        name: "amat",
        params: &["beta"],
        kind: MethodKind::Scheme(AMAT),
        expected_nk: Some((4, 2)),
        newton_like: true,
        doc: "Amat et al. fourth-order family built on a Jarratt-type step.",
    },
    MethodCatalogEntry {
        name: "chun",
        params: &["alpha"],
        kind: MethodKind::Scheme(CHUN),
        expected_nk: None,
        newton_like: false,
        doc: "Chun's sixth-order family; the alpha term breaks the rotation symmetry unless d = 3.",
    },
    MethodCatalogEntry {
        name: "chebyshev-halley",
        params: &["alpha"],
        kind: MethodKind::Scheme(CHEBYSHEV_HALLEY),
        expected_nk: Some((3, 1)),
        newton_like: true,
        doc: "Chebyshev-Halley family, order 3; alpha = 0 Chebyshev, alpha = 1/2 Halley.",
    },
    MethodCatalogEntry {
        name: "c-family",
        params: &["c"],
        kind: MethodKind::PostConjugation(c_family),
        expected_nk: Some((3, 3)),
        newton_like: true,
        doc: "The c-family operator z^3 (2(1-2c) + 5z + 4z^2 + z^3)/(1 + 4z + 5z^2 + 2(1-2c)z^3).",
    },
    MethodCatalogEntry {
        name: "m4",
        params: &["beta"],
        kind: MethodKind::PostConjugation(m4),
        expected_nk: Some((4, 4)),
        newton_like: true,
        doc: "Three-step M4 operator; linear in alpha = (5 beta - 1)/beta.",
    },
    MethodCatalogEntry {
        name: "os2",
        params: &["a"],
        kind: MethodKind::PostConjugation(os2),
        expected_nk: Some((5, 3)),
        newton_like: true,
        doc: "Ostrowski-Chun subfamily S2.",
    },
    MethodCatalogEntry {
        name: "os3",
        params: &["a"],
        kind: MethodKind::PostConjugation(os3),
        expected_nk: Some((4, 4)),
        newton_like: true,
        doc: "Ostrowski-Chun subfamily S3; a_4 depends on a rationally.",
    },
    MethodCatalogEntry {
        name: "os4",
        params: &["b"],
        kind: MethodKind::PostConjugation(os4),
        expected_nk: Some((4, 4)),
        newton_like: true,
        doc: "Ostrowski-Chun subfamily S4; z = 1 is superattracting for every b.",
    },
    MethodCatalogEntry {
        name: "os5",
        params: &["a"],
        kind: MethodKind::PostConjugation(os5),
        expected_nk: Some((4, 3)),
        newton_like: true,
        doc: "Ostrowski-Chun subfamily S5; degenerate, reduces to -z^4 Q(z)/Q^(z) with a 2-cycle {1, -1}.",
    },
];

/// All built-in methods in display order.
pub fn catalog_entries() -> &'static [MethodCatalogEntry] {
    &CATALOG
}

pub fn catalog(name: &str) -> Result<&'static MethodCatalogEntry, BuildError> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| BuildError::UnknownMethod(name.to_string()))
}

/// Parsed scheme of a catalog method.
pub fn catalog_scheme(name: &str) -> Result<Scheme, BuildError> {
    catalog(name)?.scheme()
}
