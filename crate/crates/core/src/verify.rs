//! Built-in identity suites with pass/fail counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{chart_at_infinity, critical_points, moebius_sum, MoebiusSign};
use crate::builder::{catalog_entries, check_lambda_odd, MethodKind};
use crate::conjugate::{
    check_iota_symmetry, conjugated_operator, instantiate_method, method_form, ConjugateError, OperatorForm,
};
use crate::poly::{poly_roots, Complex, ExtComplex, Polynomial};
use crate::stability::{
    classify_strange_at, linearize, m4_alpha_family, method_family, stability_region_z1, Target, Verdict,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// First few failure descriptions.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.suites.iter().map(|s| s.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.suites.iter().map(|s| s.failed).sum()
    }

    pub fn ok(&self) -> bool {
        self.failed() == 0
    }
}

const MAX_LISTED: usize = 5;

struct Suite {
    report: SuiteReport,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { report: SuiteReport { name, passed: 0, failed: 0, failures: Vec::new() } }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.report.passed += 1;
        } else {
            self.report.failed += 1;
            if self.report.failures.len() < MAX_LISTED {
                self.report.failures.push(what());
            }
        }
    }
}

fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> Complex {
    Complex::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn rel_close(a: Complex, b: Complex, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

/// Run every suite; `trials` scales the number of random cases per suite.
pub fn run_all(seed: u64, trials: usize) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites = vec![
        normal_form_suite(&mut rng, trials),
        moebius_suite(&mut rng, trials),
        vieta_suite(&mut rng, trials),
        lambda_suite(&mut rng, trials),
        iota_suite(&mut rng, trials),
        pairing_suite(&mut rng, trials),
        formula_suite(&mut rng, trials),
        region_suite(&mut rng, trials),
    ];
    VerifyReport { seed, suites }
}

/// `O(0) = 0`, `O(1) = 1`, local degree `n` at `∞`, and the parity rule at `-1`.
fn normal_form_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("normal-form");
    let mut done = 0;
    while done < trials {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(0..=5);
        let a: Vec<Complex> = (0..k).map(|_| rand_c(rng, 3.0)).collect();
        let Ok(form) = OperatorForm::new(n, a) else { continue };
        if form.coefficient_sum().norm() < 0.1 {
            continue;
        }
        done += 1;
        let Ok(r) = form.map() else {
            s.check(false, || format!("map failed for {form}"));
            continue;
        };
        let zero = r.eval(ExtComplex::finite(0.0, 0.0));
        s.check(zero.approx_eq(&ExtComplex::finite(0.0, 0.0), 1e-12), || format!("O(0) = {zero} for {form}"));
        let one = r.eval_c(re(1.0));
        s.check(rel_close(one, re(1.0), 1e-9), || format!("O(1) = {one} for {form}"));
        let local = chart_at_infinity(&r).map(|m| m.num().low_order_zeros());
        s.check(local == Ok(n), || format!("local degree at ∞ {local:?} for {form}"));
        let expect = if (n + k) % 2 == 1 { -1.0 } else { 1.0 };
        let m = r.eval_c(re(-1.0));
        s.check(rel_close(m, re(expect), 1e-9), || format!("O(-1) = {m} for {form}"));
    }
    s.report
}

/// Closed forms of `Σ (1 ± r)/(1 ∓ r)` against the sums over computed roots.
fn moebius_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("moebius-sums");
    let mut done = 0;
    while done < trials {
        let k = rng.gen_range(1..=8);
        let roots: Vec<Complex> = (0..k).map(|_| rand_c(rng, 2.0)).collect();
        if roots.iter().any(|r| (r - 1.0).norm() < 1e-2 || (r + 1.0).norm() < 1e-2) {
            continue;
        }
        done += 1;
        let p = Polynomial::from_roots(&roots);
        let a: Vec<Complex> = (1..=k).map(|j| p.coeff(k - j)).collect();
        let direct_plus: Complex = roots.iter().map(|r| (1.0 + r) / (1.0 - r)).sum();
        let direct_minus: Complex = roots.iter().map(|r| (1.0 - r) / (1.0 + r)).sum();
        for (sign, direct) in [(MoebiusSign::Plus, direct_plus), (MoebiusSign::Minus, direct_minus)] {
            let closed = moebius_sum(&a, sign);
            s.check(closed.as_ref().is_ok_and(|v| rel_close(*v, direct, 1e-8)), || {
                format!("{sign:?}: closed {closed:?} direct {direct} roots {roots:?}")
            });
        }
    }
    s.report
}

/// Roots of a polynomial rebuilt from well-separated roots are recovered.
fn vieta_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("vieta");
    let mut done = 0;
    while done < trials {
        let k = rng.gen_range(1..=10);
        let roots: Vec<Complex> = (0..k).map(|_| rand_c(rng, 2.0)).collect();
        let separated = roots
            .iter()
            .enumerate()
            .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() >= 1e-3));
        if !separated {
            continue;
        }
        done += 1;
        let p = Polynomial::from_roots(&roots);
        let ok = match poly_roots(&p) {
            Ok(found) => Polynomial::from_roots(&found).relative_distance(&p) <= 1e-8,
            Err(_) => false,
        };
        s.check(ok, || format!("round trip failed for roots {roots:?}"));
    }
    s.report
}

/// `R(λz) = λR(z)` for the schemes built from Newton-type steps, `d = 2, 3, 4`.
fn lambda_suite(rng: &mut ChaCha8Rng, _trials: usize) -> SuiteReport {
    let mut s = Suite::new("lambda-odd");
    for entry in catalog_entries().iter().filter(|e| e.newton_like && !e.is_post_conjugation()) {
        for d in 2..=4 {
            let params: Vec<Complex> = entry.params.iter().map(|_| rand_c(rng, 1.0)).collect();
            let c = rand_c(rng, 2.0);
            let ok = match instantiate_method(entry, &params, d, c) {
                Ok(r) => check_lambda_odd(&r, d, 50),
                Err(_) => false,
            };
            s.check(ok, || format!("{} at d = {d}", entry.name));
        }
    }
    s.report
}

/// Every conjugated operator of a Newton-type method commutes with `z ↦ 1/z`.
fn iota_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("iota-symmetry");
    for entry in catalog_entries().iter().filter(|e| e.newton_like) {
        for _ in 0..trials.clamp(1, 5) {
            let params: Vec<Complex> = entry.params.iter().map(|_| rand_c(rng, 2.0)).collect();
            let c = rand_c(rng, 2.0);
            let ok = match conjugated_operator(entry, &params, c) {
                Ok(r) => check_iota_symmetry(&r, 20),
                Err(_) => false,
            };
            s.check(ok, || format!("{} at {params:?}", entry.name));
        }
    }
    s.report
}

/// Free critical points of King and OS2 come in pairs `κ ↔ 1/κ`.
fn pairing_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("critical-pairing");
    for name in ["king", "os2"] {
        for _ in 0..trials.clamp(1, 20) {
            let p = rand_c(rng, 3.0);
            let ok = method_form(name, &[p], re(1.0))
                .ok()
                .and_then(|f| f.map().ok())
                .and_then(|r| critical_points(&r).ok())
                .is_some_and(|cps| cps.iter().filter(|c| c.free).all(|c| c.partner.is_some()));
            s.check(ok, || format!("{name} at {p}"));
        }
    }
    s.report
}

/// Conjugated Chebyshev–Halley, King and Amat against their closed-form coefficients.
fn formula_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("operator-formulas");
    type Formula = fn(Complex) -> (usize, Vec<Complex>);
    let cases: [(&str, Formula); 3] = [
        ("chebyshev-halley", |a| (3, vec![2.0 - a * 2.0])),
        ("king", |b| (4, vec![b + 4.0, b * 2.0 + 5.0])),
        ("amat", |b| (4, vec![2.0 - b * (4.0 / 3.0), 1.0 - b * (8.0 / 3.0)])),
    ];
    for (name, formula) in cases {
        for _ in 0..trials.clamp(1, 10) {
            let (p, c) = (rand_c(rng, 2.0), rand_c(rng, 2.0));
            let (n, a) = formula(p);
            let ok = match method_form(name, &[p], c) {
                Ok(f) => f.n == n && f.a.len() == a.len() && f.a.iter().zip(&a).all(|(x, y)| rel_close(*x, *y, 1e-9)),
                Err(_) => false,
            };
            s.check(ok, || format!("{name} at param {p}, c = {c}"));
        }
    }
    s.report
}

/// Region verdicts for `z = 1` against the directly evaluated multiplier.
fn region_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut s = Suite::new("region-oracle");
    let one = re(1.0);
    let named = ["chebyshev-halley", "king", "amat", "c-family", "os2", "os4"];
    type Family = Box<dyn Fn(Complex) -> Result<OperatorForm, ConjugateError>>;
    let mut families: Vec<(&str, Family)> = Vec::new();
    for name in named {
        if let Ok(f) = method_family(name, one) {
            families.push((name, Box::new(f)));
        }
    }
    families.push(("m4 (alpha)", Box::new(m4_alpha_family)));
    for (name, family) in &families {
        let k = match family(re(0.37)) {
            Ok(f) => f.k,
            Err(_) => continue,
        };
        let region = match linearize(family.as_ref(), k).and_then(|lc| stability_region_z1(&lc)) {
            Ok(r) => r,
            Err(e) => {
                s.check(false, || format!("{name}: {e}"));
                continue;
            }
        };
        let span = (region.radius * 2.0).max(4.0);
        for _ in 0..trials {
            let alpha = region.center + rand_c(rng, span);
            let predicted = region.classify(alpha);
            if predicted == Verdict::Boundary {
                continue;
            }
            let Ok(form) = family(alpha) else { continue };
            let direct = classify_strange_at(&form, Target::One).map(|c| c.verdict());
            s.check(direct == Ok(predicted), || format!("{name} at {alpha}: region {predicted:?}, direct {direct:?}"));
        }
    }
    s.report
}

/// Catalog entries that are schemes.
pub fn scheme_names() -> Vec<&'static str> {
    catalog_entries()
        .iter()
        .filter(|e| matches!(e.kind, MethodKind::Scheme(_)))
        .map(|e| e.name)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let report = run_all(7, 20);
        for suite in &report.suites {
            assert_eq!(suite.failed, 0, "{suite:?}");
            assert!(suite.passed > 0, "{}", suite.name);
        }
    }
}
