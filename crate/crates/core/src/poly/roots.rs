use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Complex, PolyError, Polynomial, ROOT_MAX_SWEEPS, ROOT_RESIDUAL_TOL};

/// Fixed seed for the initial-circle perturbation, so repeated solves agree bit for bit.
const INIT_SEED: u64 = 0x5eed_ab37;

/// Roots of `p` with multiplicity, by Aberth–Ehrlich simultaneous iteration.
///
/// Exact (or negligible) low-order coefficients are split off first as roots
/// at the origin. Degrees one and two are solved in closed form.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex>, PolyError> {
    let deg = p.degree().ok_or(PolyError::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let zeros = p.low_order_zeros();
    let q = p.shift_down(zeros);
    let mut roots = vec![Complex::new(0.0, 0.0); zeros];
    roots.extend(nonzero_roots(&q)?);
    Ok(roots)
}

fn nonzero_roots(q: &Polynomial) -> Result<Vec<Complex>, PolyError> {
    let n = q.deg();
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-q.coeff(0) / q.coeff(1)]),
        2 => Ok(quadratic(q.coeff(2), q.coeff(1), q.coeff(0)).to_vec()),
        _ => aberth(q),
    }
}

fn quadratic(a: Complex, b: Complex, c: Complex) -> [Complex; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
    if q.norm() == 0.0 {
        return [Complex::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// Backward-error style residual: `|p(z)| / (max|a_i| (1+|z|)^n)`.
fn normalized_residual(p: &Polynomial, z: Complex) -> f64 {
    let n = p.deg() as i32;
    p.eval(z).norm() / (p.max_norm() * (1.0 + z.norm()).powi(n))
}

/// Fresh starting circles tried when a run leaves a root unconverged.
const ABERTH_ATTEMPTS: u64 = 4;

fn aberth(p: &Polynomial) -> Result<Vec<Complex>, PolyError> {
    let mut last = Err(PolyError::ZeroPolynomial);
    for attempt in 0..ABERTH_ATTEMPTS {
        last = aberth_from(p, INIT_SEED ^ p.deg() as u64 ^ attempt.wrapping_mul(0x9e37_79b9));
        if last.is_ok() {
            break;
        }
    }
    last
}

fn aberth_from(p: &Polynomial, seed: u64) -> Result<Vec<Complex>, PolyError> {
    let n = p.deg();
    let lead = p.leading();
    let monic: Vec<Complex> = p.coeffs().iter().map(|c| c / lead).collect();
    let monic = Polynomial::new(monic);

    // Initial circle: centroid of the roots, radius from the geometric mean of their moduli.
    let center = -monic.coeff(n - 1) / n as f64;
    let shifted = monic.compose(&Polynomial::new(vec![center, Complex::new(1.0, 0.0)]));
    let radius = shifted.coeff(0).norm().powf(1.0 / n as f64).max(
        shifted
            .coeffs()
            .iter()
            .take(n)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .powf(1.0 / n as f64)
            * 0.5,
    );
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.2..0.6);
    let mut z: Vec<Complex> = (0..n)
        .map(|j| {
            let jitter: f64 = rng.gen_range(-0.05..0.05);
            let theta = 2.0 * PI * (j as f64 + offset + jitter) / n as f64;
            center + Complex::from_polar(radius * (1.0 + jitter), theta)
        })
        .collect();

    let mut done = vec![false; n];
    let mut sweeps = 0;
    while sweeps < ROOT_MAX_SWEEPS && done.iter().any(|d| !d) {
        sweeps += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (val, der) = monic.eval_with_derivative(z[i]);
            // Rounding level of the Horner evaluation at z[i].
            let bound: f64 = monic
                .coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * z[i].norm() + c.norm());
            if val.norm() <= 8.0 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= f64::EPSILON * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
    }

    let worst = z
        .iter()
        .map(|&r| normalized_residual(&monic, r))
        .fold(0.0, f64::max);
    if !(worst <= ROOT_RESIDUAL_TOL) {
        return Err(PolyError::NoConvergence { sweeps, residual: worst });
    }
    Ok(z)
}

/// A group of computed roots that approximate one root of multiplicity `multiplicity`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCluster {
    pub center: Complex,
    pub multiplicity: usize,
}

/// Working precision assumed for polynomial coefficients; an m-fold root splits by about `eps^(1/m)`.
const CLUSTER_EPS: f64 = 1e-11;
const CLUSTER_SLACK: f64 = 3.0;

fn cluster_radius(m: usize, scale: f64) -> f64 {
    CLUSTER_SLACK * CLUSTER_EPS.powf(1.0 / m as f64) * scale
}

fn centroid(group: &[Complex]) -> Complex {
    group.iter().sum::<Complex>() / group.len() as f64
}

/// Group roots that lie within the splitting radius of an m-fold root of each other.
///
/// Larger groups are tried first, since the spread of an m-fold root grows with m.
pub fn cluster_roots(roots: &[Complex]) -> Vec<RootCluster> {
    let mut left: Vec<Complex> = roots.to_vec();
    let mut out = Vec::new();
    while !left.is_empty() {
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for (i, &z) in left.iter().enumerate() {
            let mut order: Vec<usize> = (0..left.len()).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| (left[a] - z).norm().total_cmp(&(left[b] - z).norm()));
            let mut members = vec![i];
            for &j in &order {
                members.push(j);
                let pts: Vec<Complex> = members.iter().map(|&t| left[t]).collect();
                let c = centroid(&pts);
                let spread = pts.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
                let ratio = spread / cluster_radius(members.len(), 1.0 + c.norm());
                if ratio > 1.0 {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((m, r, _)) => members.len() > *m || (members.len() == *m && ratio < *r),
                };
                if better {
                    best = Some((members.len(), ratio, members.clone()));
                }
            }
        }
        let mut members = match best {
            Some((_, _, m)) => m,
            None => vec![0],
        };
        members.sort_unstable_by(|a, b| b.cmp(a));
        let pts: Vec<Complex> = members.iter().map(|&t| left.swap_remove(t)).collect();
        out.push(RootCluster { center: centroid(&pts), multiplicity: pts.len() });
    }
    out.sort_by(|a, b| a.center.re.total_cmp(&b.center.re).then(a.center.im.total_cmp(&b.center.im)));
    out
}

/// Roots of `p` grouped into clusters, with multiple-root centers refined.
///
/// A root of multiplicity `m` is a simple root of the `(m-1)`-th derivative,
/// so a few Newton steps on that derivative pin it down to working precision.
pub fn root_clusters(p: &Polynomial) -> Result<Vec<RootCluster>, PolyError> {
    let mut clusters = cluster_roots(&poly_roots(p)?);
    for k in clusters.iter_mut().filter(|k| k.multiplicity > 1 && k.center.norm() > 0.0) {
        let mut deriv = p.clone();
        for _ in 1..k.multiplicity {
            deriv = deriv.derivative();
        }
        let mut z = k.center;
        for _ in 0..8 {
            let (v, dv) = deriv.eval_with_derivative(z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            if !(step.norm() <= cluster_radius(k.multiplicity, 1.0 + z.norm())) {
                break;
            }
            z -= step;
            if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
                break;
            }
        }
        k.center = z;
    }
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn contains(roots: &[Complex], r: Complex, tol: f64) -> bool {
        roots.iter().any(|x| (x - r).norm() <= tol)
    }

    #[test]
    fn quadratic_examples() {
        let roots = poly_roots(&Polynomial::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert!(contains(&roots, c(0.0, 1.0), 1e-14) && contains(&roots, c(0.0, -1.0), 1e-14));
        let roots = poly_roots(&Polynomial::from_real(&[2.0, -3.0, 1.0])).unwrap();
        assert!(contains(&roots, c(1.0, 0.0), 1e-14) && contains(&roots, c(2.0, 0.0), 1e-14));
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(poly_roots(&Polynomial::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn construct_then_solve_six_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let truth: Vec<Complex> = (0..6)
                .map(|_| Complex::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            let p = Polynomial::from_roots(&truth);
            let got = poly_roots(&p).unwrap();
            assert_eq!(got.len(), 6);
            // well separated draws only; skip near-coincident samples
            let sep = truth
                .iter()
                .enumerate()
                .flat_map(|(i, a)| truth[i + 1..].iter().map(move |b| (a - b).norm()))
                .fold(f64::MAX, f64::min);
            if sep < 1e-3 {
                continue;
            }
            for r in &truth {
                assert!(contains(&got, *r, 1e-8), "missing root {r} in {got:?}");
            }
        }
    }

    #[test]
    fn roots_at_origin_are_exact() {
        let p = Polynomial::from_real(&[0.0, 0.0, 0.0, 2.0, 1.0]);
        let roots = poly_roots(&p).unwrap();
        assert_eq!(roots.iter().filter(|r| r.norm() == 0.0).count(), 3);
        assert!(contains(&roots, c(-2.0, 0.0), 1e-14));
    }

    #[test]
    fn clusters_recover_double_root() {
        let p = Polynomial::from_roots(&[c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 2.0), c(3.0, 0.0)]);
        let clusters = root_clusters(&p).unwrap();
        let double = clusters.iter().find(|k| k.multiplicity == 2).expect("double root");
        assert!((double.center - c(0.5, 0.5)).norm() < 1e-12);
        assert_eq!(clusters.len(), 3);
    }
}
