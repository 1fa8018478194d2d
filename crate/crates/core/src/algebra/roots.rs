use rug::Float;

use super::{ComplexPoint, Polynomial};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 2000;

/// Roots plus the index groups of roots closer than the clustering
/// tolerance (near-multiple roots are reported, not separated).
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<ComplexPoint>,
    pub clusters: Vec<Vec<usize>>,
}

/// All complex roots of `p`, sorted by (re, im).
///
/// Aberth–Ehrlich simultaneous iteration followed by Newton polishing, all in
/// `precision_bits` arithmetic. Every returned root satisfies
/// `|p(z)| / sum_k |a_k| |z|^k < 2^(-precision_bits/2)`.
pub fn poly_roots(p: &Polynomial, precision_bits: u32) -> Result<Vec<ComplexPoint>> {
    roots_with_clusters(p, precision_bits).map(|s| s.roots)
}

pub fn roots_with_clusters(p: &Polynomial, precision_bits: u32) -> Result<RootSet> {
    let deg = p.degree().filter(|&d| d >= 1).ok_or(Error::ConstantPolynomial)?;
    let prec = precision_bits.max(64);
    let lowest = p
        .coeffs()
        .iter()
        .position(|c| c.cmp0().is_ne())
        .expect("nonzero polynomial");
    let mut roots: Vec<ComplexPoint> = (0..lowest).map(|_| ComplexPoint::zero(prec)).collect();
    if deg > lowest {
        let coeffs: Vec<Float> = p.coeffs()[lowest..]
            .iter()
            .map(|c| Float::with_val(prec, c))
            .collect();
        roots.extend(aberth(&coeffs, prec)?);
    }
    roots.sort_by(|a, b| a.cmp_re_im(b));
    let clusters = clusters(&roots, prec);
    Ok(RootSet { roots, clusters })
}

/// Returns (p(z), p'(z), sum |a_k| |z|^k).
fn horner(coeffs: &[Float], z: &ComplexPoint, prec: u32) -> (ComplexPoint, ComplexPoint, Float) {
    let n = coeffs.len() - 1;
    let mut val = ComplexPoint::real(Float::with_val(prec, &coeffs[n]));
    let mut der = ComplexPoint::zero(prec);
    let mut scale = Float::with_val(prec, coeffs[n].abs_ref());
    let az = z.abs();
    for c in coeffs[..n].iter().rev() {
        der = der.mul(z).add(&val);
        val = val.mul(z);
        val.re += c;
        scale *= &az;
        scale += Float::with_val(prec, c.abs_ref());
    }
    (val, der, scale)
}

fn initial_guesses(coeffs: &[Float], prec: u32) -> Vec<ComplexPoint> {
    let n = coeffs.len() - 1;
    // Radius from the geometric mean of root moduli, |a_0/a_n|^(1/n).
    let ratio = Float::with_val(prec, &coeffs[0] / &coeffs[n]).abs();
    let radius = Float::with_val(prec, ratio.ln() / n as u32).exp();
    let radius = if radius.is_finite() && !radius.is_zero() {
        radius
    } else {
        Float::with_val(prec, 1)
    };
    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    (0..n)
        .map(|k| {
            let theta = Float::with_val(prec, &two_pi * k as u32) / n as u32 + 0.4f64;
            let (s, c) = theta.sin_cos(Float::new(prec));
            ComplexPoint::new(Float::with_val(prec, &radius * &c), Float::with_val(prec, &radius * &s))
        })
        .collect()
}

fn aberth(coeffs: &[Float], prec: u32) -> Result<Vec<ComplexPoint>> {
    let n = coeffs.len() - 1;
    if n == 1 {
        let z = Float::with_val(prec, -Float::with_val(prec, &coeffs[0] / &coeffs[1]));
        return Ok(vec![ComplexPoint::real(z)]);
    }
    let mut z = initial_guesses(coeffs, prec);
    let mut done = vec![false; n];
    let step_tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16));
    let res_tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8)) * (n as u32 + 1);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (val, der, scale) = horner(coeffs, &z[i], prec);
            if val.abs() <= Float::with_val(prec, &scale * &res_tol) {
                done[i] = true;
                continue;
            }
            let newton = val.div(&der);
            let mut sum = ComplexPoint::zero(prec);
            for j in 0..n {
                if j != i {
                    sum = sum.add(&z[i].sub(&z[j]).recip());
                }
            }
            let one = ComplexPoint::from_f64(prec, 1.0, 0.0);
            let w = newton.div(&one.sub(&newton.mul(&sum)));
            if !w.is_finite() {
                // perturb away from a coincident estimate
                let kick = ComplexPoint::from_f64(prec, 1e-3, 1e-3 * (i as f64 + 1.0));
                z[i] = z[i].add(&kick);
                continue;
            }
            z[i] = z[i].sub(&w);
            let mag = Float::with_val(prec, z[i].abs() + 1u32);
            if w.abs() <= Float::with_val(prec, &mag * &step_tol) {
                done[i] = true;
            }
        }
    }
    // Newton polishing; harmless for converged roots, rescues near-misses.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (val, der, _) = horner(coeffs, zi, prec);
            let step = val.div(&der);
            if !step.is_finite() {
                break;
            }
            *zi = zi.sub(&step);
        }
    }
    let accept = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    let unconverged = z
        .iter()
        .filter(|zi| {
            let (val, _, scale) = horner(coeffs, zi, prec);
            !(zi.is_finite() && val.abs() < Float::with_val(prec, &scale * &accept))
        })
        .count();
    if unconverged > 0 {
        return Err(Error::RootsNotConverged {
            iterations,
            unconverged,
            roots: z,
        });
    }
    Ok(z)
}

fn clusters(roots: &[ComplexPoint], prec: u32) -> Vec<Vec<usize>> {
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 4) as i32)));
    let mut assigned = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if assigned[i] {
            continue;
        }
        let mut group = vec![i];
        for j in i + 1..roots.len() {
            let scale = Float::with_val(prec, roots[i].abs() + 1u32);
            if !assigned[j] && roots[i].dist(&roots[j]) < Float::with_val(prec, &tol * &scale) {
                group.push(j);
                assigned[j] = true;
            }
        }
        if group.len() > 1 {
            out.push(group);
        }
    }
    out
}
