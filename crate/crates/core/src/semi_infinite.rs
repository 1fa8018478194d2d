//! The exactly solvable semi-infinite model: particles enter at rate `r`
//! through the slow bond and leave after `L` sites at rate 1. Its current
//! is `r Q_{L-1}(r) / Q_L(r)` with explicit polynomials `Q_L`.

use std::f64::consts::PI;

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::algebra::{poly_roots, ComplexPoint, Polynomial, RationalSeries};
use crate::error::{Error, Result};

/// Samples of the curve used for distance queries.
const CURVE_SAMPLES: usize = 10_000;

fn binom(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// `Q_L(r) = sum_{j=0}^{L} (L+1-j)/(L+1) C(L+j, L) r^j`.
pub fn q_explicit(l: usize) -> Polynomial {
    let l32 = l as u32;
    Polynomial::new(
        (0..=l32)
            .map(|j| Rational::from((binom(l32 + j, l32) * (l32 + 1 - j), Integer::from(l32 + 1))))
            .collect(),
    )
}

/// Builds `Q_L` upward from `Q_0 = 1` through
/// `Q_{M-1} = (1 - r) Q_M + C(2M, M)/(M+1) r^{M+1}`.
pub fn q_recursive(l: usize) -> Polynomial {
    q_recursive_all(l).pop().expect("at least Q_0")
}

/// `[Q_0, .., Q_L]` from the recursion.
pub fn q_recursive_all(l: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one()];
    for m in 1..=l as u32 {
        let catalan = Rational::from((binom(2 * m, m), Integer::from(m + 1)));
        let rhs = out[m as usize - 1].sub(&Polynomial::monomial(catalan, m as usize + 1));
        // divide by (1 - r): c_j = sum_{i <= j} rhs_i
        let mut acc = Rational::new();
        let coeffs: Vec<Rational> = (0..=m as usize)
            .map(|j| {
                acc += rhs.coeff(j);
                acc.clone()
            })
            .collect();
        out.push(Polynomial::new(coeffs));
    }
    out
}

/// Finite-`L` current `r Q_{L-1} / Q_L`.
#[derive(Clone, Debug)]
pub struct SemiInfiniteCurrent {
    pub l: usize,
    pub q_l: Polynomial,
    pub q_prev: Polynomial,
}

impl SemiInfiniteCurrent {
    pub fn new(l: usize) -> Self {
        assert!(l >= 1, "semi-infinite current needs L >= 1");
        SemiInfiniteCurrent {
            l,
            q_l: q_explicit(l),
            q_prev: q_explicit(l - 1),
        }
    }

    pub fn eval(&self, r: &Rational) -> Rational {
        (r * self.q_prev.eval(r)) / self.q_l.eval(r)
    }

    /// Multiprecision evaluation at a complex point.
    pub fn eval_complex(&self, r: &ComplexPoint, prec: u32) -> ComplexPoint {
        let num = r.mul(&self.q_prev.eval_complex(r, prec));
        num.div(&self.q_l.eval_complex(r, prec))
    }

    pub fn series(&self, order: usize) -> Result<RationalSeries> {
        let num = self.q_prev.mul(&Polynomial::from_ints(&[0, 1]));
        num.series_div(&self.q_l, order)
    }
}

pub fn current_series(l: usize, order: usize) -> Result<RationalSeries> {
    SemiInfiniteCurrent::new(l).series(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    /// Inside the left loop of `|r(1-r)| = 1/4`: the limit is `r(1-r)`.
    Inner,
    /// Everywhere else: the limit is `1/4`.
    Outer,
}

/// Width of the band around the curve treated as "on the curve".
pub const CURVE_BAND: f64 = 1e-12;

/// Large-`L` limit of the current at complex `r`.
pub fn limit_current(r: &ComplexPoint) -> Result<(ComplexPoint, Region)> {
    let prec = r.prec();
    let one = ComplexPoint::from_f64(prec, 1.0, 0.0);
    let value = r.mul(&one.sub(r));
    let modulus = value.abs().to_f64();
    let left = r.re.to_f64() <= 0.5;
    if left && (modulus - 0.25).abs() < CURVE_BAND {
        return Err(Error::OnCurve);
    }
    if left && modulus < 0.25 && r.re.to_f64() < 0.5 {
        Ok((value, Region::Inner))
    } else {
        Ok((ComplexPoint::from_f64(prec, 0.25, 0.0), Region::Outer))
    }
}

/// Point of the curve at parameter `theta`: `(1 - sqrt(1 - e^{i theta}))/2`.
pub fn gamma_point(theta: f64, prec: u32) -> ComplexPoint {
    let one = ComplexPoint::from_f64(prec, 1.0, 0.0);
    let e = ComplexPoint::new(Float::with_val(prec, 0), Float::with_val(prec, theta)).exp();
    let root = one.sub(&e).sqrt();
    one.sub(&root).scale(&Float::with_val(prec, 0.5))
}

fn gamma_point_f64(theta: f64) -> (f64, f64) {
    // (1 - sqrt(1 - e^{i theta})) / 2 in doubles
    let (a, b) = (1.0 - theta.cos(), -theta.sin());
    let m = a.hypot(b);
    let t = ((m + a) / 2.0).sqrt();
    let (sr, si) = if t == 0.0 { (0.0, 0.0) } else { (t, b / (2.0 * t)) };
    ((1.0 - sr) / 2.0, -si / 2.0)
}

/// `n` points of the left loop of `|r(1-r)| = 1/4`, parameters uniform in
/// `(0, 2 pi)`.
pub fn gamma_curve(n: usize, prec: u32) -> Vec<ComplexPoint> {
    assert!(n >= 3, "need at least three curve points");
    (0..n)
        .map(|k| gamma_point(2.0 * PI * (k as f64 + 0.5) / n as f64, prec))
        .collect()
}

/// Distance from `(x, y)` to the curve: dense sampling, then golden-section
/// refinement of the parameter around the best sample.
pub fn distance_to_gamma(x: f64, y: f64) -> f64 {
    let dist = |theta: f64| {
        let (gx, gy) = gamma_point_f64(theta);
        (gx - x).hypot(gy - y)
    };
    let step = 2.0 * PI / CURVE_SAMPLES as f64;
    let best = (0..=CURVE_SAMPLES)
        .map(|k| k as f64 * step)
        .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
        .expect("samples");
    let (mut lo, mut hi) = (best - step, best + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - inv_phi * (hi - lo);
        let m2 = lo + inv_phi * (hi - lo);
        if dist(m1) < dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    dist((lo + hi) / 2.0).min(dist(best))
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroScalingRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub mean_distance: f64,
    pub max_distance: f64,
    /// Distance of the rightmost non-real conjugate pair from `1/2`.
    pub right_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroScalingReport {
    pub rows: Vec<ZeroScalingRow>,
    /// Exponent `p` of `mean distance ~ L^-p`.
    pub distance_exponent: f64,
    /// Exponent `p` fitted to the maximum distance instead of the mean.
    pub max_distance_exponent: f64,
    /// Exponent `q` of `right distance ~ L^-q`.
    pub right_exponent: f64,
}

/// Roots of `Q_L` at `prec` bits.
pub fn semi_infinite_zeros(l: usize, prec: u32) -> Result<Vec<ComplexPoint>> {
    poly_roots(&q_explicit(l), prec)
}

pub fn zero_scaling_report(ls: &[usize], prec: u32) -> Result<ZeroScalingReport> {
    if ls.len() < 2 {
        return Err(Error::Fit("zero scaling needs at least two sizes".into()));
    }
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        let zeros: Vec<(f64, f64)> = semi_infinite_zeros(l, prec)?.iter().map(ComplexPoint::to_f64).collect();
        let dists: Vec<f64> = zeros.iter().map(|&(x, y)| distance_to_gamma(x, y)).collect();
        let right = zeros
            .iter()
            .filter(|(_, y)| y.abs() > 1e-12)
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .ok_or_else(|| Error::Fit(format!("Q_{l} has no complex zeros")))?;
        rows.push(ZeroScalingRow {
            l,
            mean_distance: dists.iter().sum::<f64>() / dists.len() as f64,
            max_distance: dists.iter().cloned().fold(0.0, f64::max),
            right_distance: (right.0 - 0.5).hypot(right.1),
        });
    }
    let slope = |f: fn(&ZeroScalingRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.l as f64).ln(), f(r).ln())).collect();
        -loglog_slope(&pts)
    };
    Ok(ZeroScalingReport {
        distance_exponent: slope(|r| r.mean_distance),
        max_distance_exponent: slope(|r| r.max_distance),
        right_exponent: slope(|r| r.right_distance),
        rows,
    })
}

fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
