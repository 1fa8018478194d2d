//! Series analysis of the blockage current: pole location, transformed
//! series, least-squares fits, the `K(r)` approximant, the `|K| = 1/4`
//! contour and the coefficients of `exp(a/(1-r))`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::algebra::{poly_roots, Coefficient, FloatSeries, Polynomial, RationalSeries, Series};
use crate::error::{Error, Result};

/// Window `7..=16` used throughout for the fits.
pub const DEFAULT_WINDOW: (usize, usize) = (7, 16);
/// Range over which method 1 fits its straight line.
pub const METHOD1_FIT: (usize, usize) = (8, 14);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: String,
    pub params: Vec<FitParam>,
    /// Inclusive index range.
    pub window: (usize, usize),
    pub residual_std: f64,
    pub dof: usize,
    /// False when an iterative refinement did not converge and the report
    /// holds the best grid node instead.
    pub converged: bool,
}

impl FitReport {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    fn new(model: &str, names: &[&str], values: &[f64], window: (usize, usize), rss: f64, dof: usize) -> Self {
        FitReport {
            model: model.to_string(),
            params: names
                .iter()
                .zip(values)
                .map(|(n, v)| FitParam {
                    name: n.to_string(),
                    value: *v,
                })
                .collect(),
            window,
            residual_std: (rss / dof as f64).sqrt(),
            dof,
            converged: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleMethod {
    SecondDifference,
    MobiusRoot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEstimate {
    pub r0: f64,
    pub method: PoleMethod,
    pub uncertainty: f64,
    /// Method 1: whether the oscillation pattern changes sign inside the grid
    /// next to the minimizer.
    pub confident: bool,
    /// Method 2: smallest modulus among the roots not selected.
    pub other_root_distance: Option<f64>,
}

/// Method 1 residual pattern for one candidate pole: second differences of
/// the coefficients of `(r - r0) J`, minus their least-squares line over
/// `METHOD1_FIT`.
pub fn second_difference_residuals(j: &[f64], r0: f64) -> Result<Vec<f64>> {
    let (lo, hi) = METHOD1_FIT;
    if j.len() < hi + 3 {
        return Err(Error::Fit(format!("need the series to order {}", hi + 2)));
    }
    let w = pole_removed(j, r0);
    let what: Vec<f64> = (lo..=hi).map(|k| w[k + 2] - 2.0 * w[k + 1] + w[k]).collect();
    let ks: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
    let rows: Vec<Vec<f64>> = ks.iter().map(|&k| vec![k, 1.0]).collect();
    let (coef, _) = least_squares(&rows, &what)?;
    Ok(ks.iter().zip(&what).map(|(k, y)| y - (coef[0] * k + coef[1])).collect())
}

pub fn oscillation_score(j: &[f64], r0: f64) -> Result<f64> {
    Ok(second_difference_residuals(j, r0)?
        .iter()
        .fold(0.0, |m, v| m.max(v.abs())))
}

/// Grid minimizer of the method-1 oscillation score.
pub fn pole_method1(j: &FloatSeries, r0_grid: &[f64]) -> Result<PoleEstimate> {
    if j.order() < 16 {
        return Err(Error::Fit("method 1 needs the series to order 16".into()));
    }
    if r0_grid.is_empty() {
        return Err(Error::Fit("empty grid".into()));
    }
    let jf = j.to_f64();
    let scores = r0_grid
        .iter()
        .map(|&r0| oscillation_score(&jf, r0))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..scores.len())
        .min_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)))
        .expect("nonempty grid");
    // the pattern's first entry changes sign as r0 passes the pole
    let signs = r0_grid
        .iter()
        .map(|&r0| second_difference_residuals(&jf, r0).map(|v| v[0].signum()))
        .collect::<Result<Vec<_>>>()?;
    let step = if r0_grid.len() > 1 {
        r0_grid.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min)
    } else {
        f64::EPSILON
    };
    let bracket = signs
        .windows(2)
        .enumerate()
        .filter(|(_, s)| s[0] != s[1])
        .map(|(i, _)| i)
        .min_by_key(|&i| i.abs_diff(best));
    let confident = bracket.is_some_and(|i| i.abs_diff(best) <= 2) && best != 0 && best + 1 != r0_grid.len();
    Ok(PoleEstimate {
        r0: r0_grid[best],
        method: PoleMethod::SecondDifference,
        uncertainty: step.max(f64::EPSILON),
        confident,
        other_root_distance: None,
    })
}

/// `V = 1/(1/4 - J)` as a series.
pub fn reciprocal_gap(j: &FloatSeries, order: usize) -> Result<FloatSeries> {
    let prec = j.precision();
    let quarter = Float::with_val(prec, 0.25);
    let gap = j.with_order(order).neg();
    let mut c = gap.into_coeffs();
    c[0] = Float::with_val(prec, &c[0] + &quarter);
    Series::new(c).reciprocal(order)
}

fn float_to_rational(x: &Float) -> Result<Rational> {
    x.to_rational()
        .ok_or_else(|| Error::Fit("non-finite series coefficient".into()))
}

/// Möbius-map estimate: the zero of `V(r(u))`'s Taylor polynomial nearest
/// the origin, mapped back to `r`.
pub fn pole_method2(j: &FloatSeries, r1: f64) -> Result<PoleEstimate> {
    let order = j.order();
    if order < 2 {
        return Err(Error::Fit("series too short".into()));
    }
    let prec = j.precision().max(64);
    let (r0, others) = mobius_root(j, r1, order, prec)?;
    // truncation sensitivity: the same estimate one order lower
    let uncertainty = match mobius_root(&j.truncate(order - 1), r1, order - 1, prec) {
        Ok((r0b, _)) => (r0 - r0b).abs(),
        Err(_) => f64::NAN,
    };
    Ok(PoleEstimate {
        r0,
        method: PoleMethod::MobiusRoot,
        uncertainty: if uncertainty.is_finite() { uncertainty.max(1e-15) } else { 1.0 },
        confident: uncertainty.is_finite(),
        other_root_distance: others,
    })
}

fn mobius_root(j: &FloatSeries, r1: f64, order: usize, prec: u32) -> Result<(f64, Option<f64>)> {
    let v = reciprocal_gap(j, order)?;
    let r1f = Float::with_val(prec, r1);
    let vhat = v.mobius_compose(&r1f, order)?;
    let coeffs = vhat.coeffs().iter().map(float_to_rational).collect::<Result<Vec<_>>>()?;
    let roots = poly_roots(&Polynomial::new(coeffs), prec)?;
    let mods: Vec<f64> = roots.iter().map(|z| z.abs().to_f64()).collect();
    let pick = (0..roots.len())
        .min_by(|&a, &b| mods[a].total_cmp(&mods[b]))
        .ok_or_else(|| Error::Fit("no roots".into()))?;
    let u0 = Complex64::new(roots[pick].re.to_f64(), roots[pick].im.to_f64());
    if (u0 - 1.0).norm() >= MOBIUS_ROOT_WINDOW {
        return Err(Error::Fit(format!(
            "no root within {MOBIUS_ROOT_WINDOW} of u = 1 (nearest origin: {u0})"
        )));
    }
    let r0 = r1 * u0 / (1.0 - r1 + r1 * u0);
    let others = (0..roots.len())
        .filter(|&i| i != pick)
        .map(|i| mods[i])
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.min(d))));
    Ok((r0.re, others))
}

/// The selected root must lie this close to `u = 1`. With `r1 = -1` the pole
/// near -1.544 sits at `u = 1.214`.
pub const MOBIUS_ROOT_WINDOW: f64 = 0.25;

/// `u(r) = ((1 - r1)/r1) r / (1 - r)`.
pub fn mobius_u(r: Complex64, r1: f64) -> Complex64 {
    (1.0 - r1) / r1 * r / (1.0 - r)
}

/// Inverse of [`mobius_u`].
pub fn mobius_r(u: Complex64, r1: f64) -> Complex64 {
    r1 * u / (1.0 - r1 + r1 * u)
}

/// Least squares `rows * coef ~ y`; returns the coefficients and the residual
/// sum of squares.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n < m || m == 0 {
        return Err(Error::Fit(format!("{n} points for {m} parameters")));
    }
    let a = DMatrix::from_fn(n, m, |i, k| rows[i][k]);
    let b = DVector::from_column_slice(y);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let rss = (&a * &coef - &b).norm_squared();
    Ok((coef.iter().copied().collect(), rss))
}

/// Fit `log u_k = A1 sqrt(k) + B1 log k + C1` where `u_k` are the Taylor
/// coefficients of `1/(1/4 - J)`.
pub fn fit_reciprocal_growth(j: &FloatSeries, window: (usize, usize)) -> Result<FitReport> {
    let (lo, hi) = window;
    if lo == 0 || hi > j.order() || hi < lo {
        return Err(Error::Fit(format!("window {lo}..{hi} outside 1..{}", j.order())));
    }
    let u = reciprocal_gap(j, hi)?.to_f64();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (k, &uk) in u.iter().enumerate().take(hi + 1).skip(lo) {
        if uk <= 0.0 {
            return Err(Error::Fit(format!("u_{k} = {uk} is not positive")));
        }
        let kf = k as f64;
        rows.push(vec![kf.sqrt(), kf.ln(), 1.0]);
        y.push(uk.ln());
    }
    let dof = rows.len().checked_sub(3).filter(|&d| d > 0).ok_or_else(|| Error::Fit("window too short".into()))?;
    let (coef, rss) = least_squares(&rows, &y)?;
    Ok(FitReport::new("log_u_sqrt_log", &["A1", "B1", "C1"], &coef, window, rss, dof))
}

/// Taylor coefficients of `X(r) = log[(r - r0)(1/4 - J(r))]`.
pub fn x_series(j: &FloatSeries, r0: f64, order: usize) -> Result<FloatSeries> {
    let prec = j.precision();
    let gap = {
        let mut c = j.with_order(order).neg().into_coeffs();
        c[0] = Float::with_val(prec, &c[0] + 0.25f64);
        Series::new(c)
    };
    let mut lin = vec![Float::new(prec); order + 1];
    lin[0] = Float::with_val(prec, -r0);
    if order >= 1 {
        lin[1] = Float::with_val(prec, 1);
    }
    gap.mul(&Series::new(lin)).log(order)
}

fn cosine_basis(ks: &[f64], c: f64, d: f64) -> Vec<Vec<f64>> {
    ks.iter().map(|&k| vec![1.0, (c * (k - d)).cos()]).collect()
}

/// Fit `x(k) = A + B cos(C (k - D))` over the window: grid search in
/// `(C, D)` with a linear solve for `(A, B)` at each node, then Gauss-Newton.
pub fn fit_cosine(x: &[f64], window: (usize, usize)) -> Result<FitReport> {
    let (lo, hi) = window;
    if hi >= x.len() || hi < lo + 4 {
        return Err(Error::Fit(format!("window {lo}..{hi} unusable for {} coefficients", x.len())));
    }
    let ks: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
    let y = &x[lo..=hi];
    let dof = ks.len() - 4;
    let mut best: Option<(f64, usize, [f64; 4])> = None;
    let mut node = 0usize;
    let mut ci = 1;
    loop {
        let c = 0.05 + 0.005 * ci as f64;
        if c >= 1.5 - 1e-12 {
            break;
        }
        for di in 0..200 {
            let d = 0.02 * di as f64;
            if let Ok((ab, rss)) = least_squares(&cosine_basis(&ks, c, d), y) {
                let better = best.as_ref().is_none_or(|(s, _, _)| rss < *s);
                if better {
                    best = Some((rss, node, [ab[0], ab[1], c, d]));
                }
            }
            node += 1;
        }
        ci += 1;
    }
    let (grid_rss, _, start) = best.ok_or_else(|| Error::Fit("no usable grid node".into()))?;
    let names = ["A", "B", "C", "D"];
    match gauss_newton_cosine(&ks, y, start) {
        Some((p, rss)) if rss <= grid_rss => Ok(FitReport::new("cosine", &names, &p, window, rss, dof)),
        _ => {
            let mut rep = FitReport::new("cosine", &names, &start, window, grid_rss, dof);
            rep.converged = false;
            Ok(rep)
        }
    }
}

fn gauss_newton_cosine(ks: &[f64], y: &[f64], start: [f64; 4]) -> Option<([f64; 4], f64)> {
    let resid = |p: &[f64; 4]| -> Vec<f64> {
        ks.iter()
            .zip(y)
            .map(|(&k, &yk)| p[0] + p[1] * (p[2] * (k - p[3])).cos() - yk)
            .collect()
    };
    let rss = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut p = start;
    let mut cur = rss(&resid(&p));
    for _ in 0..200 {
        let jac = DMatrix::from_fn(ks.len(), 4, |i, col| {
            let t = p[2] * (ks[i] - p[3]);
            match col {
                0 => 1.0,
                1 => t.cos(),
                2 => -p[1] * t.sin() * (ks[i] - p[3]),
                _ => p[1] * t.sin() * p[2],
            }
        });
        let r = DVector::from_vec(resid(&p));
        let step = jac.svd(true, true).solve(&(-r), 1e-14).ok()?;
        // halve until the residual does not increase
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [
                p[0] + scale * step[0],
                p[1] + scale * step[1],
                p[2] + scale * step[2],
                p[3] + scale * step[3],
            ];
            let t = rss(&resid(&trial));
            if t.is_finite() && t <= cur {
                let done = (cur - t) <= 1e-30 + 1e-15 * cur;
                p = trial;
                cur = t;
                accepted = true;
                if done {
                    return Some((p, cur));
                }
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Some((p, cur));
        }
    }
    None
}

/// Cosine fit parameters `(A, B, C, D)` taken from a cosine [`FitReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl CosineParams {
    pub fn from_report(fit: &FitReport) -> Result<Self> {
        let get = |n: &str| fit.param(n).ok_or_else(|| Error::Fit(format!("fit has no parameter {n}")));
        if fit.model != "cosine" {
            return Err(Error::Fit(format!("expected a cosine fit, got {}", fit.model)));
        }
        Ok(CosineParams {
            a: get("A")?,
            b: get("B")?,
            c: get("C")?,
            d: get("D")?,
        })
    }

    pub fn at(&self, k: f64) -> f64 {
        self.a + self.b * (self.c * (k - self.d)).cos()
    }

    /// Closed form whose Taylor coefficients are `at(k)`:
    /// `A/(1-r) + B [cos CD - r cos(C(D+1))] / (1 - 2 r cos C + r^2)`.
    pub fn xhat(&self, r: Complex64) -> Result<Complex64> {
        let den1 = 1.0 - r;
        let den2 = 1.0 - 2.0 * r * self.c.cos() + r * r;
        if den1.norm() < 1e-300 || den2.norm() < 1e-300 {
            return Err(Error::AtPole);
        }
        let num2 = (self.c * self.d).cos() - r * (self.c * (self.d + 1.0)).cos();
        Ok(self.a / den1 + self.b * num2 / den2)
    }
}

/// `K(r) = 1/4 - exp(Y(r)) / (r - r0)` with `Y = Xhat + sum_{k<=n} (x_k - x(k)) r^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KApproximant {
    pub params: CosineParams,
    pub r0: f64,
    /// `x_k - x(k)` for `k = 0..=n`.
    pub corrections: Vec<f64>,
    /// Taylor coefficients of `K`.
    pub coeffs: Vec<f64>,
}

impl KApproximant {
    pub fn eval(&self, r: Complex64) -> Result<Complex64> {
        if (r - self.r0).norm() < 1e-300 {
            return Err(Error::AtPole);
        }
        let mut poly = Complex64::new(0.0, 0.0);
        for c in self.corrections.iter().rev() {
            poly = poly * r + c;
        }
        let y = self.params.xhat(r)? + poly;
        Ok(0.25 - y.exp() / (r - self.r0))
    }
}

/// Build `K` from the series, a cosine fit of its `x_k`, and the pole.
/// Coefficients are produced to `out_order` at the precision of `j`.
pub fn k_approximant(j: &FloatSeries, fit: &FitReport, r0: f64, out_order: usize) -> Result<KApproximant> {
    let params = CosineParams::from_report(fit)?;
    let prec = j.precision();
    let n = j.order();
    let x = x_series(j, r0, n)?;
    let xk = |k: usize| -> Float {
        let arg = params.c * (k as f64 - params.d);
        Float::with_val(prec, params.a) + Float::with_val(prec, params.b) * Float::with_val(prec, arg).cos()
    };
    let order = out_order.max(n);
    let mut corrections = Vec::with_capacity(n + 1);
    let ycoeffs: Vec<Float> = (0..=order)
        .map(|k| {
            let model = xk(k);
            if k <= n {
                let corr = Float::with_val(prec, x.coeff(k) - &model);
                corrections.push(corr.to_f64());
                Float::with_val(prec, &model + &corr)
            } else {
                model
            }
        })
        .collect();
    let e = Series::new(ycoeffs).exp(order);
    // 1/(r - r0) = -(1/r0) sum (r/r0)^k
    let inv_r0 = Float::with_val(prec, 1) / Float::with_val(prec, r0);
    let mut pole = Vec::with_capacity(order + 1);
    let mut pw = Float::with_val(prec, -&inv_r0);
    for _ in 0..=order {
        pole.push(pw.clone());
        pw *= &inv_r0;
    }
    let q = e.mul(&Series::new(pole));
    let coeffs: Vec<f64> = q
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let neg = -v.to_f64();
            if k == 0 {
                0.25 + neg
            } else {
                neg
            }
        })
        .take(out_order + 1)
        .collect();
    Ok(KApproximant {
        params,
        r0,
        corrections,
        coeffs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

pub const GAMMA_HAT_WINDOW: Rect = Rect {
    re_min: -1.2,
    re_max: 0.6,
    im_min: -1.2,
    im_max: 1.2,
};

/// Tolerance on `| |K| - 1/4 |` for emitted contour points.
pub const CONTOUR_TOL: f64 = 1e-6;

/// Marching-squares contour of `|f(r)| = 1/4` on an `n x n` grid, each
/// crossing refined by bisection along its cell edge. Returns polylines.
pub fn level_contour<F>(f: F, window: Rect, n: usize) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if n < 2 {
        return Err(Error::EmptyContour);
    }
    let g = |z: Complex64| f(z).map(|v| v.norm() - 0.25).unwrap_or(f64::NAN);
    let pt = |i: usize, k: usize| {
        Complex64::new(
            window.re_min + (window.re_max - window.re_min) * i as f64 / (n - 1) as f64,
            window.im_min + (window.im_max - window.im_min) * k as f64 / (n - 1) as f64,
        )
    };
    let vals: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| g(pt(i, k))).collect()).collect();
    // crossing point on the edge between two grid nodes, keyed by the nodes
    let mut crossings: HashMap<((usize, usize), (usize, usize)), Option<Complex64>> = HashMap::new();
    let mut crossing = |a: (usize, usize), b: (usize, usize)| -> Option<Complex64> {
        let key = if a < b { (a, b) } else { (b, a) };
        *crossings.entry(key).or_insert_with(|| {
            let (va, vb) = (vals[a.0][a.1], vals[b.0][b.1]);
            if !(va.is_finite() && vb.is_finite()) || (va < 0.0) == (vb < 0.0) {
                return None;
            }
            let (mut lo, mut hi) = (pt(a.0, a.1), pt(b.0, b.1));
            let mut glo = va;
            for _ in 0..100 {
                let mid = (lo + hi) / 2.0;
                let gm = g(mid);
                if !gm.is_finite() {
                    return None;
                }
                if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
                if (hi - lo).norm() < 1e-15 {
                    break;
                }
            }
            let z = (lo + hi) / 2.0;
            (g(z).abs() <= CONTOUR_TOL).then_some(z)
        })
    };
    let mut segments: Vec<(Complex64, Complex64)> = Vec::new();
    for i in 0..n - 1 {
        for k in 0..n - 1 {
            let corners = [(i, k), (i + 1, k), (i + 1, k + 1), (i, k + 1)];
            let pts: Vec<Complex64> = (0..4)
                .filter_map(|e| crossing(corners[e], corners[(e + 1) % 4]))
                .collect();
            match pts.len() {
                2 => segments.push((pts[0], pts[1])),
                4 => {
                    // saddle: pair by the centre value
                    let centre = g((pt(i, k) + pt(i + 1, k + 1)) / 2.0);
                    let v0 = vals[i][k];
                    if (centre < 0.0) == (v0 < 0.0) {
                        segments.push((pts[0], pts[1]));
                        segments.push((pts[2], pts[3]));
                    } else {
                        segments.push((pts[0], pts[3]));
                        segments.push((pts[1], pts[2]));
                    }
                }
                _ => {}
            }
        }
    }
    if segments.is_empty() {
        return Err(Error::EmptyContour);
    }
    Ok(chain_segments(segments))
}

fn chain_segments(segments: Vec<(Complex64, Complex64)>) -> Vec<Vec<Complex64>> {
    let key = |z: Complex64| ((z.re * 1e12).round() as i64, (z.im * 1e12).round() as i64);
    let mut ends: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        ends.entry(key(*a)).or_default().push(s);
        ends.entry(key(*b)).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut line = vec![segments[start].0, segments[start].1];
        for forward in [true, false] {
            loop {
                let tip = if forward { *line.last().unwrap() } else { line[0] };
                let next = ends
                    .get(&key(tip))
                    .and_then(|v| v.iter().copied().find(|&s| !used[s]));
                let Some(s) = next else { break };
                used[s] = true;
                let (a, b) = segments[s];
                let other = if key(a) == key(tip) { b } else { a };
                if forward {
                    line.push(other);
                } else {
                    line.insert(0, other);
                }
            }
        }
        lines.push(line);
    }
    lines
}

pub fn gamma_hat_contour(k: &KApproximant, window: Rect, n: usize) -> Result<Vec<Vec<Complex64>>> {
    level_contour(|z| k.eval(z), window, n)
}

/// Taylor coefficients of `exp(a/(1-r))` from
/// `(k+1) b_{k+1} = (2k + a) b_k - (k-1) b_{k-1}`, `b_0 = e^a`.
pub fn exp_singular_coeffs(a: f64, n: usize, prec: u32) -> Result<Vec<Float>> {
    if !(a > 0.0) {
        return Err(Error::Fit("a must be positive".into()));
    }
    let af = Float::with_val(prec, a);
    let b0 = Float::with_val(prec, af.exp_ref());
    Ok(singular_recurrence(b0, &af, n))
}

/// Exact coefficients of `exp(a/(1-r) - a)` for rational `a`.
pub fn exp_singular_coeffs_rational(a: &Rational, n: usize) -> Result<Vec<Rational>> {
    if a.cmp0().is_le() {
        return Err(Error::Fit("a must be positive".into()));
    }
    Ok(singular_recurrence(Rational::from(1), a, n))
}

fn singular_recurrence<C: Coefficient>(b0: C, a: &C, n: usize) -> Vec<C> {
    let mut b = Vec::with_capacity(n + 1);
    b.push(b0);
    for k in 0..n {
        let cur = b[k].mul(&a.from_i64_like(2 * k as i64).add(a));
        let prev = if k >= 1 {
            b[k - 1].mul_i64(k as i64 - 1)
        } else {
            a.zero_like()
        };
        b.push(cur.sub(&prev).div_i64(k as i64 + 1));
    }
    b
}

/// Same coefficients by exponentiating the series of `a/(1-r)`.
pub fn exp_singular_by_series(a: f64, n: usize, prec: u32) -> Vec<Float> {
    let s = Series::new(vec![Float::with_val(prec, a); n + 1]);
    s.exp(n).into_coeffs()
}

/// Same coefficients, exact, via the series exponential of `a r/(1-r)`.
pub fn exp_singular_by_series_rational(a: &Rational, n: usize) -> Result<Vec<Rational>> {
    let mut c = vec![a.clone(); n + 1];
    c[0] = Rational::new();
    Ok(RationalSeries::new(c).exp(n)?.into_coeffs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub a: f64,
    pub ks: Vec<usize>,
    /// `b_k / (k^{-3/4} e^{2 sqrt(a k)})`.
    pub ratios: Vec<f64>,
    /// Relative change of the ratio between the two largest `k`.
    pub drift: f64,
}

/// Ratios of the exact coefficients to the saddle-point form.
pub fn asymptotic_check(a: f64, ks: &[usize], prec: u32) -> Result<AsymptoticReport> {
    let kmax = ks.iter().copied().max().ok_or_else(|| Error::Fit("empty k list".into()))?;
    if kmax > 1_000_000 {
        return Err(Error::Fit("k beyond 10^6".into()));
    }
    let af = Float::with_val(prec, a);
    let mut want: Vec<usize> = ks.to_vec();
    want.sort_unstable();
    let mut found = HashMap::new();
    // stream the recurrence to avoid storing 10^5 multiprecision values
    let mut prev = Float::new(prec);
    let mut cur = Float::with_val(prec, af.exp_ref());
    let mut next_idx = 0;
    for k in 0..=kmax {
        while next_idx < want.len() && want[next_idx] == k {
            found.insert(k, cur.clone());
            next_idx += 1;
        }
        let t = Float::with_val(prec, &af + 2 * k as u64) * &cur - Float::with_val(prec, &prev * (k as i64 - 1));
        let nb = t / (k as u64 + 1);
        prev = std::mem::replace(&mut cur, nb);
    }
    let ratios: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let kf = Float::with_val(prec, k);
            let expo = Float::with_val(prec, &af * &kf).sqrt() * 2u32;
            let log_scale = expo - Float::with_val(prec, kf.ln_ref()) * 0.75f64;
            let scale = Float::with_val(prec, log_scale.exp_ref());
            Float::with_val(prec, &found[&k] / scale).to_f64()
        })
        .collect();
    let drift = if want.len() >= 2 {
        let (k1, k2) = (want[want.len() - 2], want[want.len() - 1]);
        let i1 = ks.iter().position(|&k| k == k1).unwrap();
        let i2 = ks.iter().position(|&k| k == k2).unwrap();
        ((ratios[i2] - ratios[i1]) / ratios[i1]).abs()
    } else {
        0.0
    };
    Ok(AsymptoticReport {
        a,
        ks: ks.to_vec(),
        ratios,
        drift,
    })
}

/// Mean-field current `r/(1+r)^2` for `r <= 1`, `1/4` above.
pub fn mean_field_current(r: f64) -> f64 {
    if r <= 1.0 {
        r / ((1.0 + r) * (1.0 + r))
    } else {
        0.25
    }
}

/// Coefficients `w_k` of `(r - r0) J`.
pub fn pole_removed(j: &[f64], r0: f64) -> Vec<f64> {
    (0..j.len())
        .map(|k| if k == 0 { -r0 * j[0] } else { j[k - 1] - r0 * j[k] })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub window: (usize, usize),
    pub max_abs: f64,
    /// Largest `|w_{k+1}/w_k|` inside the window.
    pub max_ratio: f64,
}

impl GrowthReport {
    pub fn bounded(&self, max_abs: f64, max_ratio: f64) -> bool {
        self.max_abs < max_abs && self.max_ratio <= max_ratio
    }
}

/// Size and successive ratios of the coefficients of `(r - r0) J`.
pub fn coefficient_growth(j: &[f64], r0: f64, window: (usize, usize)) -> Result<GrowthReport> {
    let (lo, hi) = window;
    if hi >= j.len() || lo > hi {
        return Err(Error::Fit(format!("window {lo}..{hi} outside the series")));
    }
    let w = pole_removed(j, r0);
    let max_abs = w[lo..=hi].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_ratio = (lo..hi).map(|k| (w[k + 1] / w[k]).abs()).fold(0.0f64, f64::max);
    Ok(GrowthReport {
        window,
        max_abs,
        max_ratio,
    })
}
