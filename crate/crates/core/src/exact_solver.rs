//! Exact stationary current of small systems as a reduced rational function
//! `P(r)/Q(r)`, reconstructed from exact evaluations at rational points.

use rug::{Integer, Rational};

use crate::algebra::{roots_with_clusters, ComplexPoint, Polynomial};
use crate::error::{Error, Result};
use crate::model::{build_generator, AffineGenerator, Geometry, GeometryKind};

/// Reduced denominator degrees of the ring currents for `L = 1..=5`.
pub const RING_DENOMINATOR_DEGREES: [usize; 5] = [1, 2, 5, 14, 42];

/// Held-out points used to validate a reconstruction.
pub const HELD_OUT: usize = 5;

const MAX_DEGREE_BOUND: usize = 1024;

/// Coprime integer-coefficient current `P/Q` with `Q(0) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentRational {
    pub geometry: Geometry,
    pub p: Polynomial,
    pub q: Polynomial,
}

impl CurrentRational {
    pub fn eval(&self, r: &Rational) -> Rational {
        self.p.eval(r) / self.q.eval(r)
    }

    pub fn eval_complex(&self, r: &ComplexPoint, prec: u32) -> ComplexPoint {
        self.p.eval_complex(r, prec).div(&self.q.eval_complex(r, prec))
    }

    pub fn taylor(&self, order: usize) -> Result<crate::algebra::RationalSeries> {
        self.p.series_div(&self.q, order)
    }

    pub fn denominator_degree(&self) -> usize {
        self.q.degree().unwrap_or(0)
    }
}

/// Gaussian elimination; pivots chosen by smallest bit size.
/// Returns the unique (up to scale) null vector, normalized so that its
/// entries sum to one when that sum is nonzero.
pub fn null_vector(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pick = (row..rows)
            .filter(|&i| a[i][col].cmp0().is_ne())
            .min_by_key(|&i| a[i][col].numer().significant_bits() + a[i][col].denom().significant_bits());
        let Some(p) = pick else { continue };
        a.swap(row, p);
        let inv = Rational::from(a[row][col].recip_ref());
        for x in a[row].iter_mut().skip(col) {
            *x *= &inv;
        }
        let pivot_row = a[row].clone();
        for r in a.iter_mut().skip(row + 1) {
            if r[col].cmp0().is_eq() {
                continue;
            }
            let f = std::mem::take(&mut r[col]);
            for (j, pv) in pivot_row.iter().enumerate().skip(col + 1) {
                if pv.cmp0().is_ne() {
                    r[j] -= Rational::from(&f * pv);
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let nullity = cols - pivots.len();
    if nullity != 1 {
        return Err(Error::NullSpaceDimension(nullity));
    }
    let free = (0..cols)
        .find(|c| !pivots.iter().any(|&(_, pc)| pc == *c))
        .expect("one free column");
    let mut x = vec![Rational::new(); cols];
    x[free] = Rational::from(1);
    // back substitution on the unit-pivot echelon form
    for &(r, c) in pivots.iter().rev() {
        let mut s = Rational::new();
        for (j, v) in a[r].iter().enumerate().skip(c + 1) {
            if v.cmp0().is_ne() && x[j].cmp0().is_ne() {
                s += Rational::from(v * &x[j]);
            }
        }
        x[c] = -s;
    }
    let total: Rational = x.iter().fold(Rational::new(), |acc, v| acc + v);
    if total.cmp0().is_ne() {
        for v in x.iter_mut() {
            *v /= &total;
        }
    }
    Ok(x)
}

/// Exact stationary distribution at a rational `r > 0`, in the generator's
/// state order.
///
/// With `r > 0` every diagonal entry of `M(r)` is nonzero, and the matrix is
/// lower triangular in potential order apart from the slow-bond transitions,
/// whose source states all have `eta_0 = 1, eta_1 = 0`. The stationary vector
/// is therefore fixed by its values on those blocked states, which solve a
/// small dense system.
pub fn stationary_distribution(gen: &AffineGenerator, r: &Rational) -> Result<Vec<Rational>> {
    if r.cmp0().is_le() {
        return Err(Error::InvalidGeometry("exact evaluation needs r > 0".into()));
    }
    let n = gen.len();
    let diag: Vec<Rational> = (0..n)
        .map(|j| &gen.m0.diag[j] + Rational::from(r * &gen.m1.diag[j]))
        .collect();
    let blocked: Vec<usize> = (0..n).filter(|&j| gen.m1.column(j).next().is_some()).collect();
    let m = blocked.len();
    // z_b = T^{-1} U e_b, T = lower(M0) + diag(M(r)), U = slow-bond inflow.
    let mut z_cols: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for &b in &blocked {
        let (target, _) = gen.m1.column(b).next().expect("blocked state");
        let mut acc = vec![Rational::new(); n];
        acc[target] = Rational::from(1);
        let mut z = vec![Rational::new(); n];
        for eta in target..n {
            if acc[eta].cmp0().is_eq() {
                continue;
            }
            let v = std::mem::take(&mut acc[eta]) / &diag[eta];
            for (i, w) in gen.m0.column(eta) {
                acc[i] -= Rational::from(w * &v);
            }
            z[eta] = v;
        }
        z_cols.push(z);
    }
    // (I + r Z_BB) x = 0
    let a: Vec<Vec<Rational>> = blocked
        .iter()
        .enumerate()
        .map(|(i, &bi)| {
            (0..m)
                .map(|j| {
                    let mut v = Rational::from(r * &z_cols[j][bi]);
                    if i == j {
                        v += 1;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let x = null_vector(a)?;
    let mut p = vec![Rational::new(); n];
    for (xj, z) in x.iter().zip(&z_cols) {
        if xj.cmp0().is_eq() {
            continue;
        }
        let f = -Rational::from(r * xj);
        for (pi, zi) in p.iter_mut().zip(z) {
            if zi.cmp0().is_ne() {
                *pi += Rational::from(&f * zi);
            }
        }
    }
    let total = p.iter().fold(Rational::new(), |acc, v| acc + v);
    if total.cmp0().is_eq() {
        return Err(Error::SingularSystem);
    }
    for v in p.iter_mut() {
        *v /= &total;
    }
    Ok(p)
}

/// `r <eta_0 (1 - eta_1)>` under a stationary vector.
pub fn current_from_distribution(gen: &AffineGenerator, p: &[Rational], r: &Rational) -> Rational {
    let mut s = Rational::new();
    for (j, v) in p.iter().enumerate() {
        if gen.m1.column(j).next().is_some() {
            s += v;
        }
    }
    s * r
}

/// Exact current at one rational point.
pub fn current_at(gen: &AffineGenerator, r: &Rational) -> Result<Rational> {
    let p = stationary_distribution(gen, r)?;
    Ok(current_from_distribution(gen, &p, r))
}

/// Exact current from a dense elimination of the full generator. Slow; kept
/// as an independent check of [`current_at`].
pub fn current_at_dense(gen: &AffineGenerator, r: &Rational) -> Result<Rational> {
    let p = null_vector(gen.dense_at(r))?;
    Ok(current_from_distribution(gen, &p, r))
}

/// Newton form of the interpolating polynomial through `(xs, ys)`.
fn newton_interpolant(xs: &[Rational], ys: &[Rational]) -> Polynomial {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = Rational::from(&dd[i] - &dd[i - 1]);
            let den = Rational::from(&xs[i] - &xs[i - level]);
            dd[i] = num / den;
        }
    }
    let mut poly = Polynomial::new(vec![dd[n - 1].clone()]);
    for i in (0..n - 1).rev() {
        let lin = Polynomial::new(vec![Rational::from(-&xs[i]), Rational::from(1)]);
        poly = poly.mul(&lin).add(&Polynomial::new(vec![dd[i].clone()]));
    }
    poly
}

/// Rational interpolation with `deg P <= dp`, `deg Q <= dq` through
/// `dp + dq + 1` points, by the extended Euclidean algorithm applied to the
/// node polynomial and the polynomial interpolant.
pub fn cauchy_interpolate(xs: &[Rational], ys: &[Rational], dp: usize, dq: usize) -> Result<(Polynomial, Polynomial)> {
    if xs.len() != dp + dq + 1 || ys.len() != xs.len() {
        return Err(Error::Reconstruction(format!(
            "need exactly {} points, got {}",
            dp + dq + 1,
            xs.len()
        )));
    }
    let mut node = Polynomial::one();
    for x in xs {
        node = node.mul(&Polynomial::new(vec![Rational::from(-x), Rational::from(1)]));
    }
    let u = newton_interpolant(xs, ys);
    // invariant: r_i = t_i * u (mod node)
    let (mut r0, mut t0) = (node, Polynomial::zero());
    let (mut r1, mut t1) = (u, Polynomial::one());
    while r1.degree().is_some_and(|d| d > dp) {
        let (q, rem) = r0.div_rem(&r1)?;
        let t2 = t0.sub(&q.mul(&t1));
        // keep coefficient growth down: scale (rem, t2) by the content of rem
        let scale = content(&rem);
        let (rem, t2) = match scale {
            Some(s) => (rem.scale(&s), t2.scale(&s)),
            None => (rem, t2),
        };
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.degree().is_none_or(|d| d > dq) {
        return Err(Error::Reconstruction(format!(
            "denominator degree {:?} exceeds bound {dq}",
            t1.degree()
        )));
    }
    let g = r1.gcd(&t1);
    let (p, _) = r1.div_rem(&g)?;
    let (q, _) = t1.div_rem(&g)?;
    for (x, y) in xs.iter().zip(ys) {
        let qx = q.eval(x);
        if qx.cmp0().is_eq() || (p.eval(x) / qx) != *y {
            return Err(Error::Reconstruction("interpolant misses a node (unattainable point)".into()));
        }
    }
    Ok(normalize(p, q))
}

/// Reciprocal of the rational content, making the coefficients coprime
/// integers.
fn content(p: &Polynomial) -> Option<Rational> {
    let lead = p.leading()?;
    let prim = p.primitive();
    let ratio = Rational::from(prim.leading()? / lead);
    Some(ratio)
}

/// Coprime integer coefficients with `Q(0) > 0`.
fn normalize(p: Polynomial, q: Polynomial) -> (Polynomial, Polynomial) {
    let mut lcm = Integer::from(1);
    for c in p.coeffs().iter().chain(q.coeffs()) {
        lcm.lcm_mut(c.denom());
    }
    let ip = p.scale(&Rational::from(&lcm));
    let iq = q.scale(&Rational::from(&lcm));
    let mut g = Integer::new();
    for c in ip.coeffs().iter().chain(iq.coeffs()) {
        g.gcd_mut(c.numer());
    }
    let sign = if iq.coeff(0).cmp0().is_lt() { -1 } else { 1 };
    let s = Rational::from((Integer::from(sign), g));
    (ip.scale(&s), iq.scale(&s))
}

#[derive(Clone, Debug)]
pub struct ReconstructionOptions {
    /// Starting bound on both degrees; doubled until held-out points agree.
    pub degree_bound: usize,
}

pub fn default_degree_bound(g: &Geometry) -> usize {
    match g.kind {
        GeometryKind::Ring if (1..=5).contains(&g.l) => RING_DENOMINATOR_DEGREES[g.l - 1] + 1,
        _ => 4,
    }
}

/// Exact reduced current of a small system.
///
/// Evaluates the current exactly at `r_i = i/(D+3)`, `i = 1..=2D+1+5`,
/// reconstructs `P/Q` with both degrees at most `D` from the first `2D+1`
/// values, and checks the remaining five exactly. `D` doubles on failure.
pub fn current_rational(g: &Geometry) -> Result<CurrentRational> {
    current_rational_with(g, &ReconstructionOptions { degree_bound: default_degree_bound(g) })
}

pub fn current_rational_with(g: &Geometry, opts: &ReconstructionOptions) -> Result<CurrentRational> {
    let within = match g.kind {
        GeometryKind::Ring => g.l <= 5,
        GeometryKind::Interval => g.l <= 4,
    };
    if !within {
        return Err(Error::StateSpaceTooLarge {
            what: format!("exact rational current of {g}"),
            states: g.state_count(),
        });
    }
    let gen = build_generator(g)?;
    let mut bound = opts.degree_bound.max(1);
    let mut last_err = String::new();
    while bound <= MAX_DEGREE_BOUND {
        let n = 2 * bound + 1;
        let denom = bound as u64 + 3;
        let xs: Vec<Rational> = (1..=(n + HELD_OUT) as u64).map(|i| Rational::from((i, denom))).collect();
        let ys = xs.iter().map(|x| current_at(&gen, x)).collect::<Result<Vec<_>>>()?;
        match cauchy_interpolate(&xs[..n], &ys[..n], bound, bound) {
            Ok((p, q)) => {
                let cr = CurrentRational {
                    geometry: g.clone(),
                    p,
                    q,
                };
                let misses = xs[n..].iter().zip(&ys[n..]).filter(|(x, y)| cr.eval(x) != **y).count();
                if misses == 0 {
                    return Ok(cr);
                }
                last_err = format!("degree bound {bound}: {misses} of {HELD_OUT} held-out points disagree");
            }
            Err(e) => last_err = format!("degree bound {bound}: {e}"),
        }
        bound *= 2;
    }
    Err(Error::Reconstruction(last_err))
}

/// Near-origin window used for the small-`L` zero plots:
/// `re in [re_min, re_max]`, `|im| <= im_max`.
pub const ZERO_WINDOW: ZeroWindow = ZeroWindow {
    re_min: -1.05,
    re_max: 0.6,
    im_max: 0.65,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl ZeroWindow {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.re_min && x <= self.re_max && y.abs() <= self.im_max
    }
}

#[derive(Clone, Debug)]
pub struct DenominatorZeros {
    pub all: Vec<ComplexPoint>,
    /// Zeros inside [`ZERO_WINDOW`].
    pub in_window: Vec<ComplexPoint>,
    pub clusters: Vec<Vec<usize>>,
}

pub fn denominator_zeros(cr: &CurrentRational, precision_bits: u32) -> Result<DenominatorZeros> {
    let set = roots_with_clusters(&cr.q, precision_bits)?;
    let in_window = set
        .roots
        .iter()
        .filter(|z| {
            let (x, y) = z.to_f64();
            ZERO_WINDOW.contains(x, y)
        })
        .cloned()
        .collect();
    Ok(DenominatorZeros {
        all: set.roots,
        in_window,
        clusters: set.clusters,
    })
}
