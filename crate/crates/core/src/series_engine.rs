//! Perturbative expansion of the stationary state in powers of `r` by
//! triangular back substitution of `M0 p_k = -M1 p_{k-1}`.

use std::collections::BTreeMap;

use rug::Rational;

use crate::model::{build_generator_with, stationary_at_r0, AffineGenerator, Geometry, GeometryKind, StateGuard};
use crate::error::{Error, Result};

/// Observable whose coefficients are checked for size independence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// `r <eta_0 (1 - eta_1)>`.
    Current,
    /// Any function of the `2j` sites `-j+1..=j`.
    Window(usize),
}

/// Highest order whose coefficients do not depend on the system size.
///
/// Window observables are stable through `L - j`, one order more on the
/// interval with `alpha = beta = 1`; the current is stable through `L`.
pub fn validated_order(g: &Geometry, observable: Observable) -> usize {
    match observable {
        Observable::Current => g.l,
        Observable::Window(j) => {
            let base = g.l.saturating_sub(j);
            let bonus = g.kind == GeometryKind::Interval && g.alpha == 1 && g.beta == 1;
            base + bonus as usize
        }
    }
}

/// Smallest window half-width containing `site`.
pub fn halfwidth_of_site(site: i64) -> usize {
    if site >= 1 {
        site as usize
    } else {
        (1 - site) as usize
    }
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct ExpandOptions {
    /// Keep every `p_k`; otherwise only the last two orders live at once.
    pub keep_vectors: bool,
    /// Recompute `M0 p_k + M1 p_{k-1}` on every row. The back substitution
    /// satisfies all rows but the absorbing one by construction, so the
    /// default only checks that row.
    pub full_residual: bool,
    /// Sites whose densities are extracted; `None` means all sites.
    pub density_sites: Option<Vec<i64>>,
    pub guard: StateGuard,
}


/// Current and density coefficients of one expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    /// `c[k]`, `k = 0..=order`.
    pub c: Vec<Rational>,
    /// `d[site][k]`, `k = 0..=order`.
    pub d: BTreeMap<i64, Vec<Rational>>,
    /// Current coefficients past this order depend on the geometry.
    pub validated_order: usize,
}

impl CoefficientTable {
    pub fn current_is_validated(&self, k: usize) -> bool {
        k <= self.validated_order
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateExpansion {
    pub geometry: Geometry,
    pub order: usize,
    /// Present only with [`ExpandOptions::keep_vectors`]; indexed by the
    /// generator's state order.
    pub p: Option<Vec<Vec<Rational>>>,
    pub table: CoefficientTable,
}

impl SteadyStateExpansion {
    pub fn current_coeffs(&self) -> &[Rational] {
        &self.table.c
    }

    pub fn density_coeffs(&self, site: i64) -> Result<&[Rational]> {
        if !self.geometry.contains_site(site) {
            return Err(Error::SiteOutOfRange(site));
        }
        self.table
            .d
            .get(&site)
            .map(Vec::as_slice)
            .ok_or(Error::SiteOutOfRange(site))
    }
}

pub fn expand(g: &Geometry, order: usize) -> Result<SteadyStateExpansion> {
    expand_with(g, order, &ExpandOptions::default())
}

pub fn expand_with(g: &Geometry, order: usize, opts: &ExpandOptions) -> Result<SteadyStateExpansion> {
    let gen = build_generator_with(g, opts.guard)?;
    expand_generator(&gen, order, opts)
}

/// Back substitution on a prebuilt generator.
///
/// States are visited in ascending potential; every `M0` transition raises
/// the potential by one, so all inflow into a state is known when it is
/// reached. Contributions are pushed along columns as soon as a value is
/// final.
pub fn expand_generator(gen: &AffineGenerator, order: usize, opts: &ExpandOptions) -> Result<SteadyStateExpansion> {
    let g = &gen.geometry;
    let n = gen.len();
    let absorbing = gen
        .space
        .index_of(stationary_at_r0(g)?)
        .expect("step configuration is a state");
    let sites: Vec<i64> = match &opts.density_sites {
        Some(s) => {
            if let Some(&bad) = s.iter().find(|&&i| !g.contains_site(i)) {
                return Err(Error::SiteOutOfRange(bad));
            }
            s.clone()
        }
        None => g.sites().collect(),
    };
    let blocked: Vec<bool> = gen
        .space
        .states
        .iter()
        .map(|c| c.occupied(g, 0) && !c.occupied(g, 1))
        .collect();
    let exit0: Vec<Rational> = gen.m0.diag.iter().map(|d| Rational::from(-d)).collect();
    for (j, e) in exit0.iter().enumerate() {
        if j != absorbing && e.cmp0().is_le() {
            return Err(Error::ZeroDiagonal(gen.space.states[j].0));
        }
    }

    let mut c = vec![Rational::new()];
    let mut d: BTreeMap<i64, Vec<Rational>> = sites.iter().map(|&s| (s, Vec::with_capacity(order + 1))).collect();
    let mut kept = opts.keep_vectors.then(Vec::new);

    let mut prev = vec![Rational::new(); n];
    prev[absorbing] = Rational::from(1);
    record_densities(gen, &prev, &mut d);

    for k in 1..=order {
        c.push(dot_mask(&prev, &blocked));
        let mut acc = vec![Rational::new(); n];
        gen.m1.mul_add(&prev, &mut acc);
        let mut cur = vec![Rational::new(); n];
        for eta in 0..n {
            if eta == absorbing {
                continue;
            }
            let value = std::mem::take(&mut acc[eta]);
            if value.cmp0().is_eq() {
                continue;
            }
            let value = if exit0[eta] == 1 { value } else { value / &exit0[eta] };
            for (i, v) in gen.m0.column(eta) {
                if *v == 1 {
                    acc[i] += &value;
                } else {
                    acc[i] += Rational::from(v * &value);
                }
            }
            cur[eta] = value;
        }
        // The absorbing row is the one equation not solved above.
        if acc[absorbing].cmp0().is_ne() {
            return Err(Error::Residual {
                order: k,
                state: gen.space.states[absorbing].0,
            });
        }
        let mut total = Rational::new();
        for v in &cur {
            total += v;
        }
        cur[absorbing] = -total;
        if opts.full_residual {
            check_residual(gen, &cur, &prev, k)?;
        }
        record_densities(gen, &cur, &mut d);
        if let Some(kept) = kept.as_mut() {
            kept.push(std::mem::replace(&mut prev, cur));
        } else {
            prev = cur;
        }
    }
    if let Some(kept) = kept.as_mut() {
        kept.push(prev);
    }
    Ok(SteadyStateExpansion {
        geometry: g.clone(),
        order,
        p: kept,
        table: CoefficientTable {
            c,
            d,
            validated_order: validated_order(g, Observable::Current),
        },
    })
}

fn dot_mask(p: &[Rational], mask: &[bool]) -> Rational {
    let mut s = Rational::new();
    for (v, &m) in p.iter().zip(mask) {
        if m {
            s += v;
        }
    }
    s
}

fn record_densities(gen: &AffineGenerator, p: &[Rational], d: &mut BTreeMap<i64, Vec<Rational>>) {
    let g = &gen.geometry;
    for (&site, out) in d.iter_mut() {
        let bit = g.bit(site);
        let mut s = Rational::new();
        for (v, c) in p.iter().zip(&gen.space.states) {
            if c.0 >> bit & 1 == 1 {
                s += v;
            }
        }
        out.push(s);
    }
}

fn check_residual(gen: &AffineGenerator, cur: &[Rational], prev: &[Rational], k: usize) -> Result<()> {
    let mut res = vec![Rational::new(); cur.len()];
    gen.m0.mul_add(cur, &mut res);
    gen.m1.mul_add(prev, &mut res);
    match res.iter().position(|v| v.cmp0().is_ne()) {
        Some(i) => Err(Error::Residual {
            order: k,
            state: gen.space.states[i].0,
        }),
        None => Ok(()),
    }
}
