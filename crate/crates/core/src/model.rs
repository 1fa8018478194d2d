//! Finite geometries, their state spaces, and the affine generator
//! `M(r) = M0 + r M1` with the slow bond between sites 0 and 1.
//!
//! Sites are labelled `-L+1..=L` in both geometries. Site `i` is stored in
//! bit `i + L - 1` of a [`Configuration`].

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rational, rational_to_string};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Ring,
    Interval,
}

/// Ring of `2L` sites carrying `L` particles, or an open interval of `2L`
/// sites with entry rate `alpha` at site `-L+1` and exit rate `beta` at `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "GeometryConfig", try_from = "GeometryConfig")]
pub struct Geometry {
    pub kind: GeometryKind,
    pub l: usize,
    pub alpha: Rational,
    pub beta: Rational,
}

impl Geometry {
    pub fn ring(l: usize) -> Self {
        Geometry {
            kind: GeometryKind::Ring,
            l,
            alpha: Rational::from(1),
            beta: Rational::from(1),
        }
    }

    pub fn interval(l: usize, alpha: Rational, beta: Rational) -> Self {
        Geometry {
            kind: GeometryKind::Interval,
            l,
            alpha,
            beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l > 31 {
            return Err(Error::InvalidGeometry(format!("L = {} outside 1..=31", self.l)));
        }
        if self.kind == GeometryKind::Interval && (self.alpha.cmp0().is_lt() || self.beta.cmp0().is_lt()) {
            return Err(Error::InvalidGeometry("alpha and beta must be >= 0".into()));
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        2 * self.l
    }

    pub fn first_site(&self) -> i64 {
        1 - self.l as i64
    }

    pub fn last_site(&self) -> i64 {
        self.l as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.first_site()..=self.last_site()
    }

    pub fn contains_site(&self, site: i64) -> bool {
        (self.first_site()..=self.last_site()).contains(&site)
    }

    /// Bit position of `site`.
    pub fn bit(&self, site: i64) -> u32 {
        debug_assert!(self.contains_site(site));
        (site + self.l as i64 - 1) as u32
    }

    /// Number of states, without enumerating them.
    pub fn state_count(&self) -> u128 {
        match self.kind {
            GeometryKind::Ring => binomial(2 * self.l as u64, self.l as u64),
            GeometryKind::Interval => 1u128 << (2 * self.l),
        }
    }

    /// Triangularity potential: every rate-1 (and entry/exit) transition at
    /// `r = 0` raises it by exactly one.
    ///
    /// Ring: sites are laid on the cut chain `1, 2, .., L, -L+1, .., 0` at
    /// positions `1..=2L` and the potential is the sum of occupied positions.
    /// Interval: occupied sites `i <= 0` count `i + L`, empty sites `i >= 1`
    /// count `L + 1 - i`.
    pub fn potential(&self, c: Configuration) -> u32 {
        let l = self.l as i64;
        self.sites()
            .map(|i| {
                let occ = c.occupied(self, i);
                match self.kind {
                    GeometryKind::Ring if occ => (if i >= 1 { i } else { i + 2 * l }) as u32,
                    GeometryKind::Ring => 0,
                    GeometryKind::Interval => match (i <= 0, occ) {
                        (true, true) => (i + l) as u32,
                        (false, false) => (l + 1 - i) as u32,
                        _ => 0,
                    },
                }
            })
            .sum()
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeometryKind::Ring => write!(f, "ring(L={})", self.l),
            GeometryKind::Interval => write!(f, "interval(L={}, alpha={}, beta={})", self.l, self.alpha, self.beta),
        }
    }
}

/// Geometry as a plain config record `{kind, L, alpha?, beta?}`, rates as
/// `"num/den"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
}

impl From<&Geometry> for GeometryConfig {
    fn from(g: &Geometry) -> Self {
        let interval = g.kind == GeometryKind::Interval;
        GeometryConfig {
            kind: g.kind,
            l: g.l,
            alpha: interval.then(|| rational_to_string(&g.alpha)),
            beta: interval.then(|| rational_to_string(&g.beta)),
        }
    }
}

impl TryFrom<&GeometryConfig> for Geometry {
    type Error = Error;

    fn try_from(c: &GeometryConfig) -> Result<Self> {
        let rate = |s: &Option<String>| s.as_deref().map(parse_rational).transpose();
        let g = match c.kind {
            GeometryKind::Ring => Geometry::ring(c.l),
            GeometryKind::Interval => Geometry::interval(
                c.l,
                rate(&c.alpha)?.unwrap_or_else(|| Rational::from(1)),
                rate(&c.beta)?.unwrap_or_else(|| Rational::from(1)),
            ),
        };
        g.validate()?;
        Ok(g)
    }
}

impl From<Geometry> for GeometryConfig {
    fn from(g: Geometry) -> Self {
        GeometryConfig::from(&g)
    }
}

impl TryFrom<GeometryConfig> for Geometry {
    type Error = Error;

    fn try_from(c: GeometryConfig) -> Result<Self> {
        Geometry::try_from(&c)
    }
}

/// Occupation bits of the `2L` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(pub u64);

impl Configuration {
    pub fn occupied(self, g: &Geometry, site: i64) -> bool {
        self.0 >> g.bit(site) & 1 == 1
    }

    pub fn particles(self) -> u32 {
        self.0.count_ones()
    }

    /// Exchange the contents of two sites.
    pub fn swapped(self, g: &Geometry, a: i64, b: i64) -> Self {
        let (ba, bb) = (g.bit(a), g.bit(b));
        if (self.0 >> ba & 1) == (self.0 >> bb & 1) {
            self
        } else {
            Configuration(self.0 ^ (1 << ba) ^ (1 << bb))
        }
    }

    pub fn toggled(self, g: &Geometry, site: i64) -> Self {
        Configuration(self.0 ^ (1 << g.bit(site)))
    }

    /// Occupations listed from site `-L+1` to `L`.
    pub fn occupancy(self, g: &Geometry) -> Vec<u8> {
        g.sites().map(|i| self.occupied(g, i) as u8).collect()
    }

    pub fn from_occupancy(occ: &[u8]) -> Self {
        Configuration(
            occ.iter()
                .enumerate()
                .fold(0u64, |acc, (b, &o)| acc | ((o as u64 & 1) << b)),
        )
    }
}

/// Size limits for exact enumeration.
#[derive(Clone, Copy, Debug)]
pub struct StateGuard {
    pub ring_max_l: usize,
    pub interval_max_l: usize,
}

impl Default for StateGuard {
    fn default() -> Self {
        StateGuard {
            ring_max_l: 14,
            interval_max_l: 12,
        }
    }
}

/// Deterministically ordered state space: ascending (potential, bits).
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub states: Vec<Configuration>,
    pub potential: Vec<u32>,
    index: HashMap<u64, u32>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, c: Configuration) -> Option<usize> {
        self.index.get(&c.0).map(|&i| i as usize)
    }
}

pub fn enumerate_states(g: &Geometry) -> Result<StateSpace> {
    enumerate_states_with(g, StateGuard::default())
}

pub fn enumerate_states_with(g: &Geometry, guard: StateGuard) -> Result<StateSpace> {
    g.validate()?;
    let max_l = match g.kind {
        GeometryKind::Ring => guard.ring_max_l,
        GeometryKind::Interval => guard.interval_max_l,
    };
    if g.l > max_l {
        return Err(Error::StateSpaceTooLarge {
            what: g.to_string(),
            states: g.state_count(),
        });
    }
    let n = 2 * g.l as u32;
    let mut raw: Vec<u64> = match g.kind {
        GeometryKind::Ring => {
            // Gosper's hack over all n-bit words with L ones.
            let mut v = Vec::with_capacity(g.state_count() as usize);
            let mut x: u64 = (1u64 << g.l) - 1;
            while x < (1u64 << n) {
                v.push(x);
                let c = x & x.wrapping_neg();
                let r = x + c;
                x = (((r ^ x) >> 2) / c) | r;
            }
            v
        }
        GeometryKind::Interval => (0..1u64 << n).collect(),
    };
    let mut keyed: Vec<(u32, u64)> = raw
        .drain(..)
        .map(|b| (g.potential(Configuration(b)), b))
        .collect();
    keyed.sort_unstable();
    let index = keyed
        .iter()
        .enumerate()
        .map(|(i, &(_, b))| (b, i as u32))
        .collect();
    Ok(StateSpace {
        potential: keyed.iter().map(|&(p, _)| p).collect(),
        states: keyed.into_iter().map(|(_, b)| Configuration(b)).collect(),
        index,
    })
}

/// Rate label of a single transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rate {
    Unit,
    Alpha,
    Beta,
    /// The slow bond; rate `r`, carried by `M1`.
    Blockage,
}

/// Every transition out of `c` with its target and rate label.
pub fn transitions(g: &Geometry, c: Configuration) -> Vec<(Configuration, Rate)> {
    let mut out = Vec::with_capacity(2 * g.l + 2);
    let last = g.last_site();
    for i in g.sites() {
        let next = match (g.kind, i == last) {
            (GeometryKind::Ring, true) => g.first_site(),
            (GeometryKind::Interval, true) => continue,
            _ => i + 1,
        };
        if c.occupied(g, i) && !c.occupied(g, next) {
            let rate = if i == 0 { Rate::Blockage } else { Rate::Unit };
            out.push((c.swapped(g, i, next), rate));
        }
    }
    if g.kind == GeometryKind::Interval {
        let first = g.first_site();
        if !c.occupied(g, first) && g.alpha.cmp0().is_gt() {
            out.push((c.toggled(g, first), Rate::Alpha));
        }
        if c.occupied(g, last) && g.beta.cmp0().is_gt() {
            out.push((c.toggled(g, last), Rate::Beta));
        }
    }
    out
}

/// Column-compressed sparse matrix with a separate diagonal.
#[derive(Clone, Debug, Default)]
pub struct SparseColumns {
    pub col_ptr: Vec<usize>,
    pub rows: Vec<u32>,
    pub vals: Vec<Rational>,
    pub diag: Vec<Rational>,
}

impl SparseColumns {
    /// Off-diagonal `(row, value)` entries of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, &Rational)> {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        self.rows[a..b].iter().map(|&r| r as usize).zip(&self.vals[a..b])
    }

    pub fn off_diagonal_count(&self) -> usize {
        self.rows.len()
    }

    /// `y += A x`.
    pub fn mul_add(&self, x: &[Rational], y: &mut [Rational]) {
        for (j, xj) in x.iter().enumerate() {
            if xj.cmp0().is_eq() {
                continue;
            }
            y[j] += Rational::from(&self.diag[j] * xj);
            for (i, v) in self.column(j) {
                y[i] += Rational::from(v * xj);
            }
        }
    }

    pub fn column_sum(&self, j: usize) -> Rational {
        let mut s = self.diag[j].clone();
        for (_, v) in self.column(j) {
            s += v;
        }
        s
    }
}

/// `M(r) = M0 + r M1` over an enumerated state space.
#[derive(Clone, Debug)]
pub struct AffineGenerator {
    pub geometry: Geometry,
    pub space: StateSpace,
    pub m0: SparseColumns,
    pub m1: SparseColumns,
}

pub fn build_generator(g: &Geometry) -> Result<AffineGenerator> {
    build_generator_with(g, StateGuard::default())
}

pub fn build_generator_with(g: &Geometry, guard: StateGuard) -> Result<AffineGenerator> {
    let space = enumerate_states_with(g, guard)?;
    let n = space.len();
    let mut m0 = SparseColumns {
        col_ptr: vec![0],
        diag: Vec::with_capacity(n),
        ..Default::default()
    };
    let mut m1 = m0.clone();
    for &c in &space.states {
        let mut exit0 = Rational::new();
        let mut exit1 = Rational::new();
        for (target, rate) in transitions(g, c) {
            let row = space.index_of(target).expect("closed state space") as u32;
            let (mat, exit, value) = match rate {
                Rate::Unit => (&mut m0, &mut exit0, Rational::from(1)),
                Rate::Alpha => (&mut m0, &mut exit0, g.alpha.clone()),
                Rate::Beta => (&mut m0, &mut exit0, g.beta.clone()),
                Rate::Blockage => (&mut m1, &mut exit1, Rational::from(1)),
            };
            *exit += &value;
            mat.rows.push(row);
            mat.vals.push(value);
        }
        m0.diag.push(-exit0);
        m1.diag.push(-exit1);
        m0.col_ptr.push(m0.rows.len());
        m1.col_ptr.push(m1.rows.len());
    }
    Ok(AffineGenerator {
        geometry: g.clone(),
        space,
        m0,
        m1,
    })
}

impl AffineGenerator {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Dense `M(r)` as rows of rationals (small systems only).
    pub fn dense_at(&self, r: &Rational) -> Vec<Vec<Rational>> {
        let n = self.len();
        let mut m = vec![vec![Rational::new(); n]; n];
        for j in 0..n {
            m[j][j] = &self.m0.diag[j] + Rational::from(r * &self.m1.diag[j]);
            for (i, v) in self.m0.column(j) {
                m[i][j] += v;
            }
            for (i, v) in self.m1.column(j) {
                m[i][j] += Rational::from(r * v);
            }
        }
        m
    }

    /// Coordinate-list text export, one `matrix row col value` line per
    /// nonzero entry.
    pub fn export_coo(&self) -> String {
        let mut out = String::new();
        for (name, mat) in [("M0", &self.m0), ("M1", &self.m1)] {
            for j in 0..self.len() {
                if mat.diag[j].cmp0().is_ne() {
                    let _ = writeln!(out, "{name} {j} {j} {}", mat.diag[j]);
                }
                for (i, v) in mat.column(j) {
                    let _ = writeln!(out, "{name} {i} {j} {v}");
                }
            }
        }
        out
    }
}

/// The unique state absorbing under `M0`: sites `<= 0` full, `>= 1` empty.
pub fn stationary_at_r0(g: &Geometry) -> Result<Configuration> {
    g.validate()?;
    if g.kind == GeometryKind::Interval && (g.alpha.cmp0().is_le() || g.beta.cmp0().is_le()) {
        return Err(Error::InvalidGeometry(
            "the r = 0 state is only unique for alpha, beta > 0".into(),
        ));
    }
    Ok(Configuration((1u64 << g.l) - 1))
}

pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
