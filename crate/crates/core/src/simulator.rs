//! Continuous-time Monte Carlo for the finite geometries, and the
//! three-process coupling driven by shared per-bond Poisson clocks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Geometry, GeometryKind};

/// Identifier of the random generator, written into every output.
pub const PRNG_ID: &str = "chacha8/rand_chacha-0.3/stream-per-bond";
pub const MIN_BATCHES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimRun {
    pub geometry: Geometry,
    pub r: f64,
    pub t_max: f64,
    pub seed: u64,
    /// Defaults to `max(10 (2L)^2, 1000)`.
    pub t_burn: Option<f64>,
    pub batches: usize,
}

impl SimRun {
    pub fn new(geometry: Geometry, r: f64, t_max: f64, seed: u64) -> Self {
        SimRun {
            geometry,
            r,
            t_max,
            seed,
            t_burn: None,
            batches: MIN_BATCHES,
        }
    }

    pub fn burn_in(&self) -> f64 {
        self.t_burn.unwrap_or_else(|| default_burn_in(self.geometry.l))
    }
}

pub fn default_burn_in(l: usize) -> f64 {
    let n = 2.0 * l as f64;
    (10.0 * n * n).max(1e3)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub batch_means: Vec<f64>,
    pub events: u64,
    pub crossings: u64,
}

/// Bonds of a finite geometry, grouped by rate class so that the direct
/// method can pick one in constant time.
struct Lattice {
    occ: Vec<bool>,
    ring: bool,
    /// Active unit-rate bulk bonds, by left site index.
    unit: Vec<usize>,
    /// Position of each bond in `unit`, or `usize::MAX`.
    slot: Vec<usize>,
    slow_left: usize,
}

impl Lattice {
    fn new(g: &Geometry) -> Self {
        let n = g.num_sites();
        let first = g.first_site();
        let mut lat = Lattice {
            occ: vec![false; n],
            ring: g.kind == GeometryKind::Ring,
            unit: Vec::new(),
            slot: vec![usize::MAX; n],
            slow_left: (0 - first) as usize,
        };
        // step configuration: sites <= 0 occupied
        for (i, o) in lat.occ.iter_mut().enumerate() {
            *o = (i as i64 + first) <= 0;
        }
        for b in 0..n {
            lat.refresh(b);
        }
        lat
    }

    fn n(&self) -> usize {
        self.occ.len()
    }

    /// Right neighbour of bond `b`, if it is a bulk bond.
    fn right(&self, b: usize) -> Option<usize> {
        if b + 1 < self.n() {
            Some(b + 1)
        } else if self.ring {
            Some(0)
        } else {
            None
        }
    }

    fn active(&self, b: usize) -> bool {
        self.right(b).is_some_and(|c| self.occ[b] && !self.occ[c])
    }

    fn refresh(&mut self, b: usize) {
        if b == self.slow_left {
            return;
        }
        let on = self.active(b);
        let present = self.slot[b] != usize::MAX;
        if on && !present {
            self.slot[b] = self.unit.len();
            self.unit.push(b);
        } else if !on && present {
            let pos = self.slot[b];
            self.unit.swap_remove(pos);
            if pos < self.unit.len() {
                let moved = self.unit[pos];
                self.slot[moved] = pos;
            }
            self.slot[b] = usize::MAX;
        }
    }

    fn touch(&mut self, site: usize) {
        let n = self.n();
        let left = if site > 0 {
            Some(site - 1)
        } else if self.ring {
            Some(n - 1)
        } else {
            None
        };
        if let Some(l) = left {
            self.refresh(l);
        }
        self.refresh(site);
    }

    fn hop(&mut self, b: usize) {
        let c = self.right(b).expect("bulk bond");
        self.occ[b] = false;
        self.occ[c] = true;
        self.touch(b);
        self.touch(c);
    }

    fn set(&mut self, site: usize, v: bool) {
        self.occ[site] = v;
        self.touch(site);
    }

    fn particles(&self) -> usize {
        self.occ.iter().filter(|&&o| o).count()
    }
}

/// Crossing rate of the slow bond, estimated by batch means after burn-in.
pub fn estimate_current(run: &SimRun) -> Result<CurrentEstimate> {
    let g = &run.geometry;
    g.validate()?;
    if !(run.r >= 0.0 && run.r.is_finite()) {
        return Err(Error::Simulation(format!("rate r = {} must be finite and >= 0", run.r)));
    }
    if !(run.t_max > 0.0) {
        return Err(Error::Simulation("t_max must be positive".into()));
    }
    let t_burn = run.burn_in();
    let batches = run.batches.max(MIN_BATCHES);
    if run.t_max <= t_burn {
        return Err(Error::Simulation(format!(
            "t_max = {} leaves no time for {batches} batches after burn-in {t_burn}",
            run.t_max
        )));
    }
    let (alpha, beta) = match g.kind {
        GeometryKind::Ring => (0.0, 0.0),
        GeometryKind::Interval => (g.alpha.to_f64(), g.beta.to_f64()),
    };
    let mut lat = Lattice::new(g);
    let n = lat.n();
    let conserved = lat.particles();
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let batch_len = (run.t_max - t_burn) / batches as f64;
    let mut counts = vec![0u64; batches];
    let mut t = 0.0;
    let mut events = 0u64;
    loop {
        let slow = if lat.active(lat.slow_left) { run.r } else { 0.0 };
        let entry = if !lat.ring && !lat.occ[0] { alpha } else { 0.0 };
        let exit = if !lat.ring && lat.occ[n - 1] { beta } else { 0.0 };
        let units = lat.unit.len() as f64;
        let total = units + slow + entry + exit;
        if total <= 0.0 {
            break;
        }
        let dt = -(1.0 - rng.gen::<f64>()).ln() / total;
        t += dt;
        if t >= run.t_max {
            break;
        }
        let mut x = rng.gen::<f64>() * total;
        events += 1;
        if x < units {
            let b = lat.unit[(x as usize).min(lat.unit.len() - 1)];
            lat.hop(b);
        } else {
            x -= units;
            if x < slow {
                lat.hop(lat.slow_left);
                if t >= t_burn {
                    let k = (((t - t_burn) / batch_len) as usize).min(batches - 1);
                    counts[k] += 1;
                }
            } else if x - slow < entry {
                lat.set(0, true);
            } else {
                lat.set(n - 1, false);
            }
        }
        debug_assert!(!lat.ring || lat.particles() == conserved);
    }
    let means: Vec<f64> = counts.iter().map(|&c| c as f64 / batch_len).collect();
    let b = means.len() as f64;
    let mean = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1.0);
    Ok(CurrentEstimate {
        mean,
        stderr: (var / b).sqrt(),
        batch_means: means,
        events,
        crossings: counts.iter().sum(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    pub l: usize,
    pub w: usize,
    pub r: f64,
    pub t_max: f64,
    pub seed: u64,
    /// Occupancy of zeta on sites `-W+1..=W`; `None` means empty.
    pub zeta0: Option<Vec<bool>>,
    pub checkpoints: usize,
    /// Check the ordering of the counters after every event.
    pub check_every_event: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterSample {
    pub n_tau: u64,
    pub n_eta: u64,
    pub n_zeta: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledTrajectory {
    pub times: Vec<f64>,
    pub samples: Vec<CounterSample>,
    pub events: u64,
    /// Number of events at which the ordering failed (only counted when
    /// checking every event; checkpoints are always checked).
    pub violations: u64,
}

impl CoupledTrajectory {
    pub fn ordered(&self) -> bool {
        self.violations == 0 && self.samples.iter().all(|s| s.n_tau >= s.n_eta && s.n_eta >= s.n_zeta)
    }
}

#[derive(PartialEq)]
struct Ring {
    t: f64,
    bond: usize,
}

impl Eq for Ring {}

impl PartialOrd for Ring {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ring {
    // min-heap on time, ties by bond index
    fn cmp(&self, other: &Self) -> Ordering {
        other.t.total_cmp(&self.t).then(other.bond.cmp(&self.bond))
    }
}

/// One process on the window `-W+1..=W`, with optional source and sink
/// beyond its ends.
struct WindowProcess {
    occ: Vec<bool>,
    /// Sites `lo..hi` (indices into `occ`) are the live region.
    lo: usize,
    hi: usize,
    source: bool,
    sink: bool,
    crossings: u64,
}

impl WindowProcess {
    /// Apply a ring of the clock on the bond between sites `b - 1` and `b`
    /// (indices into `occ`, so bond `b` has left site `b - 1`).
    fn ring(&mut self, b: usize, slow_bond: usize) {
        let left_in = b > self.lo && b - 1 < self.hi;
        let right_in = b >= self.lo && b < self.hi;
        let moved = match (left_in, right_in) {
            (true, true) => {
                if self.occ[b - 1] && !self.occ[b] {
                    self.occ[b - 1] = false;
                    self.occ[b] = true;
                    true
                } else {
                    false
                }
            }
            (false, true) if b == self.lo => {
                if self.source && !self.occ[b] {
                    self.occ[b] = true;
                }
                false
            }
            (true, false) if b == self.hi => {
                if self.sink && self.occ[b - 1] {
                    self.occ[b - 1] = false;
                }
                false
            }
            _ => false,
        };
        if moved && b == slow_bond {
            self.crossings += 1;
        }
    }
}

/// Shared-clock coupling of the step-initial process eta on the window, the
/// finite interval tau on `-L+1..=L`, and zeta started from `zeta0`.
pub fn coupled_run(run: &CoupledRun) -> Result<CoupledTrajectory> {
    let (l, w) = (run.l, run.w);
    if l == 0 {
        return Err(Error::Simulation("L must be positive".into()));
    }
    if w < 4 * l || (w as f64) < 2.0 * run.t_max {
        return Err(Error::Simulation(format!(
            "window W = {w} must be at least 4L = {} and 2 t_max = {}",
            4 * l,
            2.0 * run.t_max
        )));
    }
    if !(run.r >= 0.0 && run.r.is_finite() && run.t_max > 0.0) {
        return Err(Error::Simulation("need r >= 0 and t_max > 0".into()));
    }
    let n = 2 * w;
    // site x lives at index x + W - 1; bond index b joins indices b-1 and b,
    // so bond b is the bond (x, x+1) with x = b - W.
    let site = |x: i64| (x + w as i64 - 1) as usize;
    let step: Vec<bool> = (0..n).map(|i| (i as i64 - w as i64 + 1) <= 0).collect();
    let zeta0 = match &run.zeta0 {
        Some(z) if z.len() != n => {
            return Err(Error::Simulation(format!("zeta0 has {} sites, window has {n}", z.len())));
        }
        Some(z) => z.clone(),
        None => vec![false; n],
    };
    let slow_bond = site(1);
    let mut eta = WindowProcess {
        occ: step.clone(),
        lo: 0,
        hi: n,
        source: true,
        sink: true,
        crossings: 0,
    };
    let mut zeta = WindowProcess {
        occ: zeta0,
        lo: 0,
        hi: n,
        source: false,
        sink: true,
        crossings: 0,
    };
    let (tlo, thi) = (site(-(l as i64) + 1), site(l as i64) + 1);
    let mut tau_occ = vec![false; n];
    tau_occ[tlo..thi].copy_from_slice(&step[tlo..thi]);
    let mut tau = WindowProcess {
        occ: tau_occ,
        lo: tlo,
        hi: thi,
        source: true,
        sink: true,
        crossings: 0,
    };

    let bonds = n + 1;
    let base = ChaCha8Rng::seed_from_u64(run.seed);
    let mut clocks: Vec<ChaCha8Rng> = (0..bonds)
        .map(|b| {
            let mut c = base.clone();
            c.set_stream(b as u64);
            c
        })
        .collect();
    let rate = |b: usize| if b == slow_bond { run.r } else { 1.0 };
    let mut heap = BinaryHeap::new();
    for (b, c) in clocks.iter_mut().enumerate() {
        if rate(b) > 0.0 {
            heap.push(Ring {
                t: -(1.0 - c.gen::<f64>()).ln() / rate(b),
                bond: b,
            });
        }
    }
    let checkpoints = run.checkpoints.max(1);
    let times: Vec<f64> = (1..=checkpoints).map(|k| run.t_max * k as f64 / checkpoints as f64).collect();
    let mut samples = Vec::with_capacity(checkpoints);
    let mut next_cp = 0;
    let mut events = 0u64;
    let mut violations = 0u64;
    let sample = |tau: &WindowProcess, eta: &WindowProcess, zeta: &WindowProcess| CounterSample {
        n_tau: tau.crossings,
        n_eta: eta.crossings,
        n_zeta: zeta.crossings,
    };
    while let Some(Ring { t, bond }) = heap.pop() {
        while next_cp < times.len() && times[next_cp] <= t {
            samples.push(sample(&tau, &eta, &zeta));
            next_cp += 1;
        }
        if t > run.t_max {
            break;
        }
        events += 1;
        for p in [&mut eta, &mut zeta, &mut tau] {
            p.ring(bond, slow_bond);
        }
        if run.check_every_event && !(tau.crossings >= eta.crossings && eta.crossings >= zeta.crossings) {
            violations += 1;
        }
        let dt = -(1.0 - clocks[bond].gen::<f64>()).ln() / rate(bond);
        heap.push(Ring { t: t + dt, bond });
    }
    while samples.len() < times.len() {
        samples.push(sample(&tau, &eta, &zeta));
    }
    Ok(CoupledTrajectory {
        times,
        samples,
        events,
        violations,
    })
}

/// Step configuration on the window `-W+1..=W`, for use as `zeta0`.
pub fn step_window(w: usize) -> Vec<bool> {
    (0..2 * w).map(|i| (i as i64 - w as i64 + 1) <= 0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub l: usize,
    pub current: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSizeProbe {
    pub r: f64,
    pub rows: Vec<ProbeRow>,
    /// Consecutive pairs (in the order given) whose current decreased.
    pub decreasing_pairs: usize,
}

/// Ring currents across sizes, pooled over seeds. Reports, asserts nothing.
pub fn finite_size_probe(ls: &[usize], r: f64, t_max: f64, seeds: &[u64]) -> Result<FiniteSizeProbe> {
    if seeds.is_empty() {
        return Err(Error::Simulation("no seeds".into()));
    }
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        if l == 0 || l > 512 {
            return Err(Error::Simulation(format!("L = {l} outside 1..=512")));
        }
        let ests = seeds
            .iter()
            .map(|&s| estimate_current(&SimRun::new(Geometry::ring(l), r, t_max, s)))
            .collect::<Result<Vec<_>>>()?;
        let k = ests.len() as f64;
        let current = ests.iter().map(|e| e.mean).sum::<f64>() / k;
        let var = ests.iter().map(|e| e.stderr * e.stderr).sum::<f64>() / (k * k);
        rows.push(ProbeRow {
            l,
            current,
            stderr: var.sqrt(),
        });
    }
    let decreasing_pairs = rows.windows(2).filter(|w| w[1].current < w[0].current).count();
    Ok(FiniteSizeProbe {
        r,
        rows,
        decreasing_pairs,
    })
}

/// Exact homogeneous-ring current `L/(2(2L-1))`.
pub fn homogeneous_ring_current(l: usize) -> Rational {
    Rational::from((l as i64, 2 * (2 * l as i64 - 1)))
}
