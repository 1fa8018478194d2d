use std::fs;

use slowbond::algebra::{decimal_truncated, parse_rational, rational_to_string, BigRational, FloatSeries, RationalSeries};
use slowbond::analysis::{self, FitReport};
use slowbond::exact_solver::{self, current_at, denominator_zeros, ZERO_WINDOW};
use slowbond::model::{build_generator, Geometry, GeometryKind};
use slowbond::semi_infinite::{self, q_explicit, q_recursive_all};
use slowbond::series_engine::{expand, halfwidth_of_site, validated_order, Observable};
use slowbond::simulator::{self, CoupledRun, SimRun, PRNG_ID};
use slowbond::tables;

use crate::args::*;
use crate::output::{Cell, Document, Format, Meta, Table};
use crate::{row, CliError};

/// Digits of the decimal copy written next to every exact rational.
pub const DECIMAL_DIGITS: usize = 30;

/// Largest state space the simulator compares against an exact solve.
const EXACT_COMPARE_STATES: u128 = 20_000;

pub fn exact_pair(q: &BigRational) -> [Cell; 2] {
    [Cell::Text(rational_to_string(q)), Cell::Text(decimal_truncated(q, DECIMAL_DIGITS))]
}

fn record_geometry(meta: &mut Meta, g: &Geometry) {
    meta.param("geometry", g);
}

pub fn run_expand(a: &ExpandArgs, mut meta: Meta) -> Result<Document, CliError> {
    let g = a.geometry.build();
    let order = a.order.unwrap_or(g.l);
    record_geometry(&mut meta, &g);
    meta.param("order", order);
    let e = expand(&g, order)?;
    let mut doc = Document::new(meta);
    let mut current = Table::new("current", &["k", "exact", "decimal", "validated"]);
    let valid = validated_order(&g, Observable::Current);
    for (k, c) in e.current_coeffs().iter().enumerate() {
        let [x, d] = exact_pair(c);
        current.push(vec![Cell::from(k), x, d, Cell::from(k <= valid)]);
    }
    doc.tables.push(current);
    if !a.no_densities {
        let mut dens = Table::new("density", &["site", "k", "exact", "decimal", "validated"]);
        for (&site, coeffs) in &e.table.d {
            let valid = validated_order(&g, Observable::Window(halfwidth_of_site(site)));
            for (k, c) in coeffs.iter().enumerate() {
                let [x, d] = exact_pair(c);
                dens.push(vec![Cell::from(site), Cell::from(k), x, d, Cell::from(k <= valid)]);
            }
        }
        doc.tables.push(dens);
    }
    Ok(doc)
}

pub fn run_exact(a: &ExactArgs, mut meta: Meta) -> Result<Document, CliError> {
    let g = a.geometry.build();
    record_geometry(&mut meta, &g);
    let cr = exact_solver::current_rational(&g)?;
    let zeros = denominator_zeros(&cr, meta.precision_bits)?;
    let mut doc = Document::new(meta);
    for (name, poly) in [("numerator", &cr.p), ("denominator", &cr.q)] {
        let mut t = Table::new(name, &["power", "coeff"]);
        for (i, c) in poly.coeffs().iter().enumerate() {
            t.push(row![i, rational_to_string(c)]);
        }
        doc.tables.push(t);
    }
    let mut cluster_of = vec![None; zeros.all.len()];
    for (ci, cl) in zeros.clusters.iter().enumerate() {
        for &i in cl {
            cluster_of[i] = Some(ci);
        }
    }
    let mut zt = Table::new("zeros", &["re", "im", "in_window", "cluster"]);
    for (i, z) in zeros.all.iter().enumerate() {
        let (x, y) = z.to_f64();
        let cl = cluster_of[i].map_or(Cell::Null, Cell::from);
        zt.push(vec![Cell::from(x), Cell::from(y), Cell::from(ZERO_WINDOW.contains(x, y)), cl]);
    }
    doc.tables.push(zt);
    if !a.at.is_empty() {
        let gen = build_generator(&g)?;
        let mut vt = Table::new("values", &["r", "exact", "decimal"]);
        let mut agree = true;
        for r in &a.at {
            let v = cr.eval(r);
            agree &= current_at(&gen, r)? == v;
            let [x, d] = exact_pair(&v);
            vt.push(vec![Cell::Text(rational_to_string(r)), x, d]);
        }
        doc.tables.push(vt);
        doc.check("values match a direct solve", agree, format!("{} points", a.at.len()));
    }
    let deg = cr.denominator_degree();
    if g.kind == GeometryKind::Ring && (1..=5).contains(&g.l) {
        let want = exact_solver::RING_DENOMINATOR_DEGREES[g.l - 1];
        doc.check("denominator degree", deg == want, format!("{deg}, expected {want}"));
    }
    doc.check("zero count", zeros.all.len() == deg, format!("{} zeros, {} in window", zeros.all.len(), zeros.in_window.len()));
    Ok(doc)
}

pub fn run_semi(a: &SemiArgs, mut meta: Meta) -> Result<Document, CliError> {
    if !a.check_recursion && a.l.is_empty() {
        return Err(CliError::Usage("semi needs --check-recursion or --L".into()));
    }
    if a.l.contains(&0) {
        return Err(CliError::Usage("semi-infinite sizes must be >= 1".into()));
    }
    if a.check_recursion {
        meta.param("L_max", a.l_max);
    }
    if !a.l.is_empty() {
        meta.param("L", join(&a.l));
    }
    let prec = meta.precision_bits;
    let mut doc = Document::new(meta);
    if a.check_recursion {
        let rec = q_recursive_all(a.l_max);
        let bad: Vec<usize> = rec.iter().enumerate().filter(|(l, q)| **q != q_explicit(*l)).map(|(l, _)| l).collect();
        doc.check("explicit = recursive", bad.is_empty(), format!("L = 0..={}, mismatches {bad:?}", a.l_max));
    }
    if !a.l.is_empty() {
        let mut st = Table::new("series", &["L", "k", "exact", "decimal"]);
        let mut pattern = true;
        for &l in &a.l {
            let order = a.order.unwrap_or(l + 2);
            let s = semi_infinite::current_series(l, order)?;
            for (k, c) in s.coeffs().iter().enumerate() {
                if k <= l + 1 {
                    let want = match k {
                        1 => 1,
                        2 => -1,
                        _ => 0,
                    };
                    pattern &= *c == want;
                }
                let [x, d] = exact_pair(c);
                st.push(vec![Cell::from(l), Cell::from(k), x, d]);
            }
        }
        doc.tables.push(st);
        doc.check("series equals r - r^2 through order L + 1", pattern, join(&a.l));
    }
    if a.zeros && !a.l.is_empty() {
        let mut zt = Table::new("zeros", &["L", "re", "im", "distance"]);
        for &l in &a.l {
            for z in semi_infinite::semi_infinite_zeros(l, prec)? {
                let (x, y) = z.to_f64();
                zt.push(row![l, x, y, semi_infinite::distance_to_gamma(x, y)]);
            }
        }
        doc.tables.push(zt);
        if a.l.len() >= 2 {
            let rep = semi_infinite::zero_scaling_report(&a.l, prec)?;
            let mut rt = Table::new("scaling", &["L", "mean_distance", "max_distance", "right_distance"]);
            for r in &rep.rows {
                rt.push(row![r.l, r.mean_distance, r.max_distance, r.right_distance]);
            }
            doc.tables.push(rt);
            let p = rep.distance_exponent;
            let q = rep.right_exponent;
            doc.check("distance exponent in [0.7, 1.3]", (0.7..=1.3).contains(&p), format!("p = {p:.4}"));
            doc.check("right-end exponent in [0.35, 0.65]", (0.35..=0.65).contains(&q), format!("q = {q:.4}"));
        }
    }
    Ok(doc)
}

/// Current coefficients from an `expand` document, or the built-in table.
fn load_series(input: Option<&std::path::Path>, prec: u32) -> Result<FloatSeries, CliError> {
    let Some(path) = input else {
        return Ok(tables::current_series(prec));
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let doc = Document::parse(&text, Format::Json).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let t = doc
        .table("current")
        .ok_or_else(|| CliError::Usage(format!("{}: no 'current' table", path.display())))?;
    let col = t
        .columns
        .iter()
        .position(|c| c == "exact")
        .ok_or_else(|| CliError::Usage("'current' table has no 'exact' column".into()))?;
    let coeffs = t
        .rows
        .iter()
        .map(|r| match &r[col] {
            Cell::Text(s) => parse_rational(s).map_err(CliError::from),
            other => Err(CliError::Usage(format!("non-text coefficient {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalSeries::new(coeffs).to_float(prec))
}

fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("grid {s:?}: {e}")))?;
    let [lo, hi, step] = parts[..] else {
        return Err(CliError::Usage(format!("grid {s:?} is not lo:hi:step")));
    };
    if !(step > 0.0 && hi >= lo) {
        return Err(CliError::Usage(format!("grid {s:?} is empty")));
    }
    let n = ((hi - lo) / step).round() as usize;
    Ok((0..=n).map(|i| lo + step * i as f64).collect())
}

fn fit_table(name: &str, fits: &[&FitReport]) -> Table {
    let mut t = Table::new(name, &["model", "param", "value", "residual_std", "dof", "converged", "window_lo", "window_hi"]);
    for f in fits {
        for p in &f.params {
            t.push(row![f.model.as_str(), p.name.as_str(), p.value, f.residual_std, f.dof, f.converged, f.window.0, f.window.1]);
        }
    }
    t
}

fn cosine_fit(j: &FloatSeries, r0: f64, window: (usize, usize)) -> Result<(Vec<f64>, FitReport), CliError> {
    let x = analysis::x_series(j, r0, j.order())?.to_f64();
    let fit = analysis::fit_cosine(&x, window)?;
    Ok((x, fit))
}

pub fn run_analyze(a: &AnalyzeArgs, mut meta: Meta) -> Result<Document, CliError> {
    let prec = meta.precision_bits;
    let j = load_series(a.input.as_deref(), prec)?;
    meta.param("method", format!("{:?}", a.method).to_lowercase());
    meta.param("source", a.input.as_ref().map_or("table".to_string(), |p| p.display().to_string()));
    match a.method {
        AnalyzeMethod::Pole1 => meta.param("grid", &a.grid),
        AnalyzeMethod::Pole2 => meta.param("r1", a.r1),
        AnalyzeMethod::Fits | AnalyzeMethod::Kapprox | AnalyzeMethod::Gammahat => {
            meta.param("r0", a.r0);
            meta.param("window", format!("{}..{}", a.window.0, a.window.1));
        }
        AnalyzeMethod::Asympt => {
            meta.param("a", join(&a.a));
            meta.param("k", join(&a.k));
        }
    }
    let mut doc = Document::new(meta);
    match a.method {
        AnalyzeMethod::Pole1 | AnalyzeMethod::Pole2 => {
            let est = if a.method == AnalyzeMethod::Pole1 {
                analysis::pole_method1(&j, &parse_grid(&a.grid)?)?
            } else {
                analysis::pole_method2(&j, a.r1)?
            };
            let mut t = Table::new("pole", &["method", "r0", "uncertainty", "confident", "other_root_distance"]);
            let other = est.other_root_distance.map_or(Cell::Null, Cell::from);
            t.push(vec![
                Cell::from(format!("{:?}", est.method)),
                Cell::from(est.r0),
                Cell::from(est.uncertainty),
                Cell::from(est.confident),
                other,
            ]);
            doc.tables.push(t);
            doc.check("pole located", est.confident, format!("r0 = {:.6} +- {:.1e}", est.r0, est.uncertainty));
        }
        AnalyzeMethod::Fits => {
            let growth = analysis::fit_reciprocal_growth(&j, a.window)?;
            let (x, cosine) = cosine_fit(&j, a.r0, a.window)?;
            doc.tables.push(fit_table("fits", &[&growth, &cosine]));
            let model = analysis::CosineParams::from_report(&cosine)?;
            let mut xt = Table::new("x", &["k", "x", "fit"]);
            for (k, v) in x.iter().enumerate() {
                xt.push(row![k, *v, model.at(k as f64)]);
            }
            doc.tables.push(xt);
            for f in [&growth, &cosine] {
                doc.check(&format!("{} fit converged", f.model), f.converged, format!("residual std {:.3e}, dof {}", f.residual_std, f.dof));
            }
        }
        AnalyzeMethod::Kapprox => {
            let (_, fit) = cosine_fit(&j, a.r0, a.window)?;
            let k = analysis::k_approximant(&j, &fit, a.r0, a.order)?;
            let jf = j.to_f64();
            let mut t = Table::new("coefficients", &["k", "K", "J"]);
            let mut worst: f64 = 0.0;
            for (i, c) in k.coeffs.iter().enumerate() {
                let jc = jf.get(i).copied();
                if let Some(v) = jc {
                    worst = worst.max((c - v).abs());
                }
                t.push(vec![Cell::from(i), Cell::from(*c), jc.map_or(Cell::Null, Cell::from)]);
            }
            doc.tables.push(t);
            doc.check("K reproduces the input coefficients", worst <= 1e-12, format!("max deviation {worst:.2e}"));
        }
        AnalyzeMethod::Gammahat => {
            let (_, fit) = cosine_fit(&j, a.r0, a.window)?;
            let k = analysis::k_approximant(&j, &fit, a.r0, a.order)?;
            let lines = analysis::gamma_hat_contour(&k, analysis::GAMMA_HAT_WINDOW, a.grid_n)?;
            let mut t = Table::new("contour", &["line", "re", "im"]);
            let mut worst: f64 = 0.0;
            for (li, line) in lines.iter().enumerate() {
                for z in line {
                    worst = worst.max((k.eval(*z)?.norm() - 0.25).abs());
                    t.push(row![li, z.re, z.im]);
                }
            }
            let n = t.rows.len();
            doc.tables.push(t);
            doc.check(
                "contour on |K| = 1/4",
                n > 0 && worst <= analysis::CONTOUR_TOL,
                format!("{} lines, {n} points, max deviation {worst:.2e}", lines.len()),
            );
        }
        AnalyzeMethod::Asympt => {
            let mut t = Table::new("ratios", &["a", "k", "ratio"]);
            let mut dt = Table::new("drift", &["a", "drift"]);
            for &av in &a.a {
                let rep = analysis::asymptotic_check(av, &a.k, 128)?;
                for (k, r) in rep.ks.iter().zip(&rep.ratios) {
                    t.push(row![av, *k, *r]);
                }
                dt.push(row![av, rep.drift]);
                if a.k.len() >= 2 {
                    doc.check(&format!("drift below 2% for a = {av}"), rep.drift < 0.02, format!("{:.3e}", rep.drift));
                }
                let rec = analysis::exp_singular_coeffs(av, 12, prec)?;
                let ser = analysis::exp_singular_by_series(av, 12, prec);
                let dev = rec
                    .iter()
                    .zip(&ser)
                    .map(|(x, y)| slowbond::algebra::MpFloat::with_val(prec, x - y).abs().to_f64())
                    .fold(0.0, f64::max);
                doc.check(&format!("recurrence = series for a = {av}"), dev < 1e-25, format!("max deviation {dev:.1e} at order 12"));
            }
            doc.tables.push(t);
            doc.tables.push(dt);
        }
    }
    Ok(doc)
}

pub fn run_simulate(a: &SimulateArgs, mut meta: Meta) -> Result<Document, CliError> {
    let g = a.geometry.build();
    record_geometry(&mut meta, &g);
    meta.param("r", a.r);
    meta.param("t_max", a.t_max);
    meta.param("batches", a.batches);
    meta.seed = Some(a.seed);
    meta.prng = Some(PRNG_ID.into());
    let mut run = SimRun::new(g.clone(), a.r, a.t_max, a.seed);
    run.batches = a.batches;
    run.t_burn = a.burn_in;
    meta.param("burn_in", run.burn_in());
    let est = simulator::estimate_current(&run)?;
    let mut doc = Document::new(meta);
    let mut t = Table::new("estimate", &["mean", "stderr", "events", "crossings", "exact"]);
    let exact = if g.state_count() <= EXACT_COMPARE_STATES && a.r.is_finite() {
        let r = BigRational::from_f64(a.r).ok_or_else(|| CliError::Usage(format!("rate {}", a.r)))?;
        Some(current_at(&build_generator(&g)?, &r)?.to_f64())
    } else {
        None
    };
    t.push(vec![
        Cell::from(est.mean),
        Cell::from(est.stderr),
        Cell::from(est.events),
        Cell::from(est.crossings),
        exact.map_or(Cell::Null, Cell::from),
    ]);
    doc.tables.push(t);
    let mut bt = Table::new("batches", &["batch", "mean"]);
    for (i, m) in est.batch_means.iter().enumerate() {
        bt.push(row![i, *m]);
    }
    doc.tables.push(bt);
    if let Some(x) = exact {
        let dev = (est.mean - x).abs();
        doc.check("within 3 stderr of the exact current", dev <= 3.0 * est.stderr, format!("|{:.6} - {x:.6}| vs stderr {:.2e}", est.mean, est.stderr));
    }
    Ok(doc)
}

pub fn run_couple(a: &CoupleArgs, mut meta: Meta) -> Result<Document, CliError> {
    let w = a.w.unwrap_or_else(|| (4 * a.l).max((2.0 * a.t_max).ceil() as usize));
    meta.param("L", a.l);
    meta.param("w", w);
    meta.param("r", a.r);
    meta.param("t_max", a.t_max);
    meta.param("runs", a.runs);
    meta.seed = Some(a.seed);
    meta.prng = Some(PRNG_ID.into());
    let mut doc = Document::new(meta);
    let mut summary = Table::new("runs", &["seed", "events", "violations", "n_tau", "n_eta", "n_zeta"]);
    let mut samples = Table::new("samples", &["seed", "t", "n_tau", "n_eta", "n_zeta"]);
    let (mut violations, mut unordered) = (0u64, 0usize);
    for seed in a.seed..a.seed + a.runs {
        let tr = simulator::coupled_run(&CoupledRun {
            l: a.l,
            w,
            r: a.r,
            t_max: a.t_max,
            seed,
            zeta0: None,
            checkpoints: a.checkpoints,
            check_every_event: true,
        })?;
        violations += tr.violations;
        unordered += usize::from(!tr.ordered());
        let last = tr.samples.last().copied().unwrap_or(simulator::CounterSample { n_tau: 0, n_eta: 0, n_zeta: 0 });
        summary.push(row![seed, tr.events, tr.violations, last.n_tau, last.n_eta, last.n_zeta]);
        if a.runs == 1 {
            for (t, s) in tr.times.iter().zip(&tr.samples) {
                samples.push(row![seed, *t, s.n_tau, s.n_eta, s.n_zeta]);
            }
        }
    }
    doc.tables.push(summary);
    if a.runs == 1 {
        doc.tables.push(samples);
    }
    doc.check(
        "N_tau >= N_eta >= N_zeta",
        violations == 0 && unordered == 0,
        format!("{violations} violations over {} runs", a.runs),
    );
    Ok(doc)
}

pub fn run_golden(a: &GoldenArgs, mut meta: Meta) -> Result<Document, CliError> {
    let g = a.geometry.build();
    let order = a.order.unwrap_or(g.l);
    record_geometry(&mut meta, &g);
    meta.param("order", order);
    let e = expand(&g, order)?;
    let mut doc = Document::new(meta);
    let mut t = Table::new("diff", &["table", "site", "k", "computed", "printed", "ulps", "pass"]);
    let (mut cur_ok, mut cur_n) = (true, 0usize);
    let valid = validated_order(&g, Observable::Current).min(order).min(tables::CURRENT.len() - 1);
    for k in 0..=valid {
        let m = tables::compare_digits(&e.current_coeffs()[k], tables::CURRENT[k], tables::CURRENT_DIGITS);
        cur_ok &= m.passes();
        cur_n += usize::from(m.passes());
        t.push(vec![Cell::from("current"), Cell::Null, Cell::from(k), Cell::from(m.computed.clone()), Cell::from(m.printed.clone()), Cell::from(m.ulps.to_string()), Cell::from(m.passes())]);
    }
    let (mut den_ok, mut den_n) = (true, 0usize);
    for site in 1..=5i64 {
        let Ok(d) = e.density_coeffs(site) else { continue };
        let valid = validated_order(&g, Observable::Window(halfwidth_of_site(site))).min(order);
        for (k, dk) in d.iter().enumerate().take(valid + 1) {
            if let Some(printed) = tables::density(site as usize, k) {
                let m = tables::compare_digits(dk, printed, tables::DENSITY_DIGITS);
                den_ok &= m.passes();
                den_n += usize::from(m.passes());
                t.push(vec![Cell::from("density"), Cell::from(site), Cell::from(k), Cell::from(m.computed.clone()), Cell::from(m.printed.clone()), Cell::from(m.ulps.to_string()), Cell::from(m.passes())]);
            }
        }
    }
    doc.tables.push(t);
    doc.check("current", cur_ok, format!("{cur_n} coefficients matched"));
    doc.check("densities", den_ok, format!("{den_n} densities matched"));
    Ok(doc)
}

pub fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
