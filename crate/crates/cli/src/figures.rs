//! CSV data behind each figure. Every file is a one-table document; point
//! sets use the columns `set,re,im`, coefficient plots `k,value[,fit]`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;

use slowbond::analysis::{self, CosineParams};
use slowbond::exact_solver::{current_rational, denominator_zeros, CurrentRational};
use slowbond::model::Geometry;
use slowbond::semi_infinite::{gamma_curve, semi_infinite_zeros};
use slowbond::tables;

use crate::args::{Figure, FiguresArgs};
use crate::output::{Cell, Document, Format, Meta, Table};
use crate::{row, CliError};

const GAMMA_POINTS: usize = 400;
const CONTOUR_GRID: usize = 121;

struct Context<'a> {
    args: &'a FiguresArgs,
    meta: &'a Meta,
    rings: BTreeMap<usize, CurrentRational>,
}

impl Context<'_> {
    fn ring(&mut self, l: usize) -> Result<&CurrentRational, CliError> {
        if let Entry::Vacant(e) = self.rings.entry(l) {
            e.insert(current_rational(&Geometry::ring(l))?);
        }
        Ok(&self.rings[&l])
    }

    fn doc(&self, name: &str, table: Table) -> (String, Document) {
        let mut meta = self.meta.clone();
        meta.command = format!("figures {name}");
        let mut doc = Document::new(meta);
        doc.tables.push(table);
        (format!("{name}.csv"), doc)
    }

    fn prec(&self) -> u32 {
        self.meta.precision_bits
    }
}

fn points() -> Table {
    Table::new("points", &["set", "re", "im"])
}

fn push_gamma(t: &mut Table, prec: u32) {
    for p in gamma_curve(GAMMA_POINTS, prec) {
        let (x, y) = p.to_f64();
        t.push(row!["gamma", x, y]);
    }
}

fn fig1(cx: &mut Context) -> Result<Vec<(String, Document)>, CliError> {
    let w = analysis::pole_removed(&tables::current_f64(), cx.args.r0);
    let mut t = Table::new("coefficients", &["k", "value"]);
    for (k, v) in w.iter().enumerate().skip(6) {
        t.push(row![k, *v]);
    }
    Ok(vec![cx.doc("fig1", t)])
}

fn fig2(cx: &mut Context) -> Result<Vec<(String, Document)>, CliError> {
    let j = tables::current_series(cx.prec());
    let u = analysis::reciprocal_gap(&j, j.order())?.to_f64();
    let fit = analysis::fit_reciprocal_growth(&j, cx.args.window)?;
    let (a, b, c) = (fit.param("A1").unwrap_or(0.0), fit.param("B1").unwrap_or(0.0), fit.param("C1").unwrap_or(0.0));
    let mut t = Table::new("log_u_squared", &["k", "value", "fit"]);
    for (k, uk) in u.iter().enumerate().skip(1) {
        let kf = k as f64;
        let model = a * kf.sqrt() + b * kf.ln() + c;
        let value = if *uk > 0.0 { Cell::from(uk.ln().powi(2)) } else { Cell::Null };
        t.push(vec![Cell::from(k), value, Cell::from(model * model)]);
    }
    Ok(vec![cx.doc("fig2", t)])
}

fn fig3(cx: &mut Context) -> Result<Vec<(String, Document)>, CliError> {
    let j = tables::current_series(cx.prec());
    let x = analysis::x_series(&j, cx.args.r0, j.order())?.to_f64();
    let model = CosineParams::from_report(&analysis::fit_cosine(&x, cx.args.window)?)?;
    let mut t = Table::new("x", &["k", "value", "fit"]);
    for (k, v) in x.iter().enumerate() {
        t.push(row![k, *v, model.at(k as f64)]);
    }
    Ok(vec![cx.doc("fig3", t)])
}

fn semi_points(ls: &[usize], prec: u32) -> Result<Table, CliError> {
    let mut t = points();
    for &l in ls {
        for z in semi_infinite_zeros(l, prec)? {
            let (x, y) = z.to_f64();
            t.push(row![format!("L={l}"), x, y]);
        }
    }
    push_gamma(&mut t, prec);
    Ok(t)
}

fn fig4(cx: &mut Context) -> Result<Vec<(String, Document)>, CliError> {
    if cx.args.l.contains(&0) {
        return Err(CliError::Usage("fig4 sizes must be >= 1".into()));
    }
    let t = semi_points(&cx.args.l, cx.prec())?;
    Ok(vec![cx.doc("fig4", t)])
}

fn ring_points(cx: &mut Context, window_only: bool) -> Result<Table, CliError> {
    let prec = cx.prec();
    let mut t = points();
    for l in 1..=cx.args.ring_l_max {
        let z = denominator_zeros(cx.ring(l)?, prec)?;
        for p in if window_only { &z.in_window } else { &z.all } {
            let (x, y) = p.to_f64();
            t.push(row![format!("L={l}"), x, y]);
        }
    }
    Ok(t)
}

fn fig5(cx: &mut Context) -> Result<Vec<(String, Document)>, CliError> {
    let t = ring_points(cx, false)?;
    Ok(vec![cx.doc("fig5", t)])
}

fn fig6(cx: &mut Context) -> Result<Vec<(String, Document)>, CliError> {
    let ls: Vec<usize> = (1..=5).collect();
    let a = semi_points(&ls, cx.prec())?;
    let mut b = ring_points(cx, true)?;
    let j = tables::current_series(cx.prec());
    let x = analysis::x_series(&j, cx.args.r0, j.order())?.to_f64();
    let fit = analysis::fit_cosine(&x, cx.args.window)?;
    let k = analysis::k_approximant(&j, &fit, cx.args.r0, 20)?;
    for (li, line) in analysis::gamma_hat_contour(&k, analysis::GAMMA_HAT_WINDOW, CONTOUR_GRID)?.iter().enumerate() {
        for z in line {
            b.push(row![format!("gammahat:{li}"), z.re, z.im]);
        }
    }
    Ok(vec![cx.doc("fig6a", a), cx.doc("fig6b", b)])
}

type FigureFn = fn(&mut Context) -> Result<Vec<(String, Document)>, CliError>;

/// Writes the requested files; a failing figure is reported and the rest
/// still run.
pub fn run_figures(a: &FiguresArgs, mut meta: Meta) -> Result<Document, CliError> {
    let all: [(&str, Figure, FigureFn); 6] = [
        ("fig1", Figure::Fig1, fig1),
        ("fig2", Figure::Fig2, fig2),
        ("fig3", Figure::Fig3, fig3),
        ("fig4", Figure::Fig4, fig4),
        ("fig5", Figure::Fig5, fig5),
        ("fig6", Figure::Fig6, fig6),
    ];
    meta.param("r0", a.r0);
    meta.param("window", format!("{}..{}", a.window.0, a.window.1));
    meta.param("L", crate::commands::join(&a.l));
    meta.param("ring_L_max", a.ring_l_max);
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Usage(format!("{}: {e}", a.out_dir.display())))?;
    let mut summary = Document::new(meta.clone());
    let mut files = Table::new("files", &["figure", "path", "rows"]);
    let mut cx = Context {
        args: a,
        meta: &meta,
        rings: BTreeMap::new(),
    };
    for (name, fig, f) in all {
        if a.figure != Figure::All && a.figure != fig {
            continue;
        }
        match f(&mut cx) {
            Ok(docs) => {
                let mut written = Vec::new();
                for (file, doc) in docs {
                    let path = a.out_dir.join(&file);
                    let rows = doc.tables.iter().map(|t| t.rows.len()).sum::<usize>();
                    match fs::write(&path, doc.render(Format::Csv)) {
                        Ok(()) => {
                            files.push(row![name, path.display().to_string(), rows]);
                            written.push(file);
                        }
                        Err(e) => summary.check(name, false, format!("{}: {e}", path.display())),
                    }
                }
                if !written.is_empty() {
                    summary.check(name, true, written.join(","));
                }
            }
            Err(e) => summary.check(name, false, e.to_string()),
        }
    }
    summary.tables.push(files);
    Ok(summary)
}
