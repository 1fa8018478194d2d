use std::path::Path;
use std::process::{Command, Output};

use slowbond_cli::output::{Cell, Document, Format, Meta, Table};

fn slowbond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowbond"))
        .args(args)
        .env_remove("SLOWBOND_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assert_round_trip(text: &str, format: Format) -> Document {
    let doc = Document::parse(text, format).unwrap();
    assert_eq!(doc.render(format), text);
    // and once more from the re-emitted text
    assert_eq!(Document::parse(&doc.render(format), format).unwrap().render(format), text);
    doc
}

#[test]
fn golden_small_ring() {
    let o = slowbond(&["golden", "--geometry", "ring", "--L", "4", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("PASS: current (5 coefficients matched)"));
    let doc = assert_round_trip(&stdout(&o), Format::Json);
    assert!(doc.passed());
    assert_eq!(doc.meta.command, "golden");
    assert_eq!(doc.meta.params["order"], "4");
}

#[test]
fn recursion_check_exits_zero() {
    let o = slowbond(&["semi", "--check-recursion", "--L-max", "200"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("PASS: explicit = recursive"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["expand", "--L", "0"][..],
        &["expand", "--L", "2", "--bogus"],
        &["semi"],
        &["analyze", "pole1", "--window", "9..3"],
        &["simulate", "--L", "2", "--r", "0.5", "--t-max", "10"],
        &["expand", "--L", "2", "--precision-bits", "8"],
    ] {
        let o = slowbond(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn failed_checks_exit_one() {
    // far too early for the saddle-point form to settle
    let o = slowbond(&["analyze", "asympt", "--a", "1", "--k", "1,2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL: drift below 2% for a = 1"));
    let doc = assert_round_trip(&stdout(&o), Format::Json);
    assert!(!doc.passed());
}

#[test]
fn expand_duplicates_rationals_as_decimals() {
    let o = slowbond(&["expand", "--L", "3", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let doc = assert_round_trip(&text, Format::Json);
    let cur = doc.table("current").unwrap();
    assert_eq!(cur.columns, ["k", "exact", "decimal", "validated"]);
    assert_eq!(cur.rows[3][1], Cell::Text("19/16".into()));
    assert_eq!(cur.rows[3][2], Cell::Text("1.187500000000000000000000000000".into()));
    assert_eq!(cur.rows[3][3], Cell::Bool(true));
    assert!(text.contains("\"precision_bits\": 256"));
    assert!(doc.table("density").unwrap().rows.len() == 6 * 4);
}

#[test]
fn csv_and_json_round_trip() {
    let runs: [&[&str]; 5] = [
        &["exact", "--L", "3", "--at", "1/2,3"],
        &["expand", "--geometry", "interval", "--L", "2", "--alpha", "3/2", "--order", "3"],
        &["simulate", "--L", "2", "--r", "0.4", "--t-max", "5000", "--seed", "9"],
        &["analyze", "fits"],
        &["couple", "--L", "3", "--r", "0.5", "--t-max", "10", "--seed", "4"],
    ];
    for args in runs {
        for (flag, format) in [("json", Format::Json), ("csv", Format::Csv)] {
            let mut full = args.to_vec();
            full.extend(["--format", flag]);
            let o = slowbond(&full);
            assert_eq!(o.status.code(), Some(0), "{full:?}: {}", stderr(&o));
            assert_round_trip(&stdout(&o), format);
        }
    }
}

#[test]
fn simulation_output_is_reproducible() {
    let args = ["simulate", "--L", "2", "--r", "0.7", "--t-max", "20000", "--seed", "3"];
    let a = slowbond(&args);
    let b = slowbond(&args);
    assert_eq!(a.stdout, b.stdout);
    let doc = Document::parse(&stdout(&a), Format::Json).unwrap();
    assert_eq!(doc.meta.seed, Some(3));
    assert_eq!(doc.meta.prng.as_deref(), Some(slowbond::simulator::PRNG_ID));
    assert_eq!(doc.meta.params["burn_in"], "1000");
    let other = slowbond(&["simulate", "--L", "2", "--r", "0.7", "--t-max", "20000", "--seed", "4"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_slowbond"))
        .args(["analyze", "pole2"])
        .env("SLOWBOND_PRECISION_BITS", "128")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let doc = Document::parse(&stdout(&o), Format::Json).unwrap();
    assert_eq!(doc.meta.precision_bits, 128);
    let flag = Command::new(env!("CARGO_BIN_EXE_slowbond"))
        .args(["analyze", "pole2", "--precision-bits", "192"])
        .env("SLOWBOND_PRECISION_BITS", "128")
        .output()
        .unwrap();
    assert_eq!(Document::parse(&stdout(&flag), Format::Json).unwrap().meta.precision_bits, 192);
}

fn write_table_document(path: &Path) {
    let mut doc = Document::new(Meta::new("expand", 256));
    let mut t = Table::new("current", &["k", "exact", "decimal", "validated"]);
    for (k, c) in slowbond::tables::current_rationals().iter().enumerate() {
        let [x, d] = slowbond_cli::commands::exact_pair(c);
        t.push(vec![Cell::from(k), x, d, Cell::from(true)]);
    }
    doc.tables.push(t);
    std::fs::write(path, doc.render(Format::Json)).unwrap();
}

#[test]
fn analysis_reads_an_expansion_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    write_table_document(&path);
    let from_file = slowbond(&["analyze", "pole2", "--input", path.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    let builtin = slowbond(&["analyze", "pole2"]);
    let pole = |o: &Output| Document::parse(&stdout(o), Format::Json).unwrap().table("pole").unwrap().rows[0][1].clone();
    assert_eq!(pole(&from_file), pole(&builtin));
    let Cell::Num(r0) = pole(&builtin) else { panic!("numeric r0") };
    assert!((-1.5442..=-1.5432).contains(&r0));
    let missing = slowbond(&["analyze", "pole2", "--input", "/nonexistent/table.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn figure_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = slowbond(&["figures", "fig4", "--L", "5,10", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let doc = assert_round_trip(&text, Format::Csv);
    let t = &doc.tables[0];
    assert_eq!(t.columns, ["set", "re", "im"]);
    let count = |set: &str| t.rows.iter().filter(|r| r[0] == Cell::Text(set.into())).count();
    assert_eq!(count("L=5"), 5);
    assert_eq!(count("L=10"), 10);
    assert!(count("gamma") > 100);

    for fig in ["fig1", "fig2", "fig3"] {
        let o = slowbond(&["figures", fig, "--out-dir", out]);
        assert_eq!(o.status.code(), Some(0));
        let text = std::fs::read_to_string(dir.path().join(format!("{fig}.csv"))).unwrap();
        let doc = assert_round_trip(&text, Format::Csv);
        assert_eq!(doc.tables[0].columns[0], "k");
    }
}

#[test]
fn failing_figure_is_reported_per_figure() {
    let dir = tempfile::tempdir().unwrap();
    let o = slowbond(&["figures", "fig4", "--L", "0", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let doc = Document::parse(&stdout(&o), Format::Json).unwrap();
    assert_eq!(doc.checks.len(), 1);
    assert!(!doc.checks[0].pass);
    assert!(!dir.path().join("fig4.csv").exists());
}

#[test]
fn coupling_check_over_seeds() {
    let o = slowbond(&["couple", "--L", "6", "--r", "0.6", "--t-max", "30", "--runs", "25", "--seed", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = Document::parse(&stdout(&o), Format::Json).unwrap();
    let runs = doc.table("runs").unwrap();
    assert_eq!(runs.rows.len(), 25);
    assert_eq!(doc.meta.params["w"], "60");
    for r in &runs.rows {
        let n = |i: usize| match r[i] {
            Cell::Int(v) => v,
            _ => panic!("integer count"),
        };
        assert!(n(3) >= n(4) && n(4) >= n(5));
    }
}
