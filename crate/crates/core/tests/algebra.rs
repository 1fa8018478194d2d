use proptest::prelude::*;
use rug::{Float, Rational};
use slowbond::algebra::*;
use slowbond::tables;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

#[test]
fn difference_of_squares() {
    let a = RationalSeries::from_ints(&[1, 1, 0]);
    let b = RationalSeries::from_ints(&[1, -1, 0]);
    assert_eq!(a.mul(&b), RationalSeries::from_ints(&[1, 0, -1]));
    assert_eq!(a.apply(&b, SeriesOp::Add), RationalSeries::from_ints(&[2, 0, 0]));
}

#[test]
fn pole_removed_table_series() {
    let j = RationalSeries::new(tables::current_rationals());
    let r0 = parse_rational("-1.5437").unwrap();
    let lin = RationalSeries::new({
        let mut v = vec![Rational::new(); 17];
        v[0] = Rational::from(-&r0);
        v[1] = Rational::from(1);
        v
    });
    let w = lin.mul(&j);
    assert_eq!(*w.coeff(0), 0);
    assert_eq!(*w.coeff(1), Rational::from(-&r0));
    let zero = j.add(&j.neg());
    assert!(zero.coeffs().iter().all(|c| c.cmp0().is_eq()));
}

#[test]
fn reciprocal_examples() {
    let geo = RationalSeries::from_ints(&[1, -1, 0, 0, 0]).reciprocal(4).unwrap();
    assert_eq!(geo, RationalSeries::from_ints(&[1, 1, 1, 1, 1]));
    let mut c = RationalSeries::new(tables::current_rationals()).neg().into_coeffs();
    c[0] += q(1, 4);
    let v = RationalSeries::new(c).reciprocal(16).unwrap();
    assert_eq!(*v.coeff(0), 4);
    assert!(RationalSeries::from_ints(&[0, 1]).reciprocal(3).is_err());
}

#[test]
fn log_and_exp_examples() {
    let geo = RationalSeries::from_ints(&[1, 1, 1, 1]);
    let l = geo.log(3).unwrap();
    assert_eq!(l.coeffs(), &[q(0, 1), q(1, 1), q(1, 2), q(1, 3)]);
    // exp(1/(1-r)) = e exp(r/(1-r)) = e (1 + r + 3/2 r^2 + ...)
    let prec = 256;
    let s = FloatSeries::new(vec![Float::with_val(prec, 1); 3]).exp(2);
    let e = Float::with_val(prec, 1).exp();
    for (got, want) in s.coeffs().iter().zip([1.0, 1.0, 1.5]) {
        assert!(Float::with_val(prec, got - Float::with_val(prec, &e * want)).abs() < 1e-70);
    }
    assert!(RationalSeries::from_ints(&[2, 1]).log(1).is_err());
    assert!(RationalSeries::from_ints(&[1, 1]).exp(1).is_err());
}

#[test]
fn exp_log_round_trip_at_128_bits() {
    let prec = 128;
    // w-series of the pole-removed current plus 1 keeps the constant positive
    let c = tables::current_rationals();
    let r0 = parse_rational("-1.5437").unwrap();
    let mut w: Vec<Rational> = (0..=16)
        .map(|k| if k == 0 { Rational::from(&r0 * &c[0]) * -1 } else { &c[k - 1] - Rational::from(&r0 * &c[k]) })
        .collect();
    w[0] += 1;
    let s = RationalSeries::new(w).to_float(prec);
    let back = s.log(16).unwrap().exp(16);
    for (a, b) in back.coeffs().iter().zip(s.coeffs()) {
        assert!(Float::with_val(prec, a - b).abs() < 1e-30);
    }
}

#[test]
fn mobius_examples() {
    // a(r) = r at r1 = -3/2: r(u) = -0.6u/(1 - 0.6u)
    let a = RationalSeries::from_ints(&[0, 1, 0, 0]);
    let m = a.mobius_compose(&q(-3, 2), 3).unwrap();
    assert_eq!(m.coeffs(), &[q(0, 1), q(-3, 5), q(-9, 25), q(-27, 125)]);
    let c = RationalSeries::from_ints(&[7, 0, 0]);
    assert_eq!(c.mobius_compose(&q(-3, 2), 2).unwrap(), c);
    assert!(a.mobius_compose(&q(1, 1), 3).is_err());
    assert!(a.mobius_compose(&q(0, 1), 3).is_err());
}

#[test]
fn mobius_inverse_pair() {
    // u(r) = ((1 - r1)/r1) r/(1 - r) composed with r(u) gives u
    let r1 = q(-3, 2);
    let order = 10;
    let f = (Rational::from(1) - &r1) / &r1;
    let mut u = vec![Rational::new(); order + 1];
    for c in u.iter_mut().skip(1) {
        *c = f.clone();
    }
    let back = RationalSeries::new(u).mobius_compose(&r1, order).unwrap();
    let mut id = vec![Rational::new(); order + 1];
    id[1] = Rational::from(1);
    assert_eq!(back, RationalSeries::new(id));
}

#[test]
fn root_examples() {
    let roots = poly_roots(&Polynomial::from_ints(&[0, 1, 1]), 128).unwrap();
    let re: Vec<f64> = roots.iter().map(|z| z.re.to_f64()).collect();
    assert_eq!(re, vec![-1.0, 0.0]);
    let one = poly_roots(&Polynomial::from_ints(&[1, 1]), 128).unwrap();
    assert!((one[0].re.to_f64() + 1.0).abs() < 1e-30 && one[0].im.to_f64().abs() < 1e-30);
    assert!(poly_roots(&Polynomial::from_ints(&[3]), 128).is_err());
}

#[test]
fn double_roots_are_clustered() {
    // (r + 1)^2 (r - 2)
    let p = Polynomial::from_ints(&[1, 1]).mul(&Polynomial::from_ints(&[1, 1])).mul(&Polynomial::from_ints(&[-2, 1]));
    let set = roots_with_clusters(&p, 256).unwrap();
    assert_eq!(set.roots.len(), 3);
    assert!(set.clusters.iter().any(|c| c.len() == 2));
}

#[test]
fn text_forms() {
    assert_eq!(parse_rational("-0.75").unwrap(), q(-3, 4));
    assert_eq!(parse_rational("19/16").unwrap(), q(19, 16));
    assert_eq!(rational_to_string(&q(-3, 4)), "-3/4");
    assert_eq!(decimal_truncated(&q(-2, 3), 5), "-0.66666");
    assert_eq!(decimal_truncated(&q(1, 8), 2), "0.12");
    assert!(parse_rational("abc").is_err());
    let v = vec![q(1, 3), q(-5, 7), q(0, 1)];
    let json = rationals_to_json(&v);
    assert_eq!(rationals_from_json(&json).unwrap(), v);
    assert_eq!(rationals_to_json(&rationals_from_json(&json).unwrap()), json);
}

#[test]
fn complex_arithmetic() {
    let z = ComplexPoint::from_f64(128, 3.0, 4.0);
    assert_eq!(z.abs().to_f64(), 5.0);
    let w = z.mul(&z.recip());
    assert!((w.re.to_f64() - 1.0).abs() < 1e-30 && w.im.to_f64().abs() < 1e-30);
    let s = ComplexPoint::from_f64(128, -4.0, 0.0).sqrt();
    assert!(s.re.to_f64().abs() < 1e-30 && (s.im.to_f64() - 2.0).abs() < 1e-30);
}

fn small_series(len: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-20i64..=20, 1i64..=9), len)
}

fn to_series(v: &[(i64, i64)]) -> RationalSeries {
    RationalSeries::new(v.iter().map(|&(n, d)| q(n, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_identities(a in small_series(13), b in small_series(13), c in small_series(13)) {
        let (a, b, c) = (to_series(&a), to_series(&b), to_series(&c));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.sub(&a), a.scale(&Rational::new()));
    }

    #[test]
    fn reciprocal_inverts(mut a in small_series(13)) {
        if a[0].0 == 0 { a[0].0 = 1; }
        let s = to_series(&a);
        let inv = s.reciprocal(12).unwrap();
        let mut one = vec![Rational::new(); 13];
        one[0] = Rational::from(1);
        prop_assert_eq!(s.mul(&inv), RationalSeries::new(one));
        prop_assert_eq!(inv.reciprocal(12).unwrap(), s);
    }

    #[test]
    fn log_exp_inverse(mut a in small_series(13)) {
        a[0] = (0, 1);
        let s = to_series(&a);
        let e = s.exp(12).unwrap();
        prop_assert_eq!(e.log(12).unwrap(), s);
    }

    #[test]
    fn float_log_exp_inverse(mut a in small_series(13)) {
        a[0] = (1, 1);
        let prec = 128;
        let s = to_series(&a).to_float(prec);
        let back = s.exp(12).log(12).unwrap();
        let tol = Float::with_val(prec, 2f64.powi(-(prec as i32) / 2));
        for (x, y) in back.coeffs().iter().zip(s.coeffs()) {
            let scale = Float::with_val(prec, y.abs_ref()) + 1u32;
            prop_assert!(Float::with_val(prec, x - y).abs() <= Float::with_val(prec, &tol * &scale));
        }
    }

    #[test]
    fn roots_of_products(a in proptest::collection::vec(-9i64..=9, 2..6), b in proptest::collection::vec(-9i64..=9, 2..6)) {
        let (pa, pb) = (Polynomial::from_ints(&a), Polynomial::from_ints(&b));
        prop_assume!(pa.degree().unwrap_or(0) >= 1 && pb.degree().unwrap_or(0) >= 1);
        // repeated roots are only resolved to about half the working precision
        prop_assume!(pa.gcd(&pb).degree() == Some(0));
        prop_assume!(pa.gcd(&pa.derivative()).degree() == Some(0));
        prop_assume!(pb.gcd(&pb.derivative()).degree() == Some(0));
        let prec = 256;
        let mut union = poly_roots(&pa, prec).unwrap();
        union.extend(poly_roots(&pb, prec).unwrap());
        let prod = poly_roots(&pa.mul(&pb), prec).unwrap();
        prop_assert_eq!(prod.len(), union.len());
        let tol = 10.0 * 2f64.powi(-(prec as i32) / 2);
        let mut used = vec![false; union.len()];
        for z in &prod {
            let hit = (0..union.len())
                .filter(|&i| !used[i])
                .min_by(|&i, &j| z.dist(&union[i]).total_cmp(&z.dist(&union[j])))
                .unwrap();
            prop_assert!(z.dist(&union[hit]).to_f64() <= tol * (1.0 + z.abs().to_f64()));
            used[hit] = true;
        }
    }
}
