use rug::{Integer, Rational};
use slowbond::algebra::{ComplexPoint, Polynomial};
use slowbond::semi_infinite::*;
use slowbond::Error;

const PREC: u32 = 256;

fn catalan(n: u32) -> Integer {
    Integer::from(Integer::binomial_u(2 * n, n)) / (n + 1)
}

#[test]
fn explicit_and_recursive_forms_agree() {
    let all = q_recursive_all(200);
    assert_eq!(all.len(), 201);
    for (l, q) in all.iter().enumerate() {
        assert_eq!(*q, q_explicit(l), "L = {l}");
        assert_eq!(q.coeff(l), Rational::from(catalan(l as u32)), "L = {l}");
    }
    assert_eq!(q_explicit(0), Polynomial::from_ints(&[1]));
    assert_eq!(q_explicit(1), Polynomial::from_ints(&[1, 1]));
    assert_eq!(q_explicit(2), Polynomial::from_ints(&[1, 2, 2]));
    assert_eq!(q_recursive(7), q_explicit(7));
}

#[test]
fn series_matches_r_one_minus_r_through_order_l_plus_one() {
    let s = current_series(1, 3).unwrap();
    assert_eq!(s.coeffs(), &[Rational::from(0), Rational::from(1), Rational::from(-1), Rational::from(1)]);
    for l in [5usize, 10, 40] {
        let s = current_series(l, l + 2).unwrap();
        for (k, c) in s.coeffs().iter().enumerate().take(l + 2) {
            let want = match k {
                1 => 1,
                2 => -1,
                _ => 0,
            };
            assert_eq!(*c, want, "L = {l}, k = {k}");
        }
        assert_ne!(s.coeffs()[l + 2], 0, "L = {l}");
    }
}

#[test]
fn rational_and_complex_evaluation_agree() {
    let j = SemiInfiniteCurrent::new(6);
    let r = Rational::from((2, 5));
    let exact = j.eval(&r).to_f64();
    let z = j.eval_complex(&ComplexPoint::from_f64(PREC, 0.4, 0.0), PREC).to_f64();
    assert!((z.0 - exact).abs() < 1e-15 && z.1.abs() < 1e-15);
}

#[test]
fn limit_classification() {
    let cases: [((f64, f64), f64, Region); 4] = [
        ((0.3, 0.0), 0.21, Region::Inner),
        ((0.8, 0.0), 0.25, Region::Outer),
        ((0.0, 0.0), 0.0, Region::Inner),
        ((1.5, 0.0), 0.25, Region::Outer),
    ];
    for ((x, y), want, region) in cases {
        let (v, reg) = limit_current(&ComplexPoint::from_f64(PREC, x, y)).unwrap();
        assert_eq!(reg, region, "r = {x}");
        let (vx, vy) = v.to_f64();
        assert!((vx - want).abs() < 1e-15 && vy.abs() < 1e-15, "r = {x}: {vx}");
    }
    let (_, reg) = limit_current(&ComplexPoint::from_f64(PREC, 0.2, 0.1)).unwrap();
    assert_eq!(reg, Region::Inner);
    let (_, reg) = limit_current(&ComplexPoint::from_f64(PREC, 0.5, 0.5)).unwrap();
    assert_eq!(reg, Region::Outer);
    let on = gamma_point(2.0, PREC);
    assert!(matches!(limit_current(&on), Err(Error::OnCurve)));
}

#[test]
fn curve_geometry() {
    let (x, y) = gamma_point(std::f64::consts::PI, PREC).to_f64();
    assert!((x - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-15 && y.abs() < 1e-15);
    let (x, y) = gamma_point(1e-10, PREC).to_f64();
    assert!((x - 0.5).abs() < 1e-4 && y.abs() < 1e-4);
    for p in gamma_curve(200, PREC) {
        let (x, y) = p.to_f64();
        assert!(x <= 0.5 + 1e-15);
        let m = ((x * (1.0 - x) + y * y).powi(2) + (y * (1.0 - 2.0 * x)).powi(2)).sqrt();
        assert!((m - 0.25).abs() < 1e-12);
        assert!(distance_to_gamma(x, y) < 1e-9);
    }
    assert!((distance_to_gamma(0.0, 0.0) - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
}

#[test]
fn finite_currents_converge_to_the_limit() {
    let inner: [(f64, f64); 4] = [(0.1, 0.0), (0.3, 0.0), (0.45, 0.0), (0.2, 0.1)];
    let outer: [(f64, f64); 3] = [(0.8, 0.0), (1.5, 0.0), (0.5, 0.5)];
    let errors = |x: f64, y: f64| -> Vec<f64> {
        let r = ComplexPoint::from_f64(PREC, x, y);
        let (lim, _) = limit_current(&r).unwrap();
        [20usize, 40, 80, 160]
            .iter()
            .map(|&l| SemiInfiniteCurrent::new(l).eval_complex(&r, PREC).sub(&lim).abs().to_f64())
            .collect()
    };
    for (x, y) in inner {
        let errs = errors(x, y);
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "r = {x} + {y}i: {errs:?}");
        if distance_to_gamma(x, y) >= 0.05 {
            assert!(errs[3] < 1e-3, "r = {x} + {y}i: {errs:?}");
        }
    }
    // outside the loop the approach to 1/4 is only algebraic, about 0.38/L
    for (x, y) in outer {
        let errs = errors(x, y);
        for w in errs.windows(2) {
            assert!((0.4..0.6).contains(&(w[1] / w[0])), "r = {x} + {y}i: {errs:?}");
        }
        assert!((0.3..0.45).contains(&(160.0 * errs[3])), "r = {x} + {y}i: {errs:?}");
    }
}

#[test]
fn zeros_stay_outside_the_loop() {
    let mut last = f64::INFINITY;
    for l in [5usize, 10, 20, 40, 80] {
        let zeros = semi_infinite_zeros(l, PREC).unwrap();
        assert_eq!(zeros.len(), l);
        let mut worst: f64 = 0.0;
        for z in &zeros {
            let (x, y) = z.to_f64();
            let modulus = ((x * (1.0 - x) + y * y).powi(2) + (y * (1.0 - 2.0 * x)).powi(2)).sqrt();
            assert!(x > 0.5 || modulus > 0.25, "L = {l}: {x} + {y}i");
            worst = worst.max(distance_to_gamma(x, y));
        }
        assert!(worst < last, "L = {l}");
        last = worst;
    }
}

#[test]
fn zero_scaling_exponents() {
    let report = zero_scaling_report(&[20, 40, 80], PREC).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert!((0.7..=1.3).contains(&report.distance_exponent), "{report:?}");
    assert!((0.35..=0.65).contains(&report.right_exponent), "{report:?}");
    assert!(report.rows.windows(2).all(|w| w[1].mean_distance < w[0].mean_distance));
    assert!(zero_scaling_report(&[20], PREC).is_err());
}
