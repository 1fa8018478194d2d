//! Reference coefficients of the current and density series, as
//! printed (20 and 8 fractional digits), plus the truncation comparator.

use rug::{Integer, Rational};

use crate::algebra::{decimal_truncated, parse_rational, FloatSeries, RationalSeries};

/// `c_0..=c_16` of the infinite-volume current series.
pub const CURRENT: [&str; 17] = [
    "0.00000000000000000000",
    "1.00000000000000000000",
    "-1.50000000000000000000",
    "1.18750000000000000000",
    "-0.77889901620370370370",
    "0.52961027553406380931",
    "-0.32787247554422253211",
    "0.22700745336484005616",
    "-0.13514784111152134747",
    "0.09696668201649961665",
    "-0.05607405058503243547",
    "0.04033294103506195933",
    "-0.02482314806701423240",
    "0.01477809455732788252",
    "-0.01328263357536883488",
    "0.00277198065020739725",
    "-0.00936905520626202337",
];

pub const CURRENT_DIGITS: usize = 20;
pub const DENSITY_DIGITS: usize = 8;

/// `DENSITY[i-1][k]` is `d_{ik}` for sites `i = 1..=5`, `k <= 16 - i`.
pub const DENSITY: [&[&str]; 5] = [
    &[
        "0.00000000", "1.00000000", "-0.75000000", "0.45312500", "-0.32345016", "0.19113754",
        "-0.13508488", "0.08218276", "-0.05412219", "0.03743811", "-0.01961547", "0.01873543",
        "-0.00544623", "0.01025427", "-0.00040069", "0.00558944",
    ],
    &[
        "0.00000000", "1.00000000", "-0.68750000", "0.40075231", "-0.31775049", "0.16723143",
        "-0.13527025", "0.07251374", "-0.05222456", "0.03658774", "-0.01492080", "0.02252206",
        "0.00051738", "0.01536259", "0.00489313",
    ],
    &[
        "0.00000000", "1.00000000", "-0.65625000", "0.37939743", "-0.32035731", "0.15934419",
        "-0.14002291", "0.06758191", "-0.05418729", "0.03602396", "-0.01314674", "0.02556734",
        "0.00480082", "0.02003591",
    ],
    &[
        "0.00000000", "1.00000000", "-0.63671875", "0.36763019", "-0.32441081", "0.15807536",
        "-0.14544675", "0.06440565", "-0.05745286", "0.03505521", "-0.01296838", "0.02764994",
        "0.00795647",
    ],
    &[
        "0.00000000", "1.00000000", "-0.62304688", "0.36002612", "-0.32884964", "0.16042006",
        "-0.15090756", "0.06221118", "-0.06108373", "0.03382992", "-0.01376695", "0.02887908",
    ],
];

/// Reference current coefficients read exactly as decimal rationals.
pub fn current_rationals() -> Vec<Rational> {
    CURRENT.iter().map(|s| parse_rational(s).expect("table entry")).collect()
}

/// Reference current series at `prec` bits.
pub fn current_series(prec: u32) -> FloatSeries {
    RationalSeries::new(current_rationals()).to_float(prec)
}

pub fn current_f64() -> Vec<f64> {
    CURRENT.iter().map(|s| s.parse().expect("table entry")).collect()
}

pub fn density(site: usize, k: usize) -> Option<&'static str> {
    DENSITY.get(site.checked_sub(1)?)?.get(k).copied()
}

/// Outcome of comparing an exact value with a printed decimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitMatch {
    pub computed: String,
    pub printed: String,
    /// Difference in units of the last printed digit.
    pub ulps: Integer,
}

impl DigitMatch {
    pub fn passes(&self) -> bool {
        self.ulps <= 1
    }
}

/// Truncate `exact` to `digits` fractional digits and compare with `printed`,
/// allowing one unit in the last place for the printer's rounding.
pub fn compare_digits(exact: &Rational, printed: &str, digits: usize) -> DigitMatch {
    let computed = decimal_truncated(exact, digits);
    let scale = Integer::from(Integer::u_pow_u(10, digits as u32));
    let to_units = |s: &str| {
        let q = parse_rational(s).expect("decimal") * &scale;
        q.trunc().into_numer_denom().0
    };
    let ulps = (to_units(&computed) - to_units(printed)).abs();
    DigitMatch {
        computed,
        printed: printed.to_string(),
        ulps,
    }
}
