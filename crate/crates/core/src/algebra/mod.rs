//! Exact and multiprecision arithmetic: rationals, truncated power series,
//! polynomials, complex points and polynomial root finding.

mod complex;
mod poly;
mod roots;
mod scalar;
mod serial;
mod series;

pub use complex::ComplexPoint;
pub use poly::Polynomial;
pub use roots::{poly_roots, roots_with_clusters, RootSet};
pub use scalar::Coefficient;
pub use serial::{
    decimal_truncated, float_to_string, parse_rational, rational_to_string, rationals_from_json,
    rationals_to_json,
};
pub use series::{FloatSeries, RationalSeries, Series, SeriesOp};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type BigRational = rug::Rational;
/// Multiprecision binary float.
pub type MpFloat = rug::Float;

/// Default working precision for the analysis pipeline.
pub const DEFAULT_PRECISION: u32 = 256;

pub fn float(prec: u32, value: f64) -> MpFloat {
    MpFloat::with_val(prec, value)
}

pub fn rational_to_float(prec: u32, q: &BigRational) -> MpFloat {
    MpFloat::with_val(prec, q)
}
