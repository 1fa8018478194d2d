use rug::{Float, Integer, Rational};
use std::fmt;

use super::{ComplexPoint, RationalSeries, Series};
use crate::error::{Error, Result};

/// Univariate polynomial with rational coefficients in ascending degree.
/// The leading coefficient is nonzero unless the polynomial is zero, which
/// is stored as an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0().is_eq()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut v = vec![Rational::new(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.cmp0().is_eq() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at a complex point, coefficients rounded to `prec`.
    pub fn eval_complex(&self, z: &ComplexPoint, prec: u32) -> ComplexPoint {
        let mut acc = ComplexPoint::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc.re += Float::with_val(prec, c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * k as u64))
                .collect(),
        )
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d.leading().ok_or(Error::SingularSystem)?.clone();
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = Rational::from(&rem[k + dd] / &dl);
            if c.cmp0().is_ne() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= Rational::from(&c * dj);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Content-free representative: integer coefficients with gcd 1 and a
    /// positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = Integer::from(1);
        for c in &self.coeffs {
            lcm.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * Integer::from(&lcm / c.denom()) )
            .collect();
        let mut g = Integer::new();
        for v in &ints {
            g.gcd_mut(v);
        }
        if self.leading().is_some_and(|l| l.cmp0().is_lt()) {
            g = -g;
        }
        Self::new(
            ints.into_iter()
                .map(|v| Rational::from(Integer::from(v.div_exact_ref(&g))))
                .collect(),
        )
    }

    /// Greatest common divisor, returned primitive.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = o.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    /// Taylor series of `self / den` around 0.
    pub fn series_div(&self, den: &Self, order: usize) -> Result<RationalSeries> {
        let num = Series::new(self.coeffs_padded(order));
        let d = Series::new(den.coeffs_padded(order));
        num.div(&d, order)
    }

    pub fn to_series(&self, order: usize) -> RationalSeries {
        Series::new(self.coeffs_padded(order))
    }

    fn coeffs_padded(&self, order: usize) -> Vec<Rational> {
        (0..=order).map(|k| self.coeff(k)).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.cmp0().is_eq() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})r")?,
                _ => write!(f, "({c})r^{k}")?,
            }
        }
        Ok(())
    }
}
