use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::Coefficient;
use crate::error::{Error, Result};

/// A power series in `r` truncated at an explicit order.
///
/// `coeffs[k]` is the coefficient of `r^k`; `coeffs.len() == order + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

/// Exact series with big-rational coefficients.
pub type RationalSeries = Series<Rational>;
/// Multiprecision float series; precision is that of its coefficients.
pub type FloatSeries = Series<Float>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

impl<C: Coefficient> Series<C> {
    /// Panics on an empty coefficient list: a series always has order >= 0.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    /// Truncate to `order`, or pad with zeros if the series is shorter.
    ///
    /// Padding asserts knowledge of zero coefficients and is only correct for
    /// series that are really polynomials.
    pub fn with_order(&self, order: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..=order)
            .map(|k| self.coeffs.get(k).cloned().unwrap_or_else(|| zero.clone()))
            .collect();
        Series { coeffs }
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.with_order(order.min(self.order()))
    }

    pub fn zero(template: &C, order: usize) -> Self {
        Series {
            coeffs: vec![template.zero_like(); order + 1],
        }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(&c, order);
        s.coeffs[0] = c;
        s
    }

    /// The series of `r` itself (zero if `order == 0`).
    pub fn variable(template: &C, order: usize) -> Self {
        let mut s = Self::zero(template, order);
        if order >= 1 {
            s.coeffs[1] = template.one_like();
        }
        s
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(Coefficient::neg).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn apply(&self, other: &Self, op: SeriesOp) -> Self {
        match op {
            SeriesOp::Add => self.add(other),
            SeriesOp::Sub => self.sub(other),
            SeriesOp::Mul => self.mul(other),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Series {
            coeffs: (0..=n).map(|k| self.coeffs[k].add(&other.coeffs[k])).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Series {
            coeffs: (0..=n).map(|k| self.coeffs[k].sub(&other.coeffs[k])).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = self.coeffs[0].mul(&other.coeffs[k]);
                for i in 1..=k {
                    acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]));
                }
                acc
            })
            .collect();
        Series { coeffs }
    }

    /// `1/a` to the given order (the input is padded or truncated first).
    pub fn reciprocal(&self, order: usize) -> Result<Self> {
        let a = self.with_order(order);
        if a.coeffs[0].is_zero() {
            return Err(Error::SingularInverse);
        }
        let a0 = a.coeffs[0].clone();
        let mut out: Vec<C> = Vec::with_capacity(order + 1);
        out.push(a0.one_like().div(&a0));
        for k in 1..=order {
            let mut acc = a.coeffs[1].mul(&out[k - 1]);
            for i in 2..=k {
                acc = acc.add(&a.coeffs[i].mul(&out[k - i]));
            }
            out.push(acc.neg().div(&a0));
        }
        Ok(Series { coeffs: out })
    }

    pub fn div(&self, other: &Self, order: usize) -> Result<Self> {
        Ok(self.with_order(order).mul(&other.reciprocal(order)?))
    }

    /// Formal derivative; the result has order one less (minimum 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(&self.coeffs[0], 0);
        }
        Series {
            coeffs: (1..=self.order())
                .map(|k| self.coeffs[k].mul_i64(k as i64))
                .collect(),
        }
    }

    /// Log of a series with unit constant term, by integrating `a'/a`.
    fn log_unit(&self, order: usize) -> Result<Self> {
        let a = self.with_order(order);
        let mut out = vec![a.coeffs[0].zero_like(); order + 1];
        if order == 0 {
            return Ok(Series { coeffs: out });
        }
        let q = a.derivative().mul(&a.reciprocal(order - 1)?);
        for k in 1..=order {
            out[k] = q.coeffs[k - 1].div_i64(k as i64);
        }
        Ok(Series { coeffs: out })
    }

    /// `exp(a) / exp(a_0)`, i.e. the exponential of the series with its
    /// constant term removed. Uses `n e_n = sum_k k a_k e_{n-k}`.
    fn exp_unit(&self, order: usize) -> Self {
        let a = self.with_order(order);
        let mut out: Vec<C> = Vec::with_capacity(order + 1);
        out.push(a.coeffs[0].one_like());
        for n in 1..=order {
            let mut acc = a.coeffs[1].mul(&out[n - 1]);
            for k in 2..=n {
                acc = acc.add(&a.coeffs[k].mul_i64(k as i64).mul(&out[n - k]));
            }
            out.push(acc.div_i64(n as i64));
        }
        Series { coeffs: out }
    }

    /// Composition `a(r(u))` with `r(u) = r1 u / (1 - r1 + r1 u)`, the inverse
    /// of `u(r) = ((1 - r1)/r1) r/(1 - r)`: `u = 0` maps to `r = 0`, `u = 1`
    /// to `r = r1`, and `r = 1` is sent to `u = infinity`.
    pub fn mobius_compose(&self, r1: &C, order: usize) -> Result<Self> {
        let one = r1.one_like();
        let denom = one.sub(r1);
        if r1.is_zero() || denom.is_zero() {
            return Err(Error::DegenerateMap(format!("{r1:?}")));
        }
        // r(u) = q u / (1 + q u) = sum_{k>=1} -(-q)^k u^k, q = r1/(1 - r1)
        let q = r1.div(&denom);
        let mut inner = Self::zero(r1, order);
        let mut pow = q.neg();
        for k in 1..=order {
            inner.coeffs[k] = pow.neg();
            pow = pow.mul(&q.neg());
        }
        let a = self.with_order(order);
        // Horner: a0 + r (a1 + r (a2 + ...)), exact to O(u^{order+1}) since
        // r(u) = O(u).
        let mut acc = Self::constant(a.coeffs[order].clone(), order);
        for k in (0..order).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].add(&a.coeffs[k]);
        }
        Ok(acc)
    }

    /// Evaluate the truncated polynomial at a point of the coefficient type.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = self.coeffs[self.order()].clone();
        for k in (0..self.order()).rev() {
            acc = acc.mul(x).add(&self.coeffs[k]);
        }
        acc
    }
}

impl RationalSeries {
    pub fn from_ints(v: &[i64]) -> Self {
        Series::new(v.iter().map(|&x| Rational::from(x)).collect())
    }

    /// Exact logarithm; only defined for constant term 1.
    pub fn log(&self, order: usize) -> Result<Self> {
        if self.coeffs[0] != 1 {
            return Err(Error::LogDomain("constant term 1 for an exact series"));
        }
        self.log_unit(order)
    }

    /// Exact exponential; only defined for constant term 0.
    pub fn exp(&self, order: usize) -> Result<Self> {
        if self.coeffs[0].cmp0() != std::cmp::Ordering::Equal {
            return Err(Error::LogDomain("constant term 0 for an exact exponential"));
        }
        Ok(self.exp_unit(order))
    }

    pub fn to_float(&self, prec: u32) -> FloatSeries {
        Series::new(self.coeffs.iter().map(|q| Float::with_val(prec, q)).collect())
    }
}

impl FloatSeries {
    pub fn precision(&self) -> u32 {
        self.coeffs.iter().map(Float::prec).max().unwrap_or(53)
    }

    /// Real logarithm; the constant term must be positive.
    pub fn log(&self, order: usize) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if !(a0.is_finite() && a0.cmp0() == Some(std::cmp::Ordering::Greater)) {
            return Err(Error::LogDomain("a positive constant term"));
        }
        let normalized = self.scale(&Float::with_val(a0.prec(), 1 / a0));
        let mut out = normalized.log_unit(order)?;
        out.coeffs[0] = Float::with_val(a0.prec(), a0.ln_ref());
        Ok(out)
    }

    pub fn exp(&self, order: usize) -> Self {
        let a0 = &self.coeffs[0];
        let e0 = Float::with_val(self.precision(), a0.exp_ref());
        self.exp_unit(order).scale(&e0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Float::to_f64).collect()
    }
}
