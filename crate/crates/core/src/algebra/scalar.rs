use rug::{Float, Rational};

/// Field operations shared by exact rationals and multiprecision floats, so
/// that series arithmetic can be written once.
///
/// Float results take the larger precision of the two operands.
pub trait Coefficient: Clone + std::fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn from_i64_like(&self, v: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }
    fn mul_i64(&self, v: i64) -> Self {
        self.mul(&self.from_i64_like(v))
    }
    fn div_i64(&self, v: i64) -> Self {
        self.div(&self.from_i64_like(v))
    }
}

impl Coefficient for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Self {
        Rational::from(self / rhs)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn mul_i64(&self, v: i64) -> Self {
        Rational::from(self * v)
    }
    fn div_i64(&self, v: i64) -> Self {
        Rational::from(self / v)
    }
}

impl Coefficient for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn add(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self * rhs)
    }
    fn div(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self / rhs)
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn mul_i64(&self, v: i64) -> Self {
        Float::with_val(self.prec(), self * v)
    }
    fn div_i64(&self, v: i64) -> Self {
        Float::with_val(self.prec(), self / v)
    }
}
