use rug::Float;
use std::fmt;

/// A point of the complex plane with multiprecision components.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint {
    pub re: Float,
    pub im: Float,
}

impl ComplexPoint {
    pub fn new(re: Float, im: Float) -> Self {
        ComplexPoint { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ComplexPoint {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn real(x: Float) -> Self {
        let im = Float::new(x.prec());
        ComplexPoint { re: x, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 0.0)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexPoint {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        ComplexPoint {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        ComplexPoint {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        let ac = Float::with_val(p, &self.re * &o.re);
        let bd = Float::with_val(p, &self.im * &o.im);
        let ad = Float::with_val(p, &self.re * &o.im);
        let bc = Float::with_val(p, &self.im * &o.re);
        ComplexPoint {
            re: ac - bd,
            im: ad + bc,
        }
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        ComplexPoint {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let a = Float::with_val(p, self.re.square_ref());
        let b = Float::with_val(p, self.im.square_ref());
        a + b
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn conj(&self) -> Self {
        ComplexPoint {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn neg(&self) -> Self {
        ComplexPoint {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    /// Reciprocal; infinite components for zero input.
    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        let p = self.prec();
        ComplexPoint {
            re: Float::with_val(p, &self.re / &d),
            im: Float::with_val(p, -Float::with_val(p, &self.im / &d)),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        ComplexPoint {
            re: Float::with_val(p, &m * &c),
            im: Float::with_val(p, &m * &s),
        }
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        if r.is_zero() {
            return Self::zero(p);
        }
        // sqrt((|z| + |re|)/2), then the other component from im/(2t)
        let t = Float::with_val(p, (r + Float::with_val(p, self.re.abs_ref())) / 2u32).sqrt();
        let half = Float::with_val(p, &self.im / Float::with_val(p, &t * 2u32));
        if self.re.cmp0() != Some(std::cmp::Ordering::Less) {
            ComplexPoint { re: t, im: half }
        } else if self.im.is_sign_negative() {
            ComplexPoint {
                re: half.abs(),
                im: -t,
            }
        } else {
            ComplexPoint { re: half, im: t }
        }
    }

    /// Distance between two points.
    pub fn dist(&self, o: &Self) -> Float {
        self.sub(o).abs()
    }

    /// Lexicographic comparison by (re, im); NaNs compare equal.
    pub fn cmp_re_im(&self, o: &Self) -> std::cmp::Ordering {
        self.re
            .partial_cmp(&o.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(self.im.partial_cmp(&o.im).unwrap_or(std::cmp::Ordering::Equal))
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        if im < 0.0 {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}
