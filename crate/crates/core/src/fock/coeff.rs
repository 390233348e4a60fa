//! Exact scalars in Q(√2, √3).
//!
//! Every normalization constant that shows up in the spin-adapted
//! generators (1/√2, 1/√3, 1/(2√2), ...) lives in this field, so
//! commutators can be carried out without rounding.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::Ratio;

type Q = Ratio<i64>;

/// `a + b√2 + c√3 + d√6` with rational `a..d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Coeff([Q; 4]);

const SQRT_3: f64 = 1.732_050_807_568_877_2;
const SQRT_6: f64 = 2.449_489_742_783_178;

impl Coeff {
    pub const ZERO: Coeff = Coeff([Q::ZERO; 4]);
    pub const ONE: Coeff = Coeff([Q::ONE, Q::ZERO, Q::ZERO, Q::ZERO]);

    pub fn int(n: i64) -> Self {
        Coeff([Q::from_integer(n), Q::ZERO, Q::ZERO, Q::ZERO])
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Coeff([Q::new(num, den), Q::ZERO, Q::ZERO, Q::ZERO])
    }

    pub fn sqrt2() -> Self {
        Coeff([Q::ZERO, Q::ONE, Q::ZERO, Q::ZERO])
    }

    pub fn sqrt3() -> Self {
        Coeff([Q::ZERO, Q::ZERO, Q::ONE, Q::ZERO])
    }

    /// 1/√2 = √2/2
    pub fn inv_sqrt2() -> Self {
        Coeff([Q::ZERO, Q::new(1, 2), Q::ZERO, Q::ZERO])
    }

    /// 1/√3 = √3/3
    pub fn inv_sqrt3() -> Self {
        Coeff([Q::ZERO, Q::ZERO, Q::new(1, 3), Q::ZERO])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|q| *q == Q::ZERO)
    }

    /// Rational scaling.
    pub fn scale(self, num: i64, den: i64) -> Self {
        let f = Q::new(num, den);
        Coeff(self.0.map(|q| q * f))
    }

    pub fn to_f64(self) -> f64 {
        let f = |q: Q| *q.numer() as f64 / *q.denom() as f64;
        f(self.0[0]) + f(self.0[1]) * std::f64::consts::SQRT_2 + f(self.0[2]) * SQRT_3 + f(self.0[3]) * SQRT_6
    }
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::ZERO
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::int(n)
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        Coeff([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, o: Coeff) {
        *self = *self + o;
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, o: Coeff) -> Coeff {
        self + (-o)
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(self.0.map(|q| -q))
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        let two = Q::from_integer(2);
        let three = Q::from_integer(3);
        let six = Q::from_integer(6);
        Coeff([
            a0 * b0 + two * a1 * b1 + three * a2 * b2 + six * a3 * b3,
            a0 * b1 + a1 * b0 + three * (a2 * b3 + a3 * b2),
            a0 * b2 + a2 * b0 + two * (a1 * b3 + a3 * b1),
            a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
        ])
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "√2", "√3", "√6"];
        let mut first = true;
        for (q, n) in self.0.iter().zip(names) {
            if *q == Q::ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{q}{n}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
