//! Exact ground fields: prime fields `F_p` and the rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Characteristic descriptor shared by every scalar of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Prime(u64),
    Rational,
}

impl Default for Field {
    fn default() -> Self {
        Field::Prime(101)
    }
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Prime(p) => Scalar::Mod {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            Field::Prime(p) => {
                let r = n % BigInt::from(p);
                let r = if r.is_negative() { r + BigInt::from(p) } else { r };
                Scalar::Mod {
                    value: r.to_u64().expect("reduced residue fits"),
                    modulus: p,
                }
            }
            Field::Rational => Scalar::Rat(BigRational::from_integer(n.clone())),
        }
    }

    /// `num / den` in the field; `None` when `den` vanishes.
    pub fn ratio(&self, num: i64, den: i64) -> Option<Scalar> {
        self.from_i64(den).inv().map(|d| self.from_i64(num) * d)
    }

    /// Binomial coefficient `C(n, k)` reduced into the field.
    pub fn binomial(&self, n: u64, k: u64) -> Scalar {
        if k > n {
            return self.zero();
        }
        match *self {
            Field::Prime(p) => {
                // Lucas' theorem keeps this exact for any n.
                let (mut n, mut k) = (n, k);
                let mut acc = self.one();
                while n > 0 || k > 0 {
                    let (ni, ki) = (n % p, k % p);
                    if ki > ni {
                        return self.zero();
                    }
                    let mut c = self.one();
                    for j in 0..ki {
                        c = c * self.from_i64((ni - j) as i64);
                        c = c * self.from_i64((j + 1) as i64).inv().expect("j+1 < p");
                    }
                    acc = acc * c;
                    n /= p;
                    k /= p;
                }
                acc
            }
            Field::Rational => {
                let mut c = BigInt::one();
                for j in 0..k {
                    c = c * BigInt::from(n - j) / BigInt::from(j + 1);
                }
                Scalar::Rat(BigRational::from_integer(c))
            }
        }
    }

    /// `(-1)^e` as a field element.
    pub fn sign(&self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            -self.one()
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F{p}"),
            Field::Rational => write!(f, "Q"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element carrying its field tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { value: u64, modulus: u64 },
    Rat(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Mod { modulus, .. } => Field::Prime(*modulus),
            Scalar::Rat(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
        })
    }

    /// Symmetric integer representative for prime fields, exact value for Q.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Mod { value, modulus } => {
                let v = if *value > modulus / 2 {
                    *value as i64 - *modulus as i64
                } else {
                    *value as i64
                };
                BigRational::from_integer(BigInt::from(v))
            }
            Scalar::Rat(r) => r.clone(),
        }
    }

    fn check(&self, other: &Scalar) {
        assert_eq!(
            self.field(),
            other.field(),
            "field mismatch between scalars"
        );
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { .. } => write!(f, "{}", self.to_rational()),
            Scalar::Rat(r) => write!(f, "{r}"),
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: (a + b) % modulus,
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => unreachable!(),
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: a * b % modulus,
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_negation() {
        let f = Field::default();
        for n in 1..101 {
            let a = f.from_i64(n);
            assert!((&a * &a.inv().unwrap()).is_one());
            assert!((&a + &(-&a)).is_zero());
        }
        assert!(f.zero().inv().is_none());
        let q = Field::Rational;
        let half = q.ratio(1, 2).unwrap();
        assert_eq!(&half + &half, q.one());
    }

    #[test]
    fn binomials() {
        let f = Field::Prime(5);
        assert_eq!(f.binomial(5, 2), f.zero());
        assert_eq!(f.binomial(6, 1), f.one());
        assert_eq!(Field::Rational.binomial(6, 3), Field::Rational.from_i64(20));
        assert_eq!(Field::default().binomial(10, 3), Field::default().from_i64(120));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Field::prime(100).is_err());
        assert!(Field::prime(7).is_ok());
    }
}
