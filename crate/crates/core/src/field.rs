//! Scalar fields: arbitrary-precision rationals and Gaussian rationals.
//!
//! All arithmetic in the crate is exact. The two concrete fields are
//! `Rat` (the rationals, backed by `num_rational::BigRational`) and
//! [`GaussRat`] (pairs of rationals acting as complex numbers). Generic
//! code is written against the [`Field`] trait so a system can be
//! instantiated over either.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational scalar. Invariants (reduced form, positive denominator)
/// are maintained by `BigRational` itself.
pub type Rat = BigRational;

/// Minimal field interface needed by the dynamical systems.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn from_int(n: i64) -> Self;

    /// Exact division; `None` when the divisor is zero.
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * r)
    }

    /// A small random nonzero element, used by the seeded samplers.
    fn random_nonzero<R: Rng>(rng: &mut R) -> Self;
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Serialize a rational as exact fraction text, `p/q` or plain `p`.
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse exact fraction text `p` or `p/q`.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
    }
}

impl Field for Rat {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_int(n: i64) -> Self {
        rat_int(n)
    }
    fn random_nonzero<R: Rng>(rng: &mut R) -> Self {
        // Numerators in [-9, 9] \ {0}, denominators in [1, 4].
        loop {
            let n = rng.gen_range(-9i64..=9);
            if n == 0 {
                continue;
            }
            let d = rng.gen_range(1i64..=4);
            return rat(n, d);
        }
    }
}

/// Gaussian rational: `re + im*i` with rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat {
            re,
            im: Rat::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(rat_int(re), rat_int(im))
    }

    pub fn i() -> Self {
        GaussRat::new(Rat::zero(), Rat::one())
    }

    /// Complex conjugate. Conjugation is an involutive field automorphism.
    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// `re^2 + im^2`, the squared modulus; always a rational.
    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.im) {
            write!(f, "{}", rat_to_string(&self.re))
        } else {
            write!(
                f,
                "{}{:+}i",
                rat_to_string(&self.re),
                self.im
            )
        }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: GaussRat) -> GaussRat {
        self.div_exact(&rhs).expect("division by zero")
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(Rat::zero(), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::new(Rat::one(), Rat::zero())
    }
}

impl Field for GaussRat {
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if Zero::is_zero(&n) {
            None
        } else {
            Some(GaussRat::new(&self.re / &n, -&self.im / &n))
        }
    }
    fn from_int(n: i64) -> Self {
        GaussRat::from_rat(rat_int(n))
    }
    fn random_nonzero<R: Rng>(rng: &mut R) -> Self {
        loop {
            let z = GaussRat::new(
                rat_int(rng.gen_range(-9i64..=9)),
                rat_int(rng.gen_range(-9i64..=9)),
            );
            if !z.is_zero() {
                return z;
            }
        }
    }
}

/// Absolute value of a rational (handy when comparing magnitudes of
/// exact quantities in tests).
pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}

/// `base^e` for any integer exponent; `None` for `0^negative`.
pub fn pow_i<K: Field>(base: &K, e: i64) -> Option<K> {
    let b = if e < 0 { base.inv()? } else { base.clone() };
    let mut acc = K::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * b.clone();
    }
    Some(acc)
}
