//! Exact coefficient fields.
//!
//! Two implementations of [`Field`]: prime fields `F_p` with a runtime prime
//! (default `2^61 - 1`) and the rationals with arbitrary-precision parts.
//! There is no floating point anywhere in the module computations.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The default prime `2^61 - 1`.
pub const MERSENNE_61: u64 = (1u64 << 61) - 1;

/// Half-width of the integer box rational samples are drawn from.
pub const RATIONAL_SAMPLE_RADIUS: i64 = 1 << 10;

/// A field context. Elements carry no reference to their field; every
/// operation goes through the context.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Draws a sample from a fixed finite subset of the field.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// `log2` of the size of the set [`Field::random`] draws from; this is
    /// the `q` in Schwartz–Zippel bounds.
    fn sample_bits(&self) -> f64;

    fn encode(&self, a: &Self::Elem) -> String;
    fn decode(&self, s: &str) -> Result<Self::Elem>;
    fn descriptor(&self) -> FieldDescriptor;
}

/// Serializable description of a field, embedded in every dump and report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    Rational,
    Prime { p: String },
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "rat"),
            FieldDescriptor::Prime { p } => write!(f, "prime:{p}"),
        }
    }
}

/// `F_p` for a prime `2^31 < p < 2^64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 1u64 << 31 {
            return Err(Error::InvalidField(format!("prime {p} must exceed 2^31")));
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn mersenne61() -> Self {
        PrimeField { p: MERSENNE_61 }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::mersenne61()
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        let r = (v as i128).rem_euclid(self.p as i128);
        r as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let (s, overflow) = a.overflowing_add(*b);
        if overflow || s >= self.p {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(pow_mod(*a, self.p - 2, self.p))
        }
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }
    fn sample_bits(&self) -> f64 {
        (self.p as f64).log2()
    }
    fn encode(&self, a: &u64) -> String {
        a.to_string()
    }
    fn decode(&self, s: &str) -> Result<u64> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad field element {s:?}: {e}")))?;
        if v >= self.p {
            return Err(Error::Parse(format!("element {v} not reduced mod {}", self.p)));
        }
        Ok(v)
    }
    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Prime { p: self.p.to_string() }
    }
}

/// The rational numbers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let v = rng.random_range(-RATIONAL_SAMPLE_RADIUS..=RATIONAL_SAMPLE_RADIUS);
        self.from_i64(v)
    }
    fn sample_bits(&self) -> f64 {
        ((2 * RATIONAL_SAMPLE_RADIUS + 1) as f64).log2()
    }
    fn encode(&self, a: &BigRational) -> String {
        format!("{}/{}", a.numer(), a.denom())
    }
    fn decode(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = |e: &dyn fmt::Display| Error::Parse(format!("bad rational {s:?}: {e}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|e| bad(&e))?;
        let den: BigInt = den.parse().map_err(|e| bad(&e))?;
        if den.is_zero() {
            return Err(bad(&"zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }
    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rational
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mersenne_is_prime_and_small_primes_rejected() {
        assert!(is_prime_u64(MERSENNE_61));
        assert!(!is_prime_u64(MERSENNE_61 - 2));
        assert!(PrimeField::new(65537).is_err());
        assert!(PrimeField::new(4_294_967_311).is_ok());
        assert!(PrimeField::new(4_294_967_313).is_err());
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let a = f.random(&mut rng);
            if a == 0 {
                continue;
            }
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        assert_eq!(f.from_i64(-1), MERSENNE_61 - 1);
        assert_eq!(f.add(&(MERSENNE_61 - 1), &2), 1);
    }

    #[test]
    fn large_prime_addition_does_not_overflow() {
        // largest prime below 2^64
        let f = PrimeField::new(18_446_744_073_709_551_557).unwrap();
        let a = f.from_i64(-1);
        assert_eq!(f.add(&a, &a), f.from_i64(-2));
    }

    #[test]
    fn rational_codec() {
        let q = Rationals;
        let x = q.decode("-6/4").unwrap();
        assert_eq!(q.encode(&x), "-3/2");
        assert_eq!(q.decode("5").unwrap(), q.from_i64(5));
        assert!(q.decode("1/0").is_err());
    }
}
