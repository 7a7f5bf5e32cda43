//! Field abstraction and the two base fields: the rationals and prime fields.
//!
//! All algebra in this crate is generic over [`Field`]. A `Field` value
//! carries the description of the field (e.g. the prime `p`, or the defining
//! moduli of an extension tower) while elements are a separate associated
//! type. Operations take `&self` so that towers can dispatch recursively.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use std::fmt::Debug;

/// A (computable) field. Elements are compared with `==` on the canonical
/// representation; every operation must return canonical elements.
pub trait Field: Clone + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// The characteristic, with `0` meaning characteristic zero.
    fn characteristic(&self) -> u64;
    /// Canonical image of a small integer.
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// A uniformly random element where that makes sense  (finite fields);
    /// for infinite fields, a random small element. Used by randomized
    /// factoring; correctness never depends on the distribution.
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;
    /// Human-readable form used by debug dumps.
    fn format(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    /// `a^n` by binary powering (`n >= 0`).
    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
    /// Number of elements for finite fields, `None` for infinite ones.
    fn order(&self) -> Option<BigUint> {
        None
    }
}

/// The field of rational numbers with arbitrary-precision arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
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
    fn characteristic(&self) -> u64 {
        0
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn random(&self, rng: &mut dyn RngCore) -> BigRational {
        // Small random integers; enough for squarefree-shift searches.
        let v = (rng.next_u32() % 41) as i64 - 20;
        self.from_i64(v)
    }
    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// A prime field `F_p` for `p < 2^63`, with elements stored as `u64` in
/// `[0, p)` and products taken through `u128`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// `p` must be prime; small inputs are checked, large ones are trusted
    /// by callers that generated them with a primality test.
    pub fn new(p: u64) -> Self {
        assert!(p >= 2, "modulus must be at least 2");
        debug_assert!(is_prime_u64(p), "modulus {p} is not prime");
        PrimeField { p }
    }
    pub fn modulus(&self) -> u64 {
        self.p
    }
    pub fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        let (_, digits) = r.to_u64_digits();
        match digits.len() {
            0 => 0,
            1 => digits[0],
            _ => unreachable!("reduced residue exceeds u64"),
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b; // both < p < 2^63, no overflow
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Extended Euclid on signed 128-bit; p < 2^63 keeps this exact.
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus not prime or element not invertible");
        let mut t = t0 % self.p as i128;
        if t < 0 {
            t += self.p as i128;
        }
        Some(t as u64)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        let r = n.rem_euclid(self.p as i64);
        r as u64
    }
    fn random(&self, rng: &mut dyn RngCore) -> u64 {
        // Rejection-free is fine: the slight bias is irrelevant for
        // Cantor–Zassenhaus splitting.
        rng.next_u64() % self.p
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn order(&self) -> Option<BigUint> {
        Some(BigUint::from(self.p))
    }
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        a %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    // This witness set is deterministic for all 64-bit integers.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The next prime `>= n`.
pub fn next_prime_u64(mut n: u64) -> u64 {
    if n <= 2 {
        return 2;
    }
    if n % 2 == 0 {
        n += 1;
    }
    while !is_prime_u64(n) {
        n += 2;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_field_axioms_spot() {
        let q = Rationals;
        let a = q.from_i64(3);
        let b = q.from_i64(-7);
        assert_eq!(q.add(&a, &b), q.from_i64(-4));
        assert_eq!(q.mul(&a, &b), q.from_i64(-21));
        let inv = q.inv(&b).unwrap();
        assert_eq!(q.mul(&b, &inv), q.one());
        assert!(q.inv(&q.zero()).is_none());
        assert_eq!(q.characteristic(), 0);
    }

    #[test]
    fn prime_field_inverse_exhaustive_small() {
        for p in [2u64, 3, 5, 7, 101] {
            let f = PrimeField::new(p);
            for a in 1..p {
                let inv = f.inv(&a).unwrap();
                assert_eq!(f.mul(&a, &inv), f.one(), "p={p} a={a}");
            }
            assert!(f.inv(&0).is_none());
        }
    }

    #[test]
    fn prime_field_large_modulus_ops() {
        // A prime just below 2^62.
        let p = 4611686018427387847u64;
        assert!(is_prime_u64(p));
        let f = PrimeField::new(p);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = f.random(&mut rng);
            if a == 0 {
                continue;
            }
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
            // (a+b)−b == a
            let b = f.random(&mut rng);
            assert_eq!(f.sub(&f.add(&a, &b), &b), a);
        }
    }

    #[test]
    fn primality_oracle_against_trial_division() {
        for n in 0..2000u64 {
            let by_trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), by_trial, "n={n}");
        }
        assert!(is_prime_u64(2u64.pow(61) - 1)); // Mersenne prime
        assert!(!is_prime_u64(2u64.pow(61) + 1));
    }

    #[test]
    fn from_i64_wraps_negatives() {
        let f = PrimeField::new(13);
        assert_eq!(f.from_i64(-1), 12);
        assert_eq!(f.from_i64(-13), 0);
        assert_eq!(f.from_i64(27), 1);
    }

    #[test]
    fn reduce_bigint_matches_from_i64() {
        let f = PrimeField::new(1000003);
        for n in [-5i64, -1, 0, 1, 999999999] {
            assert_eq!(f.reduce_bigint(&BigInt::from(n)), f.from_i64(n.rem_euclid(1000003) as i64 + 0) as u64 % 1000003);
        }
        let big = BigInt::parse_bytes(b"-123456789012345678901234567890", 10).unwrap();
        let r = f.reduce_bigint(&big);
        assert!(r < 1000003);
        // Round-trip consistency: r ≡ big (mod p).
        let diff = big - BigInt::from(r);
        assert!((diff % BigInt::from(1000003u64)).is_zero());
    }
}
