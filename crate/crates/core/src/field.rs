//! Coefficient fields: prime fields, the rationals, and finite extensions of
//! small prime fields used when a computation needs generic coefficients.

use std::fmt;
use std::str::FromStr;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Prime(u32),
    Rationals,
}

impl FieldSpec {
    pub const F2: FieldSpec = FieldSpec::Prime(2);
    pub const F3: FieldSpec = FieldSpec::Prime(3);
    pub const F32003: FieldSpec = FieldSpec::Prime(32003);
    pub const Q: FieldSpec = FieldSpec::Rationals;

    pub fn prime(p: u32) -> Result<FieldSpec> {
        if is_prime(p as u64) {
            Ok(FieldSpec::Prime(p))
        } else {
            Err(Error::InvalidField(format!("{p} is not a prime below 2^31")))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) => *p as u64,
            FieldSpec::Rationals => 0,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Prime(p) => Some(*p as u64),
            FieldSpec::Rationals => None,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F{p}"),
            FieldSpec::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let digits = t
            .strip_prefix("Fp:")
            .or_else(|| t.strip_prefix("F"))
            .or_else(|| t.strip_prefix("f"))
            .ok_or_else(|| Error::InvalidField(s.to_string()))?;
        let p: u32 = digits.parse().map_err(|_| Error::InvalidField(s.to_string()))?;
        if p >= 1 << 31 {
            return Err(Error::InvalidField(s.to_string()));
        }
        FieldSpec::prime(p).map_err(|_| Error::InvalidField(s.to_string()))
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact field arithmetic with a runtime context (the modulus, tables, ...).
pub trait Field: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Display name used in reports.
    fn name(&self) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// `a - c * b`, the elimination step.
    fn sub_mul(&self, a: &Self::Elem, c: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(c, b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u32) -> PrimeField {
        PrimeField { p: p as u64 }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }
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
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
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
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }
    fn name(&self) -> String {
        format!("F{}", self.p)
    }
}

/// The rationals, with coefficients sampled as small nonzero integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

/// Range of the integers drawn by [`Rationals::random_nonzero`].
const RATIONAL_SAMPLE_BOUND: i64 = 1 << 15;

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
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
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
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let mut v = 0;
        while v == 0 {
            v = rng.gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND);
        }
        self.from_i64(v)
    }
    fn name(&self) -> String {
        "Q".into()
    }
}

/// `GF(p^k)` with elements encoded as base-`p` digit strings of polynomials
/// modulo a primitive polynomial; multiplication goes through log tables.
#[derive(Clone)]
pub struct GaloisField {
    inner: Arc<GaloisTables>,
}

struct GaloisTables {
    p: u32,
    k: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.inner.p, self.inner.k)
    }
}

impl GaloisField {
    /// Builds `GF(p^k)`. Panics if `p^k` exceeds `2^24`.
    pub fn new(p: u32, k: u32) -> GaloisField {
        assert!(is_prime(p as u64));
        let q = (p as u64).pow(k);
        assert!(q <= 1 << 24, "extension field too large for tables");
        let q = q as u32;
        // Search monic degree-k polynomials x^k - c(x) for one where x has order q-1.
        for tail in 1..q {
            if let Some(exp) = Self::power_table(p, k, q, tail) {
                let mut log = vec![0u32; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return GaloisField { inner: Arc::new(GaloisTables { p, k, q, exp, log }) };
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    /// The smallest extension of `F_p` with at least `min_size` elements.
    pub fn at_least(p: u32, min_size: u64) -> GaloisField {
        static CACHE: OnceLock<Mutex<HashMap<(u32, u32), GaloisField>>> = OnceLock::new();
        let mut k = 1;
        while (p as u64).pow(k) < min_size {
            k += 1;
        }
        let cache = CACHE.get_or_init(Default::default);
        if let Some(f) = cache.lock().unwrap().get(&(p, k)) {
            return f.clone();
        }
        let f = GaloisField::new(p, k);
        cache.lock().unwrap().insert((p, k), f.clone());
        f
    }

    fn power_table(p: u32, k: u32, q: u32, tail: u32) -> Option<Vec<u32>> {
        let digits = |mut x: u32| -> Vec<u32> {
            let mut d = vec![0; k as usize];
            for slot in d.iter_mut() {
                *slot = x % p;
                x /= p;
            }
            d
        };
        let tail = digits(tail);
        let encode = |d: &[u32]| d.iter().rev().fold(0u32, |acc, &x| acc * p + x);
        let mut cur = vec![0u32; k as usize];
        cur[0] = 1;
        let mut exp = Vec::with_capacity(q as usize - 1);
        for step in 0..(q - 1) {
            let code = encode(&cur);
            if step > 0 && code == 1 {
                return None;
            }
            exp.push(code);
            // multiply by x: shift, then reduce x^k = tail(x)
            let top = cur[k as usize - 1];
            for i in (1..k as usize).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            for i in 0..k as usize {
                cur[i] = (cur[i] + top * tail[i]) % p;
            }
        }
        (encode(&cur) == 1).then_some(exp)
    }

    pub fn size(&self) -> u32 {
        self.inner.q
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.k
    }
}

impl Field for GaloisField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.inner.p as i64) as u32
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let p = self.inner.p;
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (*a, *b, 0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }
    fn neg(&self, a: &u32) -> u32 {
        let p = self.inner.p;
        if p == 2 {
            return *a;
        }
        let (mut a, mut out, mut place) = (*a, 0u32, 1u32);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let t = &self.inner;
        let s = (t.log[*a as usize] as u64 + t.log[*b as usize] as u64) % (t.q as u64 - 1);
        t.exp[s as usize]
    }
    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero");
        let t = &self.inner;
        let l = t.log[*a as usize];
        t.exp[((t.q - 1 - l) % (t.q - 1)) as usize]
    }
    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(1..self.inner.q)
    }
    fn name(&self) -> String {
        format!("GF({}^{})", self.inner.p, self.inner.k)
    }
}

/// Minimum field size for randomized genericity arguments.
pub const GENERIC_FIELD_SIZE: u64 = 1 << 16;

/// Primes below this bound are too small to sample generic coefficients from.
pub const SMALL_PRIME_BOUND: u32 = 10_000;

/// Runs `$body` with `$f` bound to the concrete field for `$spec`.
#[macro_export]
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            $crate::field::FieldSpec::Prime(p) => {
                let $f = $crate::field::PrimeField::new(p);
                $body
            }
            $crate::field::FieldSpec::Rationals => {
                let $f = $crate::field::Rationals;
                $body
            }
        }
    };
}

/// Like [`with_field!`], but a prime below [`SMALL_PRIME_BOUND`] is replaced
/// by its smallest extension with at least [`GENERIC_FIELD_SIZE`] elements.
/// Same characteristic, so generic ranks are those of the algebraic closure
/// of the requested prime field.
#[macro_export]
macro_rules! with_generic_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            $crate::field::FieldSpec::Prime(p) if p < $crate::field::SMALL_PRIME_BOUND => {
                let $f = $crate::field::GaloisField::at_least(p, $crate::field::GENERIC_FIELD_SIZE);
                $body
            }
            $crate::field::FieldSpec::Prime(p) => {
                let $f = $crate::field::PrimeField::new(p);
                $body
            }
            $crate::field::FieldSpec::Rationals => {
                let $f = $crate::field::Rationals;
                $body
            }
        }
    };
}

/// Name of the field that [`with_generic_field!`] picks for `spec`.
pub fn generic_field_name(spec: FieldSpec) -> String {
    match spec {
        FieldSpec::Prime(p) if p < SMALL_PRIME_BOUND => {
            let mut k = 1;
            while (p as u64).pow(k) < GENERIC_FIELD_SIZE {
                k += 1;
            }
            format!("GF({p}^{k})")
        }
        other => other.to_string(),
    }
}
