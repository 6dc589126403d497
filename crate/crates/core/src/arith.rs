//! Exact integer number theory: factorization, totients, divisors, the
//! Kronecker character of an imaginary quadratic field and class numbers of
//! its orders.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: BTreeMap<u64, u32>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Primes in increasing order, each with its exponent.
    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    /// Exponent of `p` in the value; zero when `p` does not divide it.
    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.values().map(|&e| u64::from(e) + 1).product()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors.values().all(|&e| e == 1)
    }
}

/// Factors `n` by trial division over 2, 3 and the 6k +/- 1 wheel.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero("n"));
    }
    let mut factors = BTreeMap::new();
    let mut rest = n;
    let mut take = |p: u64, rest: &mut u64| {
        while rest.is_multiple_of(p) {
            *factors.entry(p).or_insert(0) += 1;
            *rest /= p;
        }
    };
    take(2, &mut rest);
    take(3, &mut rest);
    let mut p = 5u64;
    while p <= rest / p {
        take(p, &mut rest);
        take(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        take(rest, &mut rest);
    }
    Ok(Factorization { value: n, factors })
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.is_prime()).unwrap_or(false)
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let fact = factorize(n)?;
    Ok(divisors_of(&fact))
}

pub fn divisors_of(fact: &Factorization) -> Vec<u64> {
    let mut out = vec![1u64];
    for (&p, &e) in fact.factors() {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let fact = factorize(n)?;
    Ok(fact
        .factors()
        .iter()
        .map(|(&p, &e)| (p - 1) * p.pow(e - 1))
        .product())
}

/// The reduced totient: the number of units mod `n` up to sign.
pub fn phi_u(n: u64) -> Result<u64> {
    let phi = euler_phi(n)?;
    Ok(if n <= 2 { 1 } else { phi / 2 })
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.factors().len() as u32)
}

/// How a prime decomposes in an imaginary quadratic field; the value of the
/// Kronecker symbol `(D | p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplittingSymbol {
    Inert,
    Ramified,
    Split,
}

impl SplittingSymbol {
    pub const ALL: [SplittingSymbol; 3] = [Self::Inert, Self::Ramified, Self::Split];

    pub fn value(self) -> i64 {
        match self {
            Self::Inert => -1,
            Self::Ramified => 0,
            Self::Split => 1,
        }
    }
}

impl TryFrom<i64> for SplittingSymbol {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(Self::Inert),
            0 => Ok(Self::Ramified),
            1 => Ok(Self::Split),
            other => Err(Error::InvalidSymbol(other)),
        }
    }
}

impl fmt::Display for SplittingSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = u128::from(modulus);
    let mut b = u128::from(base) % m;
    let mut acc = 1u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Kronecker symbol `(d | p)` for a prime `p`. The caller guarantees
/// primality and `d = 0, 1 (mod 4)`.
fn kronecker_prime(d: i64, p: u64) -> SplittingSymbol {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => SplittingSymbol::Split,
            3 | 5 => SplittingSymbol::Inert,
            _ => SplittingSymbol::Ramified,
        };
    }
    let r = i128::from(d).rem_euclid(i128::from(p)) as u64;
    if r == 0 {
        return SplittingSymbol::Ramified;
    }
    // Euler's criterion
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        SplittingSymbol::Split
    } else {
        SplittingSymbol::Inert
    }
}

/// True iff `d < 0` is the discriminant of the maximal order of an
/// imaginary quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let squarefree = |m: i64| {
        factorize(m.unsigned_abs())
            .map(|f| f.factors().values().all(|&e| e == 1))
            .unwrap_or(false)
    };
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

/// Counts reduced primitive forms `(a, b, c)` with `b^2 - 4ac = disc`.
///
/// `disc` may be any negative discriminant (`0` or `1 mod 4`), fundamental or
/// not, so this also yields class numbers of non-maximal orders.
pub fn count_reduced_forms(disc: i64) -> Result<u64> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::NotFundamental(disc));
    }
    let abs = i128::from(disc).unsigned_abs();
    let mut count = 0u64;
    let mut a: i128 = 1;
    while (3 * a * a) as u128 <= abs {
        for b in (-a + 1)..=a {
            let num = b * b - i128::from(disc);
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && (a == c || a == b.abs())) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}

/// Class number of the maximal order of discriminant `d`.
pub fn class_number(d: i64) -> Result<u64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    count_reduced_forms(d)
}

/// An imaginary quadratic field, identified by its fundamental discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImaginaryQuadraticField {
    discriminant: i64,
    class_number: u64,
}

impl ImaginaryQuadraticField {
    pub fn new(discriminant: i64) -> Result<Self> {
        let class_number = class_number(discriminant)?;
        Ok(Self {
            discriminant,
            class_number,
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn class_number(&self) -> u64 {
        self.class_number
    }

    /// Q(sqrt(-3)) and Q(i) have unit groups larger than {+1, -1}.
    pub fn has_extra_units(&self) -> bool {
        matches!(self.discriminant, -3 | -4)
    }

    /// `chi_K(p)`: split, ramified or inert.
    pub fn chi(&self, p: u64) -> Result<SplittingSymbol> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(kronecker_prime(self.discriminant, p))
    }

    /// Class number of the order of conductor `conductor`:
    /// `h * prod_{p^e || l} p^(e-1) (p - chi(p))`.
    pub fn h_order(&self, conductor: u64) -> Result<BigUint> {
        let fact = factorize(conductor).map_err(|_| Error::Zero("conductor"))?;
        let mut h = BigUint::from(self.class_number);
        for (&p, &e) in fact.factors() {
            let chi = kronecker_prime(self.discriminant, p).value();
            let local = (i128::from(p) - i128::from(chi)) as u64;
            h *= BigUint::from(p).pow(e - 1) * local;
        }
        Ok(h)
    }
}

/// `2^k` as a big integer.
pub(crate) fn two_pow(k: u32) -> BigUint {
    BigUint::one() << k
}
