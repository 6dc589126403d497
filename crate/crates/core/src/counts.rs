//! Orbit counts on the projective line.
//!
//! Curves are described by their conductors: a curve of conductor `c` has
//! endomorphism ring `O_c = Z + c O_K`, the unique subring of index `c` in the
//! maximal order. Only the field discriminant and the two conductors enter
//! the count; the lattices themselves never do.
//!
//! Curves with CM by different fields (or without CM) are not covered here.
//! For non-isogenous `E`, `E'` the count is always 2.

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{divisors, omega, phi_u, two_pow, ImaginaryQuadraticField};
use crate::error::{Error, Result};
use crate::volcano::rk;

fn as_json_number<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    let num: serde_json::Number = n
        .to_str_radix(10)
        .parse()
        .map_err(serde::ser::Error::custom)?;
    num.serialize(s)
}

/// One record of a [`CountReport`].
pub trait Term {
    fn contribution(&self) -> &BigUint;
    fn csv_header() -> &'static [&'static str];
    fn csv_row(&self) -> Vec<String>;
}

/// A count together with every term of the sum that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport<T> {
    #[serde(serialize_with = "as_json_number")]
    total: BigUint,
    terms: Vec<T>,
}

impl<T: Term> CountReport<T> {
    fn from_terms(terms: Vec<T>) -> Self {
        let total = terms.iter().map(Term::contribution).sum();
        Self { total, terms }
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    /// True iff the total is the sum of the term contributions.
    pub fn is_consistent(&self) -> bool {
        self.terms.iter().map(Term::contribution).sum::<BigUint>() == self.total
    }

    /// CSV text with a header row and one row per term.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(T::csv_header()).expect("write to Vec");
        for t in &self.terms {
            w.write_record(t.csv_row()).expect("write to Vec");
        }
        String::from_utf8(w.into_inner().expect("flush to Vec")).expect("ascii digits")
    }
}

impl<T: Serialize> CountReport<T> {
    /// Compact JSON: `{"total": .., "terms": [..]}` with fixed key order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// One `(l, g)` cell of the double sum over `g | l | f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairTerm {
    pub l: u64,
    pub g: u64,
    #[serde(serialize_with = "as_json_number")]
    pub h_l: BigUint,
    pub phi_u: u64,
    #[serde(serialize_with = "as_json_number")]
    pub two_power: BigUint,
    #[serde(rename = "r_k", serialize_with = "as_json_number")]
    pub rk_value: BigUint,
    #[serde(serialize_with = "as_json_number")]
    pub contribution: BigUint,
}

impl Term for PairTerm {
    fn contribution(&self) -> &BigUint {
        &self.contribution
    }

    fn csv_header() -> &'static [&'static str] {
        &["l", "g", "h_l", "phi_u", "two_power", "r_k", "contribution"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.l.to_string(),
            self.g.to_string(),
            self.h_l.to_string(),
            self.phi_u.to_string(),
            self.two_power.to_string(),
            self.rk_value.to_string(),
            self.contribution.to_string(),
        ]
    }
}

/// One divisor `d | N` of the Gamma_0(N) cusp sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gamma0Term {
    pub d: u64,
    pub gcd: u64,
    pub phi_u: u64,
    #[serde(serialize_with = "as_json_number")]
    pub contribution: BigUint,
}

impl Term for Gamma0Term {
    fn contribution(&self) -> &BigUint {
        &self.contribution
    }

    fn csv_header() -> &'static [&'static str] {
        &["d", "gcd", "phi_u", "contribution"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            self.gcd.to_string(),
            self.phi_u.to_string(),
            self.contribution.to_string(),
        ]
    }
}

/// Conductors `c`, `c'` with `f = lcm(c, c')` and `f' = gcd(c, c')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConductorPair {
    pub c: u64,
    pub c_prime: u64,
    pub f: u64,
    pub f_prime: u64,
}

impl ConductorPair {
    pub fn new(c: u64, c_prime: u64) -> Result<Self> {
        if c == 0 || c_prime == 0 {
            return Err(Error::Zero("conductor"));
        }
        Ok(Self {
            c,
            c_prime,
            f: c.lcm(&c_prime),
            f_prime: c.gcd(&c_prime),
        })
    }
}

fn require_plain_units(field: &ImaginaryQuadraticField) -> Result<()> {
    if field.has_extra_units() {
        Err(Error::UnsupportedField(field.discriminant()))
    } else {
        Ok(())
    }
}

/// Number of `Aut(E x E')`-orbits on `P^1(K)` for curves of conductors `c`
/// and `c'`:
///
/// `sum_{l | f} h_l phi_u(f/l) sum_{g | l} 2^omega(l/g) r_K(f', g, f/l)`.
///
/// Every `(l, g)` cell is kept in the report, including zero ones.
pub fn count_cm_pair(
    field: &ImaginaryQuadraticField,
    c: u64,
    c_prime: u64,
) -> Result<CountReport<PairTerm>> {
    require_plain_units(field)?;
    let pair = ConductorPair::new(c, c_prime)?;
    let mut terms = Vec::new();
    for l in divisors(pair.f)? {
        let h_l = field.h_order(l)?;
        let phi = phi_u(pair.f / l)?;
        for g in divisors(l)? {
            let two_power = two_pow(omega(l / g)?);
            let rk_value = rk(field, pair.f_prime, g, pair.f / l)?;
            let contribution = &h_l * phi * &two_power * &rk_value;
            terms.push(PairTerm {
                l,
                g,
                h_l: h_l.clone(),
                phi_u: phi,
                two_power,
                rk_value,
                contribution,
            });
        }
    }
    Ok(CountReport::from_terms(terms))
}

/// Orbits of `P^1(K)` under `GL_2(O_f)`: `sum_{l | f} h_l phi_u(f/l)`.
///
/// Terms use the `(l, g)` layout with `g = l`, `two_power = 1`, `r_k = 1`,
/// the only surviving cell of [`count_cm_pair`] when `c = c' = f`.
pub fn count_gl2_order(field: &ImaginaryQuadraticField, f: u64) -> Result<CountReport<PairTerm>> {
    require_plain_units(field)?;
    if f == 0 {
        return Err(Error::Zero("conductor"));
    }
    let mut terms = Vec::new();
    for l in divisors(f)? {
        let h_l = field.h_order(l)?;
        let phi = phi_u(f / l)?;
        terms.push(PairTerm {
            l,
            g: l,
            contribution: &h_l * phi,
            h_l,
            phi_u: phi,
            two_power: BigUint::from(1u32),
            rk_value: BigUint::from(1u32),
        });
    }
    Ok(CountReport::from_terms(terms))
}

/// Orbits of `P^1(Q)` under `Gamma_0(N)`, with elements of determinant -1
/// allowed: `sum_{d | N} phi_u(gcd(d, N/d))`.
pub fn count_gamma0_cusps(n: u64) -> Result<CountReport<Gamma0Term>> {
    if n == 0 {
        return Err(Error::Zero("N"));
    }
    let terms = divisors(n)?
        .into_iter()
        .map(|d| {
            let gcd = d.gcd(&(n / d));
            let phi = phi_u(gcd)?;
            Ok(Gamma0Term {
                d,
                gcd,
                phi_u: phi,
                contribution: BigUint::from(phi),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountReport::from_terms(terms))
}

/// Orbits of `P^1(K)` under `GL_2(O_K)`: the class number.
pub fn bianchi_count(field: &ImaginaryQuadraticField) -> BigUint {
    BigUint::from(field.class_number())
}

/// `count_cm_pair` totals for `1 <= c, c' <= max`, row-major.
pub fn count_table(field: &ImaginaryQuadraticField, max: u64) -> Result<Vec<Vec<BigUint>>> {
    require_plain_units(field)?;
    (1..=max)
        .into_par_iter()
        .map(|c| {
            (1..=max)
                .map(|c_prime| count_cm_pair(field, c, c_prime).map(|r| r.total))
                .collect()
        })
        .collect()
}
