//! Exact arithmetic on finite sums `c_0 + c_1 sqrt(k_1) + ... ` with rational
//! coefficients and distinct square-free radicands.
//!
//! Square roots of distinct square-free integers are linearly independent over
//! the rationals, so such a sum equals a rational number exactly when every
//! irrational coefficient vanishes. That makes equality against a rational
//! target decidable without numerical tolerance.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{format_rational, rational_to_f64, sqrt_enclosure, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    /// Square-free radicand -> coefficient. Radicand 1 holds the rational part.
    terms: BTreeMap<BigInt, Rational>,
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Surd::zero();
        s.add_term(BigInt::one(), r);
        s
    }

    /// Exact `sqrt(r)` for a non-negative rational `r`.
    pub fn sqrt(r: &Rational) -> Self {
        assert!(!r.is_negative(), "square root of negative rational {r}");
        if r.is_zero() {
            return Surd::zero();
        }
        // sqrt(a/b) = sqrt(a b) / b
        let (sa, ka) = squarefree_split(r.numer());
        let (sb, kb) = squarefree_split(r.denom());
        let left = Surd::radical(Rational::from_integer(sa), ka);
        let right = Surd::radical(Rational::new(sb, r.denom().clone()), kb);
        left * right
    }

    fn radical(coef: Rational, kernel: BigInt) -> Self {
        let mut s = Surd::zero();
        s.add_term(kernel, coef);
        s
    }

    fn add_term(&mut self, kernel: BigInt, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(kernel).or_insert_with(Rational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Surd::zero();
        }
        Surd {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn rational_part(&self) -> Rational {
        self.terms
            .get(&BigInt::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `Some(q)` when the value is the rational `q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.terms.keys().all(|k| k.is_one()) {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of irrational terms.
    pub fn irrational_terms(&self) -> usize {
        self.terms.keys().filter(|k| !k.is_one()).count()
    }

    /// Rational interval containing the value, each radical bracketed to
    /// `bits` bits.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (k, c) in &self.terms {
            let (rlo, rhi) = sqrt_enclosure(&Rational::from_integer(k.clone()), bits);
            if c.is_negative() {
                lo += c * &rhi;
                hi += c * &rlo;
            } else {
                lo += c * &rlo;
                hi += c * &rhi;
            }
        }
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(96);
        rational_to_f64(&((lo + hi) / Rational::from_integer(2.into())))
    }
}

/// Writes `n = s^2 k` with `k` square-free. Trial division; fine for the
/// radicands this crate produces.
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "square-free split of non-positive {n}");
    if let Some(v) = n.to_u128() {
        let (s, k) = squarefree_split_u128(v);
        return (BigInt::from(s), BigInt::from(k));
    }
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut k = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d <= rest {
        let mut e = 0u32;
        while (&rest % &d).is_zero() {
            rest /= &d;
            e += 1;
        }
        if e > 0 {
            s *= num::pow(d.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                k *= &d;
            }
        }
        d += 1;
    }
    k *= rest;
    (s, k)
}

fn squarefree_split_u128(mut rest: u128) -> (u128, u128) {
    let mut s = 1u128;
    let mut k = 1u128;
    let mut d = 2u128;
    while d * d <= rest {
        let mut e = 0u32;
        while rest % d == 0 {
            rest /= d;
            e += 1;
        }
        if e > 0 {
            s *= d.pow(e / 2);
            if e % 2 == 1 {
                k *= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    (s, k * rest)
}

impl Add for &Surd {
    type Output = Surd;

    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Add for Surd {
    type Output = Surd;

    fn add(self, rhs: Surd) -> Surd {
        &self + &rhs
    }
}

impl Neg for &Surd {
    type Output = Surd;

    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Sub for &Surd {
    type Output = Surd;

    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs)
    }
}

impl Sub for Surd {
    type Output = Surd;

    fn sub(self, rhs: Surd) -> Surd {
        &self - &rhs
    }
}

impl Mul for &Surd {
    type Output = Surd;

    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                // sqrt(k1) sqrt(k2) = g sqrt((k1/g)(k2/g)), g = gcd(k1, k2)
                let g = k1.gcd(k2);
                let kernel = (k1 / &g) * (k2 / &g);
                out.add_term(kernel, c1 * c2 * Rational::from_integer(g));
            }
        }
        out
    }
}

impl Mul for Surd {
    type Output = Surd;

    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl fmt::Display for Surd {
    /// E.g. `1/3 - 1/12*sqrt(6)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let mag = num::abs(c.clone());
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            if k.is_one() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "sqrt({k})")?;
            } else {
                write!(f, "{}*sqrt({k})", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}
