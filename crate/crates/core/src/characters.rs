//! Square classes of `Q(sqrt(-m))` and the characters `chi_S` of finite
//! support.
//!
//! A nonzero `x` factors uniquely as `u * prod p^e` over canonical primes, so
//! its square class is the class of `u` in `U / U^2` together with the set of
//! primes carrying an odd exponent. `U / U^2` has order two in all five rings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad_field::FieldElem;
use crate::quad_ring::{canonical_order, parse_quad, QuadInt, RingDesc};

/// Generator of `U / U^2`: `w` for `m = 1, 3`, and `-1` otherwise.
pub fn unit_generator(ring: RingDesc) -> QuadInt {
    ring.units()[1].clone()
}

/// Class of a unit in `U / U^2`: `true` when it is not a square.
pub fn unit_bit(u: &QuadInt) -> Result<bool> {
    let units = u.ring().units();
    match units.iter().position(|v| v == u) {
        Some(i) => Ok(i % 2 == 1),
        None => domain(format!("{u} is not a unit")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareClass {
    pub unit_bit: bool,
    /// Canonical primes with odd exponent, in canonical order.
    pub primes: Vec<QuadInt>,
}

impl SquareClass {
    pub fn trivial() -> Self {
        SquareClass { unit_bit: false, primes: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        !self.unit_bit && self.primes.is_empty()
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let mut primes: Vec<QuadInt> = self
            .primes
            .iter()
            .filter(|p| !other.primes.contains(p))
            .chain(other.primes.iter().filter(|p| !self.primes.contains(p)))
            .cloned()
            .collect();
        primes.sort_by(canonical_order);
        SquareClass { unit_bit: self.unit_bit ^ other.unit_bit, primes }
    }
}

pub fn square_class(x: &FieldElem) -> Result<SquareClass> {
    let (unit, factors) = x.factor()?;
    Ok(SquareClass {
        unit_bit: unit_bit(&unit)?,
        primes: factors.into_iter().filter(|(_, e)| e % 2 != 0).map(|(p, _)| p).collect(),
    })
}

/// The character `chi_S` twisted by a sign on the generator of `U / U^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    ring: RingDesc,
    support: Vec<QuadInt>,
    unit_sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterClass {
    Trivial,
    UnitNegative,
    SinglePrime(QuadInt),
    MultiPrime(Vec<QuadInt>),
}

impl CharacterClass {
    pub fn name(&self) -> &'static str {
        match self {
            CharacterClass::Trivial => "Trivial",
            CharacterClass::UnitNegative => "UnitNegative",
            CharacterClass::SinglePrime(_) => "SinglePrime",
            CharacterClass::MultiPrime(_) => "MultiPrime",
        }
    }
}

impl Character {
    pub fn new(ring: RingDesc, primes: impl IntoIterator<Item = QuadInt>, unit_sign: i8) -> Result<Self> {
        if unit_sign != 1 && unit_sign != -1 {
            return domain(format!("unit sign must be 1 or -1, got {unit_sign}"));
        }
        let mut support = Vec::new();
        for p in primes {
            if p.ring() != ring {
                return Err(Error::RingMismatch(p.ring().m(), ring.m()));
            }
            support.push(p.canonical_prime()?);
        }
        support.sort_by(canonical_order);
        support.dedup();
        Ok(Character { ring, support, unit_sign })
    }

    pub fn trivial(ring: RingDesc) -> Self {
        Character { ring, support: vec![], unit_sign: 1 }
    }

    /// Parse `"3,2+1*w"`; the empty string gives empty support.
    pub fn parse(ring: RingDesc, spec: &str, unit_sign: i8) -> Result<Self> {
        let primes = spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_quad(ring, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, primes, unit_sign)
    }

    pub fn ring(&self) -> RingDesc {
        self.ring
    }

    pub fn support(&self) -> &[QuadInt] {
        &self.support
    }

    pub fn unit_sign(&self) -> i8 {
        self.unit_sign
    }

    /// `L(x)`, the sum of the valuations of `x` over the support.
    pub fn support_valuation(&self, x: &FieldElem) -> Result<i64> {
        if x.is_zero() {
            return domain("characters are evaluated on nonzero elements");
        }
        if x.ring() != self.ring {
            return Err(Error::RingMismatch(x.ring().m(), self.ring.m()));
        }
        Ok(self
            .support
            .iter()
            .map(|p| x.num().valuation_at(p) as i64 - x.den().valuation_at(p) as i64)
            .sum())
    }

    pub fn eval(&self, x: &FieldElem) -> Result<i8> {
        let parity = self.support_valuation(x)?.rem_euclid(2);
        let mut s = if parity == 0 { 1 } else { -1 };
        if self.unit_sign == -1 && square_class(x)?.unit_bit {
            s = -s;
        }
        Ok(s)
    }

    pub fn eval_class(&self, c: &SquareClass) -> i8 {
        let odd = c.primes.iter().filter(|p| self.support.contains(p)).count() % 2 == 1;
        let mut s = if odd { -1 } else { 1 };
        if self.unit_sign == -1 && c.unit_bit {
            s = -s;
        }
        s
    }

    pub fn at_minus_one(&self) -> i8 {
        let bit = unit_bit(&-self.ring.one()).expect("-1 is a unit");
        if bit {
            self.unit_sign
        } else {
            1
        }
    }

    pub fn classify(&self) -> CharacterClass {
        if self.unit_sign == -1 {
            return CharacterClass::UnitNegative;
        }
        match self.support.len() {
            0 => CharacterClass::Trivial,
            1 => CharacterClass::SinglePrime(self.support[0].clone()),
            _ => CharacterClass::MultiPrime(self.support.clone()),
        }
    }

    pub fn to_spec(&self) -> CharacterSpec {
        CharacterSpec { support: self.support.iter().map(|p| p.to_string()).collect(), unit_sign: self.unit_sign }
    }

    pub fn from_spec(ring: RingDesc, spec: &CharacterSpec) -> Result<Self> {
        let primes = spec.support.iter().map(|s| parse_quad(ring, s)).collect::<Result<Vec<_>>>()?;
        Self::new(ring, primes, spec.unit_sign)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.support.iter().map(|p| p.to_string()).collect();
        write!(f, "chi{{{}}}", s.join(", "))?;
        if self.unit_sign == -1 {
            write!(f, " with unit sign -1")?;
        }
        Ok(())
    }
}

/// Serialized form used in certificates and reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub support: Vec<String>,
    pub unit_sign: i8,
}

/// True when `<a>` acting as `eps` clashes with `chi(a)`, which kills the
/// module after inverting 2.
pub fn sign_clash_vanishes(chi: &Character, a: &FieldElem, eps: i8) -> Result<bool> {
    Ok(chi.eval(a)? == -eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(m: i64) -> RingDesc {
        RingDesc::new(m).unwrap()
    }

    fn fe(m: i64, a: i64, b: i64) -> FieldElem {
        FieldElem::integral(QuadInt::new(ring(m), a, b))
    }

    #[test]
    fn square_class_examples() {
        assert!(square_class(&fe(1, -9, 0)).unwrap().is_trivial());
        let c = square_class(&fe(2, -1, 0)).unwrap();
        assert!(c.unit_bit && c.primes.is_empty());
        let c = square_class(&fe(1, 12, 0)).unwrap();
        assert_eq!(c.primes, vec![QuadInt::new(ring(1), 3, 0)]);
        assert!(!c.unit_bit);
    }

    #[test]
    fn unit_classes() {
        for r in RingDesc::all() {
            let m1 = -r.one();
            assert_eq!(unit_bit(&m1).unwrap(), r.m() != 1, "m={}", r.m());
            if r.m() == 3 {
                // the cube root of unity w - 1 is a square, w itself is -1 times one
                let zeta = r.omega() - r.one();
                assert!(!unit_bit(&zeta).unwrap());
                assert!(unit_bit(&r.omega()).unwrap());
            }
        }
    }

    #[test]
    fn eval_examples() {
        let r = ring(1);
        let chi = Character::parse(r, "3", 1).unwrap();
        assert_eq!(chi.eval(&fe(1, 3, 0)).unwrap(), -1);
        assert_eq!(chi.eval(&fe(1, 2, 0)).unwrap(), 1);
        assert_eq!(chi.eval(&fe(1, 0, 3)).unwrap(), -1);
        assert!(chi.eval(&fe(1, 0, 0)).is_err());
        let neg = Character::new(ring(2), vec![], -1).unwrap();
        assert_eq!(neg.eval(&fe(2, -1, 0)).unwrap(), -1);
        assert_eq!(neg.at_minus_one(), -1);
        assert_eq!(Character::new(r, vec![], -1).unwrap().at_minus_one(), 1);
    }

    #[test]
    fn classification() {
        let r = ring(1);
        assert_eq!(Character::trivial(r).classify(), CharacterClass::Trivial);
        let p = QuadInt::new(r, 2, 1);
        assert_eq!(Character::new(r, vec![p.clone()], 1).unwrap().classify(), CharacterClass::SinglePrime(p.canonical()));
        let c = Character::parse(r, "3,2+1*w", 1).unwrap();
        assert!(matches!(c.classify(), CharacterClass::MultiPrime(ref v) if v.len() == 2));
        assert_eq!(Character::new(r, vec![], -1).unwrap().classify(), CharacterClass::UnitNegative);
        assert!(Character::parse(r, "6", 1).is_err());
        // associates collapse to one prime
        assert_eq!(Character::parse(r, "3,3*w", 1).unwrap().support().len(), 1);
    }

    #[test]
    fn sign_clash() {
        let r = ring(2);
        let pi = fe(2, 0, 1);
        assert!(sign_clash_vanishes(&Character::trivial(r), &pi, -1).unwrap());
        let neg = Character::new(r, vec![], -1).unwrap();
        assert!(sign_clash_vanishes(&neg, &fe(2, -1, 0), 1).unwrap());
        assert!(!sign_clash_vanishes(&Character::trivial(r), &fe(2, 5, 0), 1).unwrap());
    }

    fn arb_elem() -> impl Strategy<Value = (i64, i64, i64, i64, i64)> {
        (prop::sample::select(vec![1i64, 2, 3, 7, 11]), -12i64..12, -12i64..12, -12i64..12, -12i64..12)
            .prop_filter("nonzero", |&(_, a, b, c, d)| (a, b) != (0, 0) && (c, d) != (0, 0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn multiplicative((m, a, b, c, d) in arb_elem(), (e, f) in (-12i64..12, -12i64..12), sign in prop::sample::select(vec![1i8, -1])) {
            prop_assume!((e, f) != (0, 0));
            let r = ring(m);
            let x = FieldElem::new(QuadInt::new(r, a, b), QuadInt::new(r, c, d)).unwrap();
            let y = fe(m, e, f);
            let chi = Character::new(r, r.primes_up_to(30).into_iter().step_by(2), sign).unwrap();
            prop_assert_eq!(chi.eval(&x.mul(&y)).unwrap(), chi.eval(&x).unwrap() * chi.eval(&y).unwrap());
            prop_assert_eq!(chi.eval(&x.mul(&x)).unwrap(), 1);
            let (sx, sy) = (square_class(&x).unwrap(), square_class(&y).unwrap());
            prop_assert_eq!(sx.mul(&sy), square_class(&x.mul(&y)).unwrap());
            prop_assert!(square_class(&x.mul(&x)).unwrap().is_trivial());
            prop_assert_eq!(chi.eval_class(&sx), chi.eval(&x).unwrap());
        }
    }
}
