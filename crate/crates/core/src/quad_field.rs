//! Fractions over `Z[w_m]`, discrete valuations at finite primes, residue
//! fields and reduction.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::finite_field::{FFElem, FiniteFieldDesc};
use crate::quad_ring::{gcd, parse_quad, PrimeKind, QuadInt, RingDesc};

/// `num / den`, reduced, with `den` in canonical position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    num: QuadInt,
    den: QuadInt,
}

impl FieldElem {
    pub fn new(num: QuadInt, den: QuadInt) -> Result<Self> {
        if num.ring() != den.ring() {
            return Err(Error::RingMismatch(num.ring().m(), den.ring().m()));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            let ring = num.ring();
            return Ok(FieldElem { num, den: ring.one() });
        }
        let g = gcd(&num, &den)?;
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let (u, den) = den.canonical_associate();
        Ok(FieldElem { num: &u * &num, den })
    }

    pub fn integral(x: QuadInt) -> Self {
        let ring = x.ring();
        FieldElem { num: x, den: ring.one() }
    }

    pub fn from_i64(ring: RingDesc, n: i64) -> Self {
        Self::integral(ring.int(n))
    }

    pub fn ring(&self) -> RingDesc {
        self.num.ring()
    }

    pub fn num(&self) -> &QuadInt {
        &self.num
    }

    pub fn den(&self) -> &QuadInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_integral(&self) -> Option<&QuadInt> {
        self.is_integral().then_some(&self.num)
    }

    pub fn add(&self, o: &FieldElem) -> FieldElem {
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        Self::new(num, &self.den * &o.den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &FieldElem) -> FieldElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FieldElem) -> FieldElem {
        Self::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero denominators")
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&o.inv()?))
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> FieldElem {
        FieldElem::from_i64(self.ring(), 1).sub(self)
    }

    /// Norm as a reduced pair `(N(num), N(den))`.
    pub fn norm(&self) -> (BigInt, BigInt) {
        (self.num.norm(), self.den.norm())
    }

    /// Prime support with exponents, sorted canonically.
    pub fn factor(&self) -> Result<(QuadInt, Vec<(QuadInt, i64)>)> {
        if self.is_zero() {
            return domain("cannot factor zero");
        }
        let fnum = self.num.factor()?;
        let fden = self.den.factor()?;
        let unit = fnum.unit.div_exact(&fden.unit).expect("units divide");
        let mut out: Vec<(QuadInt, i64)> = fnum.factors.into_iter().map(|(p, e)| (p, e as i64)).collect();
        out.extend(fden.factors.into_iter().map(|(p, e)| (p, -(e as i64))));
        out.sort_by(|a, b| crate::quad_ring::canonical_order(&a.0, &b.0));
        Ok((unit, out))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (m={})", self.ring().m())
    }
}

pub fn parse_field_elem(ring: RingDesc, text: &str) -> Result<FieldElem> {
    match text.split_once('/') {
        Some((a, b)) => FieldElem::new(parse_quad(ring, a)?, parse_quad(ring, b)?),
        None => Ok(FieldElem::integral(parse_quad(ring, text)?)),
    }
}

/// A point of the projective line over `F`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProjPoint {
    Finite(FieldElem),
    Infinity,
}

impl ProjPoint {
    pub fn finite(&self) -> Option<&FieldElem> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }

    /// `1/x`, exchanging `0` and infinity.
    pub fn invert(&self, ring: RingDesc) -> ProjPoint {
        match self {
            ProjPoint::Infinity => ProjPoint::Finite(FieldElem::from_i64(ring, 0)),
            ProjPoint::Finite(x) if x.is_zero() => ProjPoint::Infinity,
            ProjPoint::Finite(x) => ProjPoint::Finite(x.inv().expect("nonzero")),
        }
    }

    pub fn parse(ring: RingDesc, text: &str) -> Result<ProjPoint> {
        let t = text.trim();
        if matches!(t, "inf" | "oo" | "infinity" | "∞") {
            Ok(ProjPoint::Infinity)
        } else {
            Ok(ProjPoint::Finite(parse_field_elem(ring, t)?))
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{x}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// The valuation attached to a canonical prime `pi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Valuation {
    prime: QuadInt,
    residue_char: u64,
    residue_deg: u8,
}

impl Valuation {
    pub fn new(pi: &QuadInt) -> Result<Self> {
        let prime = pi.canonical_prime()?;
        let n = prime.norm().to_u64().ok_or_else(|| Error::Capacity(format!("norm of {pi} too large")))?;
        let kind = pi.is_prime()?.kind;
        let (residue_char, residue_deg) = if kind == Some(PrimeKind::Inert) {
            (prime.re().to_u64().expect("inert prime is a positive integer"), 2)
        } else {
            (n, 1)
        };
        Ok(Valuation { prime, residue_char, residue_deg })
    }

    /// The valuations lying over the rational prime `p`.
    pub fn above(ring: RingDesc, p: u64) -> Result<Vec<Valuation>> {
        let pi = ring.prime_above(p)?;
        let mut out = vec![Valuation::new(&pi)?];
        if ring.rational_prime_kind(p)? == PrimeKind::Split {
            out.push(Valuation::new(&pi.conj())?);
        }
        Ok(out)
    }

    pub fn prime(&self) -> &QuadInt {
        &self.prime
    }

    pub fn ring(&self) -> RingDesc {
        self.prime.ring()
    }

    pub fn residue_char(&self) -> u64 {
        self.residue_char
    }

    pub fn residue_deg(&self) -> u8 {
        self.residue_deg
    }

    pub fn residue_size(&self) -> u64 {
        self.residue_char.pow(self.residue_deg as u32)
    }

    pub fn valuation_of(&self, x: &FieldElem) -> Result<i64> {
        if x.ring() != self.ring() {
            return Err(Error::RingMismatch(x.ring().m(), self.ring().m()));
        }
        if x.is_zero() {
            return domain("valuation of zero");
        }
        Ok(x.num.valuation_at(&self.prime) as i64 - x.den.valuation_at(&self.prime) as i64)
    }

    /// `F_p`, or `F_p[t]` modulo the minimal polynomial of `w` for inert `p`.
    pub fn residue_field(&self) -> FiniteFieldDesc {
        let ring = self.ring();
        let p = self.residue_char;
        if self.residue_deg == 1 {
            return FiniteFieldDesc::prime(p).expect("residue characteristic is prime");
        }
        let t = ring.omega_trace().rem_euclid(p as i64) as u64;
        let n = ring.omega_norm().rem_euclid(p as i64) as u64;
        FiniteFieldDesc::quadratic(p, n, (p - t) % p).expect("w has irreducible minimal polynomial at inert p")
    }

    /// Image of `w` in the residue field.
    pub fn omega_image(&self) -> FFElem {
        let k = self.residue_field();
        if self.residue_deg == 2 {
            return k.t();
        }
        let ring = self.ring();
        let c = (0..self.residue_char)
            .find(|&c| self.prime.divides(&(ring.omega() - ring.int(c))))
            .expect("w is congruent to an integer modulo a degree-one prime");
        k.elem(c as i64, 0)
    }

    fn reduce_integral(&self, a: &QuadInt, w: &FFElem) -> FFElem {
        let k = w.field();
        let p = BigInt::from(self.residue_char);
        let re = (a.re() % &p + &p) % &p;
        let im = (a.im() % &p + &p) % &p;
        let re = k.elem(re.to_i64().expect("reduced mod p"), 0);
        let im = k.elem(im.to_i64().expect("reduced mod p"), 0);
        re.add(&im.mul(w))
    }

    pub fn reduce_mod(&self, x: &FieldElem) -> Result<FFElem> {
        let v = self.valuation_of(x)?;
        if v != 0 {
            return domain(format!("{x} has valuation {v} at {}", self.prime));
        }
        let w = self.omega_image();
        let n = self.reduce_integral(&x.num, &w);
        let d = self.reduce_integral(&x.den, &w);
        Ok(n.mul(&d.inv()?))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prime)
    }
}

/// `log N(x) = sum v_pi(x) log N(pi)`, checked exactly as a product of norms.
pub fn norm_matches_factorization(x: &FieldElem) -> Result<bool> {
    let (_, fs) = x.factor()?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (pi, e) in fs {
        let n = pi.norm().pow(e.unsigned_abs() as u32);
        if e > 0 {
            num *= n;
        } else {
            den *= n;
        }
    }
    let (xn, xd) = x.norm();
    Ok(!xn.is_zero() && xn.is_positive() && &xn * &den == &num * &xd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(m: i64, a: i64, b: i64) -> QuadInt {
        QuadInt::new(RingDesc::new(m).unwrap(), a, b)
    }

    fn fe(m: i64, a: i64, b: i64, c: i64, d: i64) -> FieldElem {
        FieldElem::new(q(m, a, b), q(m, c, d)).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let v = Valuation::new(&q(1, 1, 1)).unwrap();
        assert_eq!(v.valuation_of(&fe(1, 2, 0, 1, 0)).unwrap(), 2);
        assert_eq!(v.valuation_of(&fe(1, 1, 0, 1, 0)).unwrap(), 0);
        let v3 = Valuation::new(&q(1, 3, 0)).unwrap();
        assert_eq!(v3.valuation_of(&fe(1, 1, 0, 3, 0)).unwrap(), -1);
        assert!(v3.valuation_of(&fe(1, 0, 0, 1, 0)).is_err());
        assert!(Valuation::new(&q(1, 5, 0)).is_err());
    }

    #[test]
    fn residue_field_examples() {
        let k = Valuation::new(&q(1, 3, 0)).unwrap().residue_field();
        assert_eq!((k.characteristic(), k.degree(), k.modulus()), (3, 2, (1, 0)));
        let v5 = Valuation::new(&q(1, 2, 1)).unwrap();
        assert_eq!(v5.residue_field().order(), 5);
        assert_eq!(Valuation::new(&q(2, 0, 1)).unwrap().residue_field().order(), 2);
        for m in [3, 11] {
            let k = Valuation::new(&q(m, 2, 0)).unwrap().residue_field();
            assert_eq!((k.order(), k.modulus()), (4, (1, 1)));
        }
    }

    #[test]
    fn reduce_examples() {
        let v5 = Valuation::new(&q(1, 2, 1)).unwrap();
        let w = v5.reduce_mod(&fe(1, 0, 1, 1, 0)).unwrap();
        let k = v5.residue_field();
        assert_eq!(w, k.elem(-2, 0));
        assert_eq!(w.mul(&w), k.elem(-1, 0));
        assert!(v5.reduce_mod(&fe(1, 1, 0, 1, 0)).unwrap().is_one());
        let v3 = Valuation::new(&q(1, 3, 0)).unwrap();
        let t = v3.reduce_mod(&fe(1, 0, 1, 1, 0)).unwrap();
        assert_eq!(t, v3.residue_field().t());
        assert_eq!(t.mul(&t), v3.residue_field().elem(-1, 0));
        assert!(v3.reduce_mod(&fe(1, 3, 0, 1, 0)).is_err());
    }

    #[test]
    fn omega_image_is_root_of_minimal_polynomial() {
        for ring in RingDesc::all() {
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
                for v in Valuation::above(ring, p).unwrap() {
                    let w = v.omega_image();
                    let k = w.field();
                    let poly = w
                        .mul(&w)
                        .sub(&w.mul(&k.elem(ring.omega_trace(), 0)))
                        .add(&k.elem(ring.omega_norm(), 0));
                    assert!(poly.is_zero(), "m={} p={p}", ring.m());
                    assert_eq!(v.residue_size(), k.order());
                }
            }
        }
    }

    #[test]
    fn normalization() {
        let x = fe(1, 2, 0, 4, 0);
        assert_eq!(x, fe(1, 1, 0, 2, 0));
        let y = fe(1, 1, 0, 0, 1);
        assert!(y.den().is_one());
        assert_eq!(y.num(), &q(1, 0, -1));
        assert!(FieldElem::new(q(1, 1, 0), q(1, 0, 0)).is_err());
        assert_eq!(parse_field_elem(RingDesc::new(7).unwrap(), "1+w/2").unwrap(), fe(7, 1, 1, 2, 0));
        let z = fe(7, 3, 1, 2, 0);
        assert_eq!(parse_field_elem(RingDesc::new(7).unwrap(), &z.to_string()).unwrap(), z);
    }

    fn arb_elem(m: i64) -> impl Strategy<Value = FieldElem> {
        (-30i64..30, -30i64..30, -30i64..30, -30i64..30)
            .prop_filter("nonzero", |(a, b, c, d)| (*a, *b) != (0, 0) && (*c, *d) != (0, 0))
            .prop_map(move |(a, b, c, d)| fe(m, a, b, c, d))
    }

    fn arb_ring() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![1i64, 2, 3, 7, 11])
    }

    fn arb_valuation(m: i64) -> impl Strategy<Value = Valuation> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]).prop_flat_map(move |p| {
            let vs = Valuation::above(RingDesc::new(m).unwrap(), p).unwrap();
            prop::sample::select(vs)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn valuation_is_additive(
            (x, y, v) in arb_ring().prop_flat_map(|m| (arb_elem(m), arb_elem(m), arb_valuation(m)))
        ) {
            prop_assert_eq!(
                v.valuation_of(&x.mul(&y)).unwrap(),
                v.valuation_of(&x).unwrap() + v.valuation_of(&y).unwrap()
            );
        }

        #[test]
        fn reduction_is_a_homomorphism(
            (x, y, v) in arb_ring().prop_flat_map(|m| (arb_elem(m), arb_elem(m), arb_valuation(m)))
        ) {
            let vx = v.valuation_of(&x).unwrap();
            let vy = v.valuation_of(&y).unwrap();
            prop_assume!(vx == 0 && vy == 0);
            let rx = v.reduce_mod(&x).unwrap();
            let ry = v.reduce_mod(&y).unwrap();
            prop_assert_eq!(v.reduce_mod(&x.mul(&y)).unwrap(), rx.mul(&ry));
            let s = x.add(&y);
            if !s.is_zero() && v.valuation_of(&s).unwrap() == 0 {
                prop_assert_eq!(v.reduce_mod(&s).unwrap(), rx.add(&ry));
            }
        }

        #[test]
        fn norm_is_product_over_primes(x in arb_ring().prop_flat_map(arb_elem)) {
            prop_assert!(norm_matches_factorization(&x).unwrap());
        }
    }
}
