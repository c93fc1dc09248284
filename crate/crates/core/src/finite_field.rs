//! Arithmetic in `F_p` and `F_{p^2}`.
//!
//! A degree-two field is `F_p[t]/(t^2 + c1*t + c0)`. Elements are pairs
//! `(c0, c1)` meaning `c0 + c1*t`, enumerated in lexicographic order.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::quad_ring::{is_rational_prime, mod_pow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteFieldDesc {
    p: u64,
    deg: u8,
    /// `(c0, c1)` of the monic modulus `t^2 + c1*t + c0`; unused for `deg = 1`.
    modulus: (u64, u64),
}

impl FiniteFieldDesc {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_rational_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        Ok(FiniteFieldDesc { p, deg: 1, modulus: (0, 0) })
    }

    pub fn quadratic(p: u64, c0: u64, c1: u64) -> Result<Self> {
        if !is_rational_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        let (c0, c1) = (c0 % p, c1 % p);
        if (0..p).any(|x| (mul_mod(x, x, p) + mul_mod(c1, x, p) + c0).is_multiple_of(p)) {
            return domain(format!("t^2 + {c1}t + {c0} is reducible mod {p}"));
        }
        Ok(FiniteFieldDesc { p, deg: 2, modulus: (c0, c1) })
    }

    /// The field of order `q` (a prime or the square of a prime), using the
    /// lexicographically first irreducible modulus `t^2 + c1*t + c0`
    /// ordered by `(c1, c0)`.
    pub fn for_order(q: u64) -> Result<Self> {
        if is_rational_prime(q) {
            return Self::prime(q);
        }
        let p = (q as f64).sqrt().round() as u64;
        if p * p != q || !is_rational_prime(p) {
            return domain(format!("unsupported field order {q} (need p or p^2)"));
        }
        for c1 in 0..p {
            for c0 in 0..p {
                if let Ok(f) = Self::quadratic(p, c0, c1) {
                    return Ok(f);
                }
            }
        }
        unreachable!("an irreducible quadratic exists for every p")
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u8 {
        self.deg
    }

    pub fn modulus(&self) -> (u64, u64) {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        if self.deg == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn zero(&self) -> FFElem {
        FFElem { c0: 0, c1: 0, field: *self }
    }

    pub fn one(&self) -> FFElem {
        FFElem { c0: 1 % self.p, c1: 0, field: *self }
    }

    pub fn elem(&self, c0: i64, c1: i64) -> FFElem {
        let p = self.p as i64;
        let c1 = if self.deg == 1 { 0 } else { c1.rem_euclid(p) as u64 };
        FFElem { c0: c0.rem_euclid(p) as u64, c1, field: *self }
    }

    /// The generator `t` of a degree-two field.
    pub fn t(&self) -> FFElem {
        assert_eq!(self.deg, 2, "t only exists in degree-two fields");
        FFElem { c0: 0, c1: 1, field: *self }
    }

    pub fn from_index(&self, idx: u64) -> FFElem {
        if self.deg == 1 {
            FFElem { c0: idx, c1: 0, field: *self }
        } else {
            FFElem { c0: idx / self.p, c1: idx % self.p, field: *self }
        }
    }

    /// All elements in `(c0, c1)` lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = FFElem> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// The first element, in enumeration order, of multiplicative order `q - 1`.
    pub fn generator(&self) -> FFElem {
        let n = self.order() - 1;
        let primes: Vec<u64> = crate::quad_ring::factor_u64(n).into_iter().map(|(p, _)| p).collect();
        self.elements()
            .skip(1)
            .find(|x| primes.iter().all(|&r| !x.pow(n / r).is_one()))
            .expect("finite fields have cyclic unit groups")
    }

    pub fn parse(&self, text: &str) -> Result<FFElem> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (a, b) = match s.split_once('+') {
            Some((a, b)) => {
                let b = b
                    .strip_suffix("*t")
                    .or_else(|| b.strip_suffix('t'))
                    .ok_or_else(|| Error::Parse(format!("bad field element {text:?}")))?;
                (a.to_string(), if b.is_empty() { "1".to_string() } else { b.to_string() })
            }
            None => (s.clone(), "0".to_string()),
        };
        let c0: i64 = a.parse().map_err(|_| Error::Parse(format!("bad field element {text:?}")))?;
        let c1: i64 = b.parse().map_err(|_| Error::Parse(format!("bad field element {text:?}")))?;
        if self.deg == 1 && c1 != 0 {
            return Err(Error::Parse(format!("{text:?} is not in a prime field")));
        }
        Ok(self.elem(c0, c1))
    }
}

impl fmt::Display for FiniteFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deg == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}[t]/(t^2+{}t+{})", self.p, self.modulus.1, self.modulus.0)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFElem {
    c0: u64,
    c1: u64,
    field: FiniteFieldDesc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FFOp {
    Add,
    Mul,
    Inv,
    Pow(u64),
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl FFElem {
    pub fn field(&self) -> FiniteFieldDesc {
        self.field
    }

    pub fn coeffs(&self) -> (u64, u64) {
        (self.c0, self.c1)
    }

    pub fn index(&self) -> u64 {
        if self.field.deg == 1 {
            self.c0
        } else {
            self.c0 * self.field.p + self.c1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn is_one(&self) -> bool {
        self.c0 == 1 && self.c1 == 0
    }

    fn check(&self, other: &FFElem) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::Domain(format!("field mismatch: {} vs {}", self.field, other.field)))
        }
    }

    /// Checked dispatcher over the field operations.
    pub fn apply(op: FFOp, a: &FFElem, b: Option<&FFElem>) -> Result<FFElem> {
        let need = || b.ok_or_else(|| Error::Domain("binary operation needs two operands".into()));
        match op {
            FFOp::Add => {
                let b = need()?;
                a.check(b)?;
                Ok(a.add(b))
            }
            FFOp::Mul => {
                let b = need()?;
                a.check(b)?;
                Ok(a.mul(b))
            }
            FFOp::Inv => a.inv(),
            FFOp::Pow(e) => Ok(a.pow(e)),
        }
    }

    pub fn add(&self, o: &FFElem) -> FFElem {
        let p = self.field.p;
        FFElem { c0: (self.c0 + o.c0) % p, c1: (self.c1 + o.c1) % p, field: self.field }
    }

    pub fn neg(&self) -> FFElem {
        let p = self.field.p;
        FFElem { c0: (p - self.c0) % p, c1: (p - self.c1) % p, field: self.field }
    }

    pub fn sub(&self, o: &FFElem) -> FFElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FFElem) -> FFElem {
        let p = self.field.p;
        if self.field.deg == 1 {
            return FFElem { c0: mul_mod(self.c0, o.c0, p), c1: 0, field: self.field };
        }
        let (m0, m1) = self.field.modulus;
        let a0b0 = mul_mod(self.c0, o.c0, p);
        let cross = (mul_mod(self.c0, o.c1, p) + mul_mod(self.c1, o.c0, p)) % p;
        let a1b1 = mul_mod(self.c1, o.c1, p);
        // t^2 = -m1*t - m0
        let c0 = (a0b0 + p - mul_mod(a1b1, m0, p)) % p;
        let c1 = (cross + p - mul_mod(a1b1, m1, p)) % p;
        FFElem { c0, c1, field: self.field }
    }

    pub fn pow(&self, mut e: u64) -> FFElem {
        let mut acc = self.field.one();
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<FFElem> {
        if self.is_zero() {
            return domain("inverse of zero");
        }
        Ok(self.pow(self.field.order() - 2))
    }

    pub fn frobenius(&self) -> FFElem {
        self.pow(self.field.p)
    }

    /// Whether `self` is a nonzero square. Every element is a square in
    /// characteristic two.
    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return domain("square class of zero");
        }
        let q = self.field.order();
        if q.is_multiple_of(2) {
            return Ok(true);
        }
        Ok(self.pow((q - 1) / 2).is_one())
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c1 == 0 {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "{}+{}*t", self.c0, self.c1)
        }
    }
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field)
    }
}

/// Discrete logarithm table with respect to [`FiniteFieldDesc::generator`].
#[derive(Clone, Debug)]
pub struct DiscreteLog {
    generator: FFElem,
    log: Vec<u64>,
}

impl DiscreteLog {
    pub fn new(field: FiniteFieldDesc) -> Self {
        let g = field.generator();
        let q = field.order();
        let mut log = vec![u64::MAX; q as usize];
        let mut cur = field.one();
        for k in 0..q - 1 {
            log[cur.index() as usize] = k;
            cur = cur.mul(&g);
        }
        DiscreteLog { generator: g, log }
    }

    pub fn generator(&self) -> FFElem {
        self.generator
    }

    pub fn log(&self, x: &FFElem) -> Result<u64> {
        if x.is_zero() {
            return domain("logarithm of zero");
        }
        Ok(self.log[x.index() as usize])
    }
}

/// `(a / p)` evaluated in `F_p`, used by callers that only hold integers.
pub fn is_square_mod(a: u64, p: u64) -> bool {
    p == 2 || mod_pow(a % p, (p - 1) / 2, p) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_examples() {
        let f5 = FiniteFieldDesc::prime(5).unwrap();
        assert_eq!(f5.elem(2, 0).inv().unwrap(), f5.elem(3, 0));
        let f9 = FiniteFieldDesc::quadratic(3, 1, 0).unwrap();
        assert_eq!(f9.t().mul(&f9.t()), f9.elem(-1, 0));
        for f in [f5, f9, FiniteFieldDesc::for_order(4).unwrap(), FiniteFieldDesc::for_order(49).unwrap()] {
            for x in f.elements().skip(1) {
                assert!(x.pow(f.order() - 1).is_one());
                assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }
        assert!(f5.zero().inv().is_err());
        assert!(FFElem::apply(FFOp::Add, &f5.one(), Some(&f9.one())).is_err());
        assert_eq!(FFElem::apply(FFOp::Pow(3), &f5.elem(2, 0), None).unwrap(), f5.elem(3, 0));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(FiniteFieldDesc::quadratic(5, 1, 0).is_err()); // t^2 + 1, -1 = 2^2
        assert!(FiniteFieldDesc::for_order(8).is_err());
        assert!(FiniteFieldDesc::for_order(6).is_err());
    }

    #[test]
    fn square_examples() {
        let f5 = FiniteFieldDesc::prime(5).unwrap();
        assert!(f5.elem(4, 0).is_square().unwrap());
        assert!(!f5.elem(2, 0).is_square().unwrap());
        let f4 = FiniteFieldDesc::for_order(4).unwrap();
        for x in f4.elements().skip(1) {
            assert!(x.is_square().unwrap());
        }
        assert!(f5.zero().is_square().is_err());
    }

    #[test]
    fn square_count_and_generator_order() {
        for q in [3u64, 5, 7, 9, 11, 13, 25, 27, 49, 121] {
            let Ok(f) = FiniteFieldDesc::for_order(q) else { continue };
            let squares: std::collections::HashSet<u64> =
                f.elements().skip(1).map(|x| x.mul(&x).index()).collect();
            let flagged = f.elements().skip(1).filter(|x| x.is_square().unwrap()).count();
            assert_eq!(squares.len() as u64, (q - 1) / 2);
            assert_eq!(flagged as u64, (q - 1) / 2);
            let g = f.generator();
            let order = (1..q).find(|&k| g.pow(k).is_one()).unwrap();
            assert_eq!(order, q - 1);
        }
    }

    #[test]
    fn frobenius_is_automorphism() {
        let f = FiniteFieldDesc::for_order(25).unwrap();
        for x in f.elements() {
            for y in f.elements().step_by(3) {
                assert_eq!(x.mul(&y).frobenius(), x.frobenius().mul(&y.frobenius()));
                assert_eq!(x.add(&y).frobenius(), x.add(&y).pow(5));
            }
            assert_eq!(x.frobenius().frobenius(), x);
        }
    }

    #[test]
    fn discrete_log_round_trip() {
        let f = FiniteFieldDesc::for_order(9).unwrap();
        let dl = DiscreteLog::new(f);
        for x in f.elements().skip(1) {
            assert_eq!(dl.generator().pow(dl.log(&x).unwrap()), x);
        }
    }

    #[test]
    fn text_round_trip() {
        let f = FiniteFieldDesc::for_order(49).unwrap();
        for x in f.elements() {
            assert_eq!(f.parse(&x.to_string()).unwrap(), x);
        }
    }
}
