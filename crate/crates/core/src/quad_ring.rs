//! Arithmetic in the rings of integers `Z[w]` of the imaginary quadratic
//! fields `Q(sqrt(-m))`, `m` in {1, 2, 3, 7, 11}.
//!
//! Elements are written `a + b*w` with `w = sqrt(-m)` when `-m = 2, 3 (mod 4)`
//! and `w = (1 + sqrt(-m))/2` when `-m = 1 (mod 4)`. All five rings are
//! norm-Euclidean and have class number one, so factorization into canonical
//! primes is unique up to a unit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Default bound on the rational norm accepted by [`QuadInt::factor`].
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// Descriptor of one of the five rings `Z[w_m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingDesc {
    m: i64,
}

impl RingDesc {
    pub const SUPPORTED: [i64; 5] = [1, 2, 3, 7, 11];

    pub fn new(m: i64) -> Result<Self> {
        if Self::SUPPORTED.contains(&m) {
            Ok(RingDesc { m })
        } else {
            Err(Error::UnsupportedRing(m))
        }
    }

    pub fn all() -> impl Iterator<Item = RingDesc> {
        Self::SUPPORTED.iter().map(|&m| RingDesc { m })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// `-m mod 4`, which selects the shape of `w`.
    pub fn residue_class(&self) -> i64 {
        (-self.m).rem_euclid(4)
    }

    /// True when `w = (1 + sqrt(-m))/2`.
    pub fn half_integral(&self) -> bool {
        self.residue_class() == 1
    }

    pub fn discriminant(&self) -> i64 {
        if self.half_integral() {
            -self.m
        } else {
            -4 * self.m
        }
    }

    /// Trace of `w`; `w^2 = trace * w - norm`.
    pub fn omega_trace(&self) -> i64 {
        if self.half_integral() {
            1
        } else {
            0
        }
    }

    pub fn omega_norm(&self) -> i64 {
        if self.half_integral() {
            (1 + self.m) / 4
        } else {
            self.m
        }
    }

    pub fn omega(&self) -> QuadInt {
        QuadInt::new(*self, 0, 1)
    }

    pub fn one(&self) -> QuadInt {
        QuadInt::new(*self, 1, 0)
    }

    pub fn zero(&self) -> QuadInt {
        QuadInt::new(*self, 0, 0)
    }

    pub fn int(&self, n: impl Into<BigInt>) -> QuadInt {
        QuadInt::new(*self, n, 0)
    }

    /// The unit group, listed as powers of a generator.
    pub fn units(&self) -> Vec<QuadInt> {
        let (gen, order) = match self.m {
            1 => (self.omega(), 4),
            3 => (self.omega(), 6),
            _ => (-self.one(), 2),
        };
        let mut out = Vec::with_capacity(order);
        let mut cur = self.one();
        for _ in 0..order {
            out.push(cur.clone());
            cur = &cur * &gen;
        }
        out
    }

    /// Behaviour of a rational prime `p` in this ring.
    pub fn rational_prime_kind(&self, p: u64) -> Result<PrimeKind> {
        if !is_rational_prime(p) {
            return domain(format!("{p} is not a rational prime"));
        }
        let delta = self.discriminant();
        if delta.rem_euclid(p as i64) == 0 {
            return Ok(PrimeKind::Ramified);
        }
        if p == 2 {
            return Ok(if delta.rem_euclid(8) == 5 {
                PrimeKind::Inert
            } else {
                PrimeKind::Split
            });
        }
        Ok(if legendre(delta, p) == -1 {
            PrimeKind::Inert
        } else {
            PrimeKind::Split
        })
    }

    /// A root of the minimal polynomial of `w` modulo `p`, found by scanning.
    pub fn omega_root_mod(&self, p: u64) -> Option<u64> {
        let t = self.omega_trace() as i128;
        let n = self.omega_norm() as i128;
        let p128 = p as i128;
        (0..p).find(|&c| {
            let c = c as i128;
            (c * c - t * c + n).rem_euclid(p128) == 0
        })
    }

    /// The canonical prime of norm `p` lying above a split or ramified `p`.
    pub fn prime_above(&self, p: u64) -> Result<QuadInt> {
        match self.rational_prime_kind(p)? {
            PrimeKind::Inert => Ok(self.int(p)),
            _ => {
                let c = self
                    .omega_root_mod(p)
                    .ok_or_else(|| Error::Domain(format!("no root of the w polynomial mod {p}")))?;
                let g = gcd(&self.int(p), &(self.omega() - self.int(c)))?;
                debug_assert_eq!(g.norm(), BigInt::from(p));
                Ok(g)
            }
        }
    }

    /// All canonical primes with norm at most `bound`, in canonical order.
    pub fn primes_up_to(&self, bound: u64) -> Vec<QuadInt> {
        let mut out = Vec::new();
        for p in 2..=bound {
            if !is_rational_prime(p) {
                continue;
            }
            match self.rational_prime_kind(p).expect("p is prime") {
                PrimeKind::Inert => {
                    if p * p <= bound {
                        out.push(self.int(p));
                    }
                }
                PrimeKind::Ramified => out.push(self.prime_above(p).expect("ramified prime")),
                PrimeKind::Split => {
                    let a = self.prime_above(p).expect("split prime");
                    let b = a.conj().canonical_associate().1;
                    out.push(a);
                    out.push(b);
                }
                PrimeKind::NormPrime => unreachable!(),
            }
        }
        out.sort_by(canonical_order);
        out
    }
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[w_{}]", self.m)
    }
}

/// Classification of primes. `Split`, `Inert` and `Ramified` describe a
/// rational prime; `NormPrime` marks an element whose norm is a rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
    NormPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Primality {
    pub is_prime: bool,
    /// Which criterion decided the answer, when one applies.
    pub kind: Option<PrimeKind>,
}

/// Congruence convention for the lemma on `R(alpha)` and `N(alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CongruenceConvention {
    /// The stated congruence `m = 1, 2 (mod 4)` applies to `m` itself.
    OnM,
    /// The congruence applies to the radicand `-m`.
    OnMinusM,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Conj,
}

/// An element `re + im * w` of `Z[w_m]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    re: BigInt,
    im: BigInt,
    ring: RingDesc,
}

impl QuadInt {
    pub fn new(ring: RingDesc, re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        QuadInt {
            re: re.into(),
            im: im.into(),
            ring,
        }
    }

    /// `R(alpha)`.
    pub fn re(&self) -> &BigInt {
        &self.re
    }

    /// `I(alpha)`.
    pub fn im(&self) -> &BigInt {
        &self.im
    }

    pub fn ring(&self) -> RingDesc {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    fn check_ring(&self, other: &QuadInt) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.ring.m, other.ring.m))
        }
    }

    pub fn conj(&self) -> QuadInt {
        let t = BigInt::from(self.ring.omega_trace());
        QuadInt::new(self.ring, &self.re + &self.im * t, -&self.im)
    }

    /// `a^2 + t*a*b + n*b^2`, where `t`, `n` are the trace and norm of `w`.
    pub fn norm(&self) -> BigInt {
        let t = BigInt::from(self.ring.omega_trace());
        let n = BigInt::from(self.ring.omega_norm());
        &self.re * &self.re + t * &self.re * &self.im + n * &self.im * &self.im
    }

    pub fn trace(&self) -> BigInt {
        BigInt::from(2) * &self.re + BigInt::from(self.ring.omega_trace()) * &self.im
    }

    /// Checked arithmetic entry point; `b` is required for binary operations.
    pub fn arith(op: ArithOp, a: &QuadInt, b: Option<&QuadInt>) -> Result<QuadInt> {
        let need_b = || b.ok_or_else(|| Error::Domain("binary operation needs two operands".into()));
        match op {
            ArithOp::Neg => Ok(-a),
            ArithOp::Conj => Ok(a.conj()),
            ArithOp::Add => {
                let b = need_b()?;
                a.check_ring(b)?;
                Ok(a + b)
            }
            ArithOp::Sub => {
                let b = need_b()?;
                a.check_ring(b)?;
                Ok(a - b)
            }
            ArithOp::Mul => {
                let b = need_b()?;
                a.check_ring(b)?;
                Ok(a * b)
            }
        }
    }

    pub fn pow(&self, e: u32) -> QuadInt {
        let mut out = self.ring.one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> QuadInt {
        QuadInt::new(self.ring, &self.re * k, &self.im * k)
    }

    /// Exact quotient `self / d` when it lies in the ring.
    pub fn div_exact(&self, d: &QuadInt) -> Option<QuadInt> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm();
        let p = self * &d.conj();
        if p.re.is_multiple_of(&n) && p.im.is_multiple_of(&n) {
            Some(QuadInt::new(self.ring, &p.re / &n, &p.im / &n))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &QuadInt) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_exact(self).is_some()
    }

    /// Euclidean division `self = q*b + r` with `N(r) < N(b)`.
    ///
    /// The exact quotient is rounded coordinate-wise to the nearest integer
    /// (ties toward negative infinity); if that candidate fails, the four
    /// floor/ceil combinations are tried in order.
    pub fn euclid_div(&self, b: &QuadInt) -> Result<(QuadInt, QuadInt)> {
        self.check_ring(b)?;
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = b.norm();
        let p = self * &b.conj();
        let two = BigInt::from(2);
        let round = |x: &BigInt| -> BigInt {
            // ceil((2x - n) / 2n)
            let num = &two * x - &n;
            -((-num).div_floor(&(&two * &n)))
        };
        let (rx, ry) = (round(&p.re), round(&p.im));
        let (fx, fy) = (p.re.div_floor(&n), p.im.div_floor(&n));
        let (cx, cy) = (-((-&p.re).div_floor(&n)), -((-&p.im).div_floor(&n)));
        let candidates = [
            (rx, ry),
            (fx.clone(), fy.clone()),
            (fx, cy.clone()),
            (cx.clone(), fy),
            (cx, cy),
        ];
        for (qx, qy) in candidates {
            let q = QuadInt::new(self.ring, qx, qy);
            let r = self - &(&q * b);
            if r.norm() < n {
                return Ok((q, r));
            }
        }
        Err(Error::Domain(format!(
            "no Euclidean remainder found for {self} / {b}"
        )))
    }

    /// The associate in canonical position, together with the unit `u`
    /// such that `u * self` equals it.
    ///
    /// Rings with more than two units pick the associate with `re > 0` and
    /// `im >= 0`; the others pick `im > 0`, or `im = 0` with `re > 0`.
    pub fn canonical_associate(&self) -> (QuadInt, QuadInt) {
        if self.is_zero() {
            return (self.ring.one(), self.clone());
        }
        let units = self.ring.units();
        let wide = units.len() > 2;
        for u in units {
            let c = &u * self;
            let ok = if wide {
                c.re.is_positive() && !c.im.is_negative()
            } else {
                c.im.is_positive() || (c.im.is_zero() && c.re.is_positive())
            };
            if ok {
                return (u, c);
            }
        }
        unreachable!("every nonzero element has a canonical associate")
    }

    pub fn canonical(&self) -> QuadInt {
        self.canonical_associate().1
    }

    pub fn is_associate(&self, other: &QuadInt) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn is_prime(&self) -> Result<Primality> {
        if self.is_zero() {
            return domain("zero is neither prime nor composite");
        }
        let n = self.norm();
        if n.is_one() {
            return domain(format!("{self} is a unit"));
        }
        if let Some(np) = n.to_u64() {
            if is_rational_prime(np) {
                return Ok(Primality {
                    is_prime: true,
                    kind: Some(PrimeKind::NormPrime),
                });
            }
        }
        let c = self.canonical();
        if c.is_rational() {
            if let Some(p) = c.re.to_u64() {
                if is_rational_prime(p) {
                    let kind = self.ring.rational_prime_kind(p)?;
                    return Ok(Primality {
                        is_prime: kind == PrimeKind::Inert,
                        kind: Some(kind),
                    });
                }
            }
        }
        Ok(Primality {
            is_prime: false,
            kind: None,
        })
    }

    pub fn canonical_prime(&self) -> Result<QuadInt> {
        let prime = self.is_prime().map(|p| p.is_prime).unwrap_or(false);
        if !prime {
            return domain(format!("{self} is not prime"));
        }
        Ok(self.canonical())
    }

    /// Multiplicity of the prime `pi` in `self` (nonzero).
    pub fn valuation_at(&self, pi: &QuadInt) -> u32 {
        debug_assert!(!self.is_zero());
        let mut cur = self.clone();
        let mut e = 0;
        while let Some(q) = cur.div_exact(pi) {
            cur = q;
            e += 1;
        }
        e
    }

    pub fn factor(&self) -> Result<Factorization> {
        self.factor_with_bound(DEFAULT_FACTOR_BOUND)
    }

    /// Factor into a unit times canonical prime powers, sorted canonically.
    pub fn factor_with_bound(&self, bound: u64) -> Result<Factorization> {
        if self.is_zero() {
            return domain("cannot factor zero");
        }
        let n = self.norm();
        let nu = n
            .to_u64()
            .filter(|&v| v <= bound)
            .ok_or_else(|| Error::Capacity(format!("norm {n} exceeds factor bound {bound}")))?;
        let mut rest = self.clone();
        let mut factors = Vec::new();
        for (p, _) in factor_u64(nu) {
            let pi = self.ring.prime_above(p)?;
            let mut primes = vec![pi.clone()];
            if self.ring.rational_prime_kind(p)? == PrimeKind::Split {
                primes.push(pi.conj().canonical());
            }
            for pi in primes {
                let mut e = 0;
                while let Some(q) = rest.div_exact(&pi) {
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    factors.push((pi, e));
                }
            }
        }
        debug_assert!(rest.is_unit());
        factors.sort_by(|a, b| canonical_order(&a.0, &b.0));
        Ok(Factorization {
            unit: rest,
            factors,
        })
    }

    /// Check the lemma "if `p | R(alpha)` or `p | m` then `m = p` and
    /// `alpha ~ sqrt(-p)`" on one prime element of prime norm `p`.
    pub fn check_r_alpha_lemma(&self, convention: CongruenceConvention) -> Result<bool> {
        let m = self.ring.m;
        let applies = match convention {
            CongruenceConvention::OnM => matches!(m.rem_euclid(4), 1 | 2),
            CongruenceConvention::OnMinusM => matches!((-m).rem_euclid(4), 1 | 2),
        };
        if !applies {
            return domain(format!("m = {m} is outside the lemma's congruence class"));
        }
        let p = match self.norm().to_u64() {
            Some(p) if is_rational_prime(p) => p,
            _ => return domain(format!("N({self}) is not a rational prime")),
        };
        let p_big = BigInt::from(p);
        let antecedent = self.re.is_multiple_of(&p_big) || m.rem_euclid(p as i64) == 0;
        if !antecedent {
            return Ok(true);
        }
        Ok(m as u64 == p && self.is_associate(&self.ring.omega()))
    }
}

/// Total order on canonical primes: by norm, then `im`, then `re`.
pub fn canonical_order(a: &QuadInt, b: &QuadInt) -> Ordering {
    a.norm()
        .cmp(&b.norm())
        .then_with(|| a.im.cmp(&b.im))
        .then_with(|| a.re.cmp(&b.re))
}

/// `gcd(a, b)` in canonical associate form.
pub fn gcd(a: &QuadInt, b: &QuadInt) -> Result<QuadInt> {
    a.check_ring(b)?;
    if a.is_zero() && b.is_zero() {
        return domain("gcd(0, 0) is undefined");
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let (_, r) = x.euclid_div(&y)?;
        x = y;
        y = r;
    }
    Ok(x.canonical())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: QuadInt,
    pub factors: Vec<(QuadInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> QuadInt {
        self.factors
            .iter()
            .fold(self.unit.clone(), |acc, (p, e)| &acc * &p.pow(*e))
    }
}

pub fn is_rational_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Trial-division factorization of a positive integer.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut b = base as u128 % m;
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

/// Legendre symbol `(a / p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

impl Add for &QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: &QuadInt) -> QuadInt {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        QuadInt::new(self.ring, &self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: &QuadInt) -> QuadInt {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        QuadInt::new(self.ring, &self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: &QuadInt) -> QuadInt {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        let t = BigInt::from(self.ring.omega_trace());
        let n = BigInt::from(self.ring.omega_norm());
        let bd = &self.im * &rhs.im;
        let re = &self.re * &rhs.re - &n * &bd;
        let im = &self.re * &rhs.im + &self.im * &rhs.re + t * bd;
        QuadInt::new(self.ring, re, im)
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new(self.ring, -&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for QuadInt {
            type Output = QuadInt;
            fn $f(self, rhs: QuadInt) -> QuadInt {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}*w", self.re, -&self.im)
        } else {
            write!(f, "{}+{}*w", self.re, self.im)
        }
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (m={})", self, self.ring.m)
    }
}

/// Parse `a+b*w` style text. Terms may appear in any order; `w`, `-w`,
/// `3*w`, `w*3` and bare integers are accepted.
pub fn parse_quad(ring: RingDesc, text: &str) -> Result<QuadInt> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    let bytes: Vec<char> = s.chars().collect();
    let mut start = 0;
    let mut i = 1;
    let mut terms = Vec::new();
    while i <= bytes.len() {
        let boundary = i == bytes.len()
            || ((bytes[i] == '+' || bytes[i] == '-') && bytes[i - 1] != '+' && bytes[i - 1] != '-' && bytes[i - 1] != '*');
        if boundary {
            terms.push(bytes[start..i].iter().collect::<String>());
            start = i;
        }
        i += 1;
    }
    for term in terms {
        let mut t = term.as_str();
        let mut sign = BigInt::one();
        loop {
            if let Some(rest) = t.strip_prefix('+') {
                t = rest;
            } else if let Some(rest) = t.strip_prefix('-') {
                t = rest;
                sign = -sign;
            } else {
                break;
            }
        }
        if t.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {text:?}")));
        }
        let factors: Vec<&str> = t.split('*').collect();
        let mut coeff = sign;
        let mut has_w = false;
        for f in factors {
            if f == "w" {
                if has_w {
                    return Err(Error::Parse(format!("w^2 term in {text:?}")));
                }
                has_w = true;
            } else {
                let (neg, digits) = match f.strip_prefix('-') {
                    Some(d) => (true, d),
                    None => (false, f),
                };
                let v = BigInt::from_str(digits)
                    .map_err(|_| Error::Parse(format!("bad integer {f:?} in {text:?}")))?;
                coeff *= if neg { -v } else { v };
            }
        }
        if has_w {
            im += coeff;
        } else {
            re += coeff;
        }
    }
    Ok(QuadInt::new(ring, re, im))
}

#[derive(Serialize, Deserialize)]
struct QuadIntJson {
    re: String,
    im: String,
    m: i64,
}

impl Serialize for QuadInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadIntJson {
            re: self.re.to_string(),
            im: self.im.to_string(),
            m: self.ring.m,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = QuadIntJson::deserialize(d)?;
        let ring = RingDesc::new(j.m).map_err(D::Error::custom)?;
        let re = BigInt::from_str(&j.re).map_err(D::Error::custom)?;
        let im = BigInt::from_str(&j.im).map_err(D::Error::custom)?;
        Ok(QuadInt::new(ring, re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: i64) -> RingDesc {
        RingDesc::new(m).unwrap()
    }

    fn q(m: i64, a: i64, b: i64) -> QuadInt {
        QuadInt::new(ring(m), a, b)
    }

    #[test]
    fn descriptor_invariants() {
        for r in RingDesc::all() {
            let m = r.m();
            let expected = if (-m).rem_euclid(4) == 1 { -m } else { -4 * m };
            assert_eq!(r.discriminant(), expected);
            assert_eq!(r.omega().norm(), BigInt::from(r.omega_norm()));
        }
        assert_eq!(ring(7).omega_norm(), 2);
        assert_eq!(ring(11).omega_norm(), 3);
        assert!(RingDesc::new(5).is_err());
    }

    #[test]
    fn conjugation_cases() {
        assert_eq!(q(2, 3, 1).conj(), q(2, 3, -1));
        assert_eq!(q(7, 2, 3).conj(), q(7, 5, -3));
        for r in RingDesc::all() {
            let a = QuadInt::new(r, 4, -9);
            assert_eq!(a.conj().conj(), a);
        }
    }

    #[test]
    fn norm_examples() {
        assert_eq!(q(1, 3, 2).norm(), BigInt::from(13));
        assert_eq!(q(7, 0, 1).norm(), BigInt::from(2));
        assert_eq!(q(3, 0, 1).norm(), BigInt::from(1));
    }

    #[test]
    fn euclid_examples() {
        let (qq, r) = q(1, 7, 2).euclid_div(&q(1, 3, 0)).unwrap();
        assert_eq!((qq, r.clone()), (q(1, 2, 1), q(1, 1, -1)));
        assert_eq!(r.norm(), BigInt::from(2));
        let (qq, r) = q(3, 5, 0).euclid_div(&q(3, 2, 0)).unwrap();
        assert_eq!((qq, r), (q(3, 2, 0), q(3, 1, 0)));
        for rr in RingDesc::all() {
            let a = QuadInt::new(rr, 17, -5);
            assert_eq!(a.euclid_div(&rr.one()).unwrap(), (a.clone(), rr.zero()));
        }
        assert_eq!(q(1, 1, 1).euclid_div(&q(1, 0, 0)), Err(Error::DivisionByZero));
        assert!(matches!(
            q(1, 1, 1).euclid_div(&q(2, 1, 0)),
            Err(Error::RingMismatch(1, 2))
        ));
    }

    /// Exhaustive nearest-lattice-point oracle over the four corners.
    #[test]
    fn euclid_matches_corner_oracle() {
        for r in RingDesc::all() {
            for a in -6..=6 {
                for b in -6..=6 {
                    for c in -3..=3 {
                        for d in -3..=3 {
                            let x = QuadInt::new(r, a, b);
                            let y = QuadInt::new(r, c, d);
                            if y.is_zero() {
                                continue;
                            }
                            let (qq, rem) = x.euclid_div(&y).unwrap();
                            assert_eq!(&(&qq * &y) + &rem, x);
                            assert!(rem.norm() < y.norm());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&q(1, 1, 1), &q(1, 2, 0)).unwrap(), q(1, 1, 1));
        assert_eq!(gcd(&q(1, -3, 0), &q(1, 0, 0)).unwrap(), q(1, 3, 0));
        assert_eq!(gcd(&q(1, 3, 0), &q(1, 7, 0)).unwrap(), q(1, 1, 0));
        assert!(gcd(&q(1, 0, 0), &q(1, 0, 0)).is_err());
        // 2 = -w (1+w)^2
        assert_eq!(&-&q(1, 0, 1) * &q(1, 1, 1).pow(2), q(1, 2, 0));
    }

    #[test]
    fn unit_groups() {
        assert_eq!(ring(2).units(), vec![q(2, 1, 0), q(2, -1, 0)]);
        assert_eq!(ring(3).units().len(), 6);
        // enumeration oracle: all norm-1 elements with small coordinates
        for r in RingDesc::all() {
            let mut brute: Vec<QuadInt> = (-2..=2)
                .flat_map(|a| (-2..=2).map(move |b| QuadInt::new(r, a, b)))
                .filter(|x| x.norm().is_one())
                .collect();
            let mut units = r.units();
            brute.sort_by(|a, b| (a.re(), a.im()).cmp(&(b.re(), b.im())));
            units.sort_by(|a, b| (a.re(), a.im()).cmp(&(b.re(), b.im())));
            assert_eq!(brute, units);
        }
        let m1: Vec<_> = ring(1).units();
        for u in [q(1, 1, 0), q(1, -1, 0), q(1, 0, 1), q(1, 0, -1)] {
            assert!(m1.contains(&u));
        }
    }

    #[test]
    fn primality_examples() {
        let p = q(1, 1, 1).is_prime().unwrap();
        assert_eq!(p, Primality { is_prime: true, kind: Some(PrimeKind::NormPrime) });
        let p = q(1, 3, 0).is_prime().unwrap();
        assert_eq!(p, Primality { is_prime: true, kind: Some(PrimeKind::Inert) });
        assert_eq!(legendre(-4, 3), -1);
        let p = q(3, 2, 0).is_prime().unwrap();
        assert!(p.is_prime);
        assert_eq!(p.kind, Some(PrimeKind::Inert));
        assert!(!q(1, 5, 0).is_prime().unwrap().is_prime);
        assert_eq!(q(1, 2, 0).is_prime().unwrap().kind, Some(PrimeKind::Ramified));
        assert!(q(1, 0, 1).is_prime().is_err());
        assert!(q(1, 0, 0).is_prime().is_err());
    }

    #[test]
    fn factor_examples() {
        let f = q(1, 2, 0).factor().unwrap();
        assert_eq!(f.unit, q(1, 0, -1));
        assert_eq!(f.factors, vec![(q(1, 1, 1), 2)]);
        let u = q(3, 0, 1);
        let f = u.factor().unwrap();
        assert_eq!(f.unit, u);
        assert!(f.factors.is_empty());
        let f = q(1, 5, 0).factor().unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.factors[0], (q(1, 2, 1), 1));
        assert!(f.factors[1].0.is_associate(&q(1, 2, -1)));
        assert_eq!(f.product(), q(1, 5, 0));
        let big = q(2, 1_000_003, 0);
        assert!(matches!(big.factor(), Err(Error::Capacity(_))));
    }

    #[test]
    fn canonical_prime_examples() {
        assert_eq!(q(1, -3, 0).canonical_prime().unwrap(), q(1, 3, 0));
        let x = &q(1, 0, 1) * &q(1, 1, 1);
        assert_eq!(x.canonical_prime().unwrap(), q(1, 1, 1));
        assert_eq!(q(2, 0, -1).canonical_prime().unwrap(), q(2, 0, 1));
        assert!(q(1, 5, 0).canonical_prime().is_err());
    }

    #[test]
    fn r_alpha_lemma_examples() {
        use CongruenceConvention::*;
        assert!(q(2, 0, 1).check_r_alpha_lemma(OnM).unwrap());
        assert!(q(1, 2, 1).check_r_alpha_lemma(OnM).unwrap());
        assert!(q(2, 1, 1).check_r_alpha_lemma(OnM).unwrap());
        // The other reading admits m = 7, where w has norm 2 and R(w) = 0.
        assert!(!q(7, 0, 1).check_r_alpha_lemma(OnMinusM).unwrap());
        assert!(q(3, 2, 1).check_r_alpha_lemma(OnM).is_err());
        assert!(q(1, 3, 0).check_r_alpha_lemma(OnM).is_err());
    }

    #[test]
    fn text_format() {
        let r = ring(7);
        assert_eq!(parse_quad(r, "3+2*w").unwrap(), QuadInt::new(r, 3, 2));
        assert_eq!(parse_quad(r, "-1+0*w").unwrap(), QuadInt::new(r, -1, 0));
        assert_eq!(parse_quad(r, "3-1*w").unwrap(), QuadInt::new(r, 3, -1));
        assert_eq!(parse_quad(r, "3+-1*w").unwrap(), QuadInt::new(r, 3, -1));
        assert_eq!(parse_quad(r, "-w").unwrap(), QuadInt::new(r, 0, -1));
        assert_eq!(parse_quad(r, "w*4 - 2").unwrap(), QuadInt::new(r, -2, 4));
        assert!(parse_quad(r, "3+x").is_err());
        assert!(parse_quad(r, "w*w").is_err());
        assert_eq!(QuadInt::new(r, 3, -1).to_string(), "3-1*w");
    }

    #[test]
    fn json_format() {
        let a = QuadInt::new(ring(11), BigInt::from(10).pow(30), -3);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"re":"1000000000000000000000000000000","im":"-3","m":11}"#);
        let b: QuadInt = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
