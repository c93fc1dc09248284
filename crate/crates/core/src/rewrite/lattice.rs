//! The shift lattices `lZ[l]` inside `O_F` and the covering test.
//!
//! Elements of `O_F` are written in the basis `(1, w)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::quad_field::FieldElem;
use crate::quad_ring::QuadInt;
use crate::zmodkit::Hnf;

pub fn coords(x: &QuadInt) -> Vec<BigInt> {
    vec![x.re().clone(), x.im().clone()]
}

/// `lZ[l]` for a nonzero integral `l`: `N(l)Z + lZ`, or `lZ` when `l` is
/// rational.
#[derive(Clone, Debug)]
pub struct ShiftLattice {
    generator: QuadInt,
    hnf: Hnf,
}

impl ShiftLattice {
    pub fn generator(&self) -> &QuadInt {
        &self.generator
    }

    pub fn hnf(&self) -> &Hnf {
        &self.hnf
    }

    pub fn rank(&self) -> usize {
        self.hnf.rank()
    }

    /// The spanning set `[N, l]`, or `[l]` for rational `l`.
    pub fn spanning_set(&self) -> Vec<QuadInt> {
        let l = &self.generator;
        if l.is_rational() {
            vec![l.clone()]
        } else {
            vec![l.ring().int(l.norm()), l.clone()]
        }
    }

    pub fn basis(&self) -> Vec<QuadInt> {
        let ring = self.generator.ring();
        self.hnf.basis().iter().map(|r| QuadInt::new(ring, r[0].clone(), r[1].clone())).collect()
    }

    pub fn contains(&self, t: &QuadInt) -> bool {
        self.hnf.contains(&coords(t)).expect("width 2")
    }

    /// Whether the lattice is all of `O_F`.
    pub fn is_everything(&self) -> bool {
        is_unimodular(&self.hnf)
    }
}

pub fn shift_lattice(l: &QuadInt) -> Result<ShiftLattice> {
    if l.is_zero() {
        return domain("the shift lattice of zero is not defined");
    }
    let rows: Vec<Vec<BigInt>> = if l.is_rational() {
        vec![coords(l)]
    } else {
        vec![vec![l.norm(), BigInt::zero()], coords(l)]
    };
    Ok(ShiftLattice { generator: l.clone(), hnf: Hnf::from_rows(2, rows)? })
}

/// The integral lattice licensed for a move element `l`: `lZ[l]` when `l`
/// is integral, and `bZ[b]` when `l = 1/b` with `b` integral, using
/// `bZ[b] ⊂ lZ[l]`.
pub fn move_lattice(l: &FieldElem) -> Result<ShiftLattice> {
    if let Some(b) = l.as_integral() {
        return shift_lattice(b);
    }
    let inv = l.inv()?;
    match inv.as_integral() {
        Some(b) => shift_lattice(b),
        None => domain(format!("neither {l} nor its inverse is integral")),
    }
}

/// The span of `l, l^2, ..., l^k`.
pub fn power_span(l: &QuadInt, k: u32) -> Result<Hnf> {
    let rows: Vec<Vec<BigInt>> = (1..=k).map(|e| coords(&l.pow(e))).collect();
    Hnf::from_rows(2, rows)
}

fn is_unimodular(h: &Hnf) -> bool {
    h.rank() == 2 && h.basis().iter().enumerate().all(|(i, r)| r[i].is_one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CoveringMode {
    /// `{p, w p, q, w q}`.
    FourTerm,
    /// `{p, q, w}`.
    ThreeTerm,
}

impl CoveringMode {
    pub fn bases(self, p: &QuadInt, q: &QuadInt) -> Vec<QuadInt> {
        let w = p.ring().omega();
        match self {
            CoveringMode::FourTerm => vec![p.clone(), &w * p, q.clone(), &w * q],
            CoveringMode::ThreeTerm => vec![p.clone(), q.clone(), w],
        }
    }
}

#[derive(Clone, Debug)]
pub struct Covering {
    pub covers: bool,
    pub bases: Vec<QuadInt>,
    /// HNF of the sum of the lattices.
    pub witness: Hnf,
}

pub fn lattice_sum<'a>(lattices: impl IntoIterator<Item = &'a ShiftLattice>) -> Hnf {
    let rows: Vec<Vec<BigInt>> = lattices.into_iter().flat_map(|l| l.hnf().basis().to_vec()).collect();
    Hnf::from_rows(2, rows).expect("width 2")
}

pub fn check_covering(p: &QuadInt, q: &QuadInt, mode: CoveringMode) -> Result<Covering> {
    if p.ring() != q.ring() {
        return Err(Error::RingMismatch(p.ring().m(), q.ring().m()));
    }
    p.canonical_prime()?;
    q.canonical_prime()?;
    if p.is_associate(q) {
        return domain(format!("{p} and {q} are associates"));
    }
    let bases = mode.bases(p, q);
    let lattices = bases.iter().map(shift_lattice).collect::<Result<Vec<_>>>()?;
    let witness = lattice_sum(&lattices);
    Ok(Covering { covers: is_unimodular(&witness), bases, witness })
}
