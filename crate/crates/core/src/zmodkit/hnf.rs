use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{is_zero_vec, sub_mul, IntMatrix};
use crate::error::{Error, Result};

/// Row-style Hermite basis of a sublattice of `Z^n`, built by inserting
/// generators one at a time.
///
/// Rows are kept in echelon form with strictly increasing pivot columns and
/// positive pivots. After [`Hnf::reduce`] every entry above a pivot lies in
/// `[0, pivot)`, which makes the basis canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    cols: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    dirty: usize,
}

const REDUCE_EVERY: usize = 64;

fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

impl Hnf {
    pub fn new(cols: usize) -> Self {
        Hnf { cols, rows: Vec::new(), pivots: Vec::new(), dirty: 0 }
    }

    pub fn from_rows<I, R>(cols: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[BigInt]>,
    {
        let mut input = Vec::new();
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!("vector of length {} in a lattice of rank {}", r.len(), cols)));
            }
            input.push(r.to_vec());
        }
        let echelon = echelon_rows(input, cols).0;
        let mut h = Self::new(cols);
        for (c, mut r) in echelon {
            if r[c].is_negative() {
                r.iter_mut().for_each(|x| *x = -&*x);
            }
            h.pivots.push(c);
            h.rows.push(r);
        }
        h.reduce();
        Ok(h)
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        Self::from_rows(m.ncols(), m.rows()).expect("rows have matrix width")
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.cols, self.rows.iter().cloned()).expect("consistent widths")
    }

    /// Add a generator to the lattice.
    pub fn insert(&mut self, mut v: Vec<BigInt>) -> Result<()> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} in a lattice of rank {}", v.len(), self.cols)));
        }
        let mut i = 0;
        while let Some(c) = leading(&v) {
            while i < self.pivots.len() && self.pivots[i] < c {
                i += 1;
            }
            if i == self.pivots.len() || self.pivots[i] != c {
                if v[c].is_negative() {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                self.rows.insert(i, v);
                self.pivots.insert(i, c);
                break;
            }
            let b = &mut self.rows[i];
            if v[c].is_multiple_of(&b[c]) {
                let q = v[c].div_floor(&b[c]);
                sub_mul(&mut v, &q, b);
            } else {
                let e = b[c].extended_gcd(&v[c]);
                let (bg, vg) = (&b[c] / &e.gcd, &v[c] / &e.gcd);
                let nb: Vec<BigInt> = b.iter().zip(&v).map(|(x, y)| &e.x * x + &e.y * y).collect();
                let nv: Vec<BigInt> = b.iter().zip(&v).map(|(x, y)| &bg * y - &vg * x).collect();
                *b = nb;
                if b[c].is_negative() {
                    b.iter_mut().for_each(|x| *x = -&*x);
                }
                v = nv;
            }
            i += 1;
        }
        self.dirty += 1;
        if self.dirty >= REDUCE_EVERY {
            self.reduce();
        }
        Ok(())
    }

    /// Reduce entries above pivots into `[0, pivot)`.
    pub fn reduce(&mut self) {
        for i in 0..self.rows.len() {
            let c = self.pivots[i];
            let (upper, lower) = self.rows.split_at_mut(i);
            let piv = &lower[0];
            for r in upper.iter_mut() {
                let q = r[c].div_floor(&piv[c]);
                sub_mul(r, &q, piv);
            }
        }
        self.dirty = 0;
    }

    /// Reduce `v` against the basis, returning the coefficients used and the
    /// remainder. The remainder is zero exactly when `v` lies in the lattice.
    pub fn divide(&self, v: &[BigInt]) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} in a lattice of rank {}", v.len(), self.cols)));
        }
        let mut rem = v.to_vec();
        let mut coeffs = vec![BigInt::zero(); self.rows.len()];
        for (i, (b, &c)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let q = rem[c].div_floor(&b[c]);
            sub_mul(&mut rem, &q, b);
            coeffs[i] = q;
        }
        Ok((coeffs, rem))
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        Ok(is_zero_vec(&self.divide(v)?.1))
    }

    /// Coordinates of `v` in the basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let (c, r) = self.divide(v)?;
        Ok(is_zero_vec(&r).then_some(c))
    }

    /// Lattice equality, comparing reduced bases.
    pub fn same_lattice(&self, other: &Hnf) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.reduce();
        b.reduce();
        a.cols == b.cols && a.rows == b.rows
    }

    pub fn contains_lattice(&self, other: &Hnf) -> Result<bool> {
        for r in other.basis() {
            if !self.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Generators of the left kernel `{u : u A = 0}` of `a`.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let (n, m) = (a.nrows(), a.ncols());
    let rows = a
        .rows()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.to_vec();
            v.extend((0..n).map(|j| BigInt::from((i == j) as i64)));
            v
        })
        .collect();
    let (_, rest) = echelon_rows(rows, m);
    IntMatrix::from_rows(n, rest.into_iter().map(|r| r[m..].to_vec())).expect("transforms have length n")
}

trait Entry: Clone + Sized {
    fn is_nil(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn floor_div(&self, other: &Self) -> Self;
    /// `dst -= q * src`, `None` on overflow.
    fn sub_mul_row(dst: &mut [Self], q: &Self, src: &[Self]) -> Option<()>;
}

impl Entry for i64 {
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn floor_div(&self, other: &Self) -> Self {
        Integer::div_floor(self, other)
    }
    fn sub_mul_row(dst: &mut [Self], q: &Self, src: &[Self]) -> Option<()> {
        for (d, s) in dst.iter_mut().zip(src) {
            if *s != 0 {
                *d = d.checked_sub(q.checked_mul(*s)?)?;
            }
        }
        Some(())
    }
}

impl Entry for BigInt {
    fn is_nil(&self) -> bool {
        self.is_zero()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn floor_div(&self, other: &Self) -> Self {
        self.div_floor(other)
    }
    fn sub_mul_row(dst: &mut [Self], q: &Self, src: &[Self]) -> Option<()> {
        sub_mul(dst, q, src);
        Some(())
    }
}

type Echelon<E> = (Vec<(usize, Vec<E>)>, Vec<Vec<E>>);

/// Row echelon form on the first `width` columns by repeated division with
/// the smallest available pivot. Returns the pivot rows with their columns
/// and the rows whose first `width` entries vanished.
fn echelon<E: Entry>(rows: Vec<Vec<E>>, width: usize) -> Option<Echelon<E>> {
    let live = |r: &[E], from: usize| r[from..width].iter().any(|x| !x.is_nil());
    let (mut active, mut rest): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| live(r, 0));
    let mut pivots = Vec::new();
    for c in 0..width {
        loop {
            let mut best: Option<usize> = None;
            for (i, r) in active.iter().enumerate() {
                if !r[c].is_nil() && best.is_none_or(|b| r[c].abs_lt(&active[b][c])) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            let piv = active.swap_remove(b);
            let mut again = false;
            let mut i = 0;
            while i < active.len() {
                if active[i][c].is_nil() {
                    i += 1;
                    continue;
                }
                let q = active[i][c].floor_div(&piv[c]);
                E::sub_mul_row(&mut active[i], &q, &piv)?;
                if !live(&active[i], c) {
                    rest.push(active.swap_remove(i));
                    continue;
                }
                again |= !active[i][c].is_nil();
                i += 1;
            }
            if again {
                active.push(piv);
            } else {
                pivots.push((c, piv));
                break;
            }
        }
    }
    Some((pivots, rest))
}

fn echelon_rows(rows: Vec<Vec<BigInt>>, width: usize) -> Echelon<BigInt> {
    let small: Option<Vec<Vec<i64>>> =
        rows.iter().map(|r| r.iter().map(|x| i64::try_from(x).ok()).collect()).collect();
    if let Some((piv, rest)) = small.and_then(|s| echelon(s, width)) {
        let big = |r: Vec<i64>| r.into_iter().map(BigInt::from).collect::<Vec<_>>();
        return (piv.into_iter().map(|(c, r)| (c, big(r))).collect(), rest.into_iter().map(big).collect());
    }
    echelon(rows, width).expect("big integers do not overflow")
}
