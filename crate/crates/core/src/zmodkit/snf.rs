use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::hnf::Hnf;
use super::matrix::IntMatrix;

/// `left * A * right = diag(factors)` with unimodular transforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub factors: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

struct Work {
    a: Vec<Vec<BigInt>>,
    left: Option<Vec<Vec<BigInt>>>,
    right: Option<Vec<Vec<BigInt>>>,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect()
}

impl Work {
    fn nrows(&self) -> usize {
        self.a.len()
    }

    fn ncols(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(l) = &mut self.left {
            l.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.a {
            r.swap(i, j);
        }
        if let Some(rt) = &mut self.right {
            for r in rt.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_t
    fn row_op(&mut self, i: usize, q: &BigInt, t: usize) {
        fn op(m: &mut [Vec<BigInt>], i: usize, q: &BigInt, t: usize) {
            let src = m[t].clone();
            for (d, s) in m[i].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *d -= q * s;
                }
            }
        }
        op(&mut self.a, i, q, t);
        if let Some(l) = &mut self.left {
            op(l, i, q, t);
        }
    }

    /// col_j -= q * col_t
    fn col_op(&mut self, j: usize, q: &BigInt, t: usize) {
        fn op(m: &mut [Vec<BigInt>], j: usize, q: &BigInt, t: usize) {
            for r in m.iter_mut() {
                if !r[t].is_zero() {
                    let d = q * &r[t];
                    r[j] -= d;
                }
            }
        }
        op(&mut self.a, j, q, t);
        if let Some(rt) = &mut self.right {
            op(rt, j, q, t);
        }
    }

    fn negate_row(&mut self, t: usize) {
        self.a[t].iter_mut().for_each(|x| *x = -&*x);
        if let Some(l) = &mut self.left {
            l[t].iter_mut().for_each(|x| *x = -&*x);
        }
    }

    fn run(&mut self) -> Vec<BigInt> {
        let (r, c) = (self.nrows(), self.ncols());
        let n = r.min(c);
        for t in 0..n {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let v = &self.a[i][j];
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < self.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            self.swap_rows(t, bi);
            self.swap_cols(t, bj);
            loop {
                for i in t + 1..r {
                    if !self.a[i][t].is_zero() {
                        let q = self.a[i][t].div_floor(&self.a[t][t]);
                        self.row_op(i, &q, t);
                    }
                }
                for j in t + 1..c {
                    if !self.a[t][j].is_zero() {
                        let q = self.a[t][j].div_floor(&self.a[t][t]);
                        self.col_op(j, &q, t);
                    }
                }
                let row_rem = (t + 1..r).filter(|&i| !self.a[i][t].is_zero()).min_by_key(|&i| self.a[i][t].abs());
                let col_rem = (t + 1..c).filter(|&j| !self.a[t][j].is_zero()).min_by_key(|&j| self.a[t][j].abs());
                match (row_rem, col_rem) {
                    (Some(i), Some(j)) => {
                        if self.a[i][t].abs() <= self.a[t][j].abs() {
                            self.swap_rows(t, i);
                        } else {
                            self.swap_cols(t, j);
                        }
                        continue;
                    }
                    (Some(i), None) => {
                        self.swap_rows(t, i);
                        continue;
                    }
                    (None, Some(j)) => {
                        self.swap_cols(t, j);
                        continue;
                    }
                    (None, None) => {}
                }
                let p = self.a[t][t].clone();
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !self.a[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => self.row_op(t, &BigInt::from(-1), i),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
        (0..n).map(|i| self.a[i][i].clone()).collect()
    }
}

/// Smith normal form with both transforms.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let mut w = Work { a: a.to_rows(), left: Some(ident(a.nrows())), right: Some(ident(a.ncols())) };
    if a.nrows() == 0 || a.ncols() == 0 {
        return SnfResult { factors: vec![], left: IntMatrix::identity(a.nrows()), right: IntMatrix::identity(a.ncols()) };
    }
    let factors = w.run();
    let to = |m: Vec<Vec<BigInt>>, n: usize| IntMatrix::from_rows(n, m).expect("square");
    SnfResult {
        factors,
        left: to(w.left.take().expect("tracked"), a.nrows()),
        right: to(w.right.take().expect("tracked"), a.ncols()),
    }
}

/// Invariant factors of the row lattice of an HNF basis, with the right
/// transform `R` such that the lattice equals `diag(factors) * R^{-1}`.
pub fn lattice_snf(h: &Hnf) -> (Vec<BigInt>, IntMatrix) {
    let n = h.ncols();
    if h.rank() == 0 {
        return (vec![], IntMatrix::identity(n));
    }
    let mut w = Work { a: h.basis().to_vec(), left: None, right: Some(ident(n)) };
    let factors = w.run();
    (factors, IntMatrix::from_rows(n, w.right.take().expect("tracked")).expect("square"))
}

/// Invariant factors without transforms.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    let h = Hnf::from_matrix(a);
    if h.rank() == 0 {
        return vec![BigInt::zero(); a.nrows().min(a.ncols())];
    }
    let mut w = Work { a: h.basis().to_vec(), left: None, right: None };
    let mut f = w.run();
    f.resize(a.nrows().min(a.ncols()), BigInt::zero());
    f
}
