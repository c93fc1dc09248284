use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::hnf::{left_kernel, Hnf};
use super::matrix::{is_zero_vec, IntMatrix};
use super::snf::lattice_snf;
use crate::error::{Error, Result};

/// Coefficient vector over a module's generators.
pub type ElementVec = Vec<BigInt>;

/// `e_i -> sign_i * e_{target_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPerm {
    images: Vec<(usize, i8)>,
}

impl SignedPerm {
    pub fn new(images: Vec<(usize, i8)>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &(t, s) in &images {
            if t >= n || seen[t] || !(s == 1 || s == -1) {
                return Err(Error::MalformedAction(format!("not a signed permutation: {images:?}")));
            }
            seen[t] = true;
        }
        Ok(SignedPerm { images })
    }

    pub fn identity(n: usize) -> Self {
        SignedPerm { images: (0..n).map(|i| (i, 1)).collect() }
    }

    /// The action `e -> -e` on every generator.
    pub fn negation(n: usize) -> Self {
        SignedPerm { images: (0..n).map(|i| (i, -1)).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> (usize, i8) {
        self.images[i]
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); v.len()];
        for (i, x) in v.iter().enumerate() {
            let (t, s) = self.images[i];
            out[t] = if s > 0 { x.clone() } else { -x };
        }
        out
    }

    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        SignedPerm {
            images: other
                .images
                .iter()
                .map(|&(t, s)| {
                    let (t2, s2) = self.images[t];
                    (t2, s * s2)
                })
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &(t, s)) in self.images.iter().enumerate() {
            m.set(i, t, BigInt::from(s));
        }
        m
    }
}

/// Isomorphism type `Z^rank + sum Z/d_i`, with `1 < d_1 | d_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Structure {
    /// From raw diagonal entries of a presentation with `ngens` generators.
    pub fn from_diagonal(ngens: usize, diag: &[BigInt]) -> Self {
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        let torsion = diag.iter().filter(|d| !d.is_zero() && !d.abs().is_one()).map(|d| d.abs()).collect();
        Structure { rank: ngens - nonzero, torsion }
    }

    pub fn trivial() -> Self {
        Structure { rank: 0, torsion: vec![] }
    }

    /// Invariant factors with free summands listed first as zeros.
    pub fn factors(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rank];
        out.extend(self.torsion.iter().cloned());
        out
    }

    pub fn from_factors(factors: &[i64]) -> Self {
        let diag: Vec<BigInt> = factors.iter().filter(|&&d| d != 0).map(|&d| BigInt::from(d)).collect();
        let rank = factors.iter().filter(|&&d| d == 0).count();
        let mut s = Structure::from_diagonal(diag.len(), &diag);
        s.rank = rank;
        s.torsion.sort();
        s
    }

    /// Remove the 2-primary part.
    pub fn odd_part(&self) -> Structure {
        let torsion = self
            .torsion
            .iter()
            .map(odd_part_of)
            .filter(|d| !d.is_one())
            .collect();
        Structure { rank: self.rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.rank + self.torsion.len() <= 1
    }

    /// Group order, when finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }
}

pub fn odd_part_of(d: &BigInt) -> BigInt {
    if d.is_zero() {
        return BigInt::zero();
    }
    let mut d = d.abs();
    let two = BigInt::from(2);
    while d.is_even() {
        d /= &two;
    }
    d
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors().iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn json_int(d: &BigInt) -> serde_json::Value {
    match d.to_u64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(d.to_string()),
    }
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Structure", 2)?;
        st.serialize_field("rank", &self.rank)?;
        let t: Vec<serde_json::Value> = self.torsion.iter().map(json_int).collect();
        st.serialize_field("torsion", &t)?;
        st.end()
    }
}

/// A finitely presented abelian group, optionally with `k` commuting
/// involutions acting by signed permutations of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPModule {
    labels: Vec<String>,
    relations: IntMatrix,
    action: Vec<SignedPerm>,
}

impl FPModule {
    pub fn new(labels: Vec<String>, relations: IntMatrix, action: Vec<SignedPerm>) -> Result<Self> {
        let m = FPModule { labels, relations, action };
        m.validate()?;
        Ok(m)
    }

    /// Construct without checking the action; for internal builders whose
    /// action is correct by construction.
    pub(crate) fn new_unchecked(labels: Vec<String>, relations: IntMatrix, action: Vec<SignedPerm>) -> Self {
        debug_assert_eq!(labels.len(), relations.ncols());
        FPModule { labels, relations, action }
    }

    pub fn free(labels: Vec<String>) -> Self {
        let n = labels.len();
        FPModule { labels, relations: IntMatrix::zeros(0, n), action: vec![] }
    }

    pub fn cyclic(label: &str, order: i64) -> Self {
        let rel = IntMatrix::from_i64(&[vec![order]]).expect("1x1");
        FPModule { labels: vec![label.to_string()], relations: rel, action: vec![] }
    }

    fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.relations.ncols() != n {
            return Err(Error::Dimension(format!(
                "{} generators but relations have {} columns",
                n,
                self.relations.ncols()
            )));
        }
        for (i, g) in self.action.iter().enumerate() {
            if g.len() != n {
                return Err(Error::MalformedAction(format!("involution {i} acts on {} generators, expected {n}", g.len())));
            }
            if g.compose(g) != SignedPerm::identity(n) {
                return Err(Error::MalformedAction(format!("involution {i} does not square to the identity")));
            }
            for (j, h) in self.action.iter().enumerate().skip(i + 1) {
                if g.compose(h) != h.compose(g) {
                    return Err(Error::MalformedAction(format!("involutions {i} and {j} do not commute")));
                }
            }
        }
        if !self.action.is_empty() {
            let lat = self.lattice();
            for (i, g) in self.action.iter().enumerate() {
                for r in self.relations.rows() {
                    if !lat.contains(&g.apply(r))? {
                        return Err(Error::MalformedAction(format!("relations are not stable under involution {i}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ngens(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn action(&self) -> &[SignedPerm] {
        &self.action
    }

    pub fn k(&self) -> usize {
        self.action.len()
    }

    pub fn basis_vector(&self, i: usize) -> ElementVec {
        let mut v = vec![BigInt::zero(); self.ngens()];
        v[i] = BigInt::one();
        v
    }

    pub fn zero_vector(&self) -> ElementVec {
        vec![BigInt::zero(); self.ngens()]
    }

    pub fn lattice(&self) -> Hnf {
        Hnf::from_matrix(&self.relations)
    }

    /// The same module with its relations replaced by their Hermite basis.
    pub fn reduced(&self) -> FPModule {
        FPModule { labels: self.labels.clone(), relations: self.lattice().to_matrix(), action: self.action.clone() }
    }

    /// Append relations together with all their images under the action.
    pub fn with_relations(&self, extra: impl IntoIterator<Item = ElementVec>) -> Result<FPModule> {
        let mut rel = self.relations.clone();
        for r in extra {
            let mut orbit = vec![r];
            for g in &self.action {
                let imgs: Vec<ElementVec> = orbit.iter().map(|v| g.apply(v)).collect();
                orbit.extend(imgs);
            }
            for v in orbit {
                rel.push_row(v)?;
            }
        }
        Ok(FPModule { labels: self.labels.clone(), relations: rel, action: self.action.clone() })
    }

    /// Forget the action.
    pub fn underlying(&self) -> FPModule {
        FPModule { labels: self.labels.clone(), relations: self.relations.clone(), action: vec![] }
    }

    pub fn prepare(&self) -> PreparedModule {
        PreparedModule::new(self)
    }

    pub fn structure(&self) -> Structure {
        let h = self.lattice();
        let (diag, _) = lattice_snf(&h);
        Structure::from_diagonal(self.ngens(), &diag)
    }

    pub fn odd_part(&self) -> Structure {
        self.structure().odd_part()
    }

    pub fn element_equal(&self, a: &[BigInt], b: &[BigInt]) -> Result<bool> {
        let n = self.ngens();
        if a.len() != n || b.len() != n {
            return Err(Error::Dimension(format!("elements of length {} and {} in a module on {n} generators", a.len(), b.len())));
        }
        let d: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.lattice().contains(&d)
    }

    /// Act on an element by involution `i`.
    pub fn act(&self, i: usize, v: &[BigInt]) -> ElementVec {
        self.action[i].apply(v)
    }

    /// `M_chi`: add `(g_i - sign_i) x` for every generator `x`.
    pub fn character_quotient(&self, signs: &[i8]) -> Result<FPModule> {
        if signs.len() != self.k() {
            return Err(Error::Dimension(format!("{} signs for {} involutions", signs.len(), self.k())));
        }
        let mut rel = self.relations.clone();
        for (g, &s) in self.action.iter().zip(signs) {
            for x in 0..self.ngens() {
                let mut row = g.apply(&self.basis_vector(x));
                row[x] -= BigInt::from(s);
                if !is_zero_vec(&row) {
                    rel.push_row(row)?;
                }
            }
        }
        Ok(FPModule { labels: self.labels.clone(), relations: rel, action: vec![] })
    }

    /// `A (x) A` modulo `x (x) y + y (x) x`, for a module with trivial action.
    pub fn sym2(&self) -> Result<FPModule> {
        if !self.action.is_empty() {
            return Err(Error::MalformedAction("sym2 needs a trivial action".into()));
        }
        let n = self.ngens();
        let mut index = vec![vec![0usize; n]; n];
        let mut labels = Vec::new();
        for i in 0..n {
            for j in i..n {
                index[i][j] = labels.len();
                index[j][i] = labels.len();
                labels.push(format!("{}∘{}", self.labels[i], self.labels[j]));
            }
        }
        let cols = labels.len();
        // e_i ∘ e_j with i > j equals -e_j ∘ e_i.
        let sign = |i: usize, j: usize| if i > j { -1 } else { 1 };
        let mut rel = IntMatrix::zeros(0, cols);
        for i in 0..n {
            let mut row = vec![BigInt::zero(); cols];
            row[index[i][i]] = BigInt::from(2);
            rel.push_row(row)?;
        }
        for r in self.relations.rows() {
            for j in 0..n {
                let mut row = vec![BigInt::zero(); cols];
                for (i, c) in r.iter().enumerate() {
                    if !c.is_zero() {
                        row[index[i][j]] += c * BigInt::from(sign(i, j));
                    }
                }
                if !is_zero_vec(&row) {
                    rel.push_row(row)?;
                }
            }
        }
        Ok(FPModule { labels, relations: rel, action: vec![] })
    }

    /// Index of `e_i ∘ e_j` in [`FPModule::sym2`] and its sign.
    pub fn sym2_slot(n: usize, i: usize, j: usize) -> (usize, i64) {
        let (a, b, s) = if i <= j { (i, j, 1) } else { (j, i, -1) };
        let base = a * n - a * a.saturating_sub(1) / 2;
        (base + (b - a), s)
    }

    pub fn direct_sum(&self, other: &FPModule) -> Result<FPModule> {
        if self.k() != other.k() {
            return Err(Error::MalformedAction("direct sum of modules with different actions".into()));
        }
        let n = self.ngens();
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                let mut images = a.images.clone();
                images.extend(b.images.iter().map(|&(t, s)| (t + n, s)));
                SignedPerm { images }
            })
            .collect();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(FPModule { labels, relations: self.relations.block_diag(&other.relations), action })
    }
}

/// A module together with its relation lattice in Hermite and Smith form,
/// for repeated membership queries.
#[derive(Clone, Debug)]
pub struct PreparedModule {
    ngens: usize,
    hnf: Hnf,
    diag: Vec<BigInt>,
    right: IntMatrix,
}

impl PreparedModule {
    pub fn new(m: &FPModule) -> Self {
        let hnf = m.lattice();
        let (diag, right) = lattice_snf(&hnf);
        PreparedModule { ngens: m.ngens(), hnf, diag, right }
    }

    pub fn structure(&self) -> Structure {
        Structure::from_diagonal(self.ngens, &self.diag)
    }

    pub fn hnf(&self) -> &Hnf {
        &self.hnf
    }

    pub fn is_zero(&self, v: &[BigInt]) -> Result<bool> {
        self.hnf.contains(v)
    }

    pub fn equal(&self, a: &[BigInt], b: &[BigInt]) -> Result<bool> {
        let d: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero(&d)
    }

    /// Whether `v` vanishes in `M[1/2]`, read off from Smith coordinates.
    pub fn is_zero_odd(&self, v: &[BigInt]) -> Result<bool> {
        let w = self.right.apply_row(v)?;
        for (i, x) in w.iter().enumerate() {
            match self.diag.get(i) {
                Some(d) if !d.is_zero() => {
                    if !x.is_multiple_of(&odd_part_of(d)) {
                        return Ok(false);
                    }
                }
                _ => {
                    if !x.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Whether `v` vanishes in `M[1/2]`, by testing `2^e v` for membership
    /// with `e` the largest 2-adic valuation among the invariant factors.
    pub fn is_zero_odd_by_hnf(&self, v: &[BigInt]) -> Result<bool> {
        let e = self
            .diag
            .iter()
            .filter(|d| !d.is_zero())
            .map(|d| d.trailing_zeros().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let scale = BigInt::one() << e;
        let w: Vec<BigInt> = v.iter().map(|x| x * &scale).collect();
        self.hnf.contains(&w)
    }

    /// Order of `v` in the group (`None` when infinite).
    pub fn element_order(&self, v: &[BigInt]) -> Result<Option<BigInt>> {
        let w = self.right.apply_row(v)?;
        let mut ord = BigInt::one();
        for (i, x) in w.iter().enumerate() {
            match self.diag.get(i) {
                Some(d) if !d.is_zero() => {
                    let o = d / d.gcd(x);
                    ord = ord.lcm(&o);
                }
                _ => {
                    if !x.is_zero() {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(ord))
    }
}

/// A kernel presented on synthetic generators, with its inclusion.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub module: FPModule,
    /// Row `i` is generator `k_i` written in the source generators.
    pub embedding: IntMatrix,
}

fn check_map(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<Hnf> {
    if f.nrows() != m.ngens() || f.ncols() != n.ngens() {
        return Err(Error::Dimension(format!(
            "map is {}x{} but modules have {} and {} generators",
            f.nrows(),
            f.ncols(),
            m.ngens(),
            n.ngens()
        )));
    }
    let hn = n.lattice();
    for (i, r) in m.relations().rows().enumerate() {
        if !hn.contains(&f.apply_row(r)?)? {
            return Err(Error::IllDefinedMap { relation: i });
        }
    }
    Ok(hn)
}

/// Check that `f` sends every relation of `m` into the relations of `n`.
pub fn check_well_defined(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<()> {
    check_map(f, m, n).map(|_| ())
}

/// Present the subgroup `(lattice + rel) / rel` of a module with relation
/// lattice `rel`, on the Hermite basis of the larger lattice.
fn subquotient(cols: usize, lattice: Hnf, rel: &Hnf, prefix: &str) -> Result<Kernel> {
    let big = Hnf::from_rows(cols, lattice.basis().iter().chain(rel.basis()))?;
    let s = big.rank();
    let mut rows = Vec::with_capacity(rel.rank());
    for r in rel.basis() {
        rows.push(big.coordinates(r)?.expect("relations lie in the enlarged lattice"));
    }
    let labels = (0..s).map(|i| format!("{prefix}{i}")).collect();
    let relations = IntMatrix::from_rows(s, rows)?;
    let embedding = IntMatrix::from_rows(cols, big.basis().iter().cloned())?;
    Ok(Kernel { module: FPModule::new_unchecked(labels, relations, vec![]), embedding })
}

/// `{x in M : f(x) = 0 in N}` for the map given by row vectors `x -> x f`.
pub fn map_kernel(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<Kernel> {
    let hn = check_map(f, m, n)?;
    let stacked = f.vstack(&hn.to_matrix())?;
    let ker = left_kernel(&stacked);
    let nm = m.ngens();
    let proj = Hnf::from_rows(nm, ker.rows().map(|r| r[..nm].to_vec()))?;
    subquotient(nm, proj, &m.lattice(), "k")
}

/// `f(M)` as a subgroup of `N`.
pub fn map_image(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<Kernel> {
    let hn = check_map(f, m, n)?;
    let img = Hnf::from_matrix(f);
    subquotient(n.ngens(), img, &hn, "i")
}

/// `N / f(M)`, keeping the action of `N`.
pub fn map_cokernel(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<FPModule> {
    check_map(f, m, n)?;
    let rel = n.relations().vstack(f)?;
    Ok(FPModule { labels: n.labels.clone(), relations: rel, action: n.action.clone() })
}

/// Error unless `f` commutes with the actions modulo the relations of `N`.
pub fn check_equivariant(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<()> {
    if m.k() != n.k() {
        return Err(Error::MalformedAction(format!("{} vs {} involutions", m.k(), n.k())));
    }
    let hn = n.lattice();
    for i in 0..m.k() {
        for x in 0..m.ngens() {
            let lhs = f.apply_row(&m.act(i, &m.basis_vector(x)))?;
            let rhs = n.act(i, f.row(x));
            let d: Vec<BigInt> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            if !hn.contains(&d)? {
                return Err(Error::NotEquivariant { involution: i });
            }
        }
    }
    Ok(())
}
