//! Presentations of the scissors congruence groups `P(k)` and `RP(k)` of a
//! finite field `k`, the maps `lambda`, `lambda_1`, `lambda_2`, and the groups
//! cut out by them.
//!
//! `RP(k)` is a module over `Z[k^x / (k^x)^2]`, which is `Z[C_2]` for odd `q`
//! and `Z` for even `q`. It is stored flattened: generator `h[x]` sits at
//! `slot(x) * 2^k + h`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::finite_field::{DiscreteLog, FFElem, FiniteFieldDesc};
use crate::zmodkit::group_ring::{gr_basis, gr_zero, GroupRingElem, GroupRingPresentation};
use crate::zmodkit::{map_image, map_kernel, ElementVec, FPModule, IntMatrix, Kernel, SignedPerm, Structure};

/// Largest field order accepted by [`BlochField::new`].
pub const MAX_Q: u64 = 128;

#[derive(Clone, Debug)]
pub struct BlochField {
    field: FiniteFieldDesc,
    dlog: DiscreteLog,
}

impl BlochField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_Q {
            return Err(Error::Capacity(format!("q = {q} exceeds the bound {MAX_Q}")));
        }
        Self::with_field(FiniteFieldDesc::for_order(q)?)
    }

    /// Use a specific model of the field, e.g. a residue field.
    pub fn with_field(field: FiniteFieldDesc) -> Result<Self> {
        if field.order() > MAX_Q {
            return Err(Error::Capacity(format!("q = {} exceeds the bound {MAX_Q}", field.order())));
        }
        Ok(BlochField { field, dlog: DiscreteLog::new(field) })
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn field(&self) -> FiniteFieldDesc {
        self.field
    }

    /// Number of involutions generating the square class group.
    pub fn k(&self) -> usize {
        usize::from(self.q() % 2 == 1)
    }

    fn size(&self) -> usize {
        1 << self.k()
    }

    fn one(&self) -> FFElem {
        self.field.one()
    }

    /// Square class bit: 0 for squares, 1 otherwise.
    pub fn class(&self, x: &FFElem) -> Result<usize> {
        if self.k() == 0 {
            return Ok(0);
        }
        Ok(usize::from(!x.is_square()?))
    }

    pub fn minus_one_class(&self) -> usize {
        self.class(&self.one().neg()).expect("-1 is nonzero")
    }

    fn label(x: &FFElem) -> String {
        format!("[{x}]")
    }

    // ---- P(k) ----

    /// Symbols of `P(k)`: the elements of `k \ {0, 1}` in enumeration order.
    pub fn p_elements(&self) -> Vec<FFElem> {
        self.field.elements().filter(|x| !x.is_zero() && !x.is_one()).collect()
    }

    fn p_slot(&self, x: &FFElem) -> usize {
        // index 0 is zero, index of one is skipped
        let i = x.index() as usize;
        let one = self.one().index() as usize;
        if i > one {
            i - 2
        } else {
            i - 1
        }
    }

    pub fn prebloch(&self) -> FPModule {
        match self.q() {
            2 => return FPModule::cyclic("C", 3),
            3 => return FPModule::cyclic(&Self::label(&self.one().neg()), 4),
            _ => {}
        }
        let gens = self.p_elements();
        let n = gens.len();
        let labels = gens.iter().map(Self::label).collect();
        let mut rel = IntMatrix::zeros(0, n);
        let one = self.one();
        for x in &gens {
            for y in &gens {
                if x == y {
                    continue;
                }
                let mut row = vec![BigInt::zero(); n];
                let terms = five_terms(x, y, &one);
                for (sign, z) in [(1, terms[0]), (-1, terms[1]), (1, terms[2]), (-1, terms[3]), (1, terms[4])] {
                    row[self.p_slot(&z)] += sign;
                }
                rel.push_row(row).expect("width n");
            }
        }
        FPModule::new_unchecked(labels, rel, vec![])
    }

    /// `[x]` in `P(k)`, with `[1] = 0`.
    pub fn p_symbol(&self, x: &FFElem) -> Result<ElementVec> {
        self.check(x)?;
        let n = self.prebloch_ngens();
        let mut v = vec![BigInt::zero(); n];
        if x.is_zero() {
            return domain("[0] is not a generator; use the C element");
        }
        if x.is_one() {
            return Ok(v);
        }
        v[self.p_slot(x)] = BigInt::one();
        Ok(v)
    }

    fn prebloch_ngens(&self) -> usize {
        match self.q() {
            2 | 3 => 1,
            q => q as usize - 2,
        }
    }

    /// `C_k` in `P(k)`: the image of `[x] + [1 - x]`, with `C = 2[-1]` for
    /// `F_3` and the distinguished generator for `F_2`.
    pub fn p_c(&self) -> ElementVec {
        match self.q() {
            2 => vec![BigInt::one()],
            3 => vec![BigInt::from(2)],
            _ => {
                let x = self.p_elements()[0];
                let mut v = self.p_symbol(&x).expect("x in k");
                let w = self.p_symbol(&self.one().sub(&x)).expect("1 - x in k");
                v.iter_mut().zip(w).for_each(|(a, b)| *a += b);
                v
            }
        }
    }

    fn check(&self, x: &FFElem) -> Result<()> {
        if x.field() != self.field {
            return Err(Error::Domain(format!("{x:?} is not in {}", self.field)));
        }
        Ok(())
    }

    // ---- RP(k) ----

    fn r_slot(&self, x: &FFElem) -> usize {
        x.index() as usize - 1
    }

    pub fn refined_presentation(&self) -> GroupRingPresentation {
        let k = self.k();
        let units: Vec<FFElem> = self.field.elements().skip(1).collect();
        let n = units.len();
        if self.q() == 2 {
            let mut p = GroupRingPresentation::new(0, vec!["C".into()]);
            p.add_relation(vec![vec![BigInt::from(3)]]).expect("sized");
            return p;
        }
        let mut p = GroupRingPresentation::new(k, units.iter().map(Self::label).collect());
        let one = self.one();
        let mut unit_rel = vec![gr_zero(k); n];
        unit_rel[self.r_slot(&one)] = gr_basis(k, 0);
        p.add_relation(unit_rel).expect("sized");
        if self.q() == 3 {
            let m1 = one.neg();
            let mut r = vec![gr_zero(k); n];
            let c = self.minus_one_class();
            r[self.r_slot(&m1)][0] += 2;
            r[self.r_slot(&m1)][c] += 2;
            p.add_relation(r).expect("sized");
            return p;
        }
        for x in &units {
            for y in &units {
                if x == y || x.is_one() || y.is_one() {
                    continue;
                }
                let t = five_terms(x, y, &one);
                let x_inv_minus_one = x.inv().expect("unit").sub(&one);
                let coeffs: [(i64, usize, FFElem); 5] = [
                    (1, 0, t[0]),
                    (-1, 0, t[1]),
                    (1, self.class(x).expect("unit"), t[2]),
                    (-1, self.class(&x_inv_minus_one).expect("x != 1"), t[3]),
                    (1, self.class(&one.sub(x)).expect("x != 1"), t[4]),
                ];
                let mut r: Vec<GroupRingElem> = vec![gr_zero(k); n];
                for (s, h, z) in coeffs {
                    r[self.r_slot(&z)][h] += s;
                }
                p.add_relation(r).expect("sized");
            }
        }
        p
    }

    pub fn refined(&self) -> FPModule {
        self.refined_presentation().flatten()
    }

    fn refined_ngens(&self) -> usize {
        if self.q() == 2 {
            1
        } else {
            (self.q() as usize - 1) * self.size()
        }
    }

    /// `<h>[x]` in the flattened `RP(k)`.
    pub fn r_symbol(&self, x: &FFElem, h: usize) -> Result<ElementVec> {
        self.check(x)?;
        if self.q() == 2 {
            return domain("RP(F_2) has no symbols [x]; it is generated by C");
        }
        if x.is_zero() {
            return domain("[0] is not a generator of RP(k)");
        }
        let mut v = vec![BigInt::zero(); self.refined_ngens()];
        v[self.r_slot(x) * self.size() + (h & (self.size() - 1))] = BigInt::one();
        Ok(v)
    }

    /// Multiply a flattened element by the square class `h`.
    pub fn act(&self, v: &[BigInt], h: usize) -> ElementVec {
        let s = self.size();
        let mut out = vec![BigInt::zero(); v.len()];
        for (i, c) in v.iter().enumerate() {
            out[(i / s) * s + ((i % s) ^ (h & (s - 1)))] += c;
        }
        out
    }

    fn check_generic(&self, x: &FFElem) -> Result<()> {
        self.check(x)?;
        if x.is_zero() || x.is_one() {
            return domain(format!("{x} is 0 or 1"));
        }
        Ok(())
    }

    /// `psi_1(x) = [x] + <-1>[x^-1]`.
    pub fn psi1(&self, x: &FFElem) -> Result<ElementVec> {
        self.check_generic(x)?;
        let mut v = self.r_symbol(x, 0)?;
        add(&mut v, &self.r_symbol(&x.inv()?, self.minus_one_class())?);
        Ok(v)
    }

    /// `psi_2(x) = <x^-1 - 1>[x] + <1 - x>[x^-1]`, and `psi_2(1) = 0`.
    pub fn psi2(&self, x: &FFElem) -> Result<ElementVec> {
        self.check(x)?;
        if x.is_zero() {
            return domain("psi_2 is defined on units");
        }
        if x.is_one() {
            return Ok(vec![BigInt::zero(); self.refined_ngens()]);
        }
        let one = self.one();
        let inv = x.inv()?;
        let mut v = self.r_symbol(x, self.class(&inv.sub(&one))?)?;
        add(&mut v, &self.r_symbol(&inv, self.class(&one.sub(x))?)?);
        Ok(v)
    }

    /// `C(x) = [x] + <-1>[1 - x] + <<1 - x>> psi_1(x)`.
    pub fn c_elem(&self, x: &FFElem) -> Result<ElementVec> {
        self.check_generic(x)?;
        let one = self.one();
        let mut v = self.r_symbol(x, 0)?;
        add(&mut v, &self.r_symbol(&one.sub(x), self.minus_one_class())?);
        let psi = self.psi1(x)?;
        add(&mut v, &self.act(&psi, self.class(&one.sub(x))?));
        sub(&mut v, &psi);
        Ok(v)
    }

    /// `C_k` in `RP(k)` as the value of `C(x)` at the first symbol.
    pub fn rp_c(&self) -> Result<ElementVec> {
        match self.q() {
            2 => Ok(vec![BigInt::one()]),
            3 => domain("C is not defined in RP(F_3)"),
            _ => self.c_elem(&self.p_elements()[0]),
        }
    }

    // ---- maps ----

    /// `I^2` for the square class group: `Z` on `<<g>><<g>>` with `g` acting
    /// by `-1` when `q` is odd, zero when `q` is even.
    pub fn i_squared(&self) -> FPModule {
        if self.k() == 0 {
            return FPModule::free(vec![]);
        }
        FPModule::new(vec!["<<g>><<g>>".into()], IntMatrix::zeros(0, 1), vec![SignedPerm::negation(1)])
            .expect("valid action")
    }

    /// `S^2_Z(k^x)` with trivial action of the square classes.
    pub fn s2_target(&self, with_action: bool) -> FPModule {
        let a = FPModule::cyclic("γ", self.q() as i64 - 1);
        let s2 = a.sym2().expect("trivial action");
        if !with_action || self.k() == 0 {
            return s2;
        }
        let n = s2.ngens();
        FPModule::new(s2.labels().to_vec(), s2.relations().clone(), vec![SignedPerm::identity(n)])
            .expect("identity action")
    }

    /// Coefficient of `γ∘γ` in `(1 - x)∘x`.
    fn lambda_coeff(&self, x: &FFElem) -> i64 {
        let a = self.dlog.log(&self.one().sub(x)).expect("x != 1");
        let b = self.dlog.log(x).expect("x != 0");
        ((a as u128 * b as u128) % 2) as i64
    }

    /// `lambda: P(k) -> S^2_Z(k^x)`, `[x] -> (1 - x)∘x`.
    pub fn lambda_p(&self) -> (IntMatrix, FPModule) {
        let target = self.s2_target(false);
        let n = self.prebloch_ngens();
        let mut f = IntMatrix::zeros(n, target.ngens());
        if self.q() >= 3 {
            for x in self.p_elements() {
                f.set(self.p_slot(&x), 0, BigInt::from(self.lambda_coeff(&x)));
            }
        }
        (f, target)
    }

    /// `lambda_1: RP(k) -> I^2`, `[x] -> <<1 - x>><<x>>`.
    pub fn lambda1(&self) -> Result<(IntMatrix, FPModule)> {
        let target = self.i_squared();
        let n = self.refined_ngens();
        let mut f = IntMatrix::zeros(n, target.ngens());
        if self.k() == 1 {
            let one = self.one();
            for x in self.field.elements().skip(1).filter(|x| !x.is_one()) {
                if self.class(&x)? == 1 && self.class(&one.sub(&x))? == 1 {
                    for h in 0..2 {
                        let sign = if h == 0 { 1 } else { -1 };
                        f.set(self.r_slot(&x) * 2 + h, 0, BigInt::from(sign));
                    }
                }
            }
        }
        Ok((f, target))
    }

    /// `lambda_2: RP(k) -> P(k) -> S^2_Z(k^x)`.
    pub fn lambda2(&self) -> (IntMatrix, FPModule) {
        let target = self.s2_target(true);
        let n = self.refined_ngens();
        let mut f = IntMatrix::zeros(n, target.ngens());
        if self.q() >= 3 {
            for x in self.field.elements().skip(1).filter(|x| !x.is_one()) {
                for h in 0..self.size() {
                    f.set(self.r_slot(&x) * self.size() + h, 0, BigInt::from(self.lambda_coeff(&x)));
                }
            }
        }
        (f, target)
    }

    /// `Lambda = (lambda_1, lambda_2)` into the direct sum.
    pub fn lambda(&self) -> Result<(IntMatrix, FPModule)> {
        let (f1, t1) = self.lambda1()?;
        let (f2, t2) = self.lambda2();
        Ok((f1.hstack(&f2)?, t1.direct_sum(&t2)?))
    }

    // ---- derived groups ----

    pub fn bloch_group(&self) -> Result<Kernel> {
        let (f, t) = self.lambda_p();
        map_kernel(&f, &self.prebloch(), &t)
    }

    pub fn rp1(&self) -> Result<Kernel> {
        let (f, t) = self.lambda1()?;
        map_kernel(&f, &self.refined(), &t)
    }

    pub fn rb(&self) -> Result<Kernel> {
        let (f, t) = self.lambda()?;
        map_kernel(&f, &self.refined(), &t)
    }

    /// `RB` recomputed as the kernel of `lambda_2` restricted to `RP_1`.
    pub fn rb_via_rp1(&self) -> Result<Kernel> {
        let rp1 = self.rp1()?;
        let (f, t) = self.lambda2();
        let restricted = rp1.embedding.mul(&f)?;
        let k = map_kernel(&restricted, &rp1.module, &t.underlying())?;
        Ok(Kernel { embedding: k.embedding.mul(&rp1.embedding)?, module: k.module })
    }

    fn psi1_all(&self) -> Result<Vec<ElementVec>> {
        self.field.elements().skip(1).filter(|x| !x.is_one()).map(|x| self.psi1(&x)).collect()
    }

    /// `RP(k)` modulo the submodule generated by all `psi_1(x)`.
    pub fn rp_tilde(&self) -> Result<FPModule> {
        let rp = self.refined();
        if self.q() == 2 {
            return Ok(rp);
        }
        rp.with_relations(self.psi1_all()?)
    }

    /// `RP~(k)` modulo `(1 - <-1>)[x]`.
    pub fn rp_plus(&self) -> Result<FPModule> {
        let t = self.rp_tilde()?;
        if self.q() == 2 {
            return Ok(t);
        }
        let c = self.minus_one_class();
        let mut extra = Vec::new();
        for x in self.field.elements().skip(1) {
            let mut v = self.r_symbol(&x, 0)?;
            sub(&mut v, &self.r_symbol(&x, c)?);
            extra.push(v);
        }
        t.with_relations(extra)
    }

    /// The image of `1 + <-1>` on `RP~(k)`; after inverting 2 this is the
    /// `e_+` component.
    pub fn eplus_rp_tilde(&self) -> Result<Kernel> {
        let t = self.rp_tilde()?;
        let n = t.ngens();
        let c = self.minus_one_class();
        let mut f = IntMatrix::zeros(n, n);
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            let img = if self.q() == 2 { e.clone() } else { self.act(&e, c) };
            for j in 0..n {
                let v = &e[j] + &img[j];
                f.set(i, j, v);
            }
        }
        map_image(&f, &t, &t)
    }
}

/// The five arguments of the relation on `(x, y)`:
/// `x, y, y/x, (1 - 1/x)/(1 - 1/y), (1 - x)/(1 - y)`.
pub fn five_terms(x: &FFElem, y: &FFElem, one: &FFElem) -> [FFElem; 5] {
    let xi = x.inv().expect("x != 0");
    let yi = y.inv().expect("y != 0");
    [
        *x,
        *y,
        y.mul(&xi),
        one.sub(&xi).mul(&one.sub(&yi).inv().expect("y != 1")),
        one.sub(x).mul(&one.sub(y).inv().expect("y != 1")),
    ]
}

fn add(v: &mut [BigInt], w: &[BigInt]) {
    v.iter_mut().zip(w).for_each(|(a, b)| *a += b);
}

fn sub(v: &mut [BigInt], w: &[BigInt]) {
    v.iter_mut().zip(w).for_each(|(a, b)| *a -= b);
}

/// A group produced by a [`GroupBuilder`], possibly as a subgroup of an
/// ambient presentation.
#[derive(Clone, Debug)]
pub struct BuiltGroup {
    pub module: FPModule,
    pub embedding: Option<IntMatrix>,
    pub ambient_labels: Vec<String>,
}

impl BuiltGroup {
    fn whole(m: FPModule) -> Self {
        let labels = m.labels().to_vec();
        BuiltGroup { module: m, embedding: None, ambient_labels: labels }
    }

    fn sub(k: Kernel, ambient: &FPModule) -> Self {
        BuiltGroup { module: k.module, embedding: Some(k.embedding), ambient_labels: ambient.labels().to_vec() }
    }

    /// Each generator written in the ambient symbols.
    pub fn generator_dictionary(&self) -> Vec<(String, String)> {
        let labels = self.module.labels();
        match &self.embedding {
            None => labels.iter().map(|l| (l.clone(), l.clone())).collect(),
            Some(e) => labels
                .iter()
                .zip(e.rows())
                .map(|(l, row)| (l.clone(), format_combination(row, &self.ambient_labels)))
                .collect(),
        }
    }
}

pub fn format_combination(v: &[BigInt], labels: &[String]) -> String {
    let mut out = String::new();
    for (c, l) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &BigInt::zero();
        let mag = if neg { -c } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format!("{mag}"));
        }
        out.push_str(l);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A named construction of one of the groups attached to a finite field.
pub trait GroupBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn build(&self, field: &BlochField) -> Result<BuiltGroup>;
}

struct Named {
    name: &'static str,
    description: &'static str,
    build: fn(&BlochField) -> Result<BuiltGroup>,
}

impl GroupBuilder for Named {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn build(&self, field: &BlochField) -> Result<BuiltGroup> {
        (self.build)(field)
    }
}

pub fn group_registry() -> Vec<Box<dyn GroupBuilder>> {
    let named = |name, description, build| -> Box<dyn GroupBuilder> { Box::new(Named { name, description, build }) };
    vec![
        named("P", "pre-Bloch group", |f| Ok(BuiltGroup::whole(f.prebloch()))),
        named("B", "kernel of lambda on P", |f| Ok(BuiltGroup::sub(f.bloch_group()?, &f.prebloch()))),
        named("RP", "refined pre-Bloch group (flattened)", |f| Ok(BuiltGroup::whole(f.refined()))),
        named("RPtilde", "RP modulo psi_1", |f| Ok(BuiltGroup::whole(f.rp_tilde()?))),
        named("RP1", "kernel of lambda_1", |f| Ok(BuiltGroup::sub(f.rp1()?, &f.refined()))),
        named("RB", "kernel of (lambda_1, lambda_2)", |f| Ok(BuiltGroup::sub(f.rb()?, &f.refined()))),
        named("RPplus", "RP~ modulo (1 - <-1>)", |f| Ok(BuiltGroup::whole(f.rp_plus()?))),
        named("EplusRPtilde", "image of 1 + <-1> on RP~", |f| Ok(BuiltGroup::sub(f.eplus_rp_tilde()?, &f.rp_tilde()?))),
    ]
}

pub fn find_group(name: &str) -> Option<Box<dyn GroupBuilder>> {
    group_registry().into_iter().find(|g| g.name().eq_ignore_ascii_case(name))
}

#[derive(Debug, Deserialize)]
struct GoldenFile {
    structures: BTreeMap<String, BTreeMap<String, Vec<i64>>>,
}

/// Frozen invariant factor lists (free part first as zeros), keyed by `q`
/// and group name.
pub fn golden_structure(q: u64, group: &str) -> Option<Structure> {
    static GOLDEN: OnceLock<GoldenFile> = OnceLock::new();
    let g = GOLDEN.get_or_init(|| {
        serde_json::from_str(include_str!("../data/golden.json")).expect("golden.json is valid")
    });
    g.structures.get(&q.to_string())?.get(group).map(|f| Structure::from_factors(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmodkit::{check_equivariant, check_well_defined, Hnf};

    fn s(f: &[i64]) -> Structure {
        Structure::from_factors(f)
    }

    #[test]
    fn small_field_special_cases() {
        let f2 = BlochField::new(2).unwrap();
        assert_eq!(f2.prebloch().structure(), s(&[3]));
        assert_eq!(f2.refined().structure(), s(&[3]));
        assert_eq!(f2.bloch_group().unwrap().module.structure(), s(&[3]));
        assert_eq!(f2.rb().unwrap().module.structure(), s(&[3]));
        let f3 = BlochField::new(3).unwrap();
        assert_eq!(f3.prebloch().structure(), s(&[4]));
        let b = f3.bloch_group().unwrap();
        assert_eq!(b.module.structure(), s(&[2]));
        assert!(Hnf::from_matrix(&b.embedding)
            .same_lattice(&Hnf::from_rows(1, [vec![BigInt::from(2)]]).unwrap()));
    }

    #[test]
    fn f3_refined() {
        let f = BlochField::new(3).unwrap();
        let rp = f.refined();
        let m1 = f.field().elem(-1, 0);
        let psi = f.psi1(&m1).unwrap();
        let two_psi: Vec<BigInt> = psi.iter().map(|x| x * 2).collect();
        assert!(rp.element_equal(&two_psi, &rp.zero_vector()).unwrap());
        assert!(!rp.element_equal(&psi, &rp.zero_vector()).unwrap());
        assert_eq!(f.act(&psi, f.minus_one_class()), psi);
        assert_eq!(rp.character_quotient(&[1]).unwrap().structure(), s(&[4]));
    }

    #[test]
    fn unsupported_orders() {
        assert!(BlochField::new(8).is_err());
        assert!(BlochField::new(6).is_err());
        assert!(BlochField::new(131).is_err());
    }

    #[test]
    fn psi2_at_one_is_zero() {
        let f = BlochField::new(5).unwrap();
        assert!(f.psi2(&f.field().one()).unwrap().iter().all(Zero::is_zero));
        assert!(f.psi1(&f.field().one()).is_err());
        assert!(f.c_elem(&f.field().zero()).is_err());
    }

    #[test]
    fn psi_at_minus_one_is_fixed() {
        for q in [5u64, 7, 9, 11] {
            let f = BlochField::new(q).unwrap();
            let rp = f.refined();
            let m1 = f.field().one().neg();
            for psi in [f.psi1(&m1).unwrap(), f.psi2(&m1).unwrap()] {
                let moved = f.act(&psi, f.minus_one_class());
                assert!(rp.element_equal(&moved, &psi).unwrap(), "q={q}");
            }
        }
    }

    #[test]
    fn c_is_constant_for_q5() {
        let f = BlochField::new(5).unwrap();
        let rp = f.refined();
        let c2 = f.c_elem(&f.field().elem(2, 0)).unwrap();
        let c3 = f.c_elem(&f.field().elem(3, 0)).unwrap();
        assert!(rp.element_equal(&c2, &c3).unwrap());
    }

    #[test]
    fn lambda_examples() {
        // lambda_2([2]) in F_5 is log(-1) log(2) γ∘γ = 2 * 1 γ∘γ = 0 in Z/2
        let f = BlochField::new(5).unwrap();
        let dl = DiscreteLog::new(f.field());
        let two = f.field().elem(2, 0);
        let expect = (dl.log(&f.field().elem(-1, 0)).unwrap() * dl.log(&two).unwrap()) % 2;
        let (l2, _) = f.lambda_p();
        assert_eq!(l2.get(f.p_slot(&two), 0), &BigInt::from(expect));
        // lambda_1 vanishes when x and 1 - x are both squares
        for q in [5u64, 7, 9, 11, 13] {
            let f = BlochField::new(q).unwrap();
            let (l1, _) = f.lambda1().unwrap();
            let one = f.field().one();
            for x in f.p_elements() {
                if x.is_square().unwrap() && one.sub(&x).is_square().unwrap() {
                    assert!(l1.row(f.r_slot(&x) * 2).iter().all(Zero::is_zero));
                }
            }
        }
    }

    #[test]
    fn lambda_maps_are_well_defined_and_equivariant() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13].into_iter().filter(|&q| q != 8) {
            let f = BlochField::new(q).unwrap();
            let rp = f.refined();
            let (l1, t1) = f.lambda1().unwrap();
            let (l2, t2) = f.lambda2();
            check_well_defined(&l1, &rp, &t1).unwrap();
            check_well_defined(&l2, &rp, &t2).unwrap();
            if f.k() == 1 {
                check_equivariant(&l1, &rp, &t1).unwrap();
                check_equivariant(&l2, &rp, &t2).unwrap();
            }
            let (l, t) = f.lambda_p();
            check_well_defined(&l, &f.prebloch(), &t).unwrap();
        }
    }

    #[test]
    fn lambda1_on_psi2_multiples() {
        // lambda_1 commutes with the action on every multiple of psi_2(x);
        // the image itself vanishes exactly when -1 is not a square.
        for q in [5u64, 7, 9, 11, 13] {
            let f = BlochField::new(q).unwrap();
            let (l1, t1) = f.lambda1().unwrap();
            let mut all_zero = true;
            for x in f.field().elements().skip(1) {
                let psi = f.psi2(&x).unwrap();
                let img = l1.apply_row(&psi).unwrap();
                let moved = l1.apply_row(&f.act(&psi, 1)).unwrap();
                assert!(t1.element_equal(&moved, &t1.act(0, &img)).unwrap(), "q={q} x={x}");
                all_zero &= t1.element_equal(&img, &t1.zero_vector()).unwrap();
            }
            assert_eq!(all_zero, q % 4 == 3, "q={q}");
        }
    }

    #[test]
    fn coinvariants_recover_prebloch() {
        for q in [2u64, 3, 4, 5, 7, 9, 11, 13] {
            let f = BlochField::new(q).unwrap();
            let rp = f.refined();
            let co = if f.k() == 0 { rp } else { rp.character_quotient(&[1]).unwrap() };
            assert_eq!(co.structure(), f.prebloch().structure(), "q={q}");
        }
    }

    #[test]
    fn c_is_constant() {
        for q in [4u64, 5, 7, 9, 11, 13] {
            let f = BlochField::new(q).unwrap();
            let prep = f.refined().prepare();
            let c = f.rp_c().unwrap();
            for x in f.p_elements() {
                assert!(prep.equal(&f.c_elem(&x).unwrap(), &c).unwrap(), "q={q} x={x}");
            }
        }
    }

    #[test]
    fn odd_parts() {
        for q in [4u64, 5, 7, 9, 11, 13] {
            let f = BlochField::new(q).unwrap();
            let rb = f.rb().unwrap().module.structure();
            assert!(rb.odd_part().is_cyclic(), "q={q}");
            assert_eq!(rb, f.rb_via_rp1().unwrap().module.structure(), "q={q}");
            if q % 2 == 1 {
                let rp1 = f.rp1().unwrap().module.odd_part();
                assert_eq!(rp1, f.eplus_rp_tilde().unwrap().module.odd_part(), "q={q}");
            }
        }
    }

    #[test]
    fn golden_values() {
        let names = ["P", "B", "RP", "RPtilde", "RP1", "RB", "RPplus", "EplusRPtilde"];
        let mut seen = 0;
        for q in [2u64, 3, 4, 5, 7, 9, 11, 13] {
            let f = BlochField::new(q).unwrap();
            for name in names {
                let Some(expect) = golden_structure(q, name) else { continue };
                let built = find_group(name).unwrap().build(&f).unwrap();
                assert_eq!(built.module.structure(), expect, "q={q} {name}");
                seen += 1;
            }
        }
        assert_eq!(seen, 64);
    }

    #[test]
    fn registry_names_are_unique() {
        let names: Vec<&str> = group_registry().iter().map(|g| g.name()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert!(find_group("rb").is_some());
        assert!(find_group("nope").is_none());
    }

    #[test]
    fn generator_dictionary_format() {
        let labels = vec!["[2]".to_string(), "<g1>[2]".to_string()];
        assert_eq!(format_combination(&[BigInt::from(1), BigInt::from(-2)], &labels), "[2] - 2<g1>[2]");
        assert_eq!(format_combination(&[BigInt::zero(), BigInt::zero()], &labels), "0");
    }
}
