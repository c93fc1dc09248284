//! Modules over `Z[G]` for `G = (Z/2)^k`, their flattening to abelian
//! groups, and the local-global test over characters of `G`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use super::matrix::IntMatrix;
use super::module::{check_equivariant, map_cokernel, map_kernel, FPModule, SignedPerm};
use crate::error::{Error, Result};

/// An element of `Z[G]`: coefficient of group element `g` (a bitmask) at index `g`.
pub type GroupRingElem = Vec<BigInt>;

pub fn gr_zero(k: usize) -> GroupRingElem {
    vec![BigInt::zero(); 1 << k]
}

pub fn gr_basis(k: usize, g: usize) -> GroupRingElem {
    let mut e = gr_zero(k);
    e[g] = 1.into();
    e
}

pub fn gr_mul(a: &[BigInt], b: &[BigInt]) -> GroupRingElem {
    let mut out = vec![BigInt::zero(); a.len()];
    for (g, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (h, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[g ^ h] += x * y;
            }
        }
    }
    out
}

/// Value of a group ring element at the character with the given signs.
pub fn gr_eval(a: &[BigInt], signs: &[i8]) -> BigInt {
    a.iter()
        .enumerate()
        .map(|(g, x)| {
            let neg = signs.iter().enumerate().filter(|(i, &s)| s < 0 && g >> i & 1 == 1).count();
            if neg % 2 == 1 {
                -x
            } else {
                x.clone()
            }
        })
        .sum()
}

/// Relations are rows of group ring elements, one per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingPresentation {
    k: usize,
    labels: Vec<String>,
    relations: Vec<Vec<GroupRingElem>>,
}

pub fn group_label(g: usize, k: usize) -> String {
    if g == 0 {
        return String::new();
    }
    let bits: Vec<String> = (0..k).filter(|i| g >> i & 1 == 1).map(|i| format!("g{}", i + 1)).collect();
    format!("<{}>", bits.join(""))
}

impl GroupRingPresentation {
    pub fn new(k: usize, labels: Vec<String>) -> Self {
        GroupRingPresentation { k, labels, relations: vec![] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ngens(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn relations(&self) -> &[Vec<GroupRingElem>] {
        &self.relations
    }

    pub fn add_relation(&mut self, rel: Vec<GroupRingElem>) -> Result<()> {
        if rel.len() != self.ngens() || rel.iter().any(|c| c.len() != 1 << self.k) {
            return Err(Error::Dimension("relation does not match the presentation".into()));
        }
        self.relations.push(rel);
        Ok(())
    }

    /// Flattened generator index of `g * x`.
    pub fn flat_index(&self, gen: usize, g: usize) -> usize {
        gen * (1 << self.k) + g
    }

    /// Coefficient vector of a `Z[G]`-combination in the flattened module.
    pub fn flatten_element(&self, elem: &[GroupRingElem]) -> Vec<BigInt> {
        let size = 1 << self.k;
        let mut v = vec![BigInt::zero(); self.ngens() * size];
        for (x, c) in elem.iter().enumerate() {
            for (g, a) in c.iter().enumerate() {
                v[x * size + g] += a;
            }
        }
        v
    }

    /// The underlying abelian group on generators `g * x`, with `G` permuting them.
    pub fn flatten(&self) -> FPModule {
        let size = 1 << self.k;
        let n = self.ngens() * size;
        let mut labels = Vec::with_capacity(n);
        for l in &self.labels {
            for g in 0..size {
                labels.push(format!("{}{}", group_label(g, self.k), l));
            }
        }
        let mut rel = IntMatrix::zeros(0, n);
        for r in &self.relations {
            for h in 0..size {
                let shifted: Vec<GroupRingElem> = r.iter().map(|c| gr_mul(&gr_basis(self.k, h), c)).collect();
                rel.push_row(self.flatten_element(&shifted)).expect("width n");
            }
        }
        let action = (0..self.k)
            .map(|i| {
                let images = (0..n).map(|idx| ((idx / size) * size + ((idx % size) ^ (1 << i)), 1)).collect();
                SignedPerm::new(images).expect("xor is a permutation")
            })
            .collect();
        FPModule::new_unchecked(labels, rel, action)
    }

    /// `M_chi` computed directly: substitute the character into every coefficient.
    pub fn at_character(&self, signs: &[i8]) -> Result<FPModule> {
        if signs.len() != self.k {
            return Err(Error::Dimension(format!("{} signs for {} involutions", signs.len(), self.k)));
        }
        let rows = self.relations.iter().map(|r| r.iter().map(|c| gr_eval(c, signs)).collect());
        let rel = IntMatrix::from_rows(self.ngens(), rows)?;
        Ok(FPModule::new_unchecked(self.labels.clone(), rel, vec![]))
    }
}

/// A `Z[G]`-linear map given by group ring entries, source generator by
/// target generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingMap {
    pub k: usize,
    pub entries: Vec<Vec<GroupRingElem>>,
}

impl GroupRingMap {
    pub fn apply(&self, elem: &[GroupRingElem]) -> Vec<GroupRingElem> {
        let cols = self.entries.first().map_or(0, |r| r.len());
        let mut out = vec![gr_zero(self.k); cols];
        for (x, c) in elem.iter().enumerate() {
            for (y, phi) in self.entries[x].iter().enumerate() {
                let t = gr_mul(c, phi);
                for (o, v) in out[y].iter_mut().zip(t) {
                    *o += v;
                }
            }
        }
        out
    }

    pub fn flatten(&self) -> IntMatrix {
        let size = 1 << self.k;
        let rows = self.entries.len();
        let cols = self.entries.first().map_or(0, |r| r.len());
        let mut m = IntMatrix::zeros(rows * size, cols * size);
        for x in 0..rows {
            for g in 0..size {
                for (y, phi) in self.entries[x].iter().enumerate() {
                    for (h, c) in phi.iter().enumerate() {
                        if !c.is_zero() {
                            let j = y * size + (g ^ h);
                            let cur = m.get(x * size + g, j) + c;
                            m.set(x * size + g, j, cur);
                        }
                    }
                }
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub injective: bool,
    pub surjective: bool,
}

impl Verdict {
    pub fn bijective(&self) -> bool {
        self.injective && self.surjective
    }

    fn of(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<Verdict> {
        let ker = map_kernel(f, m, n)?;
        let coker = map_cokernel(f, m, n)?;
        Ok(Verdict {
            injective: ker.module.odd_part().is_trivial(),
            surjective: coker.odd_part().is_trivial(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalGlobalReport {
    pub direct: Verdict,
    pub via_characters: Verdict,
    pub per_character: Vec<(Vec<i8>, Verdict)>,
}

impl LocalGlobalReport {
    pub fn agree(&self) -> bool {
        self.direct == self.via_characters
    }
}

pub fn all_sign_vectors(k: usize) -> Vec<Vec<i8>> {
    (0..1usize << k).map(|mask| (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

/// Decide injectivity and surjectivity of `f[1/2]` directly and through
/// every character quotient.
pub fn local_global_check(f: &IntMatrix, m: &FPModule, n: &FPModule) -> Result<LocalGlobalReport> {
    check_equivariant(f, m, n)?;
    let direct = Verdict::of(f, &m.underlying(), &n.underlying())?;
    let mut per_character = Vec::new();
    let mut via = Verdict { injective: true, surjective: true };
    for signs in all_sign_vectors(m.k()) {
        let v = Verdict::of(f, &m.character_quotient(&signs)?, &n.character_quotient(&signs)?)?;
        via.injective &= v.injective;
        via.surjective &= v.surjective;
        per_character.push((signs, v));
    }
    Ok(LocalGlobalReport { direct, via_characters: via, per_character })
}

/// A random `Z[G]`-linear map between random finitely presented modules.
#[derive(Clone, Debug)]
pub struct RandomEquivariant {
    pub source: GroupRingPresentation,
    pub target: GroupRingPresentation,
    pub map: GroupRingMap,
}

impl RandomEquivariant {
    pub fn generate<R: Rng>(k: usize, rng: &mut R) -> Self {
        let rand_elem = |rng: &mut R, bound: i64, density: f64| -> GroupRingElem {
            (0..1usize << k)
                .map(|_| if rng.gen_bool(density) { BigInt::from(rng.gen_range(-bound..=bound)) } else { BigInt::zero() })
                .collect()
        };
        let nm = rng.gen_range(1..=3);
        let nn = rng.gen_range(1..=3);
        let mut source = GroupRingPresentation::new(k, (0..nm).map(|i| format!("x{i}")).collect());
        for _ in 0..rng.gen_range(0..=2) {
            let r = (0..nm).map(|_| rand_elem(rng, 3, 0.6)).collect();
            source.add_relation(r).expect("sized");
        }
        let map = match rng.gen_range(0..3) {
            // scalar-like maps that often become isomorphisms after inverting 2
            0 if nm == nn => GroupRingMap {
                k,
                entries: (0..nm)
                    .map(|x| {
                        (0..nn)
                            .map(|y| {
                                let mut e = gr_zero(k);
                                if x == y {
                                    e[0] = BigInt::from([1i64, 2, -1, 4][rng.gen_range(0..4)]);
                                    if rng.gen_bool(0.5) {
                                        e[rng.gen_range(0..1usize << k)] += BigInt::from(rng.gen_range(-1..=1) * 2);
                                    }
                                }
                                e
                            })
                            .collect()
                    })
                    .collect(),
            },
            _ => GroupRingMap { k, entries: (0..nm).map(|_| (0..nn).map(|_| rand_elem(rng, 2, 0.5)).collect()).collect() },
        };
        let mut target = GroupRingPresentation::new(k, (0..nn).map(|i| format!("y{i}")).collect());
        for r in &source.relations {
            target.add_relation(map.apply(r)).expect("sized");
        }
        for _ in 0..rng.gen_range(0..=1) {
            let r = (0..nn).map(|_| rand_elem(rng, 3, 0.5)).collect();
            target.add_relation(r).expect("sized");
        }
        RandomEquivariant { source, target, map }
    }

    pub fn check(&self) -> Result<LocalGlobalReport> {
        local_global_check(&self.map.flatten(), &self.source.flatten(), &self.target.flatten())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmodkit::module::Structure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn free(k: usize, n: usize) -> GroupRingPresentation {
        GroupRingPresentation::new(k, (0..n).map(|i| format!("x{i}")).collect())
    }

    #[test]
    fn flatten_examples() {
        let m = free(1, 1).flatten();
        assert_eq!(m.ngens(), 2);
        assert_eq!(m.structure(), Structure::from_factors(&[0, 0]));
        assert_eq!(m.labels(), &["x0".to_string(), "<g1>x0".to_string()]);
        let mut p = free(2, 1);
        p.add_relation(vec![vec![1.into(), 1.into(), 0.into(), 0.into()]]).unwrap();
        let f = p.flatten();
        assert_eq!(f.ngens(), 4);
        assert_eq!(f.structure(), Structure::from_factors(&[0, 0]));
        // the action permutes and the relation lattice is stable
        FPModule::new(f.labels().to_vec(), f.relations().clone(), f.action().to_vec()).unwrap();
    }

    #[test]
    fn identity_and_doubling() {
        let m = free(1, 1);
        let id = GroupRingMap { k: 1, entries: vec![vec![gr_basis(1, 0)]] };
        let rep = local_global_check(&id.flatten(), &m.flatten(), &m.flatten()).unwrap();
        assert!(rep.direct.bijective() && rep.via_characters.bijective());
        let two = GroupRingMap { k: 1, entries: vec![vec![vec![2.into(), 0.into()]]] };
        let rep = local_global_check(&two.flatten(), &m.flatten(), &m.flatten()).unwrap();
        assert!(rep.direct.bijective() && rep.via_characters.bijective());
        // 1 + g is not bijective after inverting 2: it kills the sign part
        let norm = GroupRingMap { k: 1, entries: vec![vec![vec![1.into(), 1.into()]]] };
        let rep = local_global_check(&norm.flatten(), &m.flatten(), &m.flatten()).unwrap();
        assert!(!rep.direct.injective && !rep.via_characters.injective);
        assert!(rep.agree());
    }

    #[test]
    fn non_equivariant_rejected() {
        let m = free(1, 1).flatten();
        let f = IntMatrix::from_i64(&[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(matches!(local_global_check(&f, &m, &m), Err(Error::NotEquivariant { involution: 0 })));
    }

    #[test]
    fn direct_character_quotient_matches_flattened() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let k = rng.gen_range(1..=2);
            let r = RandomEquivariant::generate(k, &mut rng);
            let flat = r.target.flatten();
            for signs in all_sign_vectors(k) {
                assert_eq!(
                    flat.character_quotient(&signs).unwrap().structure(),
                    r.target.at_character(&signs).unwrap().structure()
                );
            }
        }
    }

    #[test]
    fn random_maps_three_generators_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut bij = 0;
        for _ in 0..60 {
            let r = RandomEquivariant::generate(rng.gen_range(1..=2), &mut rng);
            let rep = r.check().unwrap();
            assert!(rep.agree(), "{rep:?}");
            bij += rep.direct.bijective() as usize;
        }
        assert!(bij > 0, "the generator should produce some isomorphisms");
    }
}
