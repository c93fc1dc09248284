//! The specialization `S_v` from symbols over `F` to `P(k(v))`, and the
//! local factors `P(k(v_p)){p}` seen through a character.

use num_bigint::BigInt;

use crate::bloch::BlochField;
use crate::characters::{unit_generator, Character};
use crate::error::{domain, Result};
use crate::quad_field::{FieldElem, ProjPoint, Valuation};
use crate::quad_ring::QuadInt;
use crate::zmodkit::{ElementVec, FPModule, PreparedModule, SignedPerm};

/// `S_v` into a fixed presentation of `P(k(v))`.
#[derive(Clone, Debug)]
pub struct Specializer {
    v: Valuation,
    bloch: BlochField,
    target: FPModule,
    prepared: PreparedModule,
}

impl Specializer {
    pub fn new(v: &Valuation) -> Result<Self> {
        let bloch = BlochField::with_field(v.residue_field())?;
        let target = bloch.prebloch();
        let prepared = target.prepare();
        Ok(Specializer { v: v.clone(), bloch, target, prepared })
    }

    pub fn valuation(&self) -> &Valuation {
        &self.v
    }

    pub fn bloch(&self) -> &BlochField {
        &self.bloch
    }

    pub fn target(&self) -> &FPModule {
        &self.target
    }

    fn c(&self, sign: i64) -> ElementVec {
        self.bloch.p_c().into_iter().map(|x| x * sign).collect()
    }

    pub fn specialize(&self, x: &ProjPoint) -> Result<ElementVec> {
        match x {
            ProjPoint::Infinity => Ok(self.c(-1)),
            ProjPoint::Finite(a) if a.is_zero() => Ok(self.c(1)),
            ProjPoint::Finite(a) => match self.v.valuation_of(a)? {
                0 => self.bloch.p_symbol(&self.v.reduce_mod(a)?),
                e if e > 0 => Ok(self.c(1)),
                _ => Ok(self.c(-1)),
            },
        }
    }

    /// `(-1)^{v(a)}`.
    pub fn twist(&self, a: &FieldElem) -> Result<i64> {
        Ok(if self.v.valuation_of(a)? % 2 == 0 { 1 } else { -1 })
    }

    /// Image of the relation `S_{x,y}` with `<a>` acting as `(-1)^{v(a)}`.
    pub fn fiveterm_image(&self, x: &FieldElem, y: &FieldElem) -> Result<ElementVec> {
        let ring = x.ring();
        let one = FieldElem::from_i64(ring, 1);
        if x.is_zero() || y.is_zero() || x.is_one() || y.is_one() || x == y {
            return domain(format!("the relation needs x, y outside 0 and 1 with x != y, got {x}, {y}"));
        }
        let xi = x.inv()?;
        let yi = y.inv()?;
        let terms: [(i64, FieldElem, FieldElem); 5] = [
            (1, one.clone(), x.clone()),
            (-1, one.clone(), y.clone()),
            (1, x.clone(), y.div(x)?),
            (-1, xi.sub(&one), xi.one_minus().div(&yi.one_minus())?),
            (1, x.one_minus(), x.one_minus().div(&y.one_minus())?),
        ];
        let mut out = self.target.zero_vector();
        for (sign, a, z) in terms {
            let s = sign * self.twist(&a)?;
            for (o, v) in out.iter_mut().zip(self.specialize(&ProjPoint::Finite(z))?) {
                *o += v * s;
            }
        }
        Ok(out)
    }

    /// Whether the image vanishes in `P(k)[1/2]`.
    pub fn fiveterm_specializes(&self, x: &FieldElem, y: &FieldElem) -> Result<bool> {
        self.prepared.is_zero_odd(&self.fiveterm_image(x, y)?)
    }

    /// Whether the image vanishes in `P(k)` itself.
    pub fn fiveterm_specializes_integral(&self, x: &FieldElem, y: &FieldElem) -> Result<bool> {
        self.prepared.is_zero(&self.fiveterm_image(x, y)?)
    }

    /// For each generator of `P(k)`, an element of `F` specializing to it:
    /// a valuation-0 lift `c0 + c1 w` of the residue for `[z]`, and a
    /// uniformizer for the generator `C` of `P(F_2)`.
    pub fn generator_lifts(&self) -> Result<Vec<(String, FieldElem)>> {
        let ring = self.v.ring();
        let labels = self.target.labels();
        if self.bloch.q() == 2 {
            return Ok(vec![(labels[0].clone(), FieldElem::integral(self.v.prime().clone()))]);
        }
        let p = self.v.residue_char() as i64;
        let mut out = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            let want = self.target.basis_vector(i);
            let mut found = None;
            'search: for c0 in 0..p {
                for c1 in 0..p {
                    let x = FieldElem::integral(QuadInt::new(ring, c0, c1));
                    if x.is_zero() || self.v.valuation_of(&x)? != 0 {
                        continue;
                    }
                    if self.specialize(&ProjPoint::Finite(x.clone()))? == want {
                        found = Some(x);
                        break 'search;
                    }
                }
            }
            match found {
                Some(x) => out.push((label.clone(), x)),
                None => return domain(format!("no lift of generator {label} at {}", self.v)),
            }
        }
        Ok(out)
    }
}

pub fn specialize(x: &ProjPoint, v: &Valuation) -> Result<ElementVec> {
    Specializer::new(v)?.specialize(x)
}

pub fn fiveterm_specializes(x: &FieldElem, y: &FieldElem, v: &Valuation) -> Result<bool> {
    Specializer::new(v)?.fiveterm_specializes(x, y)
}

/// `P(k(v_p)){p}` with involutions for `<p>`, the unit generator, and the
/// other primes in the support of `chi`, together with the values of `chi`
/// on them.
pub fn local_factor(v: &Valuation, chi: &Character) -> Result<(FPModule, Vec<i8>)> {
    local_factor_over(&BlochField::with_field(v.residue_field())?.prebloch(), v, chi)
}

/// As [`local_factor`], reusing a presentation `base` of `P(k(v))`.
pub fn local_factor_over(base: &FPModule, v: &Valuation, chi: &Character) -> Result<(FPModule, Vec<i8>)> {
    let ring = v.ring();
    let p = v.prime();
    let n = base.ngens();
    let mut action = vec![SignedPerm::negation(n), SignedPerm::identity(n)];
    let mut signs = vec![chi.eval(&FieldElem::integral(p.clone()))?, chi.eval(&FieldElem::integral(unit_generator(ring)))?];
    for q in chi.support().iter().filter(|q| *q != p) {
        action.push(SignedPerm::identity(n));
        signs.push(chi.eval(&FieldElem::integral(q.clone()))?);
    }
    let m = FPModule::new(base.labels().to_vec(), base.relations().clone(), action)?;
    Ok((m, signs))
}

/// `(P(k(v_p)){p})_chi`.
pub fn local_quotient(v: &Valuation, chi: &Character) -> Result<FPModule> {
    let (m, signs) = local_factor(v, chi)?;
    m.character_quotient(&signs)
}

pub fn local_quotient_over(base: &FPModule, v: &Valuation, chi: &Character) -> Result<FPModule> {
    let (m, signs) = local_factor_over(base, v, chi)?;
    m.character_quotient(&signs)
}

/// Sum of `[x]` over an element vector, for display.
pub fn describe(s: &Specializer, v: &[BigInt]) -> String {
    crate::bloch::format_combination(v, s.target().labels())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_field::parse_field_elem;
    use crate::quad_ring::RingDesc;

    fn ring(m: i64) -> RingDesc {
        RingDesc::new(m).unwrap()
    }

    fn val(m: i64, s: &str) -> Valuation {
        Valuation::new(&crate::quad_ring::parse_quad(ring(m), s).unwrap()).unwrap()
    }

    fn pt(m: i64, s: &str) -> ProjPoint {
        ProjPoint::parse(ring(m), s).unwrap()
    }

    #[test]
    fn specialize_examples() {
        let v3 = val(1, "3");
        let s = Specializer::new(&v3).unwrap();
        assert_eq!(s.bloch().q(), 9);
        let c = s.bloch().p_c();
        assert_eq!(s.specialize(&pt(1, "3")).unwrap(), c);
        let minus: Vec<BigInt> = c.iter().map(|x| -x).collect();
        assert_eq!(s.specialize(&pt(1, "1/3")).unwrap(), minus);
        assert_eq!(s.specialize(&pt(1, "0")).unwrap(), c);
        assert_eq!(s.specialize(&pt(1, "inf")).unwrap(), minus);
        assert!(s.specialize(&pt(1, "1")).unwrap().iter().all(|x| x == &BigInt::from(0)));

        let v = val(1, "2+1*w");
        let s = Specializer::new(&v).unwrap();
        let w = parse_field_elem(ring(1), "1*w").unwrap();
        let cbar = v.reduce_mod(&w).unwrap();
        assert_eq!(s.specialize(&ProjPoint::Finite(w)).unwrap(), s.bloch().p_symbol(&cbar).unwrap());
    }

    #[test]
    fn fiveterm_examples() {
        let v = val(2, "3+1*w");
        let s = Specializer::new(&v).unwrap();
        let f = |t: &str| parse_field_elem(ring(2), t).unwrap();
        assert!(s.fiveterm_specializes(&f("2"), &f("3")).unwrap());
        assert!(s.fiveterm_specializes(&f("3+1*w"), &f("2")).unwrap());
        assert!(s.fiveterm_specializes(&f("2/3+1*w"), &f("5+1*w/7")).unwrap());
        assert!(s.fiveterm_image(&f("2"), &f("2")).is_err());
        // the relation only holds after inverting 2
        let (x, y) = (f("3+1*w"), f("2"));
        assert!(!s.fiveterm_specializes_integral(&x, &y).unwrap());
        let img = s.fiveterm_image(&x, &y).unwrap();
        let twice: Vec<BigInt> = img.iter().map(|c| c * 4).collect();
        assert!(s.target().element_equal(&twice, &s.target().zero_vector()).unwrap());
    }

    #[test]
    fn lifts_cover_generators() {
        for (m, p) in [(1, "3"), (1, "1+1*w"), (3, "2"), (7, "1*w"), (11, "1*w")] {
            let s = Specializer::new(&val(m, p)).unwrap();
            let lifts = s.generator_lifts().unwrap();
            assert_eq!(lifts.len(), s.target().ngens());
        }
    }

    #[test]
    fn local_factor_at_characters() {
        let v = val(2, "3+1*w");
        let p = v.prime().clone();
        let r = ring(2);
        let odd = Specializer::new(&v).unwrap().target().odd_part();
        assert!(local_quotient(&v, &Character::trivial(r)).unwrap().odd_part().is_trivial());
        assert!(local_quotient(&v, &Character::new(r, vec![], -1).unwrap()).unwrap().odd_part().is_trivial());
        assert_eq!(local_quotient(&v, &Character::new(r, vec![p], 1).unwrap()).unwrap().odd_part(), odd);
        let other = Character::parse(r, "3+1*w,5", 1).unwrap();
        assert!(local_quotient(&v, &other).unwrap().odd_part().is_trivial());
    }
}
