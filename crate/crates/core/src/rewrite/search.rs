//! Certificate search: enabled moves for a character, shifts by elements
//! of `O_F`, and the Euclidean reduction of `[x]_chi` to zero.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::characters::{Character, CharacterClass};
use crate::error::{Error, Result};
use crate::quad_field::{FieldElem, ProjPoint};
use crate::quad_ring::{QuadInt, RingDesc};
use crate::zmodkit::{snf, IntMatrix};

use super::certificate::{apply_move, Certificate, Claim, Move, MoveKind, Term};
use super::lattice::{coords, lattice_sum, move_lattice, CoveringMode, ShiftLattice};

pub const DEFAULT_BUDGET: usize = 100_000;

/// Value of `chi` on a base element, telling which of the two cases of the
/// search applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaCase {
    /// `chi(w) = 1`: bases `p, q, w p, w q`.
    Even,
    /// `chi(w) = -1`: bases `p, q, w`.
    Odd,
}

impl OmegaCase {
    pub fn mode(self) -> CoveringMode {
        match self {
            OmegaCase::Even => CoveringMode::FourTerm,
            OmegaCase::Odd => CoveringMode::ThreeTerm,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub ell: FieldElem,
    pub chi_ell: i8,
    pub chi_one_minus_ell: i8,
    /// The move this candidate enables, if any.
    pub kind: Option<MoveKind>,
}

/// A shift generator: `l = b` or `l = 1/b`, with `chi(l) = -1` and
/// `chi(1 - l) = 1`, acting through the integral lattice `bZ[b]`.
#[derive(Clone, Debug)]
pub struct ShiftGen {
    pub base: QuadInt,
    pub ell: FieldElem,
    pub inverted: bool,
    pub lattice: ShiftLattice,
}

#[derive(Clone, Debug)]
pub struct MovePlan {
    pub chi: Character,
    pub case: OmegaCase,
    pub candidates: Vec<Candidate>,
    pub shifts: Vec<ShiftGen>,
}

pub fn tag(chi_ell: i8, chi_one_minus_ell: i8) -> Option<MoveKind> {
    match (chi_ell, chi_one_minus_ell) {
        (-1, 1) => Some(MoveKind::PowerScale),
        (1, -1) => Some(MoveKind::ScaleByEll),
        (-1, -1) => Some(MoveKind::ScaleByOneMinusInvEll),
        _ => None,
    }
}

/// Reject characters outside the reach of the shift argument.
pub fn check_supported(chi: &Character) -> Result<Vec<QuadInt>> {
    match chi.classify() {
        CharacterClass::MultiPrime(s) => Ok(s),
        CharacterClass::Trivial => Err(Error::UnsupportedCharacter(
            "the trivial character: shifting needs two primes in the support".into(),
        )),
        CharacterClass::SinglePrime(p) => Err(Error::UnsupportedCharacter(format!(
            "chi is chi_p for p = {p}; this component is the residue field factor P(k(v_p))"
        ))),
        CharacterClass::UnitNegative if chi.ring().m() == 1 => Err(Error::UnsupportedCharacter(
            "characters nontrivial on units are only handled through unit coinvariants for m = 1".into(),
        )),
        CharacterClass::UnitNegative => Err(Error::UnsupportedCharacter(
            "chi is -1 on a unit, which acts trivially; the component vanishes by a sign clash instead".into(),
        )),
    }
}

pub fn find_moves(chi: &Character) -> Result<MovePlan> {
    let support = check_supported(chi)?;
    let ring = chi.ring();
    if chi.at_minus_one() != 1 {
        return Err(Error::UnsupportedCharacter("chi(-1) = -1".into()));
    }
    let (p, q) = (&support[0], &support[1]);
    let w = ring.omega();
    let case = if chi.eval(&FieldElem::integral(w.clone()))? == 1 { OmegaCase::Even } else { OmegaCase::Odd };
    let bases = case.mode().bases(p, q);
    let mut candidates = Vec::new();
    let mut shifts = Vec::new();
    for b in bases {
        let fb = FieldElem::integral(b.clone());
        let mut chosen = None;
        for (inverted, ell) in [(false, fb.clone()), (true, fb.inv()?)] {
            let (ce, cm) = (chi.eval(&ell)?, chi.eval(&ell.one_minus())?);
            let kind = tag(ce, cm);
            if kind == Some(MoveKind::PowerScale) && chosen.is_none() {
                chosen = Some((inverted, ell.clone()));
            }
            candidates.push(Candidate { ell, chi_ell: ce, chi_one_minus_ell: cm, kind });
        }
        match chosen {
            Some((inverted, ell)) => {
                let lattice = move_lattice(&ell)?;
                shifts.push(ShiftGen { base: b, ell, inverted, lattice });
            }
            None => {
                return Err(Error::NoCovering(format!("no enabled l among {b} and its inverse for {chi}")));
            }
        }
    }
    Ok(MovePlan { chi: chi.clone(), case, candidates, shifts })
}

/// `t = b1 l + b2 l^2` on one shift generator.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Piece {
    gen: usize,
    b1: BigInt,
    b2: BigInt,
}

/// Splits elements of `O_F` over the shift lattices of a plan.
#[derive(Clone, Debug)]
pub struct Shifter {
    plan: MovePlan,
    /// Lattice coefficients representing `1` and `w`.
    unit_rep: [Vec<BigInt>; 2],
    /// `(generator, spanning-set index)` of each coefficient.
    slots: Vec<(usize, usize)>,
}

impl Shifter {
    pub fn new(chi: &Character) -> Result<Self> {
        Self::from_plan(find_moves(chi)?)
    }

    pub fn from_plan(plan: MovePlan) -> Result<Self> {
        let ring = plan.chi.ring();
        let mut rows = Vec::new();
        let mut slots = Vec::new();
        for (g, s) in plan.shifts.iter().enumerate() {
            for (j, v) in s.lattice.spanning_set().iter().enumerate() {
                rows.push(coords(v));
                slots.push((g, j));
            }
        }
        let sum = lattice_sum(plan.shifts.iter().map(|s| &s.lattice));
        if !(sum.rank() == 2 && sum.basis()[0][0].is_one() && sum.basis()[1][1].is_one()) {
            return Err(Error::NoCovering(format!("the enabled lattices for {} do not cover O_F", plan.chi)));
        }
        let one = match rational_rep(&plan, &slots) {
            Some(rep) => rep,
            None => solve(&rows, &coords(&ring.one()))?,
        };
        let w = solve(&rows, &coords(&ring.omega()))?;
        Ok(Shifter { plan, unit_rep: [one, w], slots })
    }

    pub fn plan(&self) -> &MovePlan {
        &self.plan
    }

    fn pieces(&self, t: &QuadInt) -> Vec<Piece> {
        let n = self.plan.shifts.len();
        let mut c: Vec<[BigInt; 2]> = vec![[BigInt::zero(), BigInt::zero()]; n];
        for (k, &(g, j)) in self.slots.iter().enumerate() {
            c[g][j] = t.re() * &self.unit_rep[0][k] + t.im() * &self.unit_rep[1][k];
        }
        let mut out = Vec::new();
        for (g, s) in self.plan.shifts.iter().enumerate() {
            let (b1, b2) = to_powers(s, &c[g]);
            if !(b1.is_zero() && b2.is_zero()) {
                out.push(Piece { gen: g, b1, b2 });
            }
        }
        out
    }

    fn emit(&self, a: &FieldElem, piece: &Piece) -> Result<Option<(Vec<Move>, FieldElem)>> {
        let chi = &self.plan.chi;
        let ell = &self.plan.shifts[piece.gen].ell;
        let mut moves = Vec::new();
        if piece.b2.is_zero() {
            moves.push(Move::shift_step(ell, piece.b1.clone(), chi)?);
        } else {
            moves.push(Move::power_scale(ell, -1, chi)?);
            moves.push(Move::shift_step(ell, -&piece.b2, chi)?);
            moves.push(Move::power_scale(ell, 1, chi)?);
            let c1 = &piece.b1 + &piece.b2;
            if !c1.is_zero() {
                moves.push(Move::shift_step(ell, c1, chi)?);
            }
        }
        let mut terms: Vec<Term> = vec![(1, ProjPoint::Finite(a.clone()))];
        for mv in &moves {
            if apply_move(chi, mv, &mut terms).is_err() {
                return Ok(None);
            }
        }
        match terms.pop() {
            Some((1, ProjPoint::Finite(b))) => Ok(Some((moves, b))),
            _ => Ok(None),
        }
    }

    fn emit_all(&self, a: &FieldElem, pieces: &[Piece]) -> Result<Option<Vec<Move>>> {
        let mut cur = a.clone();
        let mut out = Vec::new();
        for p in pieces {
            match self.emit(&cur, p)? {
                Some((mv, next)) => {
                    out.extend(mv);
                    cur = next;
                }
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// Moves taking `[a]` to `[a + t]`, for `a` and `a + t` nonzero.
    pub fn shift_moves(&self, a: &FieldElem, t: &QuadInt) -> Result<Vec<Move>> {
        if t.is_zero() {
            return Ok(vec![]);
        }
        if a.is_zero() || a.add(&FieldElem::integral(t.clone())).is_zero() {
            return Err(Error::Domain(format!("shift from {a} by {t} meets zero")));
        }
        let pieces = self.pieces(t);
        for order in permutations(pieces.len()) {
            let p: Vec<Piece> = order.iter().map(|&i| pieces[i].clone()).collect();
            if let Some(mv) = self.emit_all(a, &p)? {
                return Ok(mv);
            }
        }
        // a partial sum hits zero: split off a small shift along the first piece
        for d in (1..=16i64).flat_map(|d| [d, -d]) {
            let d = BigInt::from(d);
            let mut p = pieces.clone();
            p[0].b1 -= &d;
            let extra = Piece { gen: p[0].gen, b1: d, b2: BigInt::zero() };
            p.insert(0, extra);
            if let Some(mv) = self.emit_all(a, &p)? {
                return Ok(mv);
            }
        }
        Err(Error::Domain(format!("every ordering of the shift from {a} by {t} meets zero")))
    }
}

/// `1 = u p + v q` by extended gcd when two bases are rational.
fn rational_rep(plan: &MovePlan, slots: &[(usize, usize)]) -> Option<Vec<BigInt>> {
    let rational: Vec<usize> = plan.shifts.iter().enumerate().filter(|(_, s)| s.base.is_rational()).map(|(i, _)| i).collect();
    let [i, j] = rational[..] else { return None };
    let (p, q) = (plan.shifts[i].base.re(), plan.shifts[j].base.re());
    let e = p.extended_gcd(q);
    if !e.gcd.abs().is_one() {
        return None;
    }
    let mut rep = vec![BigInt::zero(); slots.len()];
    for (k, &(g, _)) in slots.iter().enumerate() {
        if g == i {
            rep[k] = &e.x * e.gcd.signum();
        } else if g == j {
            rep[k] = &e.y * e.gcd.signum();
        }
    }
    Some(rep)
}

/// An integer solution of `x G = t`.
fn solve(rows: &[Vec<BigInt>], t: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = IntMatrix::from_rows(2, rows.iter().cloned())?;
    let s = snf(&g);
    // x = y L with y D = t R
    let tr = s.right.apply_row(t)?;
    let mut y = vec![BigInt::zero(); rows.len()];
    for j in 0..2 {
        let d = s.factors.get(j).cloned().unwrap_or_default();
        if d.is_zero() {
            if !tr[j].is_zero() {
                return Err(Error::NoCovering("target outside the lattice sum".into()));
            }
            continue;
        }
        let (qt, r) = tr[j].div_rem(&d);
        if !r.is_zero() {
            return Err(Error::NoCovering("target outside the lattice sum".into()));
        }
        y[j] = qt;
    }
    let x = s.left.apply_row(&y)?;
    Ok(x)
}

/// Rewrite lattice coefficients on `[N, b]` (or `[b]`) as `b1 l + b2 l^2`.
fn to_powers(s: &ShiftGen, c: &[BigInt; 2]) -> (BigInt, BigInt) {
    let b = &s.base;
    if b.is_rational() {
        let p = b.re();
        return if s.inverted { (&c[0] * p * p, BigInt::zero()) } else { (c[0].clone(), BigInt::zero()) };
    }
    let (tr, n) = (b.trace(), b.norm());
    let (c0, c1) = (&c[0], &c[1]);
    if s.inverted {
        (c0 * &n * &tr + c1 * (&tr * &tr - &n), -(c0 * &n * &n) - c1 * &tr * &n)
    } else {
        (c1 + c0 * &tr, -c0.clone())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Certificate that `[a] = [a + t]`.
pub fn shift(a: &FieldElem, t: &QuadInt, chi: &Character) -> Result<Certificate> {
    let sh = Shifter::new(chi)?;
    let moves = sh.shift_moves(a, t)?;
    let end = a.add(&FieldElem::integral(t.clone()));
    Ok(Certificate { chi: chi.clone(), start: ProjPoint::Finite(a.clone()), moves, claim: Claim::Equals(ProjPoint::Finite(end)) })
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub certificate: Certificate,
    /// `min(N(num), N(den))` before each Euclidean step.
    pub descent: Vec<BigInt>,
}

pub fn reduce_to_zero(x: &ProjPoint, chi: &Character) -> Result<Certificate> {
    Ok(Reducer::new(chi, DEFAULT_BUDGET)?.run(x)?.certificate)
}

pub struct Reducer {
    shifter: Shifter,
    budget: usize,
}

impl Reducer {
    pub fn new(chi: &Character, budget: usize) -> Result<Self> {
        Ok(Reducer { shifter: Shifter::new(chi)?, budget })
    }

    fn chi(&self) -> &Character {
        &self.shifter.plan.chi
    }

    fn ring(&self) -> RingDesc {
        self.chi().ring()
    }

    pub fn run(&self, x: &ProjPoint) -> Result<Reduction> {
        if let ProjPoint::Finite(v) = x {
            if v.ring() != self.ring() {
                return Err(Error::RingMismatch(v.ring().m(), self.ring().m()));
            }
        }
        let chi = self.chi().clone();
        let mut moves: Vec<Move> = Vec::new();
        let mut terms: Vec<Term> = vec![(1, x.clone())];
        let mut descent = Vec::new();
        while let Some((_, top)) = terms.last().cloned() {
            let step = self.step(&top, &mut descent)?;
            for mv in step {
                apply_move(&chi, &mv, &mut terms).map_err(|e| Error::Domain(format!("internal move failed: {e}")))?;
                moves.push(mv);
            }
            if moves.len() > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
        }
        let certificate = Certificate { chi, start: x.clone(), moves, claim: Claim::Zero };
        Ok(Reduction { certificate, descent })
    }

    /// Moves for one stage of the reduction of the last term.
    fn step(&self, top: &ProjPoint, descent: &mut Vec<BigInt>) -> Result<Vec<Move>> {
        let ring = self.ring();
        let chi = self.chi();
        let a = match top {
            ProjPoint::Infinity => return Ok(vec![Move::split_c(&FieldElem::from_i64(ring, 2))]),
            ProjPoint::Finite(a) if a.is_zero() => return Ok(vec![Move::split_c(&FieldElem::from_i64(ring, 2))]),
            ProjPoint::Finite(a) => a,
        };
        if a.is_one() {
            return Ok(vec![Move::base_zero()]);
        }
        if let Some(n) = a.as_integral() {
            let mut mv = self.shifter.shift_moves(a, &(&ring.one() - n))?;
            mv.push(Move::base_zero());
            return Ok(mv);
        }
        if chi.eval(a)? == 1 && chi.eval(&a.one_minus())? == -1 {
            return Ok(vec![Move::annihilate(a, chi)?]);
        }
        let (nn, nd) = a.norm();
        descent.push(nn.clone().min(nd.clone()));
        if nn < nd {
            return Ok(vec![Move::invert_negate()]);
        }
        let (q, _) = a.num().euclid_div(a.den())?;
        self.shifter.shift_moves(a, &-q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_field::parse_field_elem;
    use crate::rewrite::certificate::check_certificate;
    use proptest::prelude::*;

    fn ring(m: i64) -> RingDesc {
        RingDesc::new(m).unwrap()
    }

    fn pt(m: i64, s: &str) -> ProjPoint {
        ProjPoint::parse(ring(m), s).unwrap()
    }

    #[test]
    fn tags_follow_the_table() {
        assert_eq!(tag(-1, 1), Some(MoveKind::PowerScale));
        assert_eq!(tag(1, -1), Some(MoveKind::ScaleByEll));
        assert_eq!(tag(-1, -1), Some(MoveKind::ScaleByOneMinusInvEll));
        assert_eq!(tag(1, 1), None);
    }

    #[test]
    fn unsupported_characters() {
        let r = ring(2);
        for chi in [
            Character::trivial(r),
            Character::parse(r, "3+1*w", 1).unwrap(),
            Character::new(r, vec![], -1).unwrap(),
            Character::new(ring(1), vec![], -1).unwrap(),
        ] {
            assert!(matches!(reduce_to_zero(&pt(2, "2"), &chi), Err(Error::UnsupportedCharacter(_))), "{chi}");
        }
    }

    #[test]
    fn find_moves_cases() {
        let plan = find_moves(&Character::parse(ring(1), "3,7", 1).unwrap()).unwrap();
        assert_eq!(plan.case, OmegaCase::Even);
        assert_eq!(plan.shifts.len(), 4);
        assert_eq!(plan.candidates.len(), 8);
        for s in &plan.shifts {
            let c = plan.candidates.iter().find(|c| c.ell == s.ell).unwrap();
            assert_eq!((c.chi_ell, c.chi_one_minus_ell), (-1, 1));
        }
        let plan = find_moves(&Character::parse(ring(2), "1*w,3+1*w", 1).unwrap()).unwrap();
        assert_eq!(plan.case, OmegaCase::Odd);
        assert_eq!(plan.shifts.len(), 3);
    }

    #[test]
    fn shift_examples() {
        let r = ring(1);
        let chi = Character::parse(r, "3,7", 1).unwrap();
        let a = parse_field_elem(r, "2/5").unwrap();
        let c = shift(&a, &r.zero(), &chi).unwrap();
        assert!(c.is_empty());
        assert!(check_certificate(&c).valid);
        let c = shift(&a, &r.one(), &chi).unwrap();
        assert!(check_certificate(&c).valid, "{}", check_certificate(&c));
        // 1 = 7 - 2 * 3 on the rational lattices
        let steps: Vec<_> = c.moves.iter().filter(|m| m.kind == MoveKind::ShiftStep).collect();
        assert!(!steps.is_empty());
        let r2 = ring(2);
        let chi = Character::parse(r2, "3+1*w,5", 1).unwrap();
        let c = shift(&parse_field_elem(r2, "1/3").unwrap(), &r2.omega(), &chi).unwrap();
        assert!(check_certificate(&c).valid, "{}", check_certificate(&c));
        assert!(c.len() <= 32);
    }

    #[test]
    fn reduce_examples() {
        let r = ring(1);
        let chi = Character::parse(r, "3,7", 1).unwrap();
        let c = reduce_to_zero(&pt(1, "1"), &chi).unwrap();
        assert_eq!(c.moves, vec![Move::base_zero()]);
        let c = reduce_to_zero(&pt(1, "4+1*w"), &chi).unwrap();
        assert_eq!(c.moves.last().unwrap().kind, MoveKind::BaseZero);
        assert!(check_certificate(&c).valid);
        let r2 = ring(2);
        let chi = Character::parse(r2, "3+1*w,5", 1).unwrap();
        for s in ["1*w/3", "0", "inf", "-1", "17+4*w/3+5*w"] {
            let c = reduce_to_zero(&pt(2, s), &chi).unwrap();
            assert!(check_certificate(&c).valid, "{s}: {}", check_certificate(&c));
            assert!(c.len() < DEFAULT_BUDGET);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let r = ring(7);
        let chi = Character::parse(r, "1*w,3", 1).unwrap();
        let red = Reducer::new(&chi, 2).unwrap();
        assert!(matches!(red.run(&pt(7, "40+17*w")), Err(Error::BudgetExceeded(2))));
    }

    fn arb_case() -> impl Strategy<Value = (i64, usize, usize, i64, i64, i64, i64)> {
        (prop::sample::select(RingDesc::SUPPORTED.to_vec()), 0usize..12, 0usize..12, -60i64..60, -60i64..60, -40i64..40, -40i64..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reductions_check((m, i, j, a, b, c, d) in arb_case()) {
            let r = ring(m);
            let primes = r.primes_up_to(60);
            prop_assume!(i != j && (c, d) != (0, 0));
            let chi = Character::new(r, vec![primes[i].clone(), primes[j].clone()], 1).unwrap();
            let x = FieldElem::new(QuadInt::new(r, a, b), QuadInt::new(r, c, d)).unwrap();
            let red = Reducer::new(&chi, DEFAULT_BUDGET).unwrap().run(&ProjPoint::Finite(x)).unwrap();
            let rep = check_certificate(&red.certificate);
            prop_assert!(rep.valid, "{}", rep);
            for w in red.descent.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
