//! Certificates for identities between symbols `[x]_chi` in
//! `RP_+(F)[1/2]_chi`, and their checker.
//!
//! A certificate proves `[start] = sum s_i [x_i]`, starting from the single
//! term `+[start]`. Each move rewrites or removes the last term of the sum.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::characters::{Character, CharacterSpec};
use crate::error::{Error, Result};
use crate::quad_field::{FieldElem, ProjPoint};
use crate::quad_ring::RingDesc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    /// Drop `[a]` when `chi(a) = 1` and `chi(1 - a) = -1`.
    Annihilate,
    /// `[a] -> [l a]` when `chi(l) = 1` and `chi(1 - l) = -1`.
    ScaleByEll,
    /// `[a] -> [(1 - 1/l) a]` when `chi(l) = -1` and `chi(1 - l) = -1`.
    ScaleByOneMinusInvEll,
    /// `[a] -> [(1 - l)^e a]`, `e` in `{-1, 0, 1}`, when `chi(l) = -1` and
    /// `chi(1 - l) = 1`.
    PowerScale,
    /// `[a] -> [a + t l]` for `t` in `Z`, `a` and `a + t l` nonzero, under
    /// the conditions of `PowerScale`.
    ShiftStep,
    /// `[a] -> -[1/a]`.
    InvertNegate,
    /// Drop `[1]`.
    BaseZero,
    /// `[0] -> [s] + [1 - s]` and `[inf] -> -[s] - [1 - s]` for `s` not 0 or 1.
    SplitC,
}

impl MoveKind {
    /// Required `(chi(l), chi(1 - l))`, for kinds that have side conditions.
    pub fn pattern(self) -> Option<(i8, i8)> {
        match self {
            MoveKind::Annihilate | MoveKind::ScaleByEll => Some((1, -1)),
            MoveKind::ScaleByOneMinusInvEll => Some((-1, -1)),
            MoveKind::PowerScale | MoveKind::ShiftStep => Some((-1, 1)),
            MoveKind::InvertNegate | MoveKind::BaseZero | MoveKind::SplitC => None,
        }
    }

    pub fn needs_even_minus_one(self) -> bool {
        matches!(self, MoveKind::ScaleByEll | MoveKind::ScaleByOneMinusInvEll | MoveKind::PowerScale | MoveKind::ShiftStep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    /// The element `l`; the annihilated point for `Annihilate`, and the split
    /// point `s` for `SplitC`.
    pub ell: Option<FieldElem>,
    pub t: Option<BigInt>,
    pub exponent: Option<i8>,
    pub chi_ell: Option<i8>,
    pub chi_one_minus_ell: Option<i8>,
}

impl Move {
    fn bare(kind: MoveKind) -> Self {
        Move { kind, ell: None, t: None, exponent: None, chi_ell: None, chi_one_minus_ell: None }
    }

    fn with_ell(kind: MoveKind, ell: &FieldElem, chi: &Character) -> Result<Self> {
        Ok(Move {
            ell: Some(ell.clone()),
            chi_ell: Some(chi.eval(ell)?),
            chi_one_minus_ell: Some(chi.eval(&ell.one_minus())?),
            ..Move::bare(kind)
        })
    }

    pub fn invert_negate() -> Self {
        Move::bare(MoveKind::InvertNegate)
    }

    pub fn base_zero() -> Self {
        Move::bare(MoveKind::BaseZero)
    }

    pub fn split_c(s: &FieldElem) -> Self {
        Move { ell: Some(s.clone()), ..Move::bare(MoveKind::SplitC) }
    }

    pub fn annihilate(a: &FieldElem, chi: &Character) -> Result<Self> {
        Self::with_ell(MoveKind::Annihilate, a, chi)
    }

    pub fn scale_by_ell(l: &FieldElem, chi: &Character) -> Result<Self> {
        Self::with_ell(MoveKind::ScaleByEll, l, chi)
    }

    pub fn scale_by_one_minus_inv_ell(l: &FieldElem, chi: &Character) -> Result<Self> {
        Self::with_ell(MoveKind::ScaleByOneMinusInvEll, l, chi)
    }

    pub fn power_scale(l: &FieldElem, e: i8, chi: &Character) -> Result<Self> {
        Ok(Move { exponent: Some(e), ..Self::with_ell(MoveKind::PowerScale, l, chi)? })
    }

    pub fn shift_step(l: &FieldElem, t: BigInt, chi: &Character) -> Result<Self> {
        Ok(Move { t: Some(t), ..Self::with_ell(MoveKind::ShiftStep, l, chi)? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Zero,
    Equals(ProjPoint),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub chi: Character,
    pub start: ProjPoint,
    pub moves: Vec<Move>,
    pub claim: Claim,
}

impl Certificate {
    pub fn ring(&self) -> RingDesc {
        self.chi.ring()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CertWire::from(self)).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: CertWire = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        w.into_certificate()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    /// Index of the first failing move; the move count when only the final
    /// claim fails.
    pub failed_at: Option<usize>,
    pub reason: Option<String>,
}

impl CheckReport {
    fn pass() -> Self {
        CheckReport { valid: true, failed_at: None, reason: None }
    }

    fn fail(i: usize, reason: impl Into<String>) -> Self {
        CheckReport { valid: false, failed_at: Some(i), reason: Some(reason.into()) }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.failed_at, &self.reason) {
            (Some(i), Some(r)) => write!(f, "invalid at move {i}: {r}"),
            _ => write!(f, "valid"),
        }
    }
}

/// One term `sign * [point]`.
pub type Term = (i8, ProjPoint);

/// Apply one move to the sum, checking its side conditions.
pub fn apply_move(chi: &Character, mv: &Move, terms: &mut Vec<Term>) -> std::result::Result<(), String> {
    let ring = chi.ring();
    let (sign, top) = terms.last().cloned().ok_or("no term left to rewrite")?;
    let ell = match (mv.kind, &mv.ell) {
        (MoveKind::InvertNegate | MoveKind::BaseZero, _) => None,
        (_, Some(l)) if l.ring() != ring => return Err(format!("{l} lies in the wrong field")),
        (_, Some(l)) => Some(l),
        (_, None) => return Err("missing element".into()),
    };
    if mv.kind.needs_even_minus_one() && chi.at_minus_one() != 1 {
        return Err("requires chi(-1) = 1".into());
    }
    if let (Some(want), Some(l)) = (mv.kind.pattern(), ell) {
        if l.is_zero() || l.is_one() {
            return Err(format!("{l} must differ from 0 and 1"));
        }
        let got = (eval(chi, l)?, eval(chi, &l.one_minus())?);
        if (mv.chi_ell, mv.chi_one_minus_ell) != (Some(got.0), Some(got.1)) {
            return Err(format!(
                "recorded chi values {:?}, {:?} differ from {}, {}",
                mv.chi_ell, mv.chi_one_minus_ell, got.0, got.1
            ));
        }
        if got != want {
            return Err(format!("chi values ({}, {}) do not enable {:?}", got.0, got.1, mv.kind));
        }
    }
    let finite = |p: &ProjPoint| -> std::result::Result<FieldElem, String> {
        p.finite().filter(|x| !x.is_zero()).cloned().ok_or_else(|| format!("{:?} needs a nonzero finite point", mv.kind))
    };
    let scale = |p: &ProjPoint, c: &FieldElem| match p {
        ProjPoint::Finite(x) => ProjPoint::Finite(x.mul(c)),
        ProjPoint::Infinity => ProjPoint::Infinity,
    };
    let last = terms.len() - 1;
    match mv.kind {
        MoveKind::Annihilate => {
            if top != ProjPoint::Finite(ell.expect("checked").clone()) {
                return Err(format!("annihilated element differs from {top}"));
            }
            terms.pop();
        }
        MoveKind::BaseZero => {
            if !matches!(&top, ProjPoint::Finite(x) if x.is_one()) {
                return Err(format!("[{top}] is not [1]"));
            }
            terms.pop();
        }
        MoveKind::InvertNegate => terms[last] = (-sign, top.invert(ring)),
        MoveKind::ScaleByEll => terms[last].1 = scale(&top, ell.expect("checked")),
        MoveKind::ScaleByOneMinusInvEll => {
            let c = ell.expect("checked").inv().map_err(|e| e.to_string())?.one_minus();
            terms[last].1 = scale(&top, &c);
        }
        MoveKind::PowerScale => {
            let base = ell.expect("checked").one_minus();
            let c = match mv.exponent {
                Some(0) => FieldElem::from_i64(ring, 1),
                Some(1) => base,
                Some(-1) => base.inv().map_err(|e| e.to_string())?,
                e => return Err(format!("exponent {e:?} is not in {{-1, 0, 1}}")),
            };
            terms[last].1 = scale(&top, &c);
        }
        MoveKind::ShiftStep => {
            let a = finite(&top)?;
            let t = mv.t.as_ref().ok_or("missing shift")?;
            let b = a.add(&ell.expect("checked").mul(&FieldElem::integral(ring.int(t.clone()))));
            if b.is_zero() {
                return Err("shift reaches zero".into());
            }
            terms[last].1 = ProjPoint::Finite(b);
        }
        MoveKind::SplitC => {
            let s = ell.expect("checked");
            if s.is_zero() || s.is_one() {
                return Err(format!("split point {s} must differ from 0 and 1"));
            }
            let outer = match &top {
                ProjPoint::Finite(x) if x.is_zero() => sign,
                ProjPoint::Infinity => -sign,
                _ => return Err(format!("[{top}] is not [0] or [inf]")),
            };
            terms.pop();
            terms.push((outer, ProjPoint::Finite(s.clone())));
            terms.push((outer, ProjPoint::Finite(s.one_minus())));
        }
    }
    Ok(())
}

fn eval(chi: &Character, x: &FieldElem) -> std::result::Result<i8, String> {
    chi.eval(x).map_err(|e| e.to_string())
}

/// Replay a certificate without search.
pub fn check_certificate(c: &Certificate) -> CheckReport {
    if c.start.finite().is_some_and(|x| x.ring() != c.ring()) {
        return CheckReport::fail(0, "start lies in the wrong field");
    }
    let mut terms: Vec<Term> = vec![(1, c.start.clone())];
    for (i, mv) in c.moves.iter().enumerate() {
        if let Err(r) = apply_move(&c.chi, mv, &mut terms) {
            return CheckReport::fail(i, r);
        }
    }
    let n = c.moves.len();
    match &c.claim {
        Claim::Zero if terms.is_empty() => CheckReport::pass(),
        Claim::Equals(p) if terms.len() == 1 && terms[0] == (1, p.clone()) => CheckReport::pass(),
        _ => CheckReport::fail(n, format!("{} terms remain, which do not match the claim", terms.len())),
    }
}

// ---- JSON ----

#[derive(Serialize, Deserialize)]
struct MoveWire {
    kind: MoveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ell: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chi_ell: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chi_one_minus_ell: Option<i8>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ClaimWire {
    Zero,
    Equals(String),
}

#[derive(Serialize, Deserialize)]
struct CertWire {
    m: i64,
    chi: CharacterSpec,
    start: String,
    moves: Vec<MoveWire>,
    claim: ClaimWire,
}

impl From<&Certificate> for CertWire {
    fn from(c: &Certificate) -> Self {
        CertWire {
            m: c.ring().m(),
            chi: c.chi.to_spec(),
            start: c.start.to_string(),
            moves: c
                .moves
                .iter()
                .map(|mv| MoveWire {
                    kind: mv.kind,
                    ell: mv.ell.as_ref().map(|x| x.to_string()),
                    t: mv.t.as_ref().map(|t| t.to_string()),
                    exponent: mv.exponent,
                    chi_ell: mv.chi_ell,
                    chi_one_minus_ell: mv.chi_one_minus_ell,
                })
                .collect(),
            claim: match &c.claim {
                Claim::Zero => ClaimWire::Zero,
                Claim::Equals(p) => ClaimWire::Equals(p.to_string()),
            },
        }
    }
}

impl CertWire {
    fn into_certificate(self) -> Result<Certificate> {
        let ring = RingDesc::new(self.m)?;
        let chi = Character::from_spec(ring, &self.chi)?;
        let moves = self
            .moves
            .into_iter()
            .map(|w| {
                let ell = w.ell.map(|s| crate::quad_field::parse_field_elem(ring, &s)).transpose()?;
                let t = w
                    .t
                    .map(|s| s.trim().parse::<BigInt>().map_err(|e| Error::Parse(format!("shift {s:?}: {e}"))))
                    .transpose()?;
                Ok(Move { kind: w.kind, ell, t, exponent: w.exponent, chi_ell: w.chi_ell, chi_one_minus_ell: w.chi_one_minus_ell })
            })
            .collect::<Result<Vec<_>>>()?;
        let claim = match self.claim {
            ClaimWire::Zero => Claim::Zero,
            ClaimWire::Equals(s) => Claim::Equals(ProjPoint::parse(ring, &s)?),
        };
        Ok(Certificate { chi, start: ProjPoint::parse(ring, &self.start)?, moves, claim })
    }
}
