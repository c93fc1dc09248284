//! Rewriting of symbols `[x]_chi`: shift lattices, certificates proving
//! `[x]_chi = 0`, and the specialization maps to residue fields.

pub mod certificate;
pub mod lattice;
pub mod search;
pub mod specialize;

pub use certificate::{apply_move, check_certificate, Certificate, CheckReport, Claim, Move, MoveKind};
pub use lattice::{check_covering, move_lattice, power_span, shift_lattice, Covering, CoveringMode, ShiftLattice};
pub use search::{find_moves, reduce_to_zero, shift, MovePlan, OmegaCase, Reducer, Reduction, Shifter, DEFAULT_BUDGET};
pub use specialize::{fiveterm_specializes, describe, local_quotient, local_quotient_over, specialize, Specializer};
