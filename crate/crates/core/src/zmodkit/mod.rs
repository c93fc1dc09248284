//! Integer matrices, Hermite and Smith normal forms, and finitely presented
//! abelian groups with an action of `(Z/2)^k`.

pub mod group_ring;
pub mod hnf;
pub mod matrix;
pub mod module;
pub mod snf;

pub use group_ring::{
    all_sign_vectors, local_global_check, GroupRingElem, GroupRingMap, GroupRingPresentation, LocalGlobalReport,
    RandomEquivariant, Verdict,
};
pub use hnf::{left_kernel, Hnf};
pub use matrix::IntMatrix;
pub use module::{
    check_equivariant, check_well_defined, map_cokernel, map_image, map_kernel, odd_part_of, ElementVec, FPModule, Kernel, PreparedModule,
    SignedPerm, Structure,
};
pub use snf::{invariant_factors, snf, SnfResult};
