//! Numerical geometry of the Siegel upper half space `H_g`.
//!
//! The crate covers the symplectic action on `H_g`, its invariant metric and
//! Iwasawa coordinates, approximate reduction into a Siegel set, Weierstrass
//! machinery for tori, first-order period matrices of plumbed chains of tori
//! and of a non-separating pinch, boundary classification, and batch probes
//! built from these pieces.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod elliptic;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod linalg;
pub mod metric;
pub mod plumbing;
pub mod reduction;
pub mod symplectic;

pub use elliptic::{kernel_periods, quasi_periods, wp, QuasiPeriods, TorusModulus};
pub use error::{Result, SiegelError};
pub use metric::{chamber_distance, distance, flat_coordinates, FlatCoordinates};
pub use reduction::{in_siegel_set, quotient_distance_upper, reduce, ReductionResult, SiegelSetParams};
pub use symplectic::{
    block_embed, j_matrix, mobius_act, random_symplectic_word, sl2_product_embed, ChamberPoint, IntSymplectic,
    RealSymplectic, SiegelPoint, SymplecticMatrix,
};
