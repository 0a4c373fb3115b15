//! Spectral toolkit for two elastic equations coupled through a degenerate
//! fractional damping `gamma A^theta (y_t + z_t)`.
//!
//! The elastic operator `A` enters only through its eigenvalues, so every
//! quantity reduces to 4x4 modal blocks: resolvent norms along the imaginary
//! axis, explicit optimality witnesses, spectral abscissae and exact
//! per-mode semigroup evolution.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod modal;
pub mod model;
pub mod scan;
pub mod simulate;
pub mod smallmat;
pub mod witness;

pub use error::{Error, Result};
pub use modal::{
    build_modal_block, dissipativity_form, modal_resolvent_norm, modal_solve, ModalBlock,
    ModalState,
};
pub use model::{make_membrane_spectrum, make_plate_spectrum, SpectrumModel, SystemParams};
pub use scan::{global_resolvent_norm, scan, GlobalNorm, ResolventScan, ScanConfig, Window};
pub use simulate::{evolve, spectral_abscissa, InitialData, Trace};
pub use witness::{certify_lower_bound, witness_nonanalytic, witness_polyopt, Witness};

/// Crate version, echoed in machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
