//! Numerical core for optimal single-copy entanglement distillation of
//! two-qubit mixed states by local filtering.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over small dense matrices:
//!
//! * [`state`]: density matrices in the `|HH⟩,|HV⟩,|VH⟩,|VV⟩` basis, the real
//!   correlation (R-matrix) picture, local operations and fidelity.
//! * [`channels`]: the entangled-pair source, bilateral dephasing channels and
//!   their closed forms, and the tilted-slide filter model.
//! * [`normal_form`]: the filter normal form, Bell diagonalization and the
//!   optimal local filters.
//! * [`measures`]: concurrence, entanglement of formation and CHSH.
//! * [`tomography`]: 16-setting projective tomography with Poisson counts,
//!   maximum-likelihood reconstruction and bootstrap error bars.
//! * [`pipeline`]: end-to-end experiment orchestration.
//!
//! File formats, reports and the command-line interface live in the
//! companion `bellfilter` crate.
#![no_std]
// `!(x > 0.0)` also catches NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channels;
mod error;
pub(crate) mod linalg;
pub(crate) mod math;
pub mod measures;
pub mod normal_form;
pub mod pipeline;
pub mod random;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Single-qubit operator.
pub type Mat2 = nalgebra::Matrix2<C64>;
/// Two-qubit operator in the `|HH⟩,|HV⟩,|VH⟩,|VV⟩` basis.
pub type Mat4 = nalgebra::Matrix4<C64>;

pub use channels::{LocalChannel, PrepParams};
pub use measures::{ChshSettings, MeasureSet};
pub use normal_form::{Classification, NormalFormResult};
pub use pipeline::{DistillationReport, ExperimentConfig};
pub use state::{DensityMatrix, FilteredOutcome, LocalOp, OpKind, RMatrix, Side};
pub use tomography::{MeasurementRecord, ProjectorSet, ReconstructionResult};

/// Crate version, echoed into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
