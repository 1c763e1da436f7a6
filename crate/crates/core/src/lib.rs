//! Quantum reading of optical memories.
//!
//! A memory cell stores bit 0 as a mirror of reflectivity `r < 1` and bit 1
//! as a perfect mirror. This crate computes how well two kinds of readers
//! tell the bits apart under a photon budget:
//!
//! * a coherent-state transmitter, scored by the exact Helstrom error
//!   ([`readout::classical_error_prob`]);
//! * an EPR (two-mode squeezed vacuum) transmitter, scored by the quantum
//!   Chernoff bound ([`readout::quantum_error_prob_qcb`]).
//!
//! [`design`] picks reflectivities that starve classical readers while
//! leaving the EPR reader a finite information rate. [`fock`] rebuilds the
//! same quantities from explicit density matrices in a truncated Fock basis
//! and serves as the ground truth for the closed forms.

pub mod design;
pub mod discrimination;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod readout;

pub use discrimination::{BoundKind, DiscriminationResult};
pub use error::{ReadingError, Result};
pub use gaussian::{EprParameter, TwoModeCovariance};
pub use readout::{MemoryCellSpec, TransmitterKind, TransmitterSpec};
