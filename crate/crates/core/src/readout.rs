//! Readout of a memory cell (reflectivity `r` for bit 0, unit reflectivity
//! for bit 1) by a coherent-state transmitter and by an EPR transmitter.
//!
//! The classical figures are exact Helstrom values. The quantum figures come
//! from the QCB, so `info_quantum` is a lower bound on what the EPR reader
//! can retrieve and `info_gain_delta` may be negative where that bound is
//! loose.

use std::f64::consts::LN_2;

use crate::discrimination::{helstrom_from_overlap, qcb_from_overlap, DiscriminationResult};
use crate::error::{check_non_negative, check_unit_interval, ReadingError, Result};
use crate::gaussian::{coherent_exponent_at_gap, epr_infidelity_at_gap, fidelity_epr_at_gap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransmitterKind {
    /// Single-mode coherent state `|α⟩` with `n̄ = |α|²`.
    Coherent,
    /// Two-mode squeezed vacuum with `n̄` photons in the signal mode.
    Epr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitterSpec {
    kind: TransmitterKind,
    nbar: f64,
}

impl TransmitterSpec {
    pub fn new(kind: TransmitterKind, nbar: f64) -> Result<Self> {
        check_non_negative("nbar", nbar)?;
        Ok(Self { kind, nbar })
    }

    pub fn kind(&self) -> TransmitterKind {
        self.kind
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Squeeze parameter `μ = 2n̄ + 1`; only meaningful for EPR sources.
    pub fn mu(&self) -> f64 {
        2.0 * self.nbar + 1.0
    }

    /// Error probability of this transmitter reading `cell`.
    pub fn read(&self, cell: &MemoryCellSpec) -> Result<DiscriminationResult> {
        match self.kind {
            TransmitterKind::Coherent => classical_error_prob(self.nbar, cell.r0()),
            TransmitterKind::Epr => quantum_error_prob_qcb(self.nbar, cell.r0()),
        }
    }
}

/// Memory cell with bit 0 stored as reflectivity `r0 < 1` and bit 1 as a
/// perfect mirror. Both bit values are equally likely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryCellSpec {
    r0: f64,
}

impl MemoryCellSpec {
    pub fn new(r0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r0) {
            return Err(ReadingError::Domain {
                name: "r0",
                value: r0,
                expected: "[0, 1)",
            });
        }
        Ok(Self { r0 })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r1(&self) -> f64 {
        1.0
    }
}

/// Helstrom error of the coherent transmitter,
/// `(1 - √(1 - exp(-n̄(1-√r)²)))/2`.
pub fn classical_error_prob(nbar: f64, r: f64) -> Result<DiscriminationResult> {
    check_unit_interval("r", r)?;
    classical_error_prob_at_gap(nbar, 1.0 - r)
}

/// QCB on the error of the EPR transmitter, `(1 + n̄(1-√r))⁻² / 2`.
pub fn quantum_error_prob_qcb(nbar: f64, r: f64) -> Result<DiscriminationResult> {
    check_unit_interval("r", r)?;
    quantum_error_prob_qcb_at_gap(nbar, 1.0 - r)
}

/// [`classical_error_prob`] with the cell given by its gap `1 - r`. Use this
/// form when `1 - r` is far below `1e-8`, where rounding of `r` itself
/// dominates.
pub fn classical_error_prob_at_gap(nbar: f64, gap: f64) -> Result<DiscriminationResult> {
    let exponent = coherent_exponent_at_gap(nbar, gap)?;
    Ok(helstrom_from_overlap(exponent.exp(), -exponent.exp_m1()))
}

pub fn quantum_error_prob_qcb_at_gap(nbar: f64, gap: f64) -> Result<DiscriminationResult> {
    let f = fidelity_epr_at_gap(nbar, gap)?;
    let u = epr_infidelity_at_gap(nbar, gap)?;
    Ok(qcb_from_overlap(f, u))
}

pub fn info_classical(nbar: f64, r: f64) -> Result<f64> {
    Ok(classical_error_prob(nbar, r)?.info_bits())
}

pub fn info_quantum(nbar: f64, r: f64) -> Result<f64> {
    Ok(quantum_error_prob_qcb(nbar, r)?.info_bits())
}

pub fn info_classical_at_gap(nbar: f64, gap: f64) -> Result<f64> {
    Ok(classical_error_prob_at_gap(nbar, gap)?.info_bits())
}

pub fn info_quantum_at_gap(nbar: f64, gap: f64) -> Result<f64> {
    Ok(quantum_error_prob_qcb_at_gap(nbar, gap)?.info_bits())
}

/// `info_quantum - info_classical`; not clamped at zero.
pub fn info_gain_delta(nbar: f64, r: f64) -> Result<f64> {
    Ok(info_quantum(nbar, r)? - info_classical(nbar, r)?)
}

/// Leading order of `info_classical` in `1 - r`: `n̄(1-r)²/ln 256`.
pub fn info_classical_leading(nbar: f64, r: f64) -> f64 {
    let gap = 1.0 - r;
    nbar * gap * gap / (8.0 * LN_2)
}

/// Leading order of `info_quantum` in `1 - r`: `n̄²(1-r)²/ln 4`.
pub fn info_quantum_leading(nbar: f64, r: f64) -> f64 {
    let gap = 1.0 - r;
    nbar * nbar * gap * gap / (2.0 * LN_2)
}
