//! Equiprobable binary hypothesis testing: Helstrom error for pure states,
//! the quantum Chernoff bound when one hypothesis is pure, and the readout
//! information `1 - H(p̄)`.

use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{check_unit_interval, ReadingError, Result};

/// Below this error probability the binary entropy switches to its
/// leading-order expansion.
pub const SMALL_P_THRESHOLD: f64 = 1e-12;

/// Below this bias `1 - 2p̄` the readout information uses its power series.
const SMALL_BIAS_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Minimum error probability, attained by the optimal measurement.
    ExactHelstrom,
    /// Upper bound on the minimum error probability from the QCB.
    QcbUpper,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::ExactHelstrom => f.write_str("exact-helstrom"),
            BoundKind::QcbUpper => f.write_str("qcb-upper"),
        }
    }
}

/// Mean error probability of a readout and the information it yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationResult {
    p_bar: f64,
    kind: BoundKind,
    info_bits: f64,
}

impl DiscriminationResult {
    /// Builds a result from `p̄` and the bias `1 - 2p̄`, which callers
    /// pass separately whenever they can compute it without cancellation.
    pub(crate) fn from_parts(p_bar: f64, bias: f64, kind: BoundKind) -> Self {
        let bias = bias.clamp(0.0, 1.0);
        Self {
            p_bar: p_bar.clamp(0.0, 0.5),
            kind,
            info_bits: information_from_bias(bias),
        }
    }

    pub fn p_bar(&self) -> f64 {
        self.p_bar
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    /// Readout information in bits per cell, `1 - H(p̄)`.
    pub fn info_bits(&self) -> f64 {
        self.info_bits
    }
}

/// Helstrom error for two pure states with overlap `F = |⟨φ₀|φ₁⟩|²`.
pub fn helstrom_pure(fidelity: f64) -> Result<DiscriminationResult> {
    check_unit_interval("fidelity", fidelity)?;
    Ok(helstrom_from_overlap(fidelity, 1.0 - fidelity))
}

/// Same as [`helstrom_pure`], given both `F` and an accurate `1 - F`.
pub(crate) fn helstrom_from_overlap(fidelity: f64, infidelity: f64) -> DiscriminationResult {
    let distance = infidelity.max(0.0).sqrt().min(1.0);
    // (1 - D)(1 + D) = F keeps p̄ accurate when D → 1.
    let p_bar = if distance <= 0.5 {
        (1.0 - distance) / 2.0
    } else {
        fidelity / (2.0 * (1.0 + distance))
    };
    DiscriminationResult::from_parts(p_bar, distance, BoundKind::ExactHelstrom)
}

/// Trace distance `√(1 - F)` between two pure states.
pub fn trace_distance_pure(fidelity: f64) -> Result<f64> {
    check_unit_interval("fidelity", fidelity)?;
    Ok((1.0 - fidelity).sqrt())
}

/// QCB error bound `F/2`. Valid when one of the two states is pure, where
/// the Chernoff overlap reduces to the fidelity.
pub fn qcb_from_fidelity(fidelity: f64) -> Result<DiscriminationResult> {
    check_unit_interval("fidelity", fidelity)?;
    Ok(qcb_from_overlap(fidelity, 1.0 - fidelity))
}

pub(crate) fn qcb_from_overlap(fidelity: f64, infidelity: f64) -> DiscriminationResult {
    DiscriminationResult::from_parts(fidelity / 2.0, infidelity, BoundKind::QcbUpper)
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok(entropy_bits(p))
}

fn entropy_bits(p: f64) -> f64 {
    // Evaluate on the smaller tail; 1 - p is exact for p ≥ 1/2.
    let q = if p > 0.5 { 1.0 - p } else { p };
    if q == 0.0 {
        return 0.0;
    }
    if q < SMALL_P_THRESHOLD {
        return q * (1.0 / q).log2() + q / LN_2;
    }
    -(q * q.ln() + (1.0 - q) * (-q).ln_1p()) / LN_2
}

/// Readout information `1 - H(p̄)` for an equiprobable binary cell.
pub fn readout_information(p_bar: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_bar) {
        return Err(ReadingError::Domain {
            name: "p_bar",
            value: p_bar,
            expected: "[0, 1/2]",
        });
    }
    if p_bar >= 0.25 {
        // 1 - 2p̄ is exact here.
        Ok(information_from_bias(1.0 - 2.0 * p_bar))
    } else {
        Ok(1.0 - entropy_bits(p_bar))
    }
}

/// Readout information written in terms of the bias `x = 1 - 2p̄`:
///
/// `1 - H((1 - x)/2) = [(1 + x)·ln(1 + x) + (1 - x)·ln(1 - x)] / (2 ln 2)`.
pub fn readout_information_from_bias(bias: f64) -> Result<f64> {
    check_unit_interval("bias", bias)?;
    Ok(information_from_bias(bias))
}

fn information_from_bias(x: f64) -> f64 {
    if x < SMALL_BIAS_THRESHOLD {
        // Σ_k x^{2k} / (k(2k - 1)); four terms reach 1e-24 relative.
        let x2 = x * x;
        let series = x2 * (1.0 + x2 * (1.0 / 6.0 + x2 * (1.0 / 15.0 + x2 / 28.0)));
        series / (2.0 * LN_2)
    } else if x <= 0.5 {
        ((1.0 + x) * x.ln_1p() + (1.0 - x) * (-x).ln_1p()) / (2.0 * LN_2)
    } else {
        1.0 - entropy_bits((1.0 - x) / 2.0)
    }
}
