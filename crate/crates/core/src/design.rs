//! Secure-memory design: tie the cell reflectivity to the photon budget of
//! the reader through `1 - r = K / n̄_max`.
//!
//! Under that rule a coherent reader with at most `n̄_max` photons extracts
//! `≈ K²/(n̄_max ln 256)` bits, which vanishes for large budgets, while the
//! EPR reader keeps a K-dependent constant. `K` is the inverse of the
//! constant quoted for memories in the literature as `c`: `K = 1/c`
//! reproduces the limits 0.235, 0.895 and 0.997 for `c` = 1, 0.1, 0.01.

use std::f64::consts::LN_2;

use crate::discrimination::qcb_from_overlap;
use crate::error::{ReadingError, Result};
use crate::readout::{info_classical_at_gap, info_quantum_at_gap};

/// Largest photon budget the inverse design searches.
pub const MAX_BUDGET: f64 = 1e12;

/// Relative tolerance on the budget returned by the inverse design.
pub const BUDGET_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec {
    nbar_max: f64,
    gap_coefficient: f64,
}

impl DesignSpec {
    pub fn new(nbar_max: f64, gap_coefficient: f64) -> Result<Self> {
        check_gap_coefficient(gap_coefficient)?;
        if !(nbar_max >= 1.0 && nbar_max.is_finite()) {
            return Err(ReadingError::Domain {
                name: "nbar_max",
                value: nbar_max,
                expected: ">= 1",
            });
        }
        if gap_coefficient >= nbar_max {
            return Err(ReadingError::DesignInfeasible {
                k: gap_coefficient,
                nbar_max,
            });
        }
        Ok(Self {
            nbar_max,
            gap_coefficient,
        })
    }

    pub fn nbar_max(&self) -> f64 {
        self.nbar_max
    }

    pub fn gap_coefficient(&self) -> f64 {
        self.gap_coefficient
    }

    /// `1 - r = K / n̄_max`.
    pub fn gap(&self) -> f64 {
        self.gap_coefficient / self.nbar_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignReport {
    pub nbar_max: f64,
    pub gap_coefficient: f64,
    pub r: f64,
    /// Best a coherent reader can do with any energy up to the budget.
    pub info_classical_cap: f64,
    /// EPR reader (QCB-derived lower bound) at full budget.
    pub info_quantum: f64,
    pub delta: f64,
    /// `n̄ → ∞` limit of `info_quantum` at this `K`.
    pub asymptotic_quantum: f64,
}

fn check_gap_coefficient(k: f64) -> Result<f64> {
    if k > 0.0 && k.is_finite() {
        Ok(k)
    } else {
        Err(ReadingError::Domain {
            name: "K",
            value: k,
            expected: "> 0",
        })
    }
}

pub fn reflectivity_for_budget(nbar_max: f64, k: f64) -> Result<f64> {
    let spec = DesignSpec::new(nbar_max, k)?;
    Ok(1.0 - spec.gap())
}

/// `1 - H((1 + K/2)⁻² / 2)`: with `1 - r = K/n̄`, `n̄(1 - √r) → K/2`.
pub fn asymptotic_quantum_info(k: f64) -> Result<f64> {
    check_gap_coefficient(k)?;
    Ok(quantum_info_at_excess(k / 2.0))
}

/// Quantum information when `n̄(1 - √r) = x`.
fn quantum_info_at_excess(x: f64) -> f64 {
    let f = (1.0 + x).powi(-2);
    let u = x * (2.0 + x) / ((1.0 + x) * (1.0 + x));
    qcb_from_overlap(f, u).info_bits()
}

/// Leading form `K²/(n̄ ln 256)` of the classical information under the
/// design rule.
pub fn asymptotic_classical_info(nbar: f64, k: f64) -> Result<f64> {
    check_gap_coefficient(k)?;
    if !(nbar > 0.0) {
        return Err(ReadingError::Domain {
            name: "nbar",
            value: nbar,
            expected: "> 0",
        });
    }
    Ok(k * k / (nbar * 8.0 * LN_2))
}

pub fn design_report(spec: &DesignSpec) -> Result<DesignReport> {
    let gap = spec.gap();
    let n = spec.nbar_max;
    // info_classical is non-decreasing in n̄ at fixed r, so the cap sits at
    // the full budget.
    let info_classical_cap = info_classical_at_gap(n, gap)?;
    let info_quantum = info_quantum_at_gap(n, gap)?;
    Ok(DesignReport {
        nbar_max: n,
        gap_coefficient: spec.gap_coefficient,
        r: 1.0 - gap,
        info_classical_cap,
        info_quantum,
        delta: info_quantum - info_classical_cap,
        asymptotic_quantum: asymptotic_quantum_info(spec.gap_coefficient)?,
    })
}

/// Quantum information along the design curve `1 - r = K/n̄`.
fn design_curve(n: f64, k: f64) -> f64 {
    info_quantum_at_gap(n, k / n).unwrap_or(f64::NAN)
}

/// Largest photon budget `n̄` whose designed memory (`1 - r = K/n̄`) still
/// gives the EPR reader at least `target_bits`.
///
/// Along the design curve the quantum information falls monotonically from
/// `1 - H((1 + K)⁻²/2)` at `n̄ → K⁺` to [`asymptotic_quantum_info`]. Targets
/// at or above the first value are unreachable. Targets at or below the
/// asymptote are met by every budget.
pub fn budget_for_target_quantum_info(target_bits: f64, k: f64) -> Result<f64> {
    check_gap_coefficient(k)?;
    let asymptote = asymptotic_quantum_info(k)?;
    let supremum = quantum_info_at_excess(k);
    if !(target_bits < supremum) {
        return Err(ReadingError::UnreachableTarget {
            target: target_bits,
            supremum,
        });
    }
    if target_bits <= asymptote {
        return Err(ReadingError::UnboundedBudget {
            target: target_bits,
            asymptote,
        });
    }

    let mut lo = k * (1.0 + 1e-9);
    let mut hi = MAX_BUDGET.max(1e3 * k);
    check_decreasing(lo, hi, k)?;
    if design_curve(hi, k) >= target_bits {
        return Err(ReadingError::Configuration(format!(
            "target {target_bits} needs a budget beyond {hi:e}"
        )));
    }
    if design_curve(lo, k) < target_bits {
        return Err(ReadingError::UnreachableTarget {
            target: target_bits,
            supremum: design_curve(lo, k),
        });
    }
    // Invariant: curve(lo) ≥ target > curve(hi). Bisect in log space.
    while hi / lo - 1.0 > BUDGET_RELATIVE_TOLERANCE {
        let mid = (lo * hi).sqrt();
        if design_curve(mid, k) >= target_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn check_decreasing(lo: f64, hi: f64, k: f64) -> Result<()> {
    const SAMPLES: usize = 64;
    let ratio = (hi / lo).ln();
    let mut previous = f64::INFINITY;
    for i in 0..SAMPLES {
        let n = lo * (ratio * i as f64 / (SAMPLES - 1) as f64).exp();
        let value = design_curve(n, k);
        if !(value <= previous + 1e-15) {
            return Err(ReadingError::Configuration(format!(
                "design curve not monotone near n = {n:e}"
            )));
        }
        previous = value;
    }
    Ok(())
}
