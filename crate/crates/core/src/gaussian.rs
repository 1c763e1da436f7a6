//! Two-mode Gaussian states in block standard form.
//!
//! Every covariance matrix handled here has the shape
//!
//! ```text
//!     ( a·I   c·Z )       I = diag(1, 1)
//!     ( c·Z   b·I )       Z = diag(1, -1)
//! ```
//!
//! with the vacuum normalised to the identity. Entries are carried as
//! double-double values so that strongly squeezed states keep full relative
//! precision in `ab - c²` and in the fidelity determinant, where the leading
//! terms cancel to O(1) out of O(μ²).

use std::fmt;

use twofloat::TwoFloat;

use crate::error::{check_non_negative, check_unit_interval, ReadingError, Result};

/// Tolerance on `|ν - 1|` for a covariance matrix to count as pure.
pub const PURITY_TOLERANCE: f64 = 1e-9;

/// Slack allowed below the vacuum floor `ν ≥ 1` before a CM is rejected.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    a: TwoFloat,
    b: TwoFloat,
    c: TwoFloat,
}

impl fmt::Debug for TwoModeCovariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoModeCovariance")
            .field("a", &self.a())
            .field("b", &self.b())
            .field("c", &self.c())
            .finish()
    }
}

impl TwoModeCovariance {
    /// Builds a block-form CM and checks that it describes a physical state.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(ReadingError::Domain {
                name: "covariance entry",
                value: if a.is_finite() { if b.is_finite() { c } else { b } } else { a },
                expected: "finite",
            });
        }
        let cm = Self::from_parts(a.into(), b.into(), c.into());
        cm.check_physical()?;
        Ok(cm)
    }

    fn from_parts(a: TwoFloat, b: TwoFloat, c: TwoFloat) -> Self {
        Self { a, b, c }
    }

    pub fn a(&self) -> f64 {
        self.a.into()
    }

    pub fn b(&self) -> f64 {
        self.b.into()
    }

    pub fn c(&self) -> f64 {
        self.c.into()
    }

    /// `ab - c²`, which equals `ν₋·ν₊` for this block form.
    pub fn symplectic_determinant(&self) -> f64 {
        (self.a * self.b - self.c * self.c).into()
    }

    /// The full 4×4 matrix in quadrature order `(q_S, p_S, q_R, p_R)`.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let (a, b, c) = (self.a(), self.b(), self.c());
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ]
    }

    pub fn is_physical(&self) -> bool {
        self.check_physical().is_ok()
    }

    fn check_physical(&self) -> Result<()> {
        let floor = 1.0 - PHYSICALITY_TOLERANCE;
        if self.a() < floor || self.b() < floor {
            return Err(ReadingError::Unphysical {
                nu: self.a().min(self.b()),
            });
        }
        let (nu_minus, _) = symplectic_eigenvalues(self)?;
        if nu_minus < floor {
            return Err(ReadingError::Unphysical { nu: nu_minus });
        }
        Ok(())
    }

    pub fn is_pure(&self) -> bool {
        match symplectic_eigenvalues(self) {
            Ok((lo, hi)) => {
                (lo - 1.0).abs() <= PURITY_TOLERANCE && (hi - 1.0).abs() <= PURITY_TOLERANCE
            }
            Err(_) => false,
        }
    }
}

/// Squeeze parameter of an EPR source together with its mean photon number
/// per mode, `nbar = (mu - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParameter {
    mu: f64,
    nbar: f64,
}

impl EprParameter {
    pub fn from_mu(mu: f64) -> Result<Self> {
        if !(mu >= 1.0 && mu.is_finite()) {
            return Err(ReadingError::Domain {
                name: "mu",
                value: mu,
                expected: ">= 1",
            });
        }
        Ok(Self {
            mu,
            nbar: (mu - 1.0) / 2.0,
        })
    }

    pub fn from_nbar(nbar: f64) -> Result<Self> {
        check_non_negative("nbar", nbar)?;
        Ok(Self {
            mu: 2.0 * nbar + 1.0,
            nbar,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }
}

/// Covariance matrix `V(μ)` of the two-mode squeezed vacuum.
pub fn epr_covariance(mu: f64) -> Result<TwoModeCovariance> {
    let mu = EprParameter::from_mu(mu)?.mu();
    let m = TwoFloat::from(mu);
    // (μ - 1)(μ + 1) avoids the cancellation in μ² - 1 near μ = 1.
    let c = ((m - 1.0) * (m + 1.0)).sqrt();
    Ok(TwoModeCovariance::from_parts(m, m, c))
}

/// Pure-loss channel of transmissivity `r` acting on the first (signal) mode.
pub fn apply_loss_to_signal(cm: &TwoModeCovariance, r: f64) -> Result<TwoModeCovariance> {
    check_unit_interval("r", r)?;
    cm.check_physical()?;
    let rr = TwoFloat::from(r);
    let a = (cm.a - 1.0) * rr + 1.0;
    let c = cm.c * rr.sqrt();
    Ok(TwoModeCovariance::from_parts(a, cm.b, c))
}

/// Symplectic eigenvalues `(ν₋, ν₊)` with `ν₋ ≤ ν₊`.
pub fn symplectic_eigenvalues(cm: &TwoModeCovariance) -> Result<(f64, f64)> {
    let (a, b, c) = (cm.a, cm.b, cm.c);
    let c2 = c * c;
    let delta = a * a + b * b - c2 * 2.0;
    let sdet = a * b - c2;
    // Δ² - 4·det factors as (a - b)²·((a + b)² - 4c²).
    let spread = (a + b) * (a + b) - c2 * 4.0;
    if spread < 0.0 {
        let scale: f64 = ((a + b) * (a + b)).into();
        if f64::from(spread) < -1e-12 * scale {
            return Err(ReadingError::NumericalDegeneracy {
                discriminant: spread.into(),
            });
        }
    }
    let spread = if spread < 0.0 { TwoFloat::from(0.0) } else { spread };
    let root = (a - b).abs() * spread.sqrt();
    let nu_plus_sq = (delta + root) / 2.0;
    if !(nu_plus_sq > 0.0) {
        return Err(ReadingError::NumericalDegeneracy {
            discriminant: nu_plus_sq.into(),
        });
    }
    let nu_plus = nu_plus_sq.sqrt();
    let nu_minus = sdet / nu_plus;
    Ok((nu_minus.into(), nu_plus.into()))
}

/// Fidelity `⟨ψ|σ|ψ⟩` between a pure and a mixed zero-mean state from their
/// covariance matrices: `F = 4 / √det(V_pure + V_mixed)`.
pub fn fidelity_pure_mixed_det(
    v_pure: &TwoModeCovariance,
    v_mixed: &TwoModeCovariance,
) -> Result<f64> {
    let (lo, hi) = symplectic_eigenvalues(v_pure)?;
    if (lo - 1.0).abs() > PURITY_TOLERANCE || (hi - 1.0).abs() > PURITY_TOLERANCE {
        return Err(ReadingError::NotPure {
            nu_minus: lo,
            nu_plus: hi,
        });
    }
    v_mixed.check_physical()?;
    let sum_a = v_pure.a + v_mixed.a;
    let sum_b = v_pure.b + v_mixed.b;
    let sum_c = v_pure.c + v_mixed.c;
    // det of the block sum is (AD - B²)².
    let block = sum_a * sum_b - sum_c * sum_c;
    let f = 4.0 / f64::from(block.abs());
    Ok(f.min(1.0))
}

/// Closed-form EPR fidelity `(1 + n̄(1 - √r))⁻²`.
pub fn fidelity_epr_closed(nbar: f64, r: f64) -> Result<f64> {
    check_unit_interval("r", r)?;
    fidelity_epr_at_gap(nbar, 1.0 - r)
}

/// `1 - F` for the EPR pair, computed without cancellation near `F = 1`.
pub fn epr_infidelity(nbar: f64, r: f64) -> Result<f64> {
    check_unit_interval("r", r)?;
    epr_infidelity_at_gap(nbar, 1.0 - r)
}

/// EPR fidelity parametrised by the reflectivity gap `1 - r`.
pub fn fidelity_epr_at_gap(nbar: f64, gap: f64) -> Result<f64> {
    let x = epr_loss_excess(nbar, gap)?;
    Ok((1.0 + x).powi(-2))
}

pub fn epr_infidelity_at_gap(nbar: f64, gap: f64) -> Result<f64> {
    let x = epr_loss_excess(nbar, gap)?;
    Ok(x * (2.0 + x) / ((1.0 + x) * (1.0 + x)))
}

/// `n̄(1 - √r)`, the quantity both EPR fidelity forms depend on.
fn epr_loss_excess(nbar: f64, gap: f64) -> Result<f64> {
    check_non_negative("nbar", nbar)?;
    check_unit_interval("1 - r", gap)?;
    Ok(nbar * one_minus_sqrt(gap))
}

/// Exponent `-n̄(1 - √r)²` of the coherent-state fidelity.
pub fn coherent_fidelity_exponent(nbar: f64, r: f64) -> Result<f64> {
    check_unit_interval("r", r)?;
    coherent_exponent_at_gap(nbar, 1.0 - r)
}

/// Coherent-state fidelity exponent parametrised by the gap `1 - r`.
pub fn coherent_exponent_at_gap(nbar: f64, gap: f64) -> Result<f64> {
    check_non_negative("nbar", nbar)?;
    check_unit_interval("1 - r", gap)?;
    let d = one_minus_sqrt(gap);
    Ok(-nbar * d * d)
}

/// Overlap `|⟨α|√r α⟩|² = exp(-n̄(1 - √r)²)` of the two coherent outputs.
pub fn fidelity_coherent(nbar: f64, r: f64) -> Result<f64> {
    Ok(coherent_fidelity_exponent(nbar, r)?.exp())
}

/// `1 - F` for the coherent pair via `expm1`.
pub fn coherent_infidelity(nbar: f64, r: f64) -> Result<f64> {
    Ok(-coherent_fidelity_exponent(nbar, r)?.exp_m1())
}

/// `1 - √r` from the gap `1 - r`, as `gap / (1 + √(1 - gap))`.
fn one_minus_sqrt(gap: f64) -> f64 {
    gap / (1.0 + (1.0 - gap).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn epr_vacuum_and_mu_three() {
        let v = epr_covariance(1.0).unwrap();
        assert_eq!((v.a(), v.b(), v.c()), (1.0, 1.0, 0.0));
        let v = epr_covariance(3.0).unwrap();
        assert_eq!(v.a(), 3.0);
        assert_eq!(v.b(), 3.0);
        assert_relative_eq!(v.c(), 8f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn epr_rejects_mu_below_one() {
        assert!(matches!(
            epr_covariance(0.999),
            Err(ReadingError::Domain { name: "mu", .. })
        ));
        assert!(epr_covariance(f64::NAN).is_err());
    }

    #[test]
    fn epr_nearly_vacuum_is_pure() {
        let (lo, hi) = symplectic_eigenvalues(&epr_covariance(1.000001).unwrap()).unwrap();
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn loss_identity_full_and_quarter() {
        let v = epr_covariance(3.0).unwrap();
        assert_eq!(apply_loss_to_signal(&v, 1.0).unwrap(), v);

        let full = apply_loss_to_signal(&v, 0.0).unwrap();
        assert_eq!((full.a(), full.b(), full.c()), (1.0, 3.0, 0.0));

        let quarter = apply_loss_to_signal(&v, 0.25).unwrap();
        assert_relative_eq!(quarter.a(), 1.5, max_relative = 1e-15);
        assert_eq!(quarter.b(), 3.0);
        assert_relative_eq!(quarter.c(), 2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn loss_rejects_bad_reflectivity() {
        let v = epr_covariance(2.0).unwrap();
        assert!(apply_loss_to_signal(&v, 1.5).is_err());
        assert!(apply_loss_to_signal(&v, -0.1).is_err());
    }

    #[test]
    fn symplectic_eigenvalues_examples() {
        let vac = TwoModeCovariance::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(symplectic_eigenvalues(&vac).unwrap(), (1.0, 1.0));

        let (lo, hi) = symplectic_eigenvalues(&epr_covariance(3.0).unwrap()).unwrap();
        assert_relative_eq!(lo, 1.0, epsilon = 1e-15);
        assert_relative_eq!(hi, 1.0, epsilon = 1e-15);

        // Δ = 7.25, det = 6.25, √(Δ² - 4det) = 5.25 → ν₊² = 6.25, ν₋² = 1.
        let mixed = apply_loss_to_signal(&epr_covariance(3.0).unwrap(), 0.25).unwrap();
        let (lo, hi) = symplectic_eigenvalues(&mixed).unwrap();
        assert_relative_eq!(lo * hi, 2.5, max_relative = 1e-15);
        assert_relative_eq!(hi, 2.5, max_relative = 1e-15);
        assert_relative_eq!(lo, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn unphysical_matrices_are_rejected() {
        assert!(TwoModeCovariance::new(0.5, 1.0, 0.0).is_err());
        // ab - c² = 0.5 < 1
        assert!(TwoModeCovariance::new(1.5, 1.5, 1.3).is_err());
        assert!(TwoModeCovariance::new(2.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn degenerate_discriminant_is_reported() {
        // (a + b)² < 4c² well beyond rounding.
        let cm = TwoModeCovariance::from_parts(1.0.into(), 3.0.into(), 5.0.into());
        assert!(matches!(
            symplectic_eigenvalues(&cm),
            Err(ReadingError::NumericalDegeneracy { .. })
        ));
    }

    #[test]
    fn determinant_fidelity_examples() {
        let v = epr_covariance(3.0).unwrap();
        assert_eq!(fidelity_pure_mixed_det(&v, &v).unwrap(), 1.0);

        let v0 = apply_loss_to_signal(&v, 0.25).unwrap();
        // A = 4.5, D = 6, B = √8 + √2, AD - B² = 9 → F = 4/9.
        assert_relative_eq!(
            fidelity_pure_mixed_det(&v, &v0).unwrap(),
            4.0 / 9.0,
            max_relative = 1e-15
        );

        let vac = epr_covariance(1.0).unwrap();
        for r in [0.0, 0.3, 0.9] {
            let lossy = apply_loss_to_signal(&vac, r).unwrap();
            assert_eq!(fidelity_pure_mixed_det(&vac, &lossy).unwrap(), 1.0);
        }
    }

    #[test]
    fn determinant_fidelity_needs_pure_first_argument() {
        let v = epr_covariance(3.0).unwrap();
        let v0 = apply_loss_to_signal(&v, 0.25).unwrap();
        assert!(matches!(
            fidelity_pure_mixed_det(&v0, &v),
            Err(ReadingError::NotPure { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(fidelity_epr_closed(3.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            fidelity_epr_closed(1.0, 0.25).unwrap(),
            4.0 / 9.0,
            max_relative = 1e-15
        );
        for r in [0.0, 0.5, 1.0] {
            assert_eq!(fidelity_epr_closed(0.0, r).unwrap(), 1.0);
        }
        assert_relative_eq!(
            epr_infidelity(1.0, 0.25).unwrap(),
            5.0 / 9.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn coherent_examples() {
        assert_eq!(fidelity_coherent(5.0, 1.0).unwrap(), 1.0);
        assert_eq!(fidelity_coherent(0.0, 0.3).unwrap(), 1.0);
        assert_relative_eq!(
            fidelity_coherent(1.0, 0.0).unwrap(),
            (-1f64).exp(),
            max_relative = 1e-15
        );
        assert!((fidelity_coherent(1.0, 0.0).unwrap() - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn coherent_infidelity_keeps_tiny_exponents() {
        // n̄(1-√r)² ≈ 2.5e-19, far below what 1 - exp(..) can resolve.
        let u = coherent_infidelity(1.0, 1.0 - 1e-9).unwrap();
        let expected = (1e-9 / (1.0 + (1.0 - 1e-9f64).sqrt())).powi(2);
        assert_relative_eq!(u, expected, max_relative = 1e-6);
        assert_eq!(1.0 - fidelity_coherent(1.0, 1.0 - 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms_reject_domain_violations() {
        assert!(fidelity_epr_closed(-1.0, 0.5).is_err());
        assert!(fidelity_coherent(1.0, 1.01).is_err());
        assert!(EprParameter::from_nbar(-0.1).is_err());
        let p = EprParameter::from_nbar(1.0).unwrap();
        assert_eq!(p.mu(), 3.0);
        assert_eq!(EprParameter::from_mu(1.0).unwrap().nbar(), 0.0);
    }

    proptest! {
        #[test]
        fn epr_is_pure(mu in 1.0f64..1e6) {
            let (lo, hi) = symplectic_eigenvalues(&epr_covariance(mu).unwrap()).unwrap();
            prop_assert!((lo - 1.0).abs() <= 1e-10, "nu_minus = {lo}");
            prop_assert!((hi - 1.0).abs() <= 1e-10, "nu_plus = {hi}");
        }

        #[test]
        fn loss_preserves_physicality(mu in 1.0f64..1e3, r in 0.0f64..=1.0) {
            let v0 = apply_loss_to_signal(&epr_covariance(mu).unwrap(), r).unwrap();
            prop_assert!(v0.is_physical());
            let (lo, _) = symplectic_eigenvalues(&v0).unwrap();
            prop_assert!(lo >= 1.0 - 1e-12);
        }

        #[test]
        fn closed_matches_determinant(mu in 1.0f64..1e3, r in 0.0f64..=1.0) {
            let v = epr_covariance(mu).unwrap();
            let v0 = apply_loss_to_signal(&v, r).unwrap();
            let det = fidelity_pure_mixed_det(&v, &v0).unwrap();
            let closed = fidelity_epr_closed((mu - 1.0) / 2.0, r).unwrap();
            prop_assert!((det - closed).abs() <= 1e-12 * closed.max(1.0));
        }

        #[test]
        fn fidelities_monotone(nbar in 0.0f64..1e4, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0, dn in 0.0f64..1e3) {
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(fidelity_epr_closed(nbar, lo).unwrap() <= fidelity_epr_closed(nbar, hi).unwrap());
            prop_assert!(fidelity_coherent(nbar, lo).unwrap() <= fidelity_coherent(nbar, hi).unwrap());
            prop_assert!(fidelity_epr_closed(nbar + dn, lo).unwrap() <= fidelity_epr_closed(nbar, lo).unwrap());
            prop_assert!(fidelity_coherent(nbar + dn, lo).unwrap() <= fidelity_coherent(nbar, lo).unwrap());
        }
    }
}
