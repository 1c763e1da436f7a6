//! Design report and Fock-space oracle check.

use std::fmt::{self, Write as _};

use quantum_reading::design::{design_report, DesignReport, DesignSpec};
use quantum_reading::fock::{
    apply_loss_to_signal_fock, coherent_cutoff, coherent_state_vector, helstrom_exact,
    moments_from_density, tmsv_cutoff, tmsv_state_vector, HelstromOutcome,
    DEFAULT_TAIL_TOLERANCE, MOMENT_STRUCTURE_TOLERANCE,
};
use quantum_reading::gaussian::{
    apply_loss_to_signal, epr_covariance, fidelity_coherent, fidelity_epr_closed,
    fidelity_pure_mixed_det,
};
use quantum_reading::readout::{classical_error_prob, quantum_error_prob_qcb};
use quantum_reading::ReadingError;

use crate::error::{CliError, Result};
use crate::format::format_significant;
use crate::table::Table;

pub fn design(nbar_max: f64, k: f64) -> Result<DesignReport> {
    let spec = DesignSpec::new(nbar_max, k).map_err(|e| match e {
        ReadingError::DesignInfeasible { .. } => CliError::Config(e.to_string()),
        other => other.into(),
    })?;
    Ok(design_report(&spec)?)
}

pub fn design_table(report: &DesignReport) -> Result<Table> {
    let mut table = Table::new(vec![
        "nbar_max",
        "K",
        "r",
        "info_classical_cap",
        "info_quantum",
        "delta",
        "asymptotic_quantum",
    ]);
    table.push(vec![
        report.nbar_max,
        report.gap_coefficient,
        report.r,
        report.info_classical_cap,
        report.info_quantum,
        report.delta,
        report.asymptotic_quantum,
    ])?;
    Ok(table)
}

pub fn design_text(report: &DesignReport, precision: usize) -> String {
    let f = |v| format_significant(v, precision);
    let mut out = String::new();
    let _ = writeln!(out, "photon budget         {}", f(report.nbar_max));
    let _ = writeln!(out, "gap coefficient K     {}", f(report.gap_coefficient));
    let _ = writeln!(out, "cell reflectivity r   {}", f(report.r));
    let _ = writeln!(out, "coherent reader cap   {} bits", f(report.info_classical_cap));
    let _ = writeln!(out, "EPR reader (QCB)      {} bits", f(report.info_quantum));
    let _ = writeln!(out, "advantage             {} bits", f(report.delta));
    let _ = writeln!(out, "EPR limit n -> inf    {} bits", f(report.asymptotic_quantum));
    out
}

/// Energies above this need `--force` for the oracle.
pub const ORACLE_SAFE_NBAR: f64 = 5.0;

/// Tolerances of the individual oracle checks.
pub const QCB_SLACK: f64 = 1e-9;
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub nbar: f64,
    pub r: f64,
    pub coherent_cutoff: usize,
    pub tmsv_cutoff: usize,
    pub coherent_tail: f64,
    pub tmsv_tail: f64,
    pub fidelity_epr_closed: f64,
    pub fidelity_epr_det: f64,
    pub fidelity_epr_fock: f64,
    pub fidelity_coherent: f64,
    pub qcb: f64,
    pub epr_exact: HelstromOutcome,
    pub coherent_closed: f64,
    pub coherent_exact: HelstromOutcome,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(OracleCheck::passed)
    }
}

/// Truncated Fock-space evaluation of both transmitters at `(n̄, r)`,
/// compared against the Gaussian closed forms. `cutoff` overrides the
/// automatic choice for both states.
pub fn oracle_check(nbar: f64, r: f64, cutoff: Option<usize>, force: bool) -> Result<OracleReport> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(CliError::Config(format!("n-bar must be >= 0, got {nbar}")));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(CliError::Config(format!("r must lie in [0, 1], got {r}")));
    }
    if nbar > ORACLE_SAFE_NBAR && !force {
        return Err(CliError::Config(format!(
            "n-bar = {nbar} exceeds {ORACLE_SAFE_NBAR}; the two-mode space grows quadratically, pass --force to run anyway"
        )));
    }
    let tol = DEFAULT_TAIL_TOLERANCE;
    let mu = 2.0 * nbar + 1.0;
    let n_tmsv = match cutoff {
        Some(n) => n,
        None => tmsv_cutoff(mu, tol)?,
    };
    let n_coh = match cutoff {
        Some(n) => n,
        None => coherent_cutoff(nbar, tol),
    };

    let psi = tmsv_state_vector(mu, n_tmsv, tol)?;
    let sigma0 = apply_loss_to_signal_fock(&psi, r, None)?;
    let sigma1 = psi.density();
    let epr_exact = helstrom_exact(&sigma0, &sigma1, 0.5)?;
    let fidelity_epr_fock = sigma0.expectation_pure(&psi)?;

    let v_pure = epr_covariance(mu)?;
    let v_lossy = apply_loss_to_signal(&v_pure, r)?;
    let fidelity_epr_det = fidelity_pure_mixed_det(&v_pure, &v_lossy)?;
    let fidelity_epr_closed = fidelity_epr_closed(nbar, r)?;
    let qcb = quantum_error_prob_qcb(nbar, r)?.p_bar();

    let coh0 = coherent_state_vector((r * nbar).sqrt(), n_coh, tol)?;
    let coh1 = coherent_state_vector(nbar.sqrt(), n_coh, tol)?;
    let coherent_exact = helstrom_exact(&coh0.density(), &coh1.density(), 0.5)?;
    let coherent_closed = classical_error_prob(nbar, r)?.p_bar();

    let moment_deviation = match moments_from_density(&sigma0, MOMENT_STRUCTURE_TOLERANCE) {
        Ok(est) => [
            est.covariance.a() - v_lossy.a(),
            est.covariance.b() - v_lossy.b(),
            est.covariance.c() - v_lossy.c(),
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs())),
        Err(ReadingError::Structure { residual, .. }) => residual,
        Err(e) => return Err(e.into()),
    };

    let checks = vec![
        OracleCheck {
            name: "exact EPR error within QCB",
            deviation: (epr_exact.p_bar - qcb).max(0.0),
            tolerance: QCB_SLACK,
        },
        OracleCheck {
            name: "Fock EPR fidelity vs closed form",
            deviation: (fidelity_epr_fock - fidelity_epr_closed).abs(),
            tolerance: ORACLE_TOLERANCE,
        },
        OracleCheck {
            name: "exact coherent error vs closed form",
            deviation: (coherent_exact.p_bar - coherent_closed).abs(),
            tolerance: ORACLE_TOLERANCE,
        },
        OracleCheck {
            name: "lossy EPR moments vs covariance",
            deviation: moment_deviation,
            tolerance: ORACLE_TOLERANCE,
        },
    ];

    Ok(OracleReport {
        nbar,
        r,
        coherent_cutoff: n_coh,
        tmsv_cutoff: n_tmsv,
        coherent_tail: coh0.tail().max(coh1.tail()),
        tmsv_tail: psi.tail(),
        fidelity_epr_closed,
        fidelity_epr_det,
        fidelity_epr_fock,
        fidelity_coherent: fidelity_coherent(nbar, r)?,
        qcb,
        epr_exact,
        coherent_closed,
        coherent_exact,
        checks,
    })
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = |v: f64| format!("{v:.12e}");
        writeln!(f, "n_bar = {}, r = {}", self.nbar, self.r)?;
        writeln!(
            f,
            "cutoffs: coherent {} (tail {}), two-mode {} (tail {})",
            self.coherent_cutoff,
            g(self.coherent_tail),
            self.tmsv_cutoff,
            g(self.tmsv_tail)
        )?;
        writeln!(f, "coherent fidelity          {}", g(self.fidelity_coherent))?;
        writeln!(f, "EPR fidelity closed form   {}", g(self.fidelity_epr_closed))?;
        writeln!(f, "EPR fidelity determinant   {}", g(self.fidelity_epr_det))?;
        writeln!(f, "EPR fidelity Fock          {}", g(self.fidelity_epr_fock))?;
        writeln!(f, "coherent error closed form {}", g(self.coherent_closed))?;
        writeln!(
            f,
            "coherent error exact       {} +- {}",
            g(self.coherent_exact.p_bar),
            g(self.coherent_exact.error_bar)
        )?;
        writeln!(f, "EPR error QCB              {}", g(self.qcb))?;
        writeln!(
            f,
            "EPR error exact            {} +- {}",
            g(self.epr_exact.p_bar),
            g(self.epr_exact.error_bar)
        )?;
        for check in &self.checks {
            writeln!(
                f,
                "{} {}: deviation {} (tolerance {})",
                if check.passed() { "PASS" } else { "FAIL" },
                check.name,
                g(check.deviation),
                g(check.tolerance)
            )?;
        }
        Ok(())
    }
}
