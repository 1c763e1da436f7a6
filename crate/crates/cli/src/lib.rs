//! Command-line front end for the quantum-reading library: CSV sweeps for
//! plotting, a secure-memory design report, and a Fock-space oracle check.

pub mod error;
pub mod format;
pub mod grid;
pub mod report;
pub mod sweep;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, Result};
use grid::Scale;
use sweep::{EnergyAxis, ReflectivityAxis, DEFAULT_DELTA_ENERGY, DEFAULT_DELTA_REFLECTIVITY};
use table::{check_precision, emit, DEFAULT_PRECISION};

#[derive(Debug, Parser)]
#[command(name = "qread", version, about = "Quantum reading of optical memories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information gain of the EPR reader over the coherent reader on an (n̄, r) grid.
    SweepDelta {
        #[command(flatten)]
        energy: EnergyArgs,
        #[arg(long, default_value_t = DEFAULT_DELTA_REFLECTIVITY.min)]
        r_min: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA_REFLECTIVITY.max)]
        r_max: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA_REFLECTIVITY.steps)]
        r_steps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Both readers along the design curve 1 - r = K/n̄.
    ConditionCurves {
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coherent-reader information at fixed r for energies up to the budget.
    ClassicalCap {
        #[arg(long, default_value_t = 1000.0)]
        nbar_max: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        /// Cell reflectivity; defaults to 1 - K/nbar-max.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        n_min: Option<f64>,
        #[arg(long)]
        n_steps: Option<usize>,
        #[arg(long)]
        n_scale: Option<Scale>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Design report for a memory secured against readers with at most nbar-max photons.
    Design {
        #[arg(long, default_value_t = 1000.0)]
        nbar_max: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare closed forms with a truncated Fock-space computation.
    OracleCheck {
        #[arg(long, default_value_t = 1.0)]
        n_bar: f64,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Fock cutoff per mode; chosen from the state tails when omitted.
        #[arg(long)]
        cutoff: Option<usize>,
        /// Run above the desk-scale energy guard.
        #[arg(long)]
        force: bool,
    },
}

/// Energy-axis flags; unset values fall back to the subcommand default.
#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[arg(long)]
    pub n_min: Option<f64>,
    #[arg(long)]
    pub n_max: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// linear or log
    #[arg(long)]
    pub n_scale: Option<Scale>,
}

impl EnergyArgs {
    fn resolve(&self, default: EnergyAxis) -> EnergyAxis {
        EnergyAxis {
            min: self.n_min.unwrap_or(default.min),
            max: self.n_max.unwrap_or(default.max),
            steps: self.n_steps.unwrap_or(default.steps),
            scale: self.n_scale.unwrap_or(default.scale),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits in CSV output.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,
}

/// Runs one subcommand to completion. All values are computed before
/// anything is written, so a failing row leaves no partial output.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::SweepDelta {
            energy,
            r_min,
            r_max,
            r_steps,
            output,
        } => {
            let precision = check_precision(output.precision)?;
            let reflectivity = ReflectivityAxis {
                min: *r_min,
                max: *r_max,
                steps: *r_steps,
            };
            let table = sweep::sweep_delta(&energy.resolve(DEFAULT_DELTA_ENERGY), &reflectivity)?;
            emit(&table.to_csv(precision), output.out.as_deref())
        }
        Command::ConditionCurves { k, energy, output } => {
            let precision = check_precision(output.precision)?;
            let axis = energy.resolve(sweep::default_condition_energy(*k));
            let table = sweep::condition_curves(*k, &axis)?;
            emit(&table.to_csv(precision), output.out.as_deref())
        }
        Command::ClassicalCap {
            nbar_max,
            k,
            r,
            n_min,
            n_steps,
            n_scale,
            output,
        } => {
            let precision = check_precision(output.precision)?;
            let r = sweep::cap_reflectivity(*nbar_max, *k, *r)?;
            let axis = EnergyAxis {
                min: n_min.unwrap_or(1.0),
                max: *nbar_max,
                steps: n_steps.unwrap_or(200),
                scale: n_scale.unwrap_or(Scale::Log),
            };
            let table = sweep::classical_cap(*nbar_max, r, &axis)?;
            emit(&table.to_csv(precision), output.out.as_deref())
        }
        Command::Design { nbar_max, k, output } => {
            let precision = check_precision(output.precision)?;
            let report = report::design(*nbar_max, *k)?;
            let csv = report::design_table(&report)?.to_csv(precision);
            let text = report::design_text(&report, precision);
            match output.out.as_deref() {
                Some(path) => {
                    emit(&csv, Some(path))?;
                    emit(&text, None)
                }
                None => emit(&format!("{text}\n{csv}"), None),
            }
        }
        Command::OracleCheck {
            n_bar,
            r,
            cutoff,
            force,
        } => {
            let report = report::oracle_check(*n_bar, *r, *cutoff, *force)?;
            emit(&report.to_string(), None)?;
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed())
                    .map(|c| c.name)
                    .collect();
                Err(CliError::OracleFailure(failed.join("; ")))
            }
        }
    }
}
