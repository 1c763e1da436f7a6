//! Grid sweeps behind the `sweep-delta`, `condition-curves` and
//! `classical-cap` subcommands.

use quantum_reading::readout::{
    info_classical, info_classical_at_gap, info_gain_delta, info_quantum_at_gap,
};

use crate::error::{CliError, Result};
use crate::grid::{grid, Scale};
use crate::table::Table;

/// Photon-number axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl EnergyAxis {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.min >= 0.0) {
            return Err(CliError::Config(format!("n-min must be >= 0, got {}", self.min)));
        }
        grid(self.min, self.max, self.steps, self.scale)
    }
}

/// Reflectivity axis; always linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectivityAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ReflectivityAxis {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&self.min) || !(0.0..=1.0).contains(&self.max) {
            return Err(CliError::Config(format!(
                "reflectivity range [{}, {}] must lie in [0, 1]",
                self.min, self.max
            )));
        }
        grid(self.min, self.max, self.steps, Scale::Linear)
    }
}

pub const DEFAULT_DELTA_ENERGY: EnergyAxis = EnergyAxis {
    min: 1.0,
    max: 5e4,
    steps: 200,
    scale: Scale::Log,
};

pub const DEFAULT_DELTA_REFLECTIVITY: ReflectivityAxis = ReflectivityAxis {
    min: 0.99,
    max: 0.99999,
    steps: 200,
};

/// `n_bar,r,delta` over the product grid, reflectivity-major.
pub fn sweep_delta(energy: &EnergyAxis, reflectivity: &ReflectivityAxis) -> Result<Table> {
    let ns = energy.points()?;
    let rs = reflectivity.points()?;
    let mut table = Table::new(vec!["n_bar", "r", "delta"]);
    for &r in &rs {
        for &n in &ns {
            table.push(vec![n, r, info_gain_delta(n, r)?])?;
        }
    }
    Ok(table)
}

/// Default energy axis of `condition-curves` for gap coefficient `k`.
pub fn default_condition_energy(k: f64) -> EnergyAxis {
    EnergyAxis {
        min: 10.0 * k,
        max: 1e8,
        steps: 200,
        scale: Scale::Log,
    }
}

/// `n_bar,info_classical,info_quantum` along the design curve `1 - r = K/n̄`.
pub fn condition_curves(k: f64, energy: &EnergyAxis) -> Result<Table> {
    check_gap_coefficient(k)?;
    let ns = energy.points()?;
    if let Some(&n) = ns.iter().find(|&&n| n <= k) {
        return Err(CliError::Config(format!(
            "every n_bar must exceed K = {k}; grid contains {n}"
        )));
    }
    let mut table = Table::new(vec!["n_bar", "info_classical", "info_quantum"]);
    for n in ns {
        let gap = k / n;
        table.push(vec![
            n,
            info_classical_at_gap(n, gap)?,
            info_quantum_at_gap(n, gap)?,
        ])?;
    }
    Ok(table)
}

/// Reflectivity used by `classical-cap`: explicit, or `1 - K/n̄_max`.
pub fn cap_reflectivity(nbar_max: f64, k: f64, r: Option<f64>) -> Result<f64> {
    if let Some(r) = r {
        if !(0.0..=1.0).contains(&r) {
            return Err(CliError::Config(format!("r must lie in [0, 1], got {r}")));
        }
        return Ok(r);
    }
    check_gap_coefficient(k)?;
    if !(nbar_max > k && nbar_max.is_finite()) {
        return Err(CliError::Config(format!(
            "nbar-max must exceed K = {k}, got {nbar_max}"
        )));
    }
    Ok(1.0 - k / nbar_max)
}

/// `n_bar,info_classical` at fixed `r` for `n̄ ≤ n̄_max`. The last row is
/// always `n̄_max`.
pub fn classical_cap(nbar_max: f64, r: f64, energy: &EnergyAxis) -> Result<Table> {
    if energy.max != nbar_max {
        return Err(CliError::Config(format!(
            "grid must end at nbar-max = {nbar_max}, got {}",
            energy.max
        )));
    }
    let ns = energy.points()?;
    let mut table = Table::new(vec!["n_bar", "info_classical"]);
    for n in ns {
        table.push(vec![n, info_classical(n, r)?])?;
    }
    Ok(table)
}

fn check_gap_coefficient(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("K must be positive, got {k}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(min: f64, max: f64, scale: Scale) -> EnergyAxis {
        EnergyAxis {
            min,
            max,
            steps: 5,
            scale,
        }
    }

    #[test]
    fn delta_rows_are_reflectivity_major() {
        let rs = ReflectivityAxis {
            min: 0.9,
            max: 1.0,
            steps: 3,
        };
        let t = sweep_delta(&small(1.0, 100.0, Scale::Log), &rs).unwrap();
        assert_eq!(t.rows().len(), 15);
        assert_eq!(t.rows()[0][1], 0.9);
        assert_eq!(t.rows()[4][1], 0.9);
        assert_eq!(t.rows()[5][1], 0.95);
        assert_eq!(t.rows()[4][0], 100.0);
        // r = 1 rows carry no information gain.
        assert!(t.rows()[10..].iter().all(|row| row[2] == 0.0));
    }

    #[test]
    fn delta_zero_energy_rows() {
        let rs = ReflectivityAxis {
            min: 0.5,
            max: 0.99,
            steps: 4,
        };
        let t = sweep_delta(&small(0.0, 1.0, Scale::Linear), &rs).unwrap();
        for row in t.rows().iter().filter(|row| row[0] == 0.0) {
            assert_eq!(row[2], 0.0);
        }
    }

    #[test]
    fn condition_curves_reject_small_budgets() {
        assert!(condition_curves(1.0, &small(1.0, 10.0, Scale::Log)).is_err());
        assert!(condition_curves(0.0, &small(1.0, 10.0, Scale::Log)).is_err());
        let t = condition_curves(1.0, &default_condition_energy(1.0)).unwrap();
        assert_eq!(t.rows().len(), 200);
        for row in t.rows() {
            assert!(row[2] >= row[1], "{row:?}");
        }
    }

    #[test]
    fn classical_cap_ends_at_budget() {
        let r = cap_reflectivity(1000.0, 1.0, None).unwrap();
        assert_eq!(r, 0.999);
        let t = classical_cap(1000.0, r, &small(1.0, 1000.0, Scale::Log)).unwrap();
        assert_eq!(t.rows().last().unwrap()[0], 1000.0);
        assert!(classical_cap(1000.0, r, &small(1.0, 500.0, Scale::Log)).is_err());
        assert!(cap_reflectivity(1.0, 1.0, None).is_err());
        assert!(cap_reflectivity(10.0, 1.0, Some(1.5)).is_err());
    }

    #[test]
    fn axes_validate() {
        assert!(small(-1.0, 1.0, Scale::Linear).points().is_err());
        let bad = ReflectivityAxis {
            min: 0.5,
            max: 1.2,
            steps: 3,
        };
        assert!(bad.points().is_err());
    }
}
