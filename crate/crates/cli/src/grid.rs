use std::fmt;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(format!("unknown scale '{other}' (expected linear or log)")),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        })
    }
}

/// `steps` points from `min` to `max` inclusive; both endpoints are exact.
pub fn grid(min: f64, max: f64, steps: usize, scale: Scale) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(CliError::Config(format!("grid needs at least 2 steps, got {steps}")));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CliError::Config(format!("degenerate range [{min}, {max}]")));
    }
    if scale == Scale::Log && min <= 0.0 {
        return Err(CliError::Config(format!("log grid needs a positive minimum, got {min}")));
    }
    let last = (steps - 1) as f64;
    let mut points: Vec<f64> = (0..steps)
        .map(|i| {
            let t = i as f64 / last;
            match scale {
                Scale::Linear => min + (max - min) * t,
                Scale::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
            }
        })
        .collect();
    points[0] = min;
    points[steps - 1] = max;
    Ok(points)
}
