use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use tmtrace::{Ball, Error, Result};

pub const MIN_PRECISION: u32 = 64;
pub const MAX_PRECISION: u32 = 4096;
pub const K_SIM_RANGE: std::ops::RangeInclusive<u32> = 5..=12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Trace,
    Germ,
    Converge,
    Cantor,
    Constants,
    Sigma,
    RatioCheck,
}

/// Everything that determines the bytes of an output file.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub lambda: String,
    pub precision_bits: u32,
    pub order: usize,
    pub k_sim: u32,
    pub depth: u32,
    pub grid: usize,
    pub output_format: Format,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&self.precision_bits) {
            return Err(Error::InvalidInput(format!(
                "precision must lie in [{MIN_PRECISION}, {MAX_PRECISION}], got {}",
                self.precision_bits
            )));
        }
        if !K_SIM_RANGE.contains(&self.k_sim) {
            return Err(Error::InvalidInput(format!(
                "K_sim must lie in [{}, {}], got {}",
                K_SIM_RANGE.start(),
                K_SIM_RANGE.end(),
                self.k_sim
            )));
        }
        if self.order < 8 {
            return Err(Error::InvalidInput("order must be at least 8".into()));
        }
        if self.grid == 0 {
            return Err(Error::InvalidInput("grid must be positive".into()));
        }
        self.lambda_at(self.precision_bits).map(|_| ())
    }

    pub fn lambda_at(&self, prec: u32) -> Result<Ball> {
        Ball::parse_decimal(prec, &self.lambda)
    }

    /// Significant digits printed for ball midpoints.
    pub fn digits(&self) -> usize {
        ((self.precision_bits as f64 * std::f64::consts::LOG10_2) as usize).max(20)
    }
}
