use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::harness::HarnessError;
use crate::process::StopCondition;
use crate::trajectory::TrajectoryParams;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_Y_SAMPLES: usize = 200;
pub const DEFAULT_BLOCK_SAMPLES: usize = 10_000;
/// Blocked placements kept from the horizon measurement for re-checking at the end.
pub const DEFAULT_BLOCKED_KEPT: usize = 100;
/// Spacing of the scaled-time grid where checkpoints are always taken.
pub const T_GRID_STEP: f64 = 0.2;

/// Stop rule as written on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StopSpec {
    Saturation,
    Steps(usize),
    /// Multiple of the horizon `m`.
    Horizon(f64),
}

impl StopSpec {
    pub fn to_condition(self, params: &TrajectoryParams) -> StopCondition {
        match self {
            StopSpec::Saturation => StopCondition::Saturation,
            StopSpec::Steps(k) => StopCondition::Steps(k),
            StopSpec::Horizon(x) => StopCondition::Steps((x * params.m as f64).round() as usize),
        }
    }
}

impl fmt::Display for StopSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopSpec::Saturation => f.write_str("saturation"),
            StopSpec::Steps(k) => write!(f, "steps:{k}"),
            StopSpec::Horizon(x) => write!(f, "horizon:{x}"),
        }
    }
}

impl FromStr for StopSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Usage(format!("invalid stop `{s}`: expected saturation, steps:K or horizon:X"));
        if s == "saturation" {
            return Ok(StopSpec::Saturation);
        }
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "steps" => value.parse().map(StopSpec::Steps).map_err(|_| bad()),
            "horizon" => match value.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => Ok(StopSpec::Horizon(x)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub stop: StopSpec,
    /// Defaults to `⌈m/50⌉` (at least 1).
    pub checkpoint_every: Option<usize>,
    pub y_sample_count: usize,
    pub patterns: Vec<PathBuf>,
    pub record_frozen_y: bool,
    pub output_dir: Option<PathBuf>,
    pub block_samples: usize,
    pub densest_restarts: usize,
    /// Pattern monitors stop looking for first appearances after this step.
    #[serde(default)]
    pub monitor_limit: Option<usize>,
}

impl RunConfig {
    pub fn new(n: usize) -> Self {
        RunConfig {
            n,
            seed: DEFAULT_SEED,
            stop: StopSpec::Saturation,
            checkpoint_every: None,
            y_sample_count: DEFAULT_Y_SAMPLES,
            patterns: Vec::new(),
            record_frozen_y: false,
            output_dir: None,
            block_samples: DEFAULT_BLOCK_SAMPLES,
            densest_restarts: crate::pattern::SubsetMode::DEFAULT_RESTARTS,
            monitor_limit: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 2 {
            return Err(HarnessError::Usage(format!("n must be at least 2 (got {})", self.n)));
        }
        if self.checkpoint_every == Some(0) {
            return Err(HarnessError::Usage("checkpoint interval must be at least 1".into()));
        }
        Ok(())
    }

    pub fn checkpoint_interval(&self, params: &TrajectoryParams) -> usize {
        self.checkpoint_every
            .unwrap_or_else(|| params.m.div_ceil(50))
            .max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_stop_specs() {
        assert_eq!("saturation".parse::<StopSpec>().unwrap(), StopSpec::Saturation);
        assert_eq!("steps:50".parse::<StopSpec>().unwrap(), StopSpec::Steps(50));
        assert_eq!("horizon:1".parse::<StopSpec>().unwrap(), StopSpec::Horizon(1.0));
        for bad in ["", "steps", "steps:-1", "horizon:x", "horizon:-2", "time:1"] {
            assert!(bad.parse::<StopSpec>().is_err(), "{bad}");
        }
        for spec in [StopSpec::Saturation, StopSpec::Steps(3), StopSpec::Horizon(1.5)] {
            assert_eq!(spec.to_string().parse::<StopSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn horizon_maps_to_m() {
        let params = TrajectoryParams::new(2000).unwrap();
        assert_eq!(
            StopSpec::Horizon(1.0).to_condition(&params),
            StopCondition::Steps(7705)
        );
        let cfg = RunConfig::new(2000);
        assert_eq!(cfg.checkpoint_interval(&params), 155);
        assert!(RunConfig::new(1).validate().is_err());
    }
}
