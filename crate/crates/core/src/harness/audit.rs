//! Invariant audits: full status recomputation at every checkpoint and an
//! optional distribution comparison against the permutation oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::harness::config::RunConfig;
use crate::harness::exit;
use crate::harness::oracle::{compare_with_oracle, OracleReport};
use crate::harness::run::{execute_run, RunOptions};
use crate::harness::HarnessError;
use crate::process::{AuditReport, ProcessState};

/// Largest `n` accepted for the oracle comparison from the command line.
pub const MAX_AUDIT_ORACLE_N: usize = 5;

#[derive(Clone, Debug, Default)]
pub struct AuditOutcome {
    pub reports: Vec<AuditReport>,
    pub oracle: Option<OracleReport>,
}

impl AuditOutcome {
    pub fn first_failure(&self) -> Option<&AuditReport> {
        self.reports.iter().find(|r| !r.is_clean())
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none() && self.oracle.as_ref().is_none_or(|o| o.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            exit::SUCCESS
        } else {
            exit::INVARIANT
        }
    }

    /// Human-readable lines describing the audit.
    pub fn describe(&self) -> Vec<String> {
        let mut lines = Vec::new();
        let bad = self.reports.iter().filter(|r| !r.is_clean()).count();
        lines.push(format!(
            "audited {} checkpoint(s): {} clean, {} failing",
            self.reports.len(),
            self.reports.len() - bad,
            bad
        ));
        if let Some(r) = self.first_failure() {
            lines.push(format!(
                "first failure at step {}: {} status discrepancies, {} triangles, {} open-set errors",
                r.step,
                r.discrepancies.len(),
                r.triangles,
                r.open_set_errors.len()
            ));
            for d in r.discrepancies.iter().take(5) {
                lines.push(format!(
                    "  pair {{{}, {}}} stored {} recomputed {}",
                    d.pair.u, d.pair.v, d.stored, d.recomputed
                ));
            }
            for e in r.open_set_errors.iter().take(5) {
                lines.push(format!("  {e}"));
            }
        }
        if let Some(o) = &self.oracle {
            lines.push(format!(
                "oracle n={} trials={}: total variation {:.5} (tolerance {}) {}",
                o.n,
                o.trials,
                o.total_variation,
                o.tolerance,
                if o.passed { "ok" } else { "FAILED" }
            ));
        }
        lines
    }
}

/// Full audit of an existing state.
pub fn audit_state(state: &ProcessState) -> AuditOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    AuditOutcome {
        reports: vec![state.audit(usize::MAX, &mut rng)],
        oracle: None,
    }
}

/// Runs `config` with a full audit at every checkpoint; with
/// `oracle_trials`, also compares the saturated-graph distribution with the
/// oracle.
pub fn cmd_audit(config: &RunConfig, oracle_trials: Option<usize>) -> Result<AuditOutcome, HarnessError> {
    config.validate()?;
    if oracle_trials.is_some() && config.n > MAX_AUDIT_ORACLE_N {
        return Err(HarnessError::Usage(format!(
            "the oracle comparison is limited to n ≤ {MAX_AUDIT_ORACLE_N} (got {})",
            config.n
        )));
    }
    let run = execute_run(
        config,
        &[],
        RunOptions {
            audit_at_checkpoints: true,
        },
    )?;
    let oracle = oracle_trials
        .map(|trials| compare_with_oracle(config.n, trials, config.seed))
        .transpose()?;
    Ok(AuditOutcome {
        reports: run.audits,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{PairStatus, StopCondition};

    #[test]
    fn clean_run_passes() {
        let out = cmd_audit(&RunConfig::new(60), None).unwrap();
        assert!(out.reports.len() > 2);
        assert_eq!(out.exit_code(), exit::SUCCESS);
    }

    #[test]
    fn corrupted_state_exits_with_invariant_code() {
        let mut s = ProcessState::new(12, 3).unwrap();
        s.run(StopCondition::Saturation);
        assert_eq!(audit_state(&s).exit_code(), exit::SUCCESS);
        let e = s.edge_log()[0];
        s.corrupt_status(e.u, e.v, PairStatus::Open);
        let out = audit_state(&s);
        assert_eq!(out.exit_code(), exit::INVARIANT);
        assert!(out.describe().iter().any(|l| l.contains("first failure")));
    }

    #[test]
    fn oracle_limited_to_small_n() {
        assert!(cmd_audit(&RunConfig::new(6), Some(10)).is_err());
        let out = cmd_audit(&RunConfig::new(4), Some(20_000)).unwrap();
        assert!(out.oracle.as_ref().unwrap().passed, "{:?}", out.oracle);
    }
}
