//! Scenario files, reports and verification suites on top of `hherz-core`.

pub mod baseline;
pub mod harness;
pub mod report;
pub mod scenario;

pub use baseline::BaselineTable;
pub use harness::{run_axioms, run_calibration, run_constants, run_inequality, run_norms, AxiomOptions, HarnessError};
pub use report::{CheckReport, InequalityReport};
pub use scenario::{Scenario, ScenarioError};

/// Environment variable capping the worker threads; `0` or unset means one per core.
pub const THREADS_VAR: &str = "HHERZ_THREADS";

/// Sizes the global rayon pool from [`THREADS_VAR`]. Later calls are no-ops.
pub fn init_threads() -> anyhow::Result<()> {
    let n = match std::env::var(THREADS_VAR) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse::<usize>().map_err(|_| anyhow::anyhow!("{THREADS_VAR} must be a non-negative integer, got {v:?}"))?
        }
        _ => 0,
    };
    // an already-built pool is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
