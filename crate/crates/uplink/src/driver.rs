//! Parallel execution of Monte Carlo trials.
//!
//! Each trial owns its random stream, so running them on any number of threads
//! gives the same outcomes. `collect` on an indexed parallel iterator keeps
//! trial order, and all estimators then reduce sequentially.

use rayon::prelude::*;
use uplink_core::mcsim::{run_trial, SimError, SimulationConfig, TrialOutcome};
use uplink_core::NetworkParams;

/// Runs every trial of `cfg`, on the global rayon pool or on a dedicated pool
/// of `threads` workers.
pub fn run_trials_parallel(
    p: &NetworkParams,
    cfg: &SimulationConfig,
    threads: Option<usize>,
) -> Result<Vec<TrialOutcome>, SimError> {
    cfg.validate(p)?;
    let work = || (0..cfg.trials).into_par_iter().map(|t| run_trial(p, cfg, t)).collect();
    match threads {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool construction")
            .install(work),
    }
}
