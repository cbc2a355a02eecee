use fgt_core::events::{SampleSeed, TrialRunner};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::CliError;

pub fn pool(workers: usize) -> Result<ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::invalid(format!("cannot start {workers} workers: {e}")))
}

/// Successes over trials `0..trials`, trial t drawing from stream t of `base_seed`.
/// The sum does not depend on how trials are split across workers.
pub fn count_successes(pool: &ThreadPool, runner: &TrialRunner, theta: f64, base_seed: u64, trials: u64) -> Result<u64, CliError> {
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| runner.run(theta, SampleSeed::new(base_seed, t)).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })
    .map_err(CliError::from)
}
