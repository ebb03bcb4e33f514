//! Parallel trial executor backed by a dedicated rayon pool.

use mimo_recip_core::montecarlo::TrialExecutor;
use rayon::prelude::*;

/// Environment variable consulted when `--workers` is absent.
pub const WORKERS_ENV: &str = "MIMO_RECIP_WORKERS";

pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `workers = 0` lets rayon pick the number of logical CPUs.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
        Ok(RayonExecutor { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl TrialExecutor for RayonExecutor {
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        // indexed collect keeps output order independent of scheduling
        self.pool.install(|| (0..n).into_par_iter().map(job).collect())
    }
}
