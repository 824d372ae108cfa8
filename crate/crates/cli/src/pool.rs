use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{CliError, Result};

pub const THREADS_ENV: &str = "EPI_LAB_THREADS";

/// Worker pool sized by the available cores, capped by `EPI_LAB_THREADS`.
pub fn worker_pool() -> Result<ThreadPool> {
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let cap: usize = v.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
                CliError::Argument(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                ))
            })?;
            cap.min(cores)
        }
        Err(_) => cores,
    };
    Ok(ThreadPoolBuilder::new().num_threads(threads).build()?)
}
