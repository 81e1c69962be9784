// SPDX-License-Identifier: MIT OR Apache-2.0

//! Worker-pool plumbing.
//!
//! All data-parallel loops in the crate run inside one lazily-built rayon
//! pool so that the `SHIFTSCAN_THREADS` environment variable caps worker
//! parallelism globally. Results never depend on the thread count: parallel
//! maps are collected in index order and every stochastic replicate owns its
//! own RNG stream.

use std::sync::OnceLock;

/// Environment variable that caps the number of worker threads.
pub const THREADS_ENV_VAR: &str = "SHIFTSCAN_THREADS";

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

/// The crate-wide worker pool. Built on first use; honours
/// [`THREADS_ENV_VAR`] when it holds a positive integer and otherwise falls
/// back to rayon's default sizing. Unparseable or zero values are ignored
/// rather than fatal: a bad environment variable should not take down a
/// long-running caller.
pub(crate) fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(threads) = requested_threads() {
            builder = builder.num_threads(threads);
        }
        builder
            .thread_name(|i| format!("shiftscan-worker-{i}"))
            .build()
            .expect("failed to build the shiftscan worker pool")
    })
}

fn requested_threads() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV_VAR).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Some(n),
        _ => None,
    }
}
