//! Worker pool shared by the sweep and certification engines.

use std::sync::OnceLock;

use rayon::ThreadPool;

/// Environment variable capping the number of worker threads; `0` or unset
/// means one per core.
pub const THREADS_ENV: &str = "HARVESTLAB_THREADS";

fn requested_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn pool() -> Option<&'static ThreadPool> {
    static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| match requested_threads() {
        0 => None,
        n => rayon::ThreadPoolBuilder::new().num_threads(n).build().ok(),
    })
    .as_ref()
}

/// Runs `f` inside the capped pool if one was requested.
pub fn install<R, F>(f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match pool() {
        Some(p) => p.install(f),
        None => f(),
    }
}
