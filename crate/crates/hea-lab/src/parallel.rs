//! Worker-pool plumbing. Sample loops are embarrassingly parallel: every
//! item derives its randomness from (master seed, item index), results are
//! collected in index order, and reductions run sequentially over that
//! order — so outputs are byte-identical for any thread count.

use std::sync::OnceLock;

use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HEA_LAB_THREADS";

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(threads) = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&t| t >= 1)
        {
            builder = builder.num_threads(threads);
        }
        builder.build().expect("worker pool")
    })
}

/// Map `f` over 0..count on the pool, returning results in index order.
pub fn par_map_ordered<T, E, F>(count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync,
{
    pool().install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Stable per-item seed derivation (splitmix64 over the master seed and the
/// item index), used where a sub-experiment needs its own seed rather than a
/// ChaCha stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
