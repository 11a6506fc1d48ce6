//! Replicate runner. Replicate `i` always draws from stream `i` of a ChaCha8
//! generator keyed by the seed, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Runs `f(i, rng_i)` for `i in 0..replicates` one after another.
pub fn run_replicates_sequential<T, F>(seed: u64, replicates: u64, f: F) -> Vec<T>
where
    F: Fn(u64, &mut ChaCha8Rng) -> T,
{
    (0..replicates)
        .map(|i| f(i, &mut replicate_rng(seed, i)))
        .collect()
}

/// Runs the replicates on a rayon pool with `jobs` threads (all cores when
/// `None`). Output order is replicate order.
#[cfg(feature = "parallel")]
pub fn run_replicates_parallel<T, F>(seed: u64, replicates: u64, jobs: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..replicates)
            .into_par_iter()
            .map(|i| f(i, &mut replicate_rng(seed, i)))
            .collect()
    })
}

/// Parallel when the `parallel` feature is on and `jobs != Some(1)`,
/// sequential otherwise.
pub fn run_replicates<T, F>(seed: u64, replicates: u64, jobs: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    if jobs != Some(1) {
        return run_replicates_parallel(seed, replicates, jobs, f);
    }
    let _ = jobs;
    run_replicates_sequential(seed, replicates, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = replicate_rng(9, 0).random();
        let b: u64 = replicate_rng(9, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, replicate_rng(9, 0).random::<u64>());
    }

    #[test]
    fn job_count_does_not_change_results() {
        let draw = |i: u64, rng: &mut ChaCha8Rng| (i, rng.random::<u64>());
        let seq = run_replicates_sequential(3, 40, draw);
        for jobs in [None, Some(1), Some(2), Some(7)] {
            assert_eq!(run_replicates(3, 40, jobs, draw), seq);
        }
    }
}
