//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature the items run on a rayon pool; otherwise
//! they run in sequence. Either way the output order matches the input.

/// Number of workers used when none is requested.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Maps `f` over `items` with at most `jobs` workers (`0` picks the
/// default).
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    let jobs = if jobs == 0 { default_jobs() } else { jobs };
    if jobs == 1 || items.len() < 2 {
        return map_sequential(items, f);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        // no threads available; fall back to the calling thread
        Err(_) => map_sequential(items, f),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], _jobs: usize, f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    map_sequential(items, f)
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..200).collect();
        let expect: Vec<u64> = items.iter().map(|x| x * x + 1).collect();
        for jobs in [0, 1, 2, 7] {
            assert_eq!(map(&items, jobs, |x| x * x + 1), expect);
        }
        assert_eq!(map_sequential(&items, |x| x * x + 1), expect);
    }

    #[test]
    fn empty_input() {
        let items: Vec<u8> = Vec::new();
        assert!(map(&items, 4, |x| *x).is_empty());
    }
}
