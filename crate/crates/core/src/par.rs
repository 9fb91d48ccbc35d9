//! Data-parallel map over boundary nodes.
//!
//! With the `parallel` feature the map runs on rayon's pool; otherwise it
//! runs sequentially. Results always come back in input order and are
//! reduced by the caller in a fixed order, so outputs do not depend on the
//! scheduling.

use crate::error::{Error, Result};

/// Map `f` over `items`, stopping at the first error (by input order).
pub fn try_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let out: Vec<Result<R>> = items.par_iter().map(&f).collect();
        out.into_iter().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Run `f` with at most `threads` worker threads (`0` keeps the default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return Ok(f());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        if threads > 1 {
            return Err(Error::Invalid(
                "built without the `parallel` feature; use --threads 1".into(),
            ));
        }
        Ok(f())
    }
}

/// Pairwise sum in a fixed tree order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}
