//! Thread-pool scoping. Results never depend on the thread count: parallel
//! maps collect in input order and reductions run serially afterwards.

use crate::error::{Error, Result};

/// Run `f` on a dedicated pool with `threads` workers (`None` = rayon default).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}
