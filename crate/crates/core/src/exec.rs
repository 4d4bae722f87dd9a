//! Sequential / data-parallel execution switch.
//!
//! Hot loops (batch evaluation, round-trip sweeps, per-layer metric kernels,
//! pairwise distances) go through [`Exec::map`]. With the `parallel` feature
//! enabled, [`Exec::Parallel`] runs on rayon; without it every mode is
//! sequential. Output order always matches input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Like [`Exec::map`], but bounded to `threads` workers when parallel.
    pub fn map_bounded<T, R, F>(self, items: &[T], threads: usize, f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && threads > 1 {
            use rayon::prelude::*;
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                return pool.install(|| items.par_iter().map(f).collect());
            }
        }
        let _ = threads;
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let xs: Vec<u32> = (0..1000).collect();
        let seq = Exec::Sequential.map(&xs, |x| x * 3);
        let par = Exec::Parallel.map(&xs, |x| x * 3);
        assert_eq!(seq, par);
        assert_eq!(Exec::Parallel.map_bounded(&xs, 3, |x| x + 1), Exec::Sequential.map_bounded(&xs, 3, |x| x + 1));
        assert_eq!(Exec::Parallel.map_range(0..10, |i| i), (0..10).collect::<Vec<_>>());
    }
}
