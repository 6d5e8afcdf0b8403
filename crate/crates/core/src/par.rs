//! Execution mode for sweep-style computations, with a data-parallel path
//! behind the `parallel` feature and a sequential fallback.

/// Whether a sweep runs on one thread or fans out across a thread pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Process work items one at a time, in order.
    Sequential,
    /// Process work items across the rayon thread pool.  Falls back to
    /// sequential execution when the `parallel` feature is disabled.
    Parallel,
}

impl ExecMode {
    /// The mode that will actually run, resolving the fallback.
    pub fn effective(self) -> ExecMode {
        match self {
            ExecMode::Parallel if !cfg!(feature = "parallel") => ExecMode::Sequential,
            m => m,
        }
    }

    /// Lowercase name of the effective mode, for reports.
    pub fn label(self) -> &'static str {
        match self.effective() {
            ExecMode::Sequential => "sequential",
            ExecMode::Parallel => "parallel",
        }
    }

    /// Apply `f` to every item, preserving input order in the output.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Send + Sync,
    {
        match self.effective() {
            ExecMode::Sequential => items.into_iter().map(f).collect(),
            ExecMode::Parallel => parallel_map(items, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let items: Vec<u32> = (0..100).collect();
        let seq = ExecMode::Sequential.map(items.clone(), |x| x * x);
        let par = ExecMode::Parallel.map(items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn labels_name_the_effective_mode() {
        assert_eq!(ExecMode::Sequential.label(), "sequential");
        let expected = if cfg!(feature = "parallel") { "parallel" } else { "sequential" };
        assert_eq!(ExecMode::Parallel.label(), expected);
    }
}
