//! Execution policy for data-parallel loops.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! otherwise, or with [`Execution::Sequential`], it runs on the calling thread.
//! Results are always returned in input order, so both modes produce
//! bitwise-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `0..n`, collecting results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Runs `f` on disjoint mutable chunks of `data` of length `chunk`.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => data
                .par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
            _ => data
                .chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        assert_eq!(Execution::Sequential.map(1000, f), Execution::Parallel.map(1000, f));
        let mut a = vec![1.0; 64];
        let mut b = a.clone();
        Execution::Sequential.for_each_chunk(&mut a, 8, |i, c| c.iter_mut().for_each(|v| *v *= i as f64));
        Execution::Parallel.for_each_chunk(&mut b, 8, |i, c| c.iter_mut().for_each(|v| *v *= i as f64));
        assert_eq!(a, b);
    }
}
