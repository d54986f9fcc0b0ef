//! Replicated experiments with a deterministic-parallelism contract.
//!
//! Replicate `i` always runs on `make_stream(root_seed, experiment_id, i)`
//! and its output lands in slot `i`, so results do not depend on how many
//! workers execute the replicates or in what order.

use std::fmt::Display;

use rayon::prelude::*;
use serde::Serialize;

use super::rng::RngStream;
use crate::error::{Error, Result};
use crate::numerics::{summarize, SummaryStats};

/// How replicates are spread over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Harness {
    workers: Option<usize>,
}

impl Harness {
    /// Run on rayon's global pool.
    pub fn new() -> Self {
        Harness { workers: None }
    }

    /// Run on exactly `n` workers; `n == 1` runs inline on the caller's thread.
    pub fn with_workers(n: usize) -> Self {
        Harness {
            workers: Some(n.max(1)),
        }
    }

    pub fn sequential() -> Self {
        Harness::with_workers(1)
    }

    pub fn workers(&self) -> Option<usize> {
        self.workers
    }

    /// Map `task` over replicate indices `0..n_reps`, each with its own stream.
    /// On failure the lowest failing index is reported.
    pub fn map<T, E, F>(&self, n_reps: u64, experiment_id: &str, root_seed: u64, task: F) -> Result<Vec<T>>
    where
        T: Send,
        E: Display + Send,
        F: Fn(u64, &mut RngStream) -> std::result::Result<T, E> + Sync,
    {
        if n_reps == 0 {
            return Err(Error::domain("n_reps must be at least 1"));
        }
        let run = |i: u64| {
            let mut stream = RngStream::new(root_seed, experiment_id, i);
            task(i, &mut stream)
        };
        let outcomes: Vec<std::result::Result<T, E>> = match self.workers {
            Some(1) => (0..n_reps).map(run).collect(),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
                pool.install(|| (0..n_reps).into_par_iter().map(run).collect())
            }
            None => (0..n_reps).into_par_iter().map(run).collect(),
        };
        let mut out = Vec::with_capacity(outcomes.len());
        for (i, r) in outcomes.into_iter().enumerate() {
            match r {
                Ok(v) => out.push(v),
                Err(e) => {
                    return Err(Error::Replicate {
                        experiment: experiment_id.to_owned(),
                        index: i as u64,
                        reason: e.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Run a replicated study whose task yields one real per named channel.
    pub fn run_replicates<E, F>(
        &self,
        n_reps: u64,
        experiment_id: &str,
        root_seed: u64,
        channels: &[&str],
        task: F,
    ) -> Result<StudyResult>
    where
        E: Display + Send,
        F: Fn(u64, &mut RngStream) -> std::result::Result<Vec<f64>, E> + Sync,
    {
        if channels.is_empty() {
            return Err(Error::domain("a study needs at least one output channel"));
        }
        let width = channels.len();
        let rows = self.map(n_reps, experiment_id, root_seed, |i, s| {
            let row = task(i, s).map_err(|e| e.to_string())?;
            if row.len() != width {
                return Err(format!("task produced {} outputs, expected {width}", row.len()));
            }
            Ok(row)
        })?;
        let mut columns = vec![Vec::with_capacity(rows.len()); width];
        for row in rows {
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        let channels = channels
            .iter()
            .zip(columns)
            .map(|(name, values)| {
                Ok(Channel {
                    name: (*name).to_owned(),
                    summary: summarize(&values)?,
                    values,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StudyResult {
            experiment_id: experiment_id.to_owned(),
            root_seed,
            n_reps,
            channels,
        })
    }
}

/// [`Harness::run_replicates`] on the global pool.
pub fn run_replicates<E, F>(
    n_reps: u64,
    experiment_id: &str,
    root_seed: u64,
    channels: &[&str],
    task: F,
) -> Result<StudyResult>
where
    E: Display + Send,
    F: Fn(u64, &mut RngStream) -> std::result::Result<Vec<f64>, E> + Sync,
{
    Harness::new().run_replicates(n_reps, experiment_id, root_seed, channels, task)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
    pub summary: SummaryStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub experiment_id: String,
    pub root_seed: u64,
    pub n_reps: u64,
    pub channels: Vec<Channel>,
}

impl StudyResult {
    pub fn channel(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn outputs_follow_replicate_order() {
        let r = Harness::new()
            .run_replicates(3, "idx", 0, &["i"], |i, _| Ok::<_, Infallible>(vec![i as f64]))
            .unwrap();
        assert_eq!(r.channels[0].values, vec![0.0, 1.0, 2.0]);
        assert_eq!(r.n_reps, 3);
    }

    #[test]
    fn repeat_calls_are_identical() {
        let task = |_: u64, s: &mut RngStream| Ok::<_, Infallible>(vec![s.normal(0.0, 1.0), s.uniform01()]);
        let a = run_replicates(50, "rep", 7, &["z", "u"], task).unwrap();
        let b = run_replicates(50, "rep", 7, &["z", "u"], task).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let task = |_: u64, s: &mut RngStream| {
            Ok::<_, Infallible>(vec![(0..100).map(|_| s.uniform01()).sum::<f64>()])
        };
        let one = Harness::sequential().run_replicates(200, "w", 5, &["s"], task).unwrap();
        let four = Harness::with_workers(4).run_replicates(200, "w", 5, &["s"], task).unwrap();
        let global = Harness::new().run_replicates(200, "w", 5, &["s"], task).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, global);
    }

    #[test]
    fn failure_names_lowest_index() {
        let err = Harness::with_workers(3)
            .run_replicates(20, "fail", 0, &["x"], |i, _| {
                if i == 7 || i == 13 {
                    Err(format!("bad replicate {i}"))
                } else {
                    Ok(vec![0.0])
                }
            })
            .unwrap_err();
        match err {
            Error::Replicate { index, .. } => assert_eq!(index, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn width_mismatch_is_reported() {
        let err = run_replicates(2, "w", 0, &["a", "b"], |_, _| Ok::<_, Infallible>(vec![1.0]))
            .unwrap_err();
        assert!(matches!(err, Error::Replicate { index: 0, .. }));
    }

    #[test]
    fn zero_reps_rejected() {
        assert!(matches!(
            run_replicates(0, "z", 0, &["a"], |_, _| Ok::<_, Infallible>(vec![1.0])),
            Err(Error::Domain(_))
        ));
    }
}
