//! Space-vs-n curves: one metered run per (algorithm, instance), written as CSV.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::instance::{random_instance_with, RandomSpec};
use crate::meter::WorkspaceMeter;
use crate::oracle::{brute_force_solve, dp_solve, BruteConfig};
use crate::{Error, Instance, Result, TreePartition};

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "algorithm",
    "seed",
    "answer",
    "peak_persistent_bits",
    "peak_scratch_bits",
    "elapsed_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Brute,
    Dp,
    Log2,
    Log,
    Pathwidth,
    Tpw,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Brute,
        Algorithm::Dp,
        Algorithm::Log2,
        Algorithm::Log,
        Algorithm::Pathwidth,
        Algorithm::Tpw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Brute => "brute",
            Algorithm::Dp => "dp",
            Algorithm::Log2 => "log2",
            Algorithm::Log => "log",
            Algorithm::Pathwidth => "pathwidth",
            Algorithm::Tpw => "tpw",
        }
    }

    /// Largest n the bench runs by default.
    pub fn default_cap(self) -> usize {
        match self {
            Algorithm::Brute => 20,
            Algorithm::Dp => 1_000_000,
            Algorithm::Pathwidth => 10_000,
            Algorithm::Log2 => 10_000,
            Algorithm::Log => 4096,
            Algorithm::Tpw => 1024,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown algorithm `{s}`")))
    }
}

/// What a single metered run produced besides the decision.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunExtras {
    /// `max aux_r / 2^(j+1)` for the logspace solver.
    pub aux_ratio: Option<f64>,
    pub max_r: Option<usize>,
}

/// Runs `alg` on `inst`. `tpw` uses `partition`, or the width-1 partition
/// of a tree when none is given.
pub fn run_algorithm(
    alg: Algorithm,
    inst: &Instance,
    partition: Option<&TreePartition>,
    meter: &mut WorkspaceMeter,
) -> Result<(bool, RunExtras)> {
    let none = RunExtras::default();
    match alg {
        Algorithm::Brute => Ok((brute_force_solve(inst, BruteConfig::default())?.is_some(), none)),
        Algorithm::Dp => Ok((dp_solve(inst)?.is_some(), none)),
        Algorithm::Log2 => Ok((crate::log2::solve_log2(inst, meter)?, none)),
        Algorithm::Log => {
            let (ans, st) = crate::logspace::solve_log_stats(inst, meter)?;
            Ok((
                ans,
                RunExtras {
                    aux_ratio: Some(st.aux_ratio),
                    max_r: Some(st.max_r),
                },
            ))
        }
        Algorithm::Pathwidth => Ok((crate::pathwidth::solve_pathwidth(inst, meter)?.answer, none)),
        Algorithm::Tpw => {
            let trivial;
            let tp = match partition {
                Some(tp) => tp,
                None => {
                    inst.require_tree()?;
                    trivial = TreePartition::trivial(&inst.graph);
                    &trivial
                }
            };
            Ok((crate::tpw::solve_tpw(inst, tp, meter)?, none))
        }
    }
}

/// The bench workload: random trees, lists of 2 or 3 colours from a
/// palette of size n.
pub fn bench_instance(n: usize, seed: u64) -> Instance {
    random_instance_with(
        RandomSpec {
            n,
            min_list: 2,
            max_list: 3,
            palette: n,
        },
        seed,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub sizes: Vec<usize>,
    pub reps: u64,
    pub seed: u64,
    /// Skip sizes above each algorithm's default cap.
    pub respect_caps: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// `None` when the run failed.
    pub answer: Option<bool>,
    pub peak_persistent_bits: u64,
    pub peak_scratch_bits: u64,
    pub elapsed_ms: u128,
    pub extras: RunExtras,
}

impl BenchRecord {
    pub fn answer_str(&self) -> &'static str {
        match self.answer {
            Some(true) => "yes",
            Some(false) => "no",
            None => "ERR",
        }
    }
}

pub fn run_one(alg: Algorithm, n: usize, seed: u64) -> BenchRecord {
    let inst = bench_instance(n, seed);
    let mut meter = WorkspaceMeter::new(n);
    let start = Instant::now();
    let res = run_algorithm(alg, &inst, None, &mut meter);
    let elapsed_ms = start.elapsed().as_millis();
    let peaks = meter.peak_report();
    let (answer, extras) = match res {
        Ok((a, x)) => (Some(a), x),
        Err(_) => (None, RunExtras::default()),
    };
    BenchRecord {
        n,
        algorithm: alg,
        seed,
        answer,
        peak_persistent_bits: peaks.peak_persistent,
        peak_scratch_bits: peaks.peak_scratch,
        elapsed_ms,
        extras,
    }
}

/// Runs every (size, algorithm, rep) in parallel; rows come back in
/// size, algorithm, rep order.
pub fn run_bench(cfg: &BenchConfig) -> Vec<BenchRecord> {
    let mut jobs = Vec::new();
    for &n in &cfg.sizes {
        for &alg in &cfg.algorithms {
            if cfg.respect_caps && n > alg.default_cap() {
                continue;
            }
            for rep in 0..cfg.reps {
                jobs.push((alg, n, cfg.seed.wrapping_add(rep)));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(alg, n, seed)| run_one(alg, n, seed))
        .collect()
}

/// Largest `aux_r / 2^(j+1)` over the logspace rows, if any.
pub fn aux_constant(records: &[BenchRecord]) -> Option<f64> {
    records
        .iter()
        .filter_map(|r| r.extras.aux_ratio)
        .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.algorithm.to_string(),
            r.seed.to_string(),
            r.answer_str().to_string(),
            r.peak_persistent_bits.to_string(),
            r.peak_scratch_bits.to_string(),
            r.elapsed_ms.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_rows() {
        let cfg = BenchConfig {
            algorithms: vec![Algorithm::Dp],
            sizes: vec![16, 32],
            reps: 2,
            seed: 7,
            respect_caps: true,
        };
        let rows = run_bench(&cfg);
        assert_eq!(rows.len(), 4);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(
            text.lines().next().unwrap(),
            "n,algorithm,seed,answer,peak_persistent_bits,peak_scratch_bits,elapsed_ms"
        );
    }

    #[test]
    fn caps_skip_and_errors_are_rows() {
        let cfg = BenchConfig {
            algorithms: vec![Algorithm::Brute, Algorithm::Log],
            sizes: vec![8, 64],
            reps: 1,
            seed: 1,
            respect_caps: true,
        };
        let rows = run_bench(&cfg);
        assert_eq!(rows.len(), 3);
        let cfg = BenchConfig {
            respect_caps: false,
            sizes: vec![64],
            algorithms: vec![Algorithm::Brute],
            ..cfg
        };
        let rows = run_bench(&cfg);
        assert_eq!(rows[0].answer_str(), "ERR");
    }

    #[test]
    fn deterministic_apart_from_time() {
        let cfg = BenchConfig {
            algorithms: vec![Algorithm::Log2, Algorithm::Log, Algorithm::Tpw],
            sizes: vec![32, 64],
            reps: 3,
            seed: 11,
            respect_caps: true,
        };
        let strip = |rows: Vec<BenchRecord>| {
            rows.into_iter()
                .map(|r| (r.n, r.algorithm, r.seed, r.answer, r.peak_persistent_bits, r.peak_scratch_bits))
                .collect::<Vec<_>>()
        };
        let a = strip(run_bench(&cfg));
        let b = strip(run_bench(&cfg));
        assert_eq!(a, b);
        // same instance for every algorithm at a given (n, seed)
        for n in [32, 64] {
            for seed in 11..14 {
                let answers: Vec<_> = a.iter().filter(|r| r.0 == n && r.2 == seed).map(|r| r.3).collect();
                assert_eq!(answers.len(), 3);
                assert!(answers.iter().all(|&x| x == answers[0]));
            }
        }
        assert!(aux_constant(&run_bench(&cfg)).is_some());
    }

    #[test]
    fn algorithm_names_roundtrip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("fast".parse::<Algorithm>().is_err());
    }
}
