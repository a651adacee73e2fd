//! Verification harness: each check is an independent job with a seed
//! derived from the master seed and a fixed job id, so a suite gives the same
//! reports whether run alone or inside `all`, in any thread count.

mod checks;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rootsys::{greedy_long_word, CartanGraph, WeylWord};

pub use checks::{
    all_reduced_words, check_lemma32, check_lemma32_mutation, check_modules, check_roots, check_theorem51,
    check_transitions, derive_seed, grid, random_corpus_module, sign_mutation_detectable, CheckContext,
    ISO_LOG2_TARGET, MIN_SUCCESS_RATE, WORD_CAP,
};
pub use report::{
    all_passed, write_csv, write_json, CheckParams, CheckReport, Outcome, Witness, MAX_FAILURE_MESSAGES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Roots,
    Lemma32,
    Modules,
    Thm51,
    Transitions,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "roots" => Suite::Roots,
            "lemma32" => Suite::Lemma32,
            "modules" => Suite::Modules,
            "thm51" => Suite::Thm51,
            "transitions" => Suite::Transitions,
            "all" => Suite::All,
            other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Roots => "roots",
            Suite::Lemma32 => "lemma32",
            Suite::Modules => "modules",
            Suite::Thm51 => "thm51",
            Suite::Transitions => "transitions",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Job {
    Roots,
    Lemma32,
    Lemma32Mutation,
    Modules,
    Thm51,
    Transitions,
}

impl Job {
    /// Stable id feeding the seed derivation.
    fn id(self) -> u64 {
        self as u64
    }
}

fn jobs(suite: Suite) -> Vec<Job> {
    match suite {
        Suite::Roots => vec![Job::Roots],
        Suite::Lemma32 => vec![Job::Lemma32, Job::Lemma32Mutation],
        Suite::Modules => vec![Job::Modules],
        Suite::Thm51 => vec![Job::Thm51],
        Suite::Transitions => vec![Job::Transitions],
        Suite::All => vec![Job::Roots, Job::Lemma32, Job::Lemma32Mutation, Job::Modules, Job::Thm51, Job::Transitions],
    }
}

/// Suite parameters; `None` picks a default sized for the graph.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub graph: CartanGraph,
    pub master_seed: u64,
    pub word: Option<WeylWord>,
    pub bound: Option<u64>,
    pub samples: Option<usize>,
    pub corpus: Option<usize>,
    pub max_dim: Option<usize>,
    pub maxlen: Option<usize>,
    pub timestamps: bool,
}

pub const DEFAULT_CORPUS: usize = 100;
pub const DEFAULT_MAX_DIM: usize = 12;
pub const DEFAULT_SAMPLES: usize = 5;
pub const DEFAULT_WORD_LEN: usize = 6;

impl SuiteConfig {
    pub fn new(graph: CartanGraph, master_seed: u64) -> Self {
        SuiteConfig {
            graph,
            master_seed,
            word: None,
            bound: None,
            samples: None,
            corpus: None,
            max_dim: None,
            maxlen: None,
            timestamps: true,
        }
    }

    pub fn word(&self) -> WeylWord {
        self.word.clone().unwrap_or_else(|| greedy_long_word(&self.graph, DEFAULT_WORD_LEN))
    }

    pub fn bound(&self) -> u64 {
        self.bound.unwrap_or(if self.word().len() <= 3 { 2 } else { 1 })
    }

    pub fn maxlen(&self) -> usize {
        self.maxlen.unwrap_or(if self.graph.vertex_count() >= 4 { 5 } else { 6 })
    }
}

fn run_job<F: Field>(cfg: &SuiteConfig, field: &F, job: Job) -> Result<CheckReport> {
    let ctx = CheckContext::new(cfg.graph.clone(), field.clone(), cfg.master_seed, derive_seed(cfg.master_seed, job.id()));
    let corpus = cfg.corpus.unwrap_or(DEFAULT_CORPUS);
    let max_dim = cfg.max_dim.unwrap_or(DEFAULT_MAX_DIM);
    let start = Instant::now();
    let mut report = match job {
        Job::Roots => check_roots(&ctx, cfg.maxlen.unwrap_or(DEFAULT_WORD_LEN)),
        Job::Lemma32 => check_lemma32(&ctx, corpus, max_dim),
        Job::Lemma32Mutation => check_lemma32_mutation(&ctx, corpus, max_dim),
        Job::Modules => check_modules(&ctx, cfg.maxlen())?,
        Job::Thm51 => check_theorem51(&ctx, &cfg.word(), cfg.bound(), cfg.samples.unwrap_or(DEFAULT_SAMPLES))?,
        Job::Transitions => check_transitions(&ctx, &cfg.word(), cfg.bound())?,
    };
    if cfg.timestamps {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

/// Runs the jobs of `suite` concurrently and returns reports in job order.
/// Errors only on invalid inputs (such as a non-reduced word); mathematical
/// failures are report outcomes.
pub fn run_suite<F: Field>(cfg: &SuiteConfig, suite: Suite, field: F) -> Result<Vec<CheckReport>> {
    crate::crystal::transition_self_test()?;
    if let Some(w) = &cfg.word {
        crate::rootsys::beta_sequence(&cfg.graph, w)?;
    }
    jobs(suite).into_par_iter().map(|job| run_job(cfg, &field, job)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn suite_names_round_trip() {
        for s in ["roots", "lemma32", "modules", "thm51", "transitions", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let mut cfg = SuiteConfig::new(CartanGraph::type_a(2), 11);
        cfg.timestamps = false;
        cfg.corpus = Some(5);
        cfg.bound = Some(1);
        cfg.samples = Some(1);
        let a = run_suite(&cfg, Suite::All, PrimeField::mersenne61()).unwrap();
        let b = run_suite(&cfg, Suite::All, PrimeField::mersenne61()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(all_passed(&a), "{a:#?}");
        let alone = run_suite(&cfg, Suite::Thm51, PrimeField::mersenne61()).unwrap();
        assert_eq!(alone[0], a[4]);
    }

    #[test]
    fn csv_summary() {
        let mut cfg = SuiteConfig::new(CartanGraph::type_a(2), 1);
        cfg.timestamps = false;
        let r = run_suite(&cfg, Suite::Roots, PrimeField::mersenne61()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &r).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "id,outcome,elapsed_ms\nroots,pass,\n");
    }
}
