use super::check::{check_history, CheckKind, CheckOutcome};
use super::config::{ImplKind, RunConfig};
use super::simulate::simulate;
use crate::ioa::{trace_member, Action, Bounds, Membership};
use crate::norec::{Norec, Standard};
use std::ops::Range;
use std::time::{Duration, Instant};

/// How seeds are fanned out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Data-parallel over seeds; sequential when built without `parallel`.
    Parallel,
}

/// Applies `f` to every seed, preserving seed order in the result.
pub fn map_seeds<T: Send>(seeds: Range<u64>, exec: Exec, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    match exec {
        Exec::Sequential => seeds.map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            seeds.into_par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel => seeds.map(f).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedFailure {
    pub seed: u64,
    /// Flags that replay the run.
    pub replay: String,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub what: String,
    pub runs: usize,
    pub accepted: usize,
    pub rejects: Vec<SeedFailure>,
    pub errors: Vec<SeedFailure>,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn clean(&self) -> bool {
        self.rejects.is_empty() && self.errors.is_empty()
    }

    fn collect(what: String, cfg: &RunConfig, results: Vec<(u64, CheckOutcome)>, elapsed: Duration) -> Self {
        let mut r = SweepReport {
            what,
            runs: results.len(),
            accepted: 0,
            rejects: Vec::new(),
            errors: Vec::new(),
            elapsed,
        };
        for (seed, outcome) in results {
            let failure = |note: String| SeedFailure {
                seed,
                replay: cfg.with_seed(seed).replay_args(),
                note,
            };
            match outcome {
                CheckOutcome::Accept(_) => r.accepted += 1,
                CheckOutcome::Reject(v) => r.rejects.push(failure(v.to_string())),
                CheckOutcome::Error(e) => r.errors.push(failure(e)),
            }
        }
        r
    }
}

/// The checker a simulated history of `kind` is judged by.
pub fn default_check(kind: ImplKind) -> CheckKind {
    match kind {
        ImplKind::Norec => CheckKind::Opacity,
        ImplKind::CmLib => CheckKind::DurableLin,
        _ => CheckKind::DurableOpacity,
    }
}

/// Simulates one seed and checks the history.
pub fn run_seed(cfg: &RunConfig, check: CheckKind) -> CheckOutcome {
    match simulate(cfg) {
        Ok(sim) => CheckOutcome::from_result(check_history(check, &sim.history)),
        Err(e) => CheckOutcome::Error(e.to_string()),
    }
}

/// `simulate` then `check` for every seed in `seeds`.
pub fn sweep(template: &RunConfig, seeds: Range<u64>, check: CheckKind, exec: Exec) -> SweepReport {
    let start = Instant::now();
    let results = map_seeds(seeds, exec, |seed| (seed, run_seed(&template.with_seed(seed), check)));
    SweepReport::collect(
        format!("simulate {} | check {check}", template.impl_kind),
        template,
        results,
        start.elapsed(),
    )
}

/// Samples cnorec-am runs and checks that each TM-level trace (TM events
/// and crashes) is a trace of flat cNOrec over the same transactions.
pub fn trace_inclusion(template: &RunConfig, seeds: Range<u64>, bounds: Bounds, exec: Exec) -> SweepReport {
    let start = Instant::now();
    let mut cfg = template.clone();
    cfg.impl_kind = ImplKind::CnorecAm;
    let flat = Norec::<Standard>::cnorec(cfg.locs, cfg.vals, cfg.total_txs());
    let results = map_seeds(seeds, exec, |seed| {
        let outcome = match simulate(&cfg.with_seed(seed)) {
            Ok(sim) => {
                let trace: Vec<Action> = sim.history.iter().cloned().map(Action::from).collect();
                match trace_member(&flat, &trace, bounds) {
                    Membership::Member => CheckOutcome::Accept(crate::checkers::Verdict::accept(sim.history)),
                    Membership::NotMember => CheckOutcome::Reject(crate::checkers::Verdict::reject(
                        None,
                        "TM projection is not a cnorec trace",
                    )),
                    Membership::Inconclusive => CheckOutcome::Error("trace membership bound reached".into()),
                }
            }
            Err(e) => CheckOutcome::Error(e.to_string()),
        };
        (seed, outcome)
    });
    SweepReport::collect("trace inclusion cnorec-am ⊆ cnorec".into(), &cfg, results, start.elapsed())
}
