use super::explore::ExploreReport;
use super::simcheck::{SimOutcome, SimcheckReport};
use super::sweep::SweepReport;
use std::fmt;

impl fmt::Display for ExploreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (&self.violation, self.complete) {
            (Some(_), _) => "REJECT",
            (None, true) => "PASS",
            (None, false) => "INCONCLUSIVE",
        };
        writeln!(f, "explore {verdict}")?;
        writeln!(f, "config: {}", self.config.replay_args())?;
        writeln!(
            f,
            "states: {} transitions: {} depth: {} truncated: {} time: {:.2?}",
            self.states, self.transitions, self.depth, !self.complete, self.elapsed
        )?;
        if let Some((msg, path)) = &self.violation {
            writeln!(f, "violation: {msg}")?;
            writeln!(f, "path ({} steps):", path.len())?;
            for a in path {
                writeln!(f, "  {a}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for SimcheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match &self.outcome {
            SimOutcome::Holds => "holds",
            SimOutcome::Counterexample(_) => "counterexample",
            SimOutcome::Inconclusive => "inconclusive",
        };
        writeln!(f, "simcheck {} {}: {verdict}", self.config.impl_kind, self.abstract_kind)?;
        writeln!(f, "config: {}", self.config.replay_args())?;
        writeln!(
            f,
            "pairs: {} concrete states: {} transitions: {} truncated: {} time: {:.2?}",
            self.pairs,
            self.concrete_states,
            self.transitions,
            self.outcome == SimOutcome::Inconclusive,
            self.elapsed
        )?;
        if let SimOutcome::Counterexample(ce) = &self.outcome {
            write!(f, "{ce}")?;
        }
        Ok(())
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.clean() { "PASS" } else if self.rejects.is_empty() { "ERROR" } else { "REJECT" };
        writeln!(f, "sweep {verdict}: {}", self.what)?;
        writeln!(
            f,
            "runs: {} accepted: {} rejected: {} errors: {} time: {:.2?}",
            self.runs,
            self.accepted,
            self.rejects.len(),
            self.errors.len(),
            self.elapsed
        )?;
        for r in &self.rejects {
            writeln!(f, "REJECT seed {}: {} [{}]", r.seed, r.note, r.replay)?;
        }
        for r in &self.errors {
            writeln!(f, "ERROR seed {}: {} [{}]", r.seed, r.note, r.replay)?;
        }
        Ok(())
    }
}
