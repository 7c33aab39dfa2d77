use super::config::{ConfigError, ImplKind, Mutant, RunConfig};
use crate::history::TxId;
use crate::ioa::{explore as bfs, Action, Automaton, Bounds, Visit};
use crate::memlib::{
    cm_global_invariant, cm_ownership_assertion, cm_recoverable, cm_rely, Am, AmLibState, Cm, CmState,
    CmVariant, Faithful, NoRecoveryRestore, NoUndoLog,
};
use crate::norec::{
    build_cnorec_modular, glb_parity, norec_mutex_invariant, Norec, NorecState, NorecVariant,
    SkipV5GlbCheck, Standard,
};
use crate::specs::{Dtms2, Dtms2State};
use std::time::{Duration, Instant};

/// Invariants checked on every reachable state and transition.
pub trait StateInvariants {
    fn state_violation(&self) -> Option<&'static str>;

    fn transition_violation(&self, _action: &Action, _next: &Self) -> Option<&'static str> {
        None
    }
}

fn norec_violation(s: &NorecState) -> Option<&'static str> {
    if !norec_mutex_invariant(s) {
        Some("mutual exclusion (glb = loc + 1 in the commit region)")
    } else if !glb_parity(s) {
        Some("glb is odd exactly during a commit")
    } else {
        None
    }
}

fn cm_violation(s: &CmState) -> Option<&'static str> {
    if !cm_global_invariant(s) {
        Some("CM global invariant (vmem ⊕ log = pmem ⊕ log)")
    } else if !cm_ownership_assertion(s) {
        Some("CM ownership assertion")
    } else {
        None
    }
}

/// Every thread other than the one stepping must find its rely satisfied.
fn cm_rely_violation(action: &Action, s: &CmState, s2: &CmState) -> Option<&'static str> {
    let actor = action.tx()?;
    let threads = s.threads.len();
    (0..threads)
        .map(TxId::from_index)
        .filter(|t| *t != actor)
        .any(|t| !cm_rely(t, s, s2))
        .then_some("CM rely condition")
}

impl StateInvariants for NorecState {
    fn state_violation(&self) -> Option<&'static str> {
        norec_violation(self)
    }
}

impl StateInvariants for (NorecState, AmLibState) {
    fn state_violation(&self) -> Option<&'static str> {
        norec_violation(&self.0)
    }
}

impl StateInvariants for (NorecState, CmState) {
    fn state_violation(&self) -> Option<&'static str> {
        norec_violation(&self.0).or_else(|| cm_violation(&self.1))
    }

    fn transition_violation(&self, action: &Action, next: &Self) -> Option<&'static str> {
        cm_rely_violation(action, &self.1, &next.1)
    }
}

impl StateInvariants for CmState {
    fn state_violation(&self) -> Option<&'static str> {
        cm_violation(self)
    }

    fn transition_violation(&self, action: &Action, next: &Self) -> Option<&'static str> {
        cm_rely_violation(action, self, next)
    }
}

impl StateInvariants for Dtms2State {
    fn state_violation(&self) -> Option<&'static str> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct ExploreReport {
    pub config: RunConfig,
    pub states: usize,
    pub transitions: usize,
    pub depth: usize,
    pub complete: bool,
    pub violation: Option<(String, Vec<Action>)>,
    pub elapsed: Duration,
}

impl ExploreReport {
    pub fn passed(&self) -> bool {
        self.complete && self.violation.is_none()
    }
}

/// Runs the bounded search on `aut`, checking [`StateInvariants`] and
/// `extra` everywhere.
pub fn explore_automaton<A>(
    aut: &A,
    bounds: Bounds,
    extra: impl Fn(&A::State) -> Option<&'static str>,
) -> Summary
where
    A: Automaton,
    A::State: StateInvariants,
{
    let start = Instant::now();
    let e = bfs(aut, bounds, |v| {
        let found = match v {
            Visit::State(s) => s.state_violation().or_else(|| extra(s)),
            Visit::Transition(s, a, s2) if !a.is_crash() => s.transition_violation(a, s2),
            Visit::Transition(..) => None,
        };
        found.map_or(Ok(()), |m| Err(m.to_string()))
    });
    Summary {
        states: e.states,
        transitions: e.transitions,
        depth: e.depth,
        complete: e.complete,
        violation: e.violation.map(|v| (v.message, v.path)),
        elapsed: start.elapsed(),
    }
}

pub struct Summary {
    pub states: usize,
    pub transitions: usize,
    pub depth: usize,
    pub complete: bool,
    pub violation: Option<(String, Vec<Action>)>,
    pub elapsed: Duration,
}

fn norec_arm<V: NorecVariant>(cfg: &RunConfig, b: Bounds) -> Summary {
    let (l, v, n) = (cfg.locs, cfg.vals, cfg.txs_per_era);
    match cfg.impl_kind {
        ImplKind::Norec => explore_automaton(&Norec::<V>::norec(l, v, n), b, |_| None),
        ImplKind::Cnorec => explore_automaton(&Norec::<V>::cnorec(l, v, n), b, |_| None),
        ImplKind::CnorecAm => {
            let p = build_cnorec_modular(Norec::<V>::modular(l, v, n), Am::new(l, v, n))
                .expect("library provides every call");
            explore_automaton(&p, b, |_| None)
        }
        _ => unreachable!("norec family only"),
    }
}

fn cm_arm<W: CmVariant>(cfg: &RunConfig, b: Bounds) -> Summary {
    let (l, v, n) = (cfg.locs, cfg.vals, cfg.txs_per_era);
    let cm = Cm::<W>::new(l, v, n);
    let recoverable =
        |s: &CmState| (!cm_recoverable(&cm, s)).then_some("recovery restores the pre-commit snapshot");
    match cfg.impl_kind {
        ImplKind::CmLib => explore_automaton(&cm, b, recoverable),
        ImplKind::CnorecCm => {
            let p = build_cnorec_modular(Norec::<Standard>::modular(l, v, n), cm)
                .expect("library provides every call");
            explore_automaton(&p, b, |s| recoverable(&s.1))
        }
        _ => unreachable!("CM implementations only"),
    }
}

/// Exhaustive bounded reachability of `cfg.txs_per_era` transactions (eras
/// are not modelled; crashes are unrestricted) with the invariants for the
/// implementation checked on every state and transition. `cm-lib` is CM on
/// its own, which already accepts every call sequence.
pub fn explore(cfg: &RunConfig) -> Result<ExploreReport, ConfigError> {
    use ImplKind as K;
    cfg.validate()?;
    let b = Bounds::new(cfg.depth, cfg.max_states);
    let sum = match (cfg.impl_kind, cfg.mutant) {
        (K::Norec | K::Cnorec | K::CnorecAm, None) => norec_arm::<Standard>(cfg, b),
        (K::Norec | K::Cnorec | K::CnorecAm, Some(Mutant::SkipV5GlbCheck)) => {
            norec_arm::<SkipV5GlbCheck>(cfg, b)
        }
        (K::CmLib | K::CnorecCm, None) => cm_arm::<Faithful>(cfg, b),
        (K::CmLib | K::CnorecCm, Some(Mutant::NoUndoLog)) => cm_arm::<NoUndoLog>(cfg, b),
        (K::CmLib | K::CnorecCm, Some(Mutant::NoRecoveryRestore)) => {
            cm_arm::<NoRecoveryRestore>(cfg, b)
        }
        (K::CnorecCm, Some(Mutant::SkipV5GlbCheck)) => {
            return Err(ConfigError::Invalid(
                "explore does not combine skip-v5-glb-check with CM".into(),
            ));
        }
        (K::Dtms2, _) => explore_automaton(&Dtms2::new(cfg.locs, cfg.vals, cfg.txs_per_era), b, |_| None),
        (k, m) => unreachable!("validated configuration {k} / {m:?}"),
    };
    Ok(ExploreReport {
        config: cfg.clone(),
        states: sum.states,
        transitions: sum.transitions,
        depth: sum.depth,
        complete: sum.complete,
        violation: sum.violation,
        elapsed: sum.elapsed,
    })
}
