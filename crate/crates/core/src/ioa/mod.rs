//! Input/output automata as enumerable labelled transition systems.
//!
//! Every automaton in the crate speaks the same [`Action`] vocabulary:
//! external actions are history [`Event`]s (plus `run_t`), internal actions
//! carry a [`Namespace`] naming the automaton that owns them. Products
//! synchronise on shared external actions and refuse to merge two automata
//! that claim the same internal namespace.

mod explore;
mod hide;
mod membership;
mod product;
mod run;
mod simulation;

pub use explore::{explore, reachable, Exploration, Reachability, Visit, Violation};
pub use hide::{library_actions, Hidden};
pub use membership::{trace_member, Membership};
pub use product::Product;
pub use run::{run, Execution, Scheduler, SeededScheduler};
pub use simulation::{
    check_forward_simulation, Clause, SimCounterexample, SimStats, SimVerdict, SimulationRelation,
};

use crate::history::{Event, Loc, OpName, TxId};
use std::fmt;
use std::hash::Hash;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    Input,
    Output,
    Internal,
}

impl ActionKind {
    pub fn is_external(self) -> bool {
        self != ActionKind::Internal
    }
}

/// Owner of an internal action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Namespace {
    Dtms2,
    NOrec,
    Am,
    Cm,
    Canonical,
    Client,
    Custom(u16),
}

/// Program-line labels of the NOrec family and of the concrete memory
/// library. Which automaton a line belongs to is given by the namespace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    B1,
    B2,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    W1,
    W2,
    W3,
    W4,
    W5,
    W6,
    W7,
    W8,
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    DoAcquire,
    DoRelease,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Line(Line),
    /// The do-step of a library operation (abstract memory, canonical
    /// automaton).
    Do(OpName),
    DoRead { loc: Loc, index: u8 },
    DoWrite,
    DoCommitReadOnly { index: u8 },
    DoCommitWriter,
    Tau(u16),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Internal {
    pub ns: Namespace,
    pub tx: TxId,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    /// Invocations, responses and `crashRecovery`.
    Event(Event),
    Run(TxId),
    Internal(Internal),
}

impl Action {
    pub fn internal(ns: Namespace, tx: TxId, step: Step) -> Self {
        Action::Internal(Internal { ns, tx, step })
    }

    pub fn line(ns: Namespace, tx: TxId, line: Line) -> Self {
        Action::internal(ns, tx, Step::Line(line))
    }

    pub fn crash() -> Self {
        Action::Event(Event::Crash)
    }

    pub fn event(&self) -> Option<&Event> {
        match self {
            Action::Event(e) => Some(e),
            _ => None,
        }
    }

    /// The transaction (or thread) performing the action; `None` for crash.
    pub fn tx(&self) -> Option<TxId> {
        match self {
            Action::Event(e) => e.tx(),
            Action::Run(t) => Some(*t),
            Action::Internal(i) => Some(i.tx),
        }
    }

    pub fn is_crash(&self) -> bool {
        matches!(self, Action::Event(Event::Crash))
    }
}

impl From<Event> for Action {
    fn from(e: Event) -> Self {
        Action::Event(e)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Event(e) => write!(f, "{e}"),
            Action::Run(t) => write!(f, "run {t}"),
            Action::Internal(i) => write!(f, "{:?}/{} {:?}", i.ns, i.tx, i.step),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IoaError {
    #[error("internal actions of namespace {0:?} occur in both components")]
    InternalCollision(Namespace),
    #[error("library does not provide required action `{0}`")]
    MissingAction(String),
}

/// An input/output automaton over [`Action`]s with enumerable steps.
///
/// `transitions(s)` lists every `(a, s')` with `s -a-> s'`; the enabled
/// actions and the successor sets are derived from it. States must be
/// canonical: structurally equal states are the same state.
pub trait Automaton {
    type State: Clone + Eq + Hash + fmt::Debug;

    fn start_states(&self) -> Vec<Self::State>;

    fn transitions(&self, state: &Self::State) -> Vec<(Action, Self::State)>;

    /// The kind of `action` in this automaton's signature, or `None` when the
    /// action is not one of its actions.
    fn classify(&self, action: &Action) -> Option<ActionKind>;

    /// Internal namespaces owned by this automaton.
    fn namespaces(&self) -> Vec<Namespace>;

    fn step(&self, state: &Self::State, action: &Action) -> Vec<Self::State> {
        self.transitions(state)
            .into_iter()
            .filter(|(a, _)| a == action)
            .map(|(_, s)| s)
            .collect()
    }

    fn enabled(&self, state: &Self::State) -> Vec<Action> {
        let mut out: Vec<Action> = Vec::new();
        for (a, _) in self.transitions(state) {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    fn is_external(&self, action: &Action) -> bool {
        self.classify(action).is_some_and(ActionKind::is_external)
    }

    fn show(&self, state: &Self::State) -> String {
        format!("{state:?}")
    }
}

impl<T: Automaton + ?Sized> Automaton for &T {
    type State = T::State;

    fn start_states(&self) -> Vec<Self::State> {
        (**self).start_states()
    }
    fn transitions(&self, state: &Self::State) -> Vec<(Action, Self::State)> {
        (**self).transitions(state)
    }
    fn classify(&self, action: &Action) -> Option<ActionKind> {
        (**self).classify(action)
    }
    fn namespaces(&self) -> Vec<Namespace> {
        (**self).namespaces()
    }
    fn show(&self, state: &Self::State) -> String {
        (**self).show(state)
    }
}

/// The one-state automaton with no actions.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unit;

impl Automaton for Unit {
    type State = ();

    fn start_states(&self) -> Vec<()> {
        vec![()]
    }
    fn transitions(&self, _: &()) -> Vec<(Action, ())> {
        Vec::new()
    }
    fn classify(&self, _: &Action) -> Option<ActionKind> {
        None
    }
    fn namespaces(&self) -> Vec<Namespace> {
        Vec::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Maximum BFS depth (transitions from a start state).
    pub max_depth: usize,
    pub max_states: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_depth: 1_000_000,
            max_states: 1_000_000,
        }
    }
}

impl Bounds {
    pub fn new(max_depth: usize, max_states: usize) -> Self {
        Bounds {
            max_depth,
            max_states,
        }
    }
}

/// The external projection of an action sequence.
pub fn trace_of<A: Automaton>(aut: &A, actions: &[Action]) -> Vec<Action> {
    actions
        .iter()
        .filter(|a| aut.is_external(a))
        .cloned()
        .collect()
}
