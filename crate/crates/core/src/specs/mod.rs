//! Executable abstract specifications.
//!
//! [`Dtms2`] is the durable transactional memory specification (TMS2 when
//! built without crashes). [`Canonical`] wraps any [`SequentialObject`] in
//! the canonical durable automaton whose traces are exactly the durably
//! linearizable histories of that object. [`AmObject`] is the sequential
//! object of the abstract memory library.

mod am_object;
mod canonical;
mod dtms2;

pub use am_object::{AmObject, AmState};
pub use canonical::{CanonPc, CanonState, Canonical};
pub use dtms2::{Dtms2, Dtms2Pc, Dtms2State, Dtms2Tx};

use crate::history::{Args, OpName, RetVal, TxId};
use std::fmt::Debug;
use std::hash::Hash;

/// A sequential object: a state set with initial states and, per operation,
/// a relation between input, pre-state, post-state and output.
///
/// `apply` receives the calling thread because ownership-based objects (the
/// memory libraries) compare it against their owner field.
pub trait SequentialObject {
    type State: Clone + Eq + Hash + Debug;

    fn init(&self) -> Vec<Self::State>;

    /// Operations callable through the canonical automaton.
    fn ops(&self) -> Vec<OpName>;

    /// Every input `op` accepts, enumerated over the finite domains.
    fn inputs(&self, op: OpName) -> Vec<Args>;

    /// All `(s', out)` with `op(in, s, s', out)`. Empty when `op` is not
    /// enabled in `s`.
    fn apply(&self, caller: TxId, op: OpName, input: &Args, s: &Self::State)
        -> Vec<(Self::State, RetVal)>;

    /// Effect of a crash on the object state.
    fn recover(&self, s: &Self::State) -> Self::State {
        s.clone()
    }
}
