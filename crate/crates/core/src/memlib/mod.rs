//! The memory libraries a modular STM runs on.
//!
//! [`Am`] is the abstract library over persistent memory only. [`Cm`] is the
//! concrete one over volatile and persistent memory with an undo log; its
//! mutants are selected by the type parameter. The module also holds CM's
//! invariant and rely checks and the relation to the canonical automaton of
//! the AM object.

mod am;
mod client;
mod cm;
mod relation;

pub use am::{Am, AmLibState, AmPc};
pub use client::{ClientPc, LibClient, Phase};
pub use cm::{
    cm_global_invariant, cm_ownership_assertion, cm_recoverable, cm_rely, Cm, CmPc, CmState,
    CmThread, CmVariant, Faithful, NoRecoveryRestore, NoUndoLog, W2Choice,
};
pub use relation::{abstract_pc, cm_am_relation};

use crate::history::{Args, Event, History, OpName, RetVal, TxId};
use crate::ioa::Action;

/// The library-level history of an action sequence: library invocations and
/// responses in order, each crash followed by a completed `LibRecovery` of a
/// fresh thread. Recovery threads are numbered from `first_recovery_id`.
pub fn library_history(actions: &[Action], first_recovery_id: u16) -> History {
    let mut out = Vec::new();
    let mut next = first_recovery_id;
    for a in actions {
        match a.event() {
            Some(Event::Crash) => {
                out.push(Event::Crash);
                out.push(Event::inv(TxId(next), OpName::LibRecovery, Args::None));
                out.push(Event::res(TxId(next), OpName::LibRecovery, RetVal::Ok));
                next += 1;
            }
            Some(e) if e.op().is_some_and(OpName::is_library) => out.push(e.clone()),
            _ => {}
        }
    }
    History::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{Loc, Val};
    use crate::ioa::{
        check_forward_simulation, explore, run, Automaton, Bounds, Line, Namespace, Product,
        SeededScheduler, Visit,
    };
    use crate::specs::{AmObject, Canonical};

    #[test]
    fn empty_and_single_read_histories() {
        assert!(library_history(&[], 10).is_empty());
        let cm: Cm = Cm::new(1, 2, 1);
        let t = TxId(1);
        let mut s = cm.initial();
        let mut actions = Vec::new();
        for a in [
            Action::Run(t),
            Event::inv(1, OpName::LibRead, Args::Loc(Loc(0))).into(),
            Action::line(Namespace::Cm, t, Line::R1),
            Event::res(1, OpName::LibRead, RetVal::Value(Val(0))).into(),
        ] {
            s = cm.step(&s, &a).remove(0);
            actions.push(a);
        }
        let h = library_history(&actions, 10);
        assert_eq!(
            h.events(),
            &[
                Event::inv(1, OpName::LibRead, Args::Loc(Loc(0))),
                Event::res(1, OpName::LibRead, RetVal::Value(Val(0))),
            ]
        );
    }

    #[test]
    fn crash_renders_a_recovery() {
        let h = library_history(&[Action::crash(), Action::crash()], 7);
        assert_eq!(h.len(), 6);
        assert_eq!(h.get(1).unwrap().tx(), Some(TxId(7)));
        assert_eq!(h.get(4).unwrap().tx(), Some(TxId(8)));
    }

    #[test]
    fn invariants_hold_on_small_exploration() {
        let cm: Cm = Cm::new(1, 2, 2);
        let e = explore(&cm, Bounds::default(), |v| match v {
            Visit::State(s) if !cm_global_invariant(s) => Err("global".into()),
            Visit::State(s) if !cm_ownership_assertion(s) => Err("ownership".into()),
            Visit::State(s) if !cm_recoverable(&cm, s) => Err("recovery".into()),
            _ => Ok(()),
        });
        assert!(e.complete);
        assert!(e.violation.is_none(), "{:?}", e.violation);
    }

    #[test]
    fn no_undo_log_breaks_the_invariant() {
        let cm: Cm<NoUndoLog> = Cm::new(1, 2, 1);
        let e = explore(&cm, Bounds::default(), |v| match v {
            Visit::State(s) if !cm_global_invariant(s) => Err("global".into()),
            _ => Ok(()),
        });
        assert!(e.violation.is_some());
    }

    #[test]
    fn simulation_into_the_canonical_automaton() {
        let cm: Cm = Cm::new(1, 2, 2);
        let canon = Canonical::new(AmObject::new(1, 2), 2);
        let v = check_forward_simulation(&cm, &canon, &cm_am_relation, Bounds::default());
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn client_drives_complete_brackets() {
        let client = LibClient {
            locs: 2,
            vals: 2,
            threads: 2,
            ops: 2,
        };
        let cm: Cm = Cm::<Faithful>::new(2, 2, 2).with_w2(W2Choice::Least);
        let p = Product::new(client, cm).unwrap();
        for seed in 0..10 {
            let e = run(&p, &mut SeededScheduler::new(seed), 200);
            let h = library_history(&e.actions, 3);
            assert!(crate::history::is_well_formed(&h), "{h}");
            assert!(p.classify(&Action::crash()).is_some());
        }
    }
}
