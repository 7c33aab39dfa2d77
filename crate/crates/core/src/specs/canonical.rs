use super::SequentialObject;
use crate::history::{Args, Event, OpName, RetVal, TxId};
use crate::ioa::{Action, ActionKind, Automaton, Namespace, Step};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonPc {
    NotStarted,
    Ready,
    Do(OpName, Args),
    Res(OpName, RetVal),
    Crashed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonState<T> {
    pub obj: T,
    pub pcs: Vec<CanonPc>,
}

/// The canonical durable automaton of a sequential object, over threads
/// `1..=threads`.
///
/// A crash sends every thread outside `{notStarted, ready}` to `crashed` and
/// applies the object's `recover` hook.
#[derive(Clone, Debug)]
pub struct Canonical<S> {
    pub object: S,
    pub threads: u16,
}

impl<S: SequentialObject> Canonical<S> {
    pub fn new(object: S, threads: u16) -> Self {
        Canonical { object, threads }
    }

    fn owns_thread(&self, t: TxId) -> bool {
        (1..=self.threads).contains(&t.0)
    }
}

impl<S: SequentialObject> Automaton for Canonical<S> {
    type State = CanonState<S::State>;

    fn start_states(&self) -> Vec<Self::State> {
        self.object
            .init()
            .into_iter()
            .map(|obj| CanonState {
                obj,
                pcs: vec![CanonPc::NotStarted; usize::from(self.threads)],
            })
            .collect()
    }

    fn transitions(&self, s: &Self::State) -> Vec<(Action, Self::State)> {
        let mut out = Vec::new();
        for (i, pc) in s.pcs.iter().enumerate() {
            let t = TxId::from_index(i);
            let with_pc = |pc: CanonPc| {
                let mut s2 = s.clone();
                s2.pcs[i] = pc;
                s2
            };
            match pc {
                CanonPc::NotStarted => out.push((Action::Run(t), with_pc(CanonPc::Ready))),
                CanonPc::Ready => {
                    for op in self.object.ops() {
                        for input in self.object.inputs(op) {
                            out.push((
                                Event::inv(t, op, input.clone()).into(),
                                with_pc(CanonPc::Do(op, input)),
                            ));
                        }
                    }
                }
                CanonPc::Do(op, input) => {
                    for (obj, rv) in self.object.apply(t, *op, input, &s.obj) {
                        let mut s2 = with_pc(CanonPc::Res(*op, rv));
                        s2.obj = obj;
                        out.push((Action::internal(Namespace::Canonical, t, Step::Do(*op)), s2));
                    }
                }
                CanonPc::Res(op, rv) => {
                    out.push((Event::res(t, *op, *rv).into(), with_pc(CanonPc::Ready)))
                }
                CanonPc::Crashed => {}
            }
        }
        let crashed = CanonState {
            obj: self.object.recover(&s.obj),
            pcs: s
                .pcs
                .iter()
                .map(|pc| match pc {
                    CanonPc::NotStarted | CanonPc::Ready => pc.clone(),
                    _ => CanonPc::Crashed,
                })
                .collect(),
        };
        out.push((Action::crash(), crashed));
        out
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        match a {
            Action::Event(Event::Crash) => Some(ActionKind::Input),
            Action::Event(Event::Inv { tx, op, .. }) if self.owns_thread(*tx) => {
                self.object.ops().contains(op).then_some(ActionKind::Input)
            }
            Action::Event(Event::Res { tx, op, .. }) if self.owns_thread(*tx) => {
                self.object.ops().contains(op).then_some(ActionKind::Output)
            }
            Action::Run(t) if self.owns_thread(*t) => Some(ActionKind::Input),
            Action::Internal(i) if i.ns == Namespace::Canonical => Some(ActionKind::Internal),
            _ => None,
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        vec![Namespace::Canonical]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{Loc, Val};
    use crate::ioa::{trace_member, Bounds, Membership};
    use crate::specs::AmObject;

    #[test]
    fn accepts_a_read_of_zero() {
        let c = Canonical::new(AmObject::new(1, 2), 1);
        let trace = vec![
            Action::Run(TxId(1)),
            Event::inv(1, OpName::LibRead, Args::Loc(Loc(0))).into(),
            Event::res(1, OpName::LibRead, RetVal::Value(Val(0))).into(),
        ];
        assert_eq!(trace_member(&c, &trace, Bounds::default()), Membership::Member);
        let mut bad = trace.clone();
        bad[2] = Event::res(1, OpName::LibRead, RetVal::Value(Val(1))).into();
        assert_eq!(trace_member(&c, &bad, Bounds::default()), Membership::NotMember);
    }

    #[test]
    fn crashed_threads_are_stuck() {
        let c = Canonical::new(AmObject::new(1, 2), 2);
        let mut s = c.start_states().remove(0);
        s = c.step(&s, &Action::Run(TxId(1))).remove(0);
        s = c
            .step(&s, &Event::inv(1, OpName::LibAcquire, Args::None).into())
            .remove(0);
        s = c.step(&s, &Action::crash()).remove(0);
        assert_eq!(s.pcs[0], CanonPc::Crashed);
        assert_eq!(s.pcs[1], CanonPc::NotStarted);
        assert!(c
            .transitions(&s)
            .iter()
            .all(|(a, _)| a.tx() != Some(TxId(1))));
    }

    #[test]
    fn deterministic_do_step_has_one_successor() {
        let c = Canonical::new(AmObject::new(1, 2), 1);
        let mut s = c.start_states().remove(0);
        s = c.step(&s, &Action::Run(TxId(1))).remove(0);
        s = c
            .step(&s, &Event::inv(1, OpName::LibAcquire, Args::None).into())
            .remove(0);
        let succ = c.step(
            &s,
            &Action::internal(Namespace::Canonical, TxId(1), Step::Do(OpName::LibAcquire)),
        );
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].obj.owns, Some(TxId(1)));
    }
}
