use crate::history::{Args, Event, Loc, Memory, OpName, PartialMap, RetVal, TxId, Val};
use crate::ioa::{Action, ActionKind, Automaton, Namespace, Step};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AmPc {
    Idle,
    DoAcquire,
    ResAcquire,
    DoRelease,
    ResRelease,
    DoRead(Loc),
    ResRead(Val),
    DoCommit(PartialMap),
    ResCommit,
    /// Interrupted by a crash; never scheduled again.
    Crashed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmLibState {
    pub mem: Memory,
    pub owns: Option<TxId>,
    pub pcs: Vec<AmPc>,
}

/// The abstract memory library: persistent memory only, with a
/// write-ownership token bracketing each commit.
#[derive(Clone, Copy, Debug)]
pub struct Am {
    pub locs: u8,
    pub vals: u8,
    pub threads: u16,
}

impl Am {
    pub fn new(locs: u8, vals: u8, threads: u16) -> Self {
        Am {
            locs,
            vals,
            threads,
        }
    }

    fn covers(&self, t: TxId) -> bool {
        (1..=self.threads).contains(&t.0)
    }
}

impl Automaton for Am {
    type State = AmLibState;

    fn start_states(&self) -> Vec<AmLibState> {
        vec![AmLibState {
            mem: Memory::zeroed(self.locs),
            owns: None,
            pcs: vec![AmPc::Idle; usize::from(self.threads)],
        }]
    }

    fn transitions(&self, s: &AmLibState) -> Vec<(Action, AmLibState)> {
        let mut out = Vec::new();
        for (i, pc) in s.pcs.iter().enumerate() {
            let t = TxId::from_index(i);
            let set = |pc: AmPc| {
                let mut s2 = s.clone();
                s2.pcs[i] = pc;
                s2
            };
            let tau = |op| Action::internal(Namespace::Am, t, Step::Do(op));
            let inv = |op, args| Action::from(Event::inv(t, op, args));
            let res = |op, rv| Action::from(Event::res(t, op, rv));
            match pc {
                AmPc::Idle => {
                    out.push((inv(OpName::LibAcquire, Args::None), set(AmPc::DoAcquire)));
                    out.push((inv(OpName::LibRelease, Args::None), set(AmPc::DoRelease)));
                    for l in Loc::all(self.locs) {
                        out.push((inv(OpName::LibRead, Args::Loc(l)), set(AmPc::DoRead(l))));
                    }
                    if s.owns == Some(t) {
                        for ws in PartialMap::enumerate(self.locs, self.vals) {
                            out.push((
                                inv(OpName::LibCommit, Args::WriteSet(ws.clone())),
                                set(AmPc::DoCommit(ws)),
                            ));
                        }
                    }
                }
                AmPc::DoAcquire if s.owns.is_none() => {
                    let mut s2 = set(AmPc::ResAcquire);
                    s2.owns = Some(t);
                    out.push((tau(OpName::LibAcquire), s2));
                }
                AmPc::DoRelease if s.owns == Some(t) => {
                    let mut s2 = set(AmPc::ResRelease);
                    s2.owns = None;
                    out.push((tau(OpName::LibRelease), s2));
                }
                AmPc::DoRead(l) => {
                    if s.owns.is_none() {
                        out.push((tau(OpName::LibRead), set(AmPc::ResRead(s.mem.get(*l)))));
                    } else {
                        for v in Val::all(self.vals) {
                            out.push((tau(OpName::LibRead), set(AmPc::ResRead(v))));
                        }
                    }
                }
                AmPc::DoCommit(ws) if s.owns == Some(t) => {
                    let mut s2 = set(AmPc::ResCommit);
                    s2.mem = s.mem.overridden(ws);
                    out.push((tau(OpName::LibCommit), s2));
                }
                AmPc::ResAcquire => out.push((res(OpName::LibAcquire, RetVal::Ok), set(AmPc::Idle))),
                AmPc::ResRelease => out.push((res(OpName::LibRelease, RetVal::Ok), set(AmPc::Idle))),
                AmPc::ResRead(v) => {
                    out.push((res(OpName::LibRead, RetVal::Value(*v)), set(AmPc::Idle)))
                }
                AmPc::ResCommit => out.push((res(OpName::LibCommit, RetVal::Ok), set(AmPc::Idle))),
                _ => {}
            }
        }
        // crashRecovery with the atomic LibRecovery: owns is reset
        let mut s2 = s.clone();
        s2.owns = None;
        for pc in &mut s2.pcs {
            if *pc != AmPc::Idle {
                *pc = AmPc::Crashed;
            }
        }
        out.push((Action::crash(), s2));
        out
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        match a {
            Action::Event(Event::Crash) => Some(ActionKind::Input),
            Action::Event(Event::Inv { tx, op, .. }) if self.covers(*tx) => {
                (op.is_library() && *op != OpName::LibRecovery).then_some(ActionKind::Input)
            }
            Action::Event(Event::Res { tx, op, .. }) if self.covers(*tx) => {
                (op.is_library() && *op != OpName::LibRecovery).then_some(ActionKind::Output)
            }
            Action::Internal(i) if i.ns == Namespace::Am => Some(ActionKind::Internal),
            _ => None,
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        vec![Namespace::Am]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(t: u16, op: OpName) -> Action {
        Action::internal(Namespace::Am, TxId(t), Step::Do(op))
    }

    #[test]
    fn acquire_sets_owner_and_excludes_others() {
        let am = Am::new(1, 2, 2);
        let mut s = am.start_states().remove(0);
        for t in [1, 2] {
            s = am
                .step(&s, &Event::inv(t, OpName::LibAcquire, Args::None).into())
                .remove(0);
        }
        s = am.step(&s, &tau(1, OpName::LibAcquire)).remove(0);
        assert_eq!(s.owns, Some(TxId(1)));
        assert!(am.step(&s, &tau(2, OpName::LibAcquire)).is_empty());
    }

    #[test]
    fn read_while_owned_branches_over_values() {
        let am = Am::new(1, 3, 2);
        let mut s = am.start_states().remove(0);
        s.owns = Some(TxId(2));
        s.pcs[0] = AmPc::DoRead(Loc(0));
        assert_eq!(am.step(&s, &tau(1, OpName::LibRead)).len(), 3);
        s.owns = None;
        assert_eq!(am.step(&s, &tau(1, OpName::LibRead)).len(), 1);
    }

    #[test]
    fn commit_invocation_requires_ownership() {
        let am = Am::new(1, 2, 1);
        let s = am.start_states().remove(0);
        let ws = Args::WriteSet([(Loc(0), Val(1))].into_iter().collect());
        let inv: Action = Event::inv(1, OpName::LibCommit, ws).into();
        assert!(am.step(&s, &inv).is_empty());
        let mut owned = s.clone();
        owned.owns = Some(TxId(1));
        let s2 = am.step(&owned, &inv).remove(0);
        let s3 = am.step(&s2, &tau(1, OpName::LibCommit)).remove(0);
        assert_eq!(s3.mem.get(Loc(0)), Val(1));
    }
}
