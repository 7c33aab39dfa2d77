use crate::history::{Args, Event, Loc, OpName, PartialMap, RetVal, TxId, Val};
use crate::ioa::{Action, ActionKind, Automaton, Namespace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Free,
    Acquired,
    Committed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClientPc {
    NotStarted,
    Idle { left: u8, phase: Phase },
    Wait { op: OpName, left: u8 },
    Done,
}

/// A well-behaved environment for a memory library: each thread performs
/// `ops` operations, each either a read or an acquire/commit/release bracket
/// with a non-empty write set. Threads started before a crash stop at it.
#[derive(Clone, Copy, Debug)]
pub struct LibClient {
    pub locs: u8,
    pub vals: u8,
    pub threads: u16,
    pub ops: u8,
}

impl LibClient {
    fn covers(&self, t: TxId) -> bool {
        (1..=self.threads).contains(&t.0)
    }
}

fn after_response(op: OpName, left: u8) -> ClientPc {
    let (left, phase) = match op {
        OpName::LibAcquire => (left, Phase::Acquired),
        OpName::LibCommit => (left, Phase::Committed),
        _ => (left - 1, Phase::Free),
    };
    if left == 0 {
        ClientPc::Done
    } else {
        ClientPc::Idle { left, phase }
    }
}

impl Automaton for LibClient {
    type State = Vec<ClientPc>;

    fn start_states(&self) -> Vec<Vec<ClientPc>> {
        vec![vec![ClientPc::NotStarted; usize::from(self.threads)]]
    }

    fn transitions(&self, s: &Vec<ClientPc>) -> Vec<(Action, Vec<ClientPc>)> {
        let mut out = Vec::new();
        for (i, pc) in s.iter().enumerate() {
            let t = TxId::from_index(i);
            let set = |pc| {
                let mut s2 = s.clone();
                s2[i] = pc;
                s2
            };
            let inv = |op, args| Action::from(Event::inv(t, op, args));
            match *pc {
                ClientPc::NotStarted => {
                    let first = if self.ops == 0 {
                        ClientPc::Done
                    } else {
                        ClientPc::Idle {
                            left: self.ops,
                            phase: Phase::Free,
                        }
                    };
                    out.push((Action::Run(t), set(first)));
                }
                ClientPc::Idle { left, phase } => {
                    let wait = |op| ClientPc::Wait { op, left };
                    match phase {
                        Phase::Free => {
                            for l in Loc::all(self.locs) {
                                out.push((inv(OpName::LibRead, Args::Loc(l)), set(wait(OpName::LibRead))));
                            }
                            out.push((inv(OpName::LibAcquire, Args::None), set(wait(OpName::LibAcquire))));
                        }
                        Phase::Acquired => {
                            for ws in PartialMap::enumerate(self.locs, self.vals) {
                                if !ws.is_empty() {
                                    out.push((
                                        inv(OpName::LibCommit, Args::WriteSet(ws)),
                                        set(wait(OpName::LibCommit)),
                                    ));
                                }
                            }
                        }
                        Phase::Committed => {
                            out.push((inv(OpName::LibRelease, Args::None), set(wait(OpName::LibRelease))));
                        }
                    }
                }
                ClientPc::Wait { op, left } => {
                    let next = set(after_response(op, left));
                    if op == OpName::LibRead {
                        for v in Val::all(self.vals) {
                            out.push((Event::res(t, op, RetVal::Value(v)).into(), next.clone()));
                        }
                    } else {
                        out.push((Event::res(t, op, RetVal::Ok).into(), next));
                    }
                }
                ClientPc::Done => {}
            }
        }
        let crashed = s
            .iter()
            .map(|pc| match pc {
                ClientPc::NotStarted => ClientPc::NotStarted,
                _ => ClientPc::Done,
            })
            .collect();
        out.push((Action::crash(), crashed));
        out
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        match a {
            Action::Event(Event::Crash) => Some(ActionKind::Input),
            Action::Run(t) if self.covers(*t) => Some(ActionKind::Output),
            Action::Event(Event::Inv { tx, op, .. }) if self.covers(*tx) && op.is_library() => {
                Some(ActionKind::Output)
            }
            Action::Event(Event::Res { tx, op, .. }) if self.covers(*tx) && op.is_library() => {
                Some(ActionKind::Input)
            }
            _ => None,
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        vec![Namespace::Client]
    }
}
