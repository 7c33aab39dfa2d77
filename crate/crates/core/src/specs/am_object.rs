use super::SequentialObject;
use crate::history::{Args, Loc, Memory, OpName, PartialMap, RetVal, TxId, Val};

/// The abstract memory as a sequential object: persistent memory plus the
/// write-ownership token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmObject {
    pub locs: u8,
    pub vals: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmState {
    pub mem: Memory,
    pub owns: Option<TxId>,
}

impl AmObject {
    pub fn new(locs: u8, vals: u8) -> Self {
        AmObject { locs, vals }
    }

    pub fn initial(&self) -> AmState {
        AmState {
            mem: Memory::zeroed(self.locs),
            owns: None,
        }
    }
}

impl SequentialObject for AmObject {
    type State = AmState;

    fn init(&self) -> Vec<AmState> {
        vec![self.initial()]
    }

    fn ops(&self) -> Vec<OpName> {
        vec![
            OpName::LibAcquire,
            OpName::LibRelease,
            OpName::LibRead,
            OpName::LibCommit,
        ]
    }

    fn inputs(&self, op: OpName) -> Vec<Args> {
        match op {
            OpName::LibRead => Loc::all(self.locs).map(Args::Loc).collect(),
            OpName::LibCommit => PartialMap::enumerate(self.locs, self.vals)
                .into_iter()
                .map(Args::WriteSet)
                .collect(),
            OpName::LibAcquire | OpName::LibRelease | OpName::LibRecovery => vec![Args::None],
            _ => Vec::new(),
        }
    }

    fn apply(&self, caller: TxId, op: OpName, input: &Args, s: &AmState) -> Vec<(AmState, RetVal)> {
        match (op, input) {
            (OpName::LibAcquire, Args::None) if s.owns.is_none() => {
                let mut s2 = s.clone();
                s2.owns = Some(caller);
                vec![(s2, RetVal::Ok)]
            }
            (OpName::LibRelease, Args::None) if s.owns == Some(caller) => {
                let mut s2 = s.clone();
                s2.owns = None;
                vec![(s2, RetVal::Ok)]
            }
            (OpName::LibRead, Args::Loc(l)) if usize::from(l.0) < s.mem.len() => {
                if s.owns.is_none() {
                    vec![(s.clone(), RetVal::Value(s.mem.get(*l)))]
                } else {
                    Val::all(self.vals)
                        .map(|v| (s.clone(), RetVal::Value(v)))
                        .collect()
                }
            }
            (OpName::LibCommit, Args::WriteSet(ws)) if s.owns == Some(caller) => {
                let mut s2 = s.clone();
                s2.mem = s.mem.overridden(ws);
                vec![(s2, RetVal::Ok)]
            }
            (OpName::LibRecovery, Args::None) => vec![(self.recover(s), RetVal::Ok)],
            _ => Vec::new(),
        }
    }

    fn recover(&self, s: &AmState) -> AmState {
        AmState {
            mem: s.mem.clone(),
            owns: None,
        }
    }
}
