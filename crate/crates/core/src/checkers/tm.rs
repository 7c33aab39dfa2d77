use super::CheckError;
use crate::history::{Args, Event, History, Loc, Memory, OpName, PartialMap, RetVal, TxId, Val};
use std::collections::{BTreeMap, BTreeSet};

/// Legality under the TM sequential semantics: a read returns the
/// transaction's own earlier write if any, else committed memory, and only
/// `TMCommit` returning `ok` publishes a write set. Memory starts zeroed.
pub fn legal_tm(hs: &History) -> bool {
    let mut committed: BTreeMap<Loc, Val> = BTreeMap::new();
    let mut writes: BTreeMap<TxId, PartialMap> = BTreeMap::new();
    let mut last_inv: Option<&Event> = None;
    for e in hs {
        match e {
            Event::Inv { .. } => last_inv = Some(e),
            Event::Res { tx, op, rval } => {
                let ws = writes.entry(*tx).or_default();
                match (op, rval, last_inv) {
                    (OpName::TMRead, RetVal::Value(v), Some(Event::Inv { args: Args::Loc(l), .. })) => {
                        let expected = ws
                            .get(*l)
                            .unwrap_or_else(|| committed.get(l).copied().unwrap_or(Val(0)));
                        if expected != *v {
                            return false;
                        }
                    }
                    (
                        OpName::TMWrite,
                        RetVal::Ok,
                        Some(Event::Inv { args: Args::LocVal(l, v), .. }),
                    ) => ws.insert(*l, *v),
                    (OpName::TMCommit, RetVal::Ok, _) => {
                        for (l, v) in ws.iter() {
                            committed.insert(l, v);
                        }
                    }
                    _ => {}
                }
                last_inv = None;
            }
            Event::Crash => {}
        }
    }
    true
}

fn is_transaction_sequential(hs: &History) -> bool {
    if !crate::history::is_sequential(hs) {
        return false;
    }
    let mut finished: BTreeSet<TxId> = BTreeSet::new();
    let mut current: Option<TxId> = None;
    for e in hs {
        let t = e.tx().expect("sequential histories have no crash");
        if current != Some(t) {
            if finished.contains(&t) {
                return false;
            }
            if let Some(c) = current {
                finished.insert(c);
            }
            current = Some(t);
        }
    }
    true
}

/// Validity at `i`: the projection of `hs[0..=i]` onto the committed
/// transactions and the transaction of `hs(i)` is legal.
pub fn valid_at(hs: &History, i: usize) -> bool {
    let committed = hs.committed();
    let Some(own) = hs.get(i).and_then(Event::tx) else {
        return true;
    };
    let proj: History = hs.events()[..=i]
        .iter()
        .filter(|e| e.tx().is_some_and(|t| t == own || committed.contains(&t)))
        .cloned()
        .collect();
    legal_tm(&proj)
}

pub fn valid_transactional(hs: &History) -> Result<bool, CheckError> {
    if !is_transaction_sequential(hs) {
        return Err(CheckError::NotTransactionSequential);
    }
    Ok((0..hs.len()).all(|i| valid_at(hs, i)))
}

/// Number of locations mentioned by `h`, at least one.
pub(crate) fn loc_count(h: &History) -> u8 {
    let mut n = 1u8;
    for e in h {
        if let Event::Inv { args, .. } = e {
            match args {
                Args::Loc(l) | Args::LocVal(l, _) => n = n.max(l.0 + 1),
                Args::WriteSet(ws) => {
                    for l in ws.keys() {
                        n = n.max(l.0 + 1);
                    }
                }
                Args::None => {}
            }
        }
    }
    n
}

pub(crate) fn zero_memory(h: &History) -> Memory {
    Memory::zeroed(loc_count(h))
}
