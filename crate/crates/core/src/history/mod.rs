//! Events, histories, projections, eras and the real-time orders over them.
//!
//! A [`History`] is an immutable sequence of [`Event`]s. Every checker in the
//! crate consumes histories, and every automaton trace is rendered as one.

mod trace;
mod types;

pub use trace::{format_history, parse_history, ParseError};
pub use types::{Loc, Memory, PartialMap, TxId, Val};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Operation names. Transactional operations and memory-library operations
/// share one namespace so that restricting a composed trace to the
/// transactional layer is a filter on [`OpName::is_transactional`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpName {
    TMBegin,
    TMRead,
    TMWrite,
    TMCommit,
    LibRead,
    LibCommit,
    LibAcquire,
    LibRelease,
    LibRecovery,
}

impl OpName {
    pub const ALL: [OpName; 9] = [
        OpName::TMBegin,
        OpName::TMRead,
        OpName::TMWrite,
        OpName::TMCommit,
        OpName::LibRead,
        OpName::LibCommit,
        OpName::LibAcquire,
        OpName::LibRelease,
        OpName::LibRecovery,
    ];

    pub fn is_transactional(self) -> bool {
        matches!(
            self,
            OpName::TMBegin | OpName::TMRead | OpName::TMWrite | OpName::TMCommit
        )
    }

    pub fn is_library(self) -> bool {
        !self.is_transactional()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OpName::TMBegin => "TMBegin",
            OpName::TMRead => "TMRead",
            OpName::TMWrite => "TMWrite",
            OpName::TMCommit => "TMCommit",
            OpName::LibRead => "LibRead",
            OpName::LibCommit => "LibCommit",
            OpName::LibAcquire => "LibAcquire",
            OpName::LibRelease => "LibRelease",
            OpName::LibRecovery => "LibRecovery",
        }
    }

    /// Whether `rval` is a possible response value of this operation.
    pub fn admits(self, rval: &RetVal) -> bool {
        match (self, rval) {
            (_, RetVal::Bottom) => false,
            (OpName::TMRead, RetVal::Value(_) | RetVal::Abort) => true,
            (OpName::TMRead, RetVal::Ok) => false,
            (op, RetVal::Ok | RetVal::Abort) if op.is_transactional() => true,
            (OpName::LibRead, RetVal::Value(_)) => true,
            (op, RetVal::Ok) if op != OpName::LibRead => true,
            _ => false,
        }
    }
}

impl fmt::Display for OpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OpName {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        OpName::ALL.into_iter().find(|op| op.as_str() == s).ok_or(())
    }
}

/// Invocation payload.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Args {
    None,
    Loc(Loc),
    LocVal(Loc, Val),
    WriteSet(PartialMap),
}

/// Return values. `Bottom` is what `rval` yields for events that are not
/// responses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RetVal {
    Bottom,
    Ok,
    Abort,
    Value(Val),
}

impl fmt::Display for RetVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetVal::Bottom => f.write_str("_"),
            RetVal::Ok => f.write_str("ok"),
            RetVal::Abort => f.write_str("abort"),
            RetVal::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Inv { tx: TxId, op: OpName, args: Args },
    Res { tx: TxId, op: OpName, rval: RetVal },
    Crash,
}

impl Event {
    pub fn inv(tx: impl Into<TxId>, op: OpName, args: Args) -> Self {
        Event::Inv {
            tx: tx.into(),
            op,
            args,
        }
    }

    pub fn res(tx: impl Into<TxId>, op: OpName, rval: RetVal) -> Self {
        Event::Res {
            tx: tx.into(),
            op,
            rval,
        }
    }

    pub fn tx(&self) -> Option<TxId> {
        match self {
            Event::Inv { tx, .. } | Event::Res { tx, .. } => Some(*tx),
            Event::Crash => None,
        }
    }

    pub fn op(&self) -> Option<OpName> {
        match self {
            Event::Inv { op, .. } | Event::Res { op, .. } => Some(*op),
            Event::Crash => None,
        }
    }

    pub fn rval(&self) -> RetVal {
        match self {
            Event::Res { rval, .. } => *rval,
            _ => RetVal::Bottom,
        }
    }

    pub fn is_inv(&self) -> bool {
        matches!(self, Event::Inv { .. })
    }

    pub fn is_res(&self) -> bool {
        matches!(self, Event::Res { .. })
    }

    pub fn is_crash(&self) -> bool {
        matches!(self, Event::Crash)
    }

    /// A response that ends its transaction: `TMCommit(ok)` or any abort.
    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            Event::Res {
                op: OpName::TMCommit,
                rval: RetVal::Ok,
                ..
            } | Event::Res {
                rval: RetVal::Abort,
                ..
            }
        )
    }

    pub fn is_commit_ok(&self) -> bool {
        matches!(
            self,
            Event::Res {
                op: OpName::TMCommit,
                rval: RetVal::Ok,
                ..
            }
        )
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Inv { tx, op, args } => {
                write!(f, "inv {tx} {op}")?;
                match args {
                    Args::None => Ok(()),
                    Args::Loc(l) => write!(f, " {l}"),
                    Args::LocVal(l, v) => write!(f, " {l} {v}"),
                    Args::WriteSet(ws) => write!(f, " {ws}"),
                }
            }
            Event::Res { tx, op, rval } => write!(f, "res {tx} {op} {rval}"),
            Event::Crash => f.write_str("crash"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct History {
    events: Vec<Event>,
}

impl History {
    pub fn new(events: Vec<Event>) -> Self {
        History { events }
    }

    pub fn empty() -> Self {
        History::default()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Event> {
        self.events.get(i)
    }

    /// `h[i..j]`, clamped to the history's length.
    pub fn slice(&self, i: usize, j: usize) -> History {
        let j = j.min(self.len());
        let i = i.min(j);
        History::new(self.events[i..j].to_vec())
    }

    pub fn prefix(&self, n: usize) -> History {
        self.slice(0, n)
    }

    pub fn concat(&self, other: &History) -> History {
        let mut events = self.events.clone();
        events.extend_from_slice(&other.events);
        History::new(events)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Event> {
        self.events.iter()
    }

    /// Transaction ids in order of first occurrence.
    pub fn transactions(&self) -> Vec<TxId> {
        let mut seen = BTreeSet::new();
        self.events
            .iter()
            .filter_map(Event::tx)
            .filter(|t| seen.insert(*t))
            .collect()
    }

    pub fn crash_count(&self) -> usize {
        self.events.iter().filter(|e| e.is_crash()).count()
    }

    /// `h ≡ h'`: every per-transaction projection agrees.
    pub fn equivalent(&self, other: &History) -> bool {
        let mut txs: BTreeSet<TxId> = self.transactions().into_iter().collect();
        txs.extend(other.transactions());
        txs.into_iter()
            .all(|t| project(self, t) == project(other, t))
    }

    /// Transactions whose commit returned `ok`.
    pub fn committed(&self) -> BTreeSet<TxId> {
        self.events
            .iter()
            .filter(|e| e.is_commit_ok())
            .filter_map(Event::tx)
            .collect()
    }
}

impl From<Vec<Event>> for History {
    fn from(events: Vec<Event>) -> Self {
        History::new(events)
    }
}

impl FromIterator<Event> for History {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        History::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a History {
    type Item = &'a Event;
    type IntoIter = std::slice::Iter<'a, Event>;

    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// `h|t`. Crash events carry no transaction and are never included.
pub fn project(h: &History, t: TxId) -> History {
    h.iter().filter(|e| e.tx() == Some(t)).cloned().collect()
}

/// `ops(h)`: the history with every crash removed.
pub fn strip_crashes(h: &History) -> History {
    h.iter().filter(|e| !e.is_crash()).cloned().collect()
}

/// Splits `h` at its crashes into `n + 1` crash-free eras.
pub fn eras(h: &History) -> Vec<History> {
    let mut out = vec![Vec::new()];
    for e in h {
        if e.is_crash() {
            out.push(Vec::new());
        } else {
            out.last_mut().expect("nonempty").push(e.clone());
        }
    }
    out.into_iter().map(History::new).collect()
}

/// Index of the era each non-crash event belongs to.
fn era_of_events(h: &History) -> Vec<usize> {
    let mut era = 0;
    h.iter()
        .map(|e| {
            if e.is_crash() {
                era += 1;
            }
            era
        })
        .collect()
}

fn ids_in_single_era(h: &History) -> bool {
    let mut seen: BTreeMap<TxId, usize> = BTreeMap::new();
    for (e, era) in h.iter().zip(era_of_events(h)) {
        if let Some(t) = e.tx() {
            if *seen.entry(t).or_insert(era) != era {
                return false;
            }
        }
    }
    true
}

/// Sequential: every invocation but possibly the last is immediately
/// followed by its matching response, and no response is unmatched.
pub fn is_sequential(h: &History) -> bool {
    let mut pending: Option<(TxId, OpName)> = None;
    for e in h {
        match e {
            Event::Inv { tx, op, .. } => {
                if pending.is_some() {
                    return false;
                }
                pending = Some((*tx, *op));
            }
            Event::Res { tx, op, rval } => match pending.take() {
                Some((t, o)) if t == *tx && o == *op && op.admits(rval) => {}
                _ => return false,
            },
            Event::Crash => return false,
        }
    }
    true
}

/// Per-thread sequential and every id confined to one era. This is the
/// well-formedness used for library (non-transactional) histories.
pub fn is_well_formed(h: &History) -> bool {
    h.transactions()
        .into_iter()
        .all(|t| is_sequential(&project(h, t)))
        && ids_in_single_era(h)
}

pub fn is_transaction_well_formed(h: &History) -> bool {
    if !ids_in_single_era(h) {
        return false;
    }
    h.transactions().into_iter().all(|t| {
        let ht = project(h, t);
        if !is_sequential(&ht) {
            return false;
        }
        let evs = ht.events();
        if !matches!(evs.first(), Some(Event::Inv { op: OpName::TMBegin, .. })) {
            return false;
        }
        if evs.iter().any(|e| e.op().is_some_and(|op| !op.is_transactional())) {
            return false;
        }
        let last = evs.len() - 1;
        !evs[1..]
            .iter()
            .any(|e| matches!(e, Event::Inv { op: OpName::TMBegin, .. }))
            && !evs[..last].iter().any(Event::is_terminal)
    })
}

/// Removes every invocation that has no matching later response.
pub fn complete(h: &History) -> History {
    let mut keep = vec![true; h.len()];
    let mut open: BTreeMap<TxId, usize> = BTreeMap::new();
    for (i, e) in h.iter().enumerate() {
        match e {
            Event::Inv { tx, .. } => {
                if let Some(prev) = open.insert(*tx, i) {
                    keep[prev] = false;
                }
            }
            Event::Res { tx, .. } => {
                open.remove(tx);
            }
            Event::Crash => {}
        }
    }
    for i in open.into_values() {
        keep[i] = false;
    }
    h.iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then(|| e.clone()))
        .collect()
}

/// `t1 ≺_h t2`: the commit of `t1` returned `ok` before `t2` invoked
/// `TMBegin`.
pub fn real_time_tx_order(h: &History, t1: TxId, t2: TxId) -> bool {
    let commit = h
        .iter()
        .position(|e| e.is_commit_ok() && e.tx() == Some(t1));
    let begin = h.iter().position(|e| {
        matches!(e, Event::Inv { tx, op: OpName::TMBegin, .. } if *tx == t2)
    });
    matches!((commit, begin), (Some(c), Some(b)) if c < b)
}

/// `e1 ≪_h e2` for events given by index: `e1` is a response that precedes
/// invocation `e2`.
pub fn real_time_op_order(h: &History, e1: usize, e2: usize) -> bool {
    e1 < e2
        && matches!(h.get(e1), Some(Event::Res { .. }))
        && matches!(h.get(e2), Some(Event::Inv { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn begin(t: u16) -> Event {
        Event::inv(t, OpName::TMBegin, Args::None)
    }
    fn begin_ok(t: u16) -> Event {
        Event::res(t, OpName::TMBegin, RetVal::Ok)
    }
    fn commit(t: u16) -> Event {
        Event::inv(t, OpName::TMCommit, Args::None)
    }
    fn commit_ok(t: u16) -> Event {
        Event::res(t, OpName::TMCommit, RetVal::Ok)
    }

    #[test]
    fn projection() {
        assert_eq!(project(&History::empty(), TxId(1)), History::empty());
        let h = History::new(vec![begin(1), begin(2), begin_ok(1)]);
        assert_eq!(
            project(&h, TxId(1)),
            History::new(vec![begin(1), begin_ok(1)])
        );
        let h = History::new(vec![begin(1), Event::Crash, begin_ok(1)]);
        assert_eq!(
            project(&h, TxId(1)),
            History::new(vec![begin(1), begin_ok(1)])
        );
    }

    #[test]
    fn crash_stripping_and_eras() {
        let crash_only = History::new(vec![Event::Crash]);
        assert!(strip_crashes(&crash_only).is_empty());
        let h = History::new(vec![begin(1), Event::Crash, begin(2)]);
        assert_eq!(strip_crashes(&h), History::new(vec![begin(1), begin(2)]));
        assert_eq!(
            eras(&h),
            vec![History::new(vec![begin(1)]), History::new(vec![begin(2)])]
        );
        let two = History::new(vec![begin(1), begin(2)]);
        assert_eq!(eras(&two), vec![two.clone()]);
        assert_eq!(strip_crashes(&two), two);
        let crashes = History::new(vec![Event::Crash, Event::Crash]);
        assert_eq!(eras(&crashes), vec![History::empty(); 3]);
    }

    #[test]
    fn transaction_well_formedness() {
        let ok = History::new(vec![begin(1), begin_ok(1), commit(1), commit_ok(1)]);
        assert!(is_transaction_well_formed(&ok));
        let two_eras = History::new(vec![begin(1), Event::Crash, begin_ok(1)]);
        assert!(!is_transaction_well_formed(&two_eras));
        let no_begin = History::new(vec![Event::inv(1, OpName::TMRead, Args::Loc(Loc(0)))]);
        assert!(!is_transaction_well_formed(&no_begin));
        let after_commit = History::new(vec![
            begin(1),
            begin_ok(1),
            commit(1),
            commit_ok(1),
            Event::inv(1, OpName::TMRead, Args::Loc(Loc(0))),
        ]);
        assert!(!is_transaction_well_formed(&after_commit));
        let rebegin = History::new(vec![begin(1), begin_ok(1), begin(1)]);
        assert!(!is_transaction_well_formed(&rebegin));
    }

    #[test]
    fn completion() {
        assert!(complete(&History::new(vec![begin(1)])).is_empty());
        let h = History::new(vec![
            begin(1),
            begin_ok(1),
            Event::inv(1, OpName::TMRead, Args::Loc(Loc(0))),
        ]);
        assert_eq!(complete(&h), h.prefix(2));
        let c = complete(&h);
        assert_eq!(complete(&c), c);
    }

    #[test]
    fn real_time_orders() {
        let seq = History::new(vec![
            begin(1),
            begin_ok(1),
            commit(1),
            commit_ok(1),
            begin(2),
        ]);
        assert!(real_time_tx_order(&seq, TxId(1), TxId(2)));
        assert!(!real_time_tx_order(&seq, TxId(2), TxId(1)));
        let overlap = History::new(vec![begin(1), begin(2), commit(1), commit_ok(1)]);
        assert!(!real_time_tx_order(&overlap, TxId(1), TxId(2)));
        let aborted = History::new(vec![
            begin(1),
            begin_ok(1),
            commit(1),
            Event::res(1, OpName::TMCommit, RetVal::Abort),
            begin(2),
        ]);
        assert!(!real_time_tx_order(&aborted, TxId(1), TxId(2)));

        assert!(real_time_op_order(&seq, 1, 2));
        assert!(!real_time_op_order(&seq, 0, 2));
        assert!(!real_time_op_order(&seq, 2, 1));
    }
}
