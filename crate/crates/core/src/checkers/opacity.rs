use super::tm::{valid_transactional, zero_memory};
use super::{CheckError, Verdict};
use crate::history::{
    is_transaction_well_formed, project, real_time_tx_order, strip_crashes, Args, Event, History,
    Memory, OpName, PartialMap, RetVal, TxId,
};
use std::collections::HashSet;

pub const DEFAULT_TX_CAP: usize = 8;

struct Tx {
    events: Vec<Event>,
    pending: Option<OpName>,
    committed: bool,
    wr: PartialMap,
    /// Transactions that must be serialized earlier.
    pred: u64,
}

impl Tx {
    fn new(h: &History, t: TxId) -> Self {
        let events = project(h, t).into_events();
        let pending = match events.last() {
            Some(Event::Inv { op, .. }) => Some(*op),
            _ => None,
        };
        let mut wr = PartialMap::new();
        let mut committed = false;
        for pair in events.windows(2) {
            match pair {
                [Event::Inv { args: Args::LocVal(l, v), .. }, Event::Res { op: OpName::TMWrite, rval: RetVal::Ok, .. }] => {
                    wr.insert(*l, *v)
                }
                [_, Event::Res { op: OpName::TMCommit, rval: RetVal::Ok, .. }] => committed = true,
                _ => {}
            }
        }
        Tx {
            events,
            pending,
            committed,
            wr,
            pred: 0,
        }
    }

    /// Every completed read returns the own write or `mem`.
    fn legal_from(&self, mem: &Memory) -> bool {
        let mut own = PartialMap::new();
        self.events.windows(2).all(|pair| match pair {
            [Event::Inv { args: Args::LocVal(l, v), .. }, Event::Res { op: OpName::TMWrite, rval: RetVal::Ok, .. }] => {
                own.insert(*l, *v);
                true
            }
            [Event::Inv { args: Args::Loc(l), .. }, Event::Res { op: OpName::TMRead, rval: RetVal::Value(v), .. }] => {
                own.get(*l).unwrap_or_else(|| mem.get(*l)) == *v
            }
            _ => true,
        })
    }

    /// The ways this transaction can end up in the serialization: whether
    /// it publishes its writes.
    fn outcomes(&self) -> &'static [bool] {
        if self.committed {
            &[true]
        } else if self.pending == Some(OpName::TMCommit) {
            &[true, false]
        } else {
            &[false]
        }
    }

    fn completed_events(&self, commits: bool) -> Vec<Event> {
        let mut evs = self.events.clone();
        match (self.pending, evs.last()) {
            (Some(OpName::TMCommit), Some(&Event::Inv { tx, .. })) if commits => {
                evs.push(Event::res(tx, OpName::TMCommit, RetVal::Ok));
            }
            (Some(_), _) => {
                evs.pop();
            }
            (None, _) => {}
        }
        evs
    }
}

struct Search<'a> {
    txs: &'a [Tx],
    failed: HashSet<(u64, Memory)>,
    order: Vec<(usize, bool)>,
}

impl Search<'_> {
    fn run(&mut self, placed: u64, mem: &Memory) -> bool {
        if placed.count_ones() as usize == self.txs.len() {
            return true;
        }
        if self.failed.contains(&(placed, mem.clone())) {
            return false;
        }
        for (i, tx) in self.txs.iter().enumerate() {
            let bit = 1u64 << i;
            if placed & bit != 0 || tx.pred & !placed != 0 || !tx.legal_from(mem) {
                continue;
            }
            for &commits in tx.outcomes() {
                let next = if commits { mem.overridden(&tx.wr) } else { mem.clone() };
                self.order.push((i, commits));
                if self.run(placed | bit, &next) {
                    return true;
                }
                self.order.pop();
            }
        }
        self.failed.insert((placed, mem.clone()));
        false
    }
}

/// End-to-end opacity of a crash-free history: some response extension and
/// valid transaction-sequential history equivalent to it that preserves
/// `≺_h`. Returns that history.
pub fn end_to_end_opaque(h: &History) -> Option<History> {
    let ids = h.transactions();
    let mut txs: Vec<Tx> = ids.iter().map(|&t| Tx::new(h, t)).collect();
    for (j, &t2) in ids.iter().enumerate() {
        for (i, &t1) in ids.iter().enumerate() {
            if i != j && real_time_tx_order(h, t1, t2) {
                txs[j].pred |= 1 << i;
            }
        }
    }
    let mut search = Search {
        txs: &txs,
        failed: HashSet::new(),
        order: Vec::new(),
    };
    if !search.run(0, &zero_memory(h)) {
        return None;
    }
    Some(
        search
            .order
            .iter()
            .flat_map(|&(i, commits)| txs[i].completed_events(commits))
            .collect(),
    )
}

pub fn check_opaque(h: &History) -> Result<Verdict, CheckError> {
    check_opaque_with_cap(h, DEFAULT_TX_CAP)
}

/// Opacity: every prefix is end-to-end opaque. Only prefixes ending in a
/// response need checking: a trailing invocation can always be dropped by
/// the completion.
pub fn check_opaque_with_cap(h: &History, cap: usize) -> Result<Verdict, CheckError> {
    if h.iter().any(Event::is_crash) {
        return Err(CheckError::ContainsCrash);
    }
    if !is_transaction_well_formed(h) {
        return Err(CheckError::IllFormed("transaction well-formed"));
    }
    let count = h.transactions().len();
    if count > cap.min(64) {
        return Err(CheckError::TooLarge {
            what: "transactions",
            count,
            cap: cap.min(64),
        });
    }
    for (i, e) in h.iter().enumerate() {
        if e.is_res() && end_to_end_opaque(&h.prefix(i + 1)).is_none() {
            return Ok(Verdict::reject(
                Some(i + 1),
                format!("no valid serialization after event {i} ({e})"),
            ));
        }
    }
    match end_to_end_opaque(h) {
        Some(w) => Ok(Verdict::accept(w)),
        None => Ok(Verdict::reject(Some(h.len()), "no valid serialization")),
    }
}

pub fn check_durably_opaque(h: &History) -> Result<Verdict, CheckError> {
    check_durably_opaque_with_cap(h, DEFAULT_TX_CAP)
}

pub fn check_durably_opaque_with_cap(h: &History, cap: usize) -> Result<Verdict, CheckError> {
    if !is_transaction_well_formed(h) {
        return Ok(Verdict::reject(None, "not transaction well-formed"));
    }
    check_opaque_with_cap(&strip_crashes(h), cap)
}

/// Re-checks an opacity witness against `ops(h)` from scratch: validity,
/// per-transaction equivalence up to the completion of pending operations,
/// and preservation of `≺_h`.
pub fn revalidate_opacity(h: &History, witness: &History) -> bool {
    let h = strip_crashes(h);
    if valid_transactional(witness) != Ok(true) {
        return false;
    }
    let in_witness: HashSet<TxId> = witness.transactions().into_iter().collect();
    for t in h.transactions() {
        let ph = project(&h, t).into_events();
        let pw = project(witness, t).into_events();
        if !completes_to(&ph, &pw) {
            return false;
        }
        if !in_witness.contains(&t) && !pw.is_empty() {
            return false;
        }
    }
    if in_witness.iter().any(|t| project(&h, *t).is_empty()) {
        return false;
    }
    let span = |t: TxId| {
        let first = witness.iter().position(|e| e.tx() == Some(t));
        let last = witness.iter().rposition(|e| e.tx() == Some(t));
        first.zip(last)
    };
    for &t1 in &in_witness {
        for &t2 in &in_witness {
            if t1 != t2 && real_time_tx_order(&h, t1, t2) {
                match (span(t1), span(t2)) {
                    (Some((_, end1)), Some((start2, _))) if end1 < start2 => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// `pw` is `ph` with its trailing pending invocation dropped or answered.
pub(crate) fn completes_to(ph: &[Event], pw: &[Event]) -> bool {
    if ph == pw {
        return true;
    }
    match ph.last() {
        Some(Event::Inv { tx, op, .. }) => {
            let stem = &ph[..ph.len() - 1];
            if pw == stem {
                return true;
            }
            pw.len() == ph.len() + 1
                && pw[..ph.len()] == *ph
                && matches!(&pw[ph.len()], Event::Res { tx: t2, op: o2, rval } if t2 == tx && o2 == op && op.admits(rval))
        }
        _ => false,
    }
}

