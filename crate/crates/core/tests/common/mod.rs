//! An unpruned opacity oracle and a generator of small random histories.
//!
//! The oracle shares nothing with the library checker beyond the event
//! types: every prefix, every response extension and every permutation of
//! transactions is tried, with legality and validity evaluated from scratch.

#![allow(dead_code)]

use dstm::history::{Args, Event, History, Loc, OpName, RetVal, TxId, Val};
use itertools::Itertools;
use rand::Rng;
use std::collections::BTreeMap;

fn tx_ids(evs: &[Event]) -> Vec<TxId> {
    evs.iter().filter_map(Event::tx).unique().collect()
}

fn proj(evs: &[Event], t: TxId) -> Vec<Event> {
    evs.iter().filter(|e| e.tx() == Some(t)).cloned().collect()
}

/// Responses a pending invocation may receive.
fn alphabet(inv: &Event, domain: &[u8]) -> Vec<Event> {
    let Event::Inv { tx, op, .. } = inv else {
        unreachable!("pending events are invocations")
    };
    let mut out = vec![Event::res(*tx, *op, RetVal::Abort)];
    match op {
        OpName::TMRead => out.extend(domain.iter().map(|&v| Event::res(*tx, *op, RetVal::Value(Val(v))))),
        _ => out.push(Event::res(*tx, *op, RetVal::Ok)),
    }
    out
}

fn pending(evs: &[Event]) -> Vec<Event> {
    let mut last: BTreeMap<TxId, &Event> = BTreeMap::new();
    for e in evs {
        last.insert(e.tx().expect("crash-free"), e);
    }
    last.into_values().filter(|e| e.is_inv()).cloned().collect()
}

/// Drops invocations without a response.
fn complete(evs: &[Event]) -> Vec<Event> {
    let mut out = Vec::new();
    for (i, e) in evs.iter().enumerate() {
        let answered = evs[i + 1..].iter().find(|f| f.tx() == e.tx()).is_some_and(Event::is_res);
        if e.is_res() || answered {
            out.push(e.clone());
        }
    }
    out
}

fn committed(evs: &[Event], t: TxId) -> bool {
    evs.iter().any(|e| {
        e.tx() == Some(t) && matches!(e, Event::Res { op: OpName::TMCommit, rval: RetVal::Ok, .. })
    })
}

/// `t1 ≺ t2`: the commit of `t1` returned ok before `t2` began.
fn precedes(evs: &[Event], t1: TxId, t2: TxId) -> bool {
    let c = evs.iter().position(|e| {
        e.tx() == Some(t1) && matches!(e, Event::Res { op: OpName::TMCommit, rval: RetVal::Ok, .. })
    });
    let b = evs.iter().position(|e| e.tx() == Some(t2) && matches!(e, Event::Inv { op: OpName::TMBegin, .. }));
    matches!((c, b), (Some(c), Some(b)) if c < b)
}

/// Legality of a transaction-sequential history: reads see their own
/// write, else the committed memory.
fn legal(evs: &[Event]) -> bool {
    let mut mem: BTreeMap<u8, u8> = BTreeMap::new();
    let mut wr: BTreeMap<(TxId, u8), u8> = BTreeMap::new();
    let mut reading: BTreeMap<TxId, u8> = BTreeMap::new();
    for e in evs {
        match e {
            Event::Inv { tx, op: OpName::TMRead, args: Args::Loc(Loc(l)) } => {
                reading.insert(*tx, *l);
            }
            Event::Inv { tx, op: OpName::TMWrite, args: Args::LocVal(Loc(l), Val(v)) } => {
                wr.insert((*tx, *l), *v);
            }
            Event::Res { tx, op: OpName::TMRead, rval: RetVal::Value(Val(v)) } => {
                let l = reading[tx];
                let expect = wr.get(&(*tx, l)).or(mem.get(&l)).copied().unwrap_or(0);
                if *v != expect {
                    return false;
                }
            }
            Event::Res { tx, op: OpName::TMCommit, rval: RetVal::Ok } => {
                for (&(t, l), &v) in &wr {
                    if t == *tx {
                        mem.insert(l, v);
                    }
                }
            }
            _ => {}
        }
    }
    true
}

fn valid(hs: &[Event]) -> bool {
    (0..hs.len()).all(|i| {
        let t = hs[i].tx();
        let sub: Vec<Event> = hs[..=i]
            .iter()
            .filter(|e| e.tx() == t || committed(hs, e.tx().expect("crash-free")))
            .cloned()
            .collect();
        legal(&sub)
    })
}

fn end_to_end(prefix: &[Event], domain: &[u8]) -> bool {
    let open = pending(prefix);
    let choices = open.iter().map(|inv| {
        let mut c: Vec<Option<Event>> = vec![None];
        c.extend(alphabet(inv, domain).into_iter().map(Some));
        c
    });
    choices.multi_cartesian_product().any(|ext| {
        let mut ext_h = prefix.to_vec();
        ext_h.extend(ext.into_iter().flatten());
        let done = complete(&ext_h);
        let ids = tx_ids(&done);
        ids.iter().permutations(ids.len()).any(|order| {
            let ordered = order.iter().enumerate().all(|(i, &&a)| {
                order[i + 1..].iter().all(|&&b| !precedes(prefix, b, a))
            });
            let hs: Vec<Event> = order.iter().flat_map(|&&t| proj(&done, t)).collect();
            ordered && valid(&hs)
        })
    })
}

/// Values a read could possibly return: initial zero, every written value
/// and one value nobody wrote.
fn domain(h: &History) -> Vec<u8> {
    let mut d: Vec<u8> = vec![0];
    for e in h.iter() {
        if let Event::Inv { args: Args::LocVal(_, Val(v)), .. } = e {
            d.push(*v);
        }
    }
    let fresh = d.iter().max().copied().unwrap_or(0) + 1;
    d.push(fresh);
    d.sort_unstable();
    d.dedup();
    d
}

/// Opacity by brute force: every prefix is end-to-end opaque.
pub fn oracle_opaque(h: &History) -> bool {
    let evs = h.events();
    let d = domain(h);
    (0..=evs.len()).all(|n| end_to_end(&evs[..n], &d))
}

/// Independent acceptance of a witness for crash-free `h`.
pub fn oracle_witness_ok(h: &History, w: &History) -> bool {
    let (evs, ws) = (h.events(), w.events());
    let order = tx_ids(ws);
    let contiguous = order.iter().all(|&t| {
        let pos: Vec<usize> = ws.iter().positions(|e| e.tx() == Some(t)).collect();
        pos.windows(2).all(|p| p[1] == p[0] + 1)
    });
    let matches_h = order.iter().all(|&t| {
        let (ph, pw) = (proj(evs, t), proj(ws, t));
        let trimmed = ph.len() == pw.len() + 1 && ph.last().is_some_and(Event::is_inv) && ph[..pw.len()] == pw[..];
        let extended = pw.len() == ph.len() + 1 && pw[..ph.len()] == ph[..] && ph.last().is_some_and(Event::is_inv);
        ph == pw || trimmed || extended
    });
    let covers = tx_ids(evs).into_iter().all(|t| order.contains(&t) || proj(evs, t).len() == 1);
    let ordered = order.iter().enumerate().all(|(i, &a)| order[i + 1..].iter().all(|&b| !precedes(evs, b, a)));
    contiguous && matches_h && covers && ordered && valid(ws)
}

/// A transaction well-formed, crash-free history over `x0`, `x1` and
/// values `0..2`, with at most three transactions and four reads or writes.
pub fn random_history(rng: &mut impl Rng) -> History {
    #[derive(Clone, Copy, PartialEq)]
    enum St {
        Fresh,
        Pending(OpName),
        Live,
        Done,
    }
    let n = rng.gen_range(1..=3u16);
    let mut st = vec![St::Fresh; usize::from(n)];
    let mut mem_ops = 0;
    let mut out = Vec::new();
    let len = rng.gen_range(0..=16);
    for _ in 0..len {
        let movable: Vec<usize> = (0..st.len()).filter(|&i| st[i] != St::Done).collect();
        if movable.is_empty() {
            break;
        }
        let i = movable[rng.gen_range(0..movable.len())];
        let t = TxId(i as u16 + 1);
        match st[i] {
            St::Fresh => {
                out.push(Event::inv(t, OpName::TMBegin, Args::None));
                st[i] = St::Pending(OpName::TMBegin);
            }
            St::Pending(op) => {
                let abort = rng.gen_ratio(1, 6);
                let rval = match op {
                    _ if abort => RetVal::Abort,
                    OpName::TMRead => RetVal::Value(Val(rng.gen_range(0..2))),
                    _ => RetVal::Ok,
                };
                out.push(Event::res(t, op, rval));
                st[i] = if abort || op == OpName::TMCommit { St::Done } else { St::Live };
            }
            St::Live => {
                let can_touch = mem_ops < 4;
                let (op, args) = match rng.gen_range(0..3) {
                    0 if can_touch => (OpName::TMRead, Args::Loc(Loc(rng.gen_range(0..2)))),
                    1 if can_touch => (
                        OpName::TMWrite,
                        Args::LocVal(Loc(rng.gen_range(0..2)), Val(rng.gen_range(0..2))),
                    ),
                    _ => (OpName::TMCommit, Args::None),
                };
                if op != OpName::TMCommit {
                    mem_ops += 1;
                }
                out.push(Event::inv(t, op, args));
                st[i] = St::Pending(op);
            }
            St::Done => unreachable!(),
        }
    }
    History::new(out)
}
