use super::{Caller, NorecPc, NorecState, NorecTx, Resp};
use crate::history::PartialMap;
use crate::memlib::{AmLibState, AmPc};
use crate::specs::{Dtms2Pc, Dtms2State};

/// What a concrete transaction looks like from dTMS2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractView {
    pub pc: Dtms2Pc,
    /// Locations already written back by a flat commit that has not yet
    /// linearized.
    pub applied: Option<PartialMap>,
}

/// Reads linearize at R6 (or R1 on a write-set hit), read-only commits at
/// E1, flat writers at the last E5 and library writers inside the
/// library's commit. `lib_committed` says whether the library has already
/// performed the pending `LibCommit`.
pub fn norec_pc_map(tx: &NorecTx, lib_committed: bool) -> AbstractView {
    let plain = |pc| AbstractView { pc, applied: None };
    let len = tx.wr.len();
    match tx.pc {
        NorecPc::NotStarted => plain(Dtms2Pc::NotStarted),
        NorecPc::B1 | NorecPc::B2 | NorecPc::Respond(Resp::Begin) => plain(Dtms2Pc::BeginPending),
        NorecPc::Ready => plain(Dtms2Pc::Ready),
        NorecPc::R1(l)
        | NorecPc::R2(l)
        | NorecPc::R2Wait(l)
        | NorecPc::R3(l)
        | NorecPc::R4(l)
        | NorecPc::R5(l)
        | NorecPc::R5Wait(l)
        | NorecPc::R6(l) => plain(Dtms2Pc::DoRead(l)),
        NorecPc::Respond(Resp::Read(v)) => plain(Dtms2Pc::ResRead(v)),
        NorecPc::W1(l, v) => plain(Dtms2Pc::DoWrite(l, v)),
        NorecPc::Respond(Resp::Write) => plain(Dtms2Pc::ResWrite),
        NorecPc::V1(c)
        | NorecPc::V2(c)
        | NorecPc::V3(c)
        | NorecPc::V4(c, _)
        | NorecPc::V5(c, _)
        | NorecPc::V5Wait(c, _)
        | NorecPc::V5Cmp(c, ..)
        | NorecPc::V6(c)
        | NorecPc::Respond(Resp::Abort(c)) => plain(match c {
            Caller::Read(l) => Dtms2Pc::DoRead(l),
            Caller::Commit => Dtms2Pc::DoCommit,
        }),
        NorecPc::E1 | NorecPc::E2 | NorecPc::E3 | NorecPc::E4Wait => plain(Dtms2Pc::DoCommit),
        NorecPc::E4(k) | NorecPc::E5(k) if usize::from(k) < len => AbstractView {
            pc: Dtms2Pc::DoCommit,
            applied: Some(tx.wr.prefix(usize::from(k))),
        },
        NorecPc::E4(_) | NorecPc::E5(_) => plain(Dtms2Pc::ResCommit),
        NorecPc::E5Wait if !lib_committed => plain(Dtms2Pc::DoCommit),
        NorecPc::E5Wait
        | NorecPc::E6
        | NorecPc::E6Wait
        | NorecPc::E7
        | NorecPc::Respond(Resp::Commit) => plain(Dtms2Pc::ResCommit),
        NorecPc::Committed => plain(Dtms2Pc::Committed),
        NorecPc::Aborted => plain(Dtms2Pc::Aborted),
    }
}

fn txs_related(as_: &Dtms2State, cs: &NorecState, lib_committed: impl Fn(usize) -> bool) -> bool {
    cs.txs.len() == as_.txs.len()
        && cs.txs.iter().zip(&as_.txs).enumerate().all(|(i, (c, a))| {
            norec_pc_map(c, lib_committed(i)).pc == a.pc && c.rd == a.rd && c.wr == a.wr
        })
}

/// The relation from flat (c)NOrec to (d)TMS2: matching pcs and read/write
/// sets, and memory equal to the latest abstract snapshot with any partial
/// write-back applied on top.
pub fn simulation_relation_r(as_: &Dtms2State, cs: &NorecState) -> bool {
    if !txs_related(as_, cs, |_| false) {
        return false;
    }
    let mut expected = as_.last_mem().clone();
    for tx in &cs.txs {
        if let Some(p) = norec_pc_map(tx, false).applied {
            expected = expected.overridden(&p);
        }
    }
    cs.mem == expected
}

/// The relation from cNOrec[AM] to dTMS2: as for the flat automaton, with
/// the library's memory in place of the TM's.
pub fn modular_relation(as_: &Dtms2State, cs: &(NorecState, AmLibState)) -> bool {
    let (tm, lib) = cs;
    let committed = |i: usize| !matches!(lib.pcs.get(i), Some(AmPc::DoCommit(_)));
    txs_related(as_, tm, committed) && lib.mem == *as_.last_mem()
}
