use super::cm::{CmPc, CmState};
use crate::history::{Args, OpName, RetVal};
use crate::specs::{AmState, CanonPc, CanonState};

/// The abstract pc a concrete library pc stands for. Commit linearizes at
/// W8, so W1..W8 all map to the pending commit; reads linearize at R1.
pub fn abstract_pc(pc: &CmPc, input: &crate::history::PartialMap) -> CanonPc {
    match pc {
        CmPc::NotStarted => CanonPc::NotStarted,
        CmPc::Ready => CanonPc::Ready,
        CmPc::DoAcquire => CanonPc::Do(OpName::LibAcquire, Args::None),
        CmPc::ResAcquire => CanonPc::Res(OpName::LibAcquire, RetVal::Ok),
        CmPc::DoRelease => CanonPc::Do(OpName::LibRelease, Args::None),
        CmPc::ResRelease => CanonPc::Res(OpName::LibRelease, RetVal::Ok),
        CmPc::R1(l) => CanonPc::Do(OpName::LibRead, Args::Loc(*l)),
        CmPc::ResRead(v) => CanonPc::Res(OpName::LibRead, RetVal::Value(*v)),
        CmPc::W1(_)
        | CmPc::W2(_)
        | CmPc::W3(..)
        | CmPc::W4(..)
        | CmPc::W5(..)
        | CmPc::W6(..)
        | CmPc::W7(..)
        | CmPc::W8 => CanonPc::Do(OpName::LibCommit, Args::WriteSet(input.clone())),
        CmPc::ResCommit => CanonPc::Res(OpName::LibCommit, RetVal::Ok),
        CmPc::Crashed => CanonPc::Crashed,
    }
}

/// Equal owners, abstract memory `vmem ⊕ log`, and pcs related by
/// [`abstract_pc`].
pub fn cm_am_relation(cs: &CmState, as_: &CanonState<AmState>) -> bool {
    cs.owns == as_.obj.owns
        && cs.snapshot() == as_.obj.mem
        && cs.threads.len() == as_.pcs.len()
        && cs
            .threads
            .iter()
            .zip(&as_.pcs)
            .all(|(th, apc)| abstract_pc(&th.pc, &th.input) == *apc)
}
