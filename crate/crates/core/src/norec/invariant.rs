use super::{NorecPc, NorecState};

/// The commit region: from the successful CAS until `glb` is released.
pub fn in_commit_region(pc: NorecPc) -> bool {
    matches!(
        pc,
        NorecPc::E4(_)
            | NorecPc::E4Wait
            | NorecPc::E5(_)
            | NorecPc::E5Wait
            | NorecPc::E6
            | NorecPc::E6Wait
            | NorecPc::E7
    )
}

/// A transaction in the commit region holds `glb = loc + 1`, and it is the
/// only one there.
pub fn norec_mutex_invariant(s: &NorecState) -> bool {
    let mut inside = s.txs.iter().filter(|tx| in_commit_region(tx.pc));
    match (inside.next(), inside.next()) {
        (None, _) => true,
        (Some(tx), None) => s.glb == tx.loc.wrapping_add(1),
        (Some(_), Some(_)) => false,
    }
}

/// `glb` is odd exactly when some transaction is in the commit region.
pub fn glb_parity(s: &NorecState) -> bool {
    (s.glb % 2 == 1) == s.txs.iter().any(|tx| in_commit_region(tx.pc))
}
