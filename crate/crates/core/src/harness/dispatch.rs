//! Builds the automaton a configuration names. Mutants are type parameters,
//! so each arm is a distinct type and the body is expanded once per arm.

/// Binds `$aut` to the automaton `simulate` runs for `$cfg` (library
/// implementations are driven by [`crate::memlib::LibClient`]).
macro_rules! with_sim_automaton {
    ($cfg:expr, $aut:ident => $body:expr) => {{
        use $crate::harness::{ImplKind as K, Mutant as M};
        use $crate::memlib::{Cm, Faithful, LibClient, NoRecoveryRestore, NoUndoLog, W2Choice};
        use $crate::norec::{build_cnorec_modular, Norec, SkipV5GlbCheck, Standard};
        let cfg = $cfg;
        let (l, v, n) = (cfg.locs, cfg.vals, cfg.total_txs());
        let client = LibClient {
            locs: l,
            vals: v,
            threads: n,
            ops: 2,
        };
        let modular = |lib| build_cnorec_modular(Norec::<Standard>::modular(l, v, n), lib)
            .expect("library provides every call");
        match (cfg.impl_kind, cfg.mutant) {
            (K::Norec, None) => {
                let $aut = Norec::<Standard>::norec(l, v, n);
                $body
            }
            (K::Norec, Some(M::SkipV5GlbCheck)) => {
                let $aut = Norec::<SkipV5GlbCheck>::norec(l, v, n);
                $body
            }
            (K::Cnorec, None) => {
                let $aut = Norec::<Standard>::cnorec(l, v, n);
                $body
            }
            (K::Cnorec, Some(M::SkipV5GlbCheck)) => {
                let $aut = Norec::<SkipV5GlbCheck>::cnorec(l, v, n);
                $body
            }
            (K::CnorecAm, None) => {
                let $aut = modular($crate::memlib::Am::new(l, v, n));
                $body
            }
            (K::CnorecAm, Some(M::SkipV5GlbCheck)) => {
                let $aut = build_cnorec_modular(
                    Norec::<SkipV5GlbCheck>::modular(l, v, n),
                    $crate::memlib::Am::new(l, v, n),
                )
                .expect("library provides every call");
                $body
            }
            (K::CnorecCm, None) => {
                let $aut = build_cnorec_modular(
                    Norec::<Standard>::modular(l, v, n),
                    Cm::<Faithful>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("library provides every call");
                $body
            }
            (K::CnorecCm, Some(M::SkipV5GlbCheck)) => {
                let $aut = build_cnorec_modular(
                    Norec::<SkipV5GlbCheck>::modular(l, v, n),
                    Cm::<Faithful>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("library provides every call");
                $body
            }
            (K::CnorecCm, Some(M::NoUndoLog)) => {
                let $aut = build_cnorec_modular(
                    Norec::<Standard>::modular(l, v, n),
                    Cm::<NoUndoLog>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("library provides every call");
                $body
            }
            (K::CnorecCm, Some(M::NoRecoveryRestore)) => {
                let $aut = build_cnorec_modular(
                    Norec::<Standard>::modular(l, v, n),
                    Cm::<NoRecoveryRestore>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("library provides every call");
                $body
            }
            (K::Dtms2, None) => {
                let $aut = $crate::specs::Dtms2::new(l, v, n);
                $body
            }
            (K::CmLib, None) => {
                let $aut = $crate::ioa::Product::new(
                    client,
                    Cm::<Faithful>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("disjoint namespaces");
                $body
            }
            (K::CmLib, Some(M::NoUndoLog)) => {
                let $aut = $crate::ioa::Product::new(
                    client,
                    Cm::<NoUndoLog>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("disjoint namespaces");
                $body
            }
            (K::CmLib, Some(M::NoRecoveryRestore)) => {
                let $aut = $crate::ioa::Product::new(
                    client,
                    Cm::<NoRecoveryRestore>::new(l, v, n).with_w2(W2Choice::Least),
                )
                .expect("disjoint namespaces");
                $body
            }
            (k, m) => unreachable!("validated configuration {k} / {m:?}"),
        }
    }};
}

pub(crate) use with_sim_automaton;
