use super::*;
use crate::ioa::{
    check_forward_simulation, explore, library_actions, Bounds, Hidden, Visit,
};
use crate::memlib::{Am, Cm};
use crate::specs::Dtms2;

fn drive(aut: &Norec, s: &NorecState, actions: &[Action]) -> NorecState {
    let mut s = s.clone();
    for a in actions {
        let next = aut.step(&s, a);
        assert_eq!(next.len(), 1, "{a} from {s:?}");
        s = next.into_iter().next().unwrap();
    }
    s
}

fn l(t: u16, line: Line) -> Action {
    Action::line(Namespace::NOrec, TxId(t), line)
}

#[test]
fn solo_begin_reads_even_glb() {
    let aut: Norec = Norec::cnorec(1, 2, 1);
    let s = drive(
        &aut,
        &aut.initial(),
        &[
            Event::inv(1, OpName::TMBegin, Args::None).into(),
            l(1, Line::B1),
            l(1, Line::B2),
            Event::res(1, OpName::TMBegin, RetVal::Ok).into(),
        ],
    );
    assert_eq!(s.tx(TxId(1)).pc, NorecPc::Ready);
    assert_eq!(s.tx(TxId(1)).loc, 0);
}

#[test]
fn writer_commit_moves_glb_by_two() {
    let aut: Norec = Norec::cnorec(1, 2, 1);
    let begin = drive(
        &aut,
        &aut.initial(),
        &[
            Event::inv(1, OpName::TMBegin, Args::None).into(),
            l(1, Line::B1),
            l(1, Line::B2),
            Event::res(1, OpName::TMBegin, RetVal::Ok).into(),
            Event::inv(1, OpName::TMWrite, Args::LocVal(Loc(0), Val(1))).into(),
            l(1, Line::W1),
            Event::res(1, OpName::TMWrite, RetVal::Ok).into(),
            Event::inv(1, OpName::TMCommit, Args::None).into(),
            l(1, Line::E1),
            l(1, Line::E2),
        ],
    );
    assert_eq!(begin.glb, 1);
    assert!(norec_mutex_invariant(&begin));
    let done = drive(&aut, &begin, &[l(1, Line::E4), l(1, Line::E5), l(1, Line::E4), l(1, Line::E6)]);
    assert_eq!(done.glb, 2);
    assert_eq!(done.mem.get(Loc(0)), Val(1));

    let crashed = drive(&aut, &begin, &[Action::crash()]);
    assert_eq!(crashed.glb, 0);
    assert_eq!(crashed.tx(TxId(1)).pc, NorecPc::Aborted);
}

#[test]
fn volatile_norec_has_no_crash() {
    let aut: Norec = Norec::norec(1, 2, 1);
    assert!(aut.classify(&Action::crash()).is_none());
    assert!(aut.step(&aut.initial(), &Action::crash()).is_empty());
}

#[test]
fn mutex_invariant_holds_exhaustively() {
    let flat: Norec = Norec::cnorec(1, 2, 2);
    let e = explore(&flat, Bounds::default(), |v| match v {
        Visit::State(s) if !norec_mutex_invariant(s) => Err("mutex".into()),
        Visit::State(s) if !glb_parity(s) => Err("parity".into()),
        _ => Ok(()),
    });
    assert!(e.complete && e.violation.is_none(), "{:?}", e.violation);

    let modular = build_cnorec_modular(Norec::<Standard>::modular(1, 2, 2), Am::new(1, 2, 2)).unwrap();
    let e = explore(&modular, Bounds::default(), |v| match v {
        Visit::State((s, _)) if !norec_mutex_invariant(s) => Err("mutex".into()),
        Visit::State((s, _)) if !glb_parity(s) => Err("parity".into()),
        _ => Ok(()),
    });
    assert!(e.complete && e.violation.is_none(), "{:?}", e.violation);
}

#[test]
fn flat_cnorec_simulates_dtms2() {
    let c: Norec = Norec::cnorec(1, 2, 2);
    let a = Dtms2::new(1, 2, 2);
    let rel = |cs: &NorecState, as_: &crate::specs::Dtms2State| simulation_relation_r(as_, cs);
    let v = check_forward_simulation(&c, &a, &rel, Bounds::default());
    assert!(v.holds(), "{v:?}");
}

#[test]
fn volatile_norec_simulates_tms2_with_two_locations() {
    let c: Norec = Norec::norec(2, 2, 2);
    let a = Dtms2::tms2(2, 2, 2);
    let rel = |cs: &NorecState, as_: &crate::specs::Dtms2State| simulation_relation_r(as_, cs);
    let v = check_forward_simulation(&c, &a, &rel, Bounds::default());
    assert!(v.holds(), "{v:?}");
}

#[test]
fn modular_over_am_simulates_dtms2() {
    let p = build_cnorec_modular(Norec::<Standard>::modular(1, 2, 2), Am::new(1, 2, 2)).unwrap();
    let c = Hidden::new(p, library_actions);
    let a = Dtms2::new(1, 2, 2);
    let rel = |cs: &(NorecState, crate::memlib::AmLibState), as_: &crate::specs::Dtms2State| {
        modular_relation(as_, cs)
    };
    let v = check_forward_simulation(&c, &a, &rel, Bounds::default());
    assert!(v.holds(), "{v:?}");
}

#[test]
fn modular_needs_a_library() {
    let err = build_cnorec_modular(Norec::<Standard>::modular(1, 2, 1), crate::ioa::Unit);
    assert!(matches!(err, Err(IoaError::MissingAction(_))));
    assert!(build_cnorec_modular(Norec::<Standard>::modular(1, 2, 1), Cm::<crate::memlib::Faithful>::new(1, 2, 1)).is_ok());
}

#[test]
fn flat_write_back_is_torn_by_a_crash_at_two_locations() {
    let c: Norec = Norec::cnorec(2, 2, 2);
    let a = Dtms2::new(2, 2, 2);
    let rel = |cs: &NorecState, as_: &crate::specs::Dtms2State| simulation_relation_r(as_, cs);
    let v = check_forward_simulation(&c, &a, &rel, Bounds::default());
    let crate::ioa::SimVerdict::Counterexample(ce, _) = v else {
        panic!("expected a counterexample, got {v:?}");
    };
    assert!(ce.action.as_ref().is_some_and(Action::is_crash));
    assert!(ce.path.iter().any(|a| *a == l(1, Line::E5)));
}

#[test]
fn modular_over_am_has_no_torn_write_back_at_two_locations() {
    let p = build_cnorec_modular(Norec::<Standard>::modular(2, 2, 2), Am::new(2, 2, 2)).unwrap();
    let c = Hidden::new(p, library_actions);
    let a = Dtms2::new(2, 2, 2);
    let rel = |cs: &(NorecState, crate::memlib::AmLibState), as_: &crate::specs::Dtms2State| {
        modular_relation(as_, cs)
    };
    let v = check_forward_simulation(&c, &a, &rel, Bounds::new(usize::MAX, 200_000));
    assert!(!matches!(v, crate::ioa::SimVerdict::Counterexample(..)), "{v:?}");
}
