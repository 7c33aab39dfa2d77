use super::config::{ConfigError, ImplKind, Mutant, RunConfig};
use crate::ioa::{check_forward_simulation, library_actions, Automaton, Bounds, Hidden, SimVerdict, SimulationRelation};
use crate::memlib::{cm_am_relation, AmLibState, Am, Cm, CmVariant, Faithful, NoRecoveryRestore, NoUndoLog};
use crate::norec::{
    build_cnorec_modular, modular_relation, simulation_relation_r, Norec, NorecState, NorecVariant,
    SkipV5GlbCheck, Standard,
};
use crate::specs::{AmObject, Canonical, Dtms2, Dtms2State};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbstractKind {
    /// dTMS2, or TMS2 when the concrete side has no crashes.
    Dtms2,
    /// The canonical durable automaton of the AM object.
    Canonical,
}

impl fmt::Display for AbstractKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbstractKind::Dtms2 => "dtms2",
            AbstractKind::Canonical => "canonical",
        })
    }
}

impl FromStr for AbstractKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "dtms2" => Ok(AbstractKind::Dtms2),
            "canonical" | "canonical-am" => Ok(AbstractKind::Canonical),
            _ => Err(ConfigError::Unknown("abstract automaton", s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimOutcome {
    Holds,
    Counterexample(String),
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct SimcheckReport {
    pub config: RunConfig,
    pub abstract_kind: AbstractKind,
    pub outcome: SimOutcome,
    pub pairs: usize,
    pub concrete_states: usize,
    pub transitions: usize,
    pub elapsed: Duration,
}

fn run<C: Automaton, A: Automaton>(
    c: &C,
    a: &A,
    rel: &impl SimulationRelation<C::State, A::State>,
    b: Bounds,
) -> (SimOutcome, usize, usize, usize) {
    let v = check_forward_simulation(c, a, rel, b);
    let st = v.stats();
    let outcome = match v {
        SimVerdict::Holds(_) => SimOutcome::Holds,
        SimVerdict::Counterexample(ce, _) => SimOutcome::Counterexample(ce.to_string()),
        SimVerdict::Inconclusive(_) => SimOutcome::Inconclusive,
    };
    (outcome, st.pairs, st.concrete_states, st.transitions)
}

fn flat<V: NorecVariant>(cfg: &RunConfig, b: Bounds) -> (SimOutcome, usize, usize, usize) {
    let (l, v, n) = (cfg.locs, cfg.vals, cfg.txs_per_era);
    let rel = |c: &NorecState, a: &Dtms2State| simulation_relation_r(a, c);
    if cfg.impl_kind == ImplKind::Norec {
        run(&Norec::<V>::norec(l, v, n), &Dtms2::tms2(l, v, n), &rel, b)
    } else {
        run(&Norec::<V>::cnorec(l, v, n), &Dtms2::new(l, v, n), &rel, b)
    }
}

fn modular<V: NorecVariant>(cfg: &RunConfig, b: Bounds) -> (SimOutcome, usize, usize, usize) {
    let (l, v, n) = (cfg.locs, cfg.vals, cfg.txs_per_era);
    let p = build_cnorec_modular(Norec::<V>::modular(l, v, n), Am::new(l, v, n))
        .expect("library provides every call");
    let rel = |c: &(NorecState, AmLibState), a: &Dtms2State| modular_relation(a, c);
    run(&Hidden::new(p, library_actions), &Dtms2::new(l, v, n), &rel, b)
}

fn cm<W: CmVariant>(cfg: &RunConfig, b: Bounds) -> (SimOutcome, usize, usize, usize) {
    let (l, v, n) = (cfg.locs, cfg.vals, cfg.txs_per_era);
    run(
        &Cm::<W>::new(l, v, n),
        &Canonical::new(AmObject::new(l, v), n),
        &cm_am_relation,
        b,
    )
}

/// Checks a forward simulation for one of the supported pairs: (norec or
/// cnorec, dtms2) with relation R, (cnorec-am, dtms2) with library actions
/// hidden, and (cm-lib, canonical) with the CM/AM relation.
pub fn simcheck(cfg: &RunConfig, abs: AbstractKind) -> Result<SimcheckReport, ConfigError> {
    use ImplKind as K;
    cfg.validate()?;
    let b = Bounds::new(cfg.depth, cfg.max_states);
    let start = Instant::now();
    let skip = Some(Mutant::SkipV5GlbCheck);
    let (outcome, pairs, concrete_states, transitions) = match (cfg.impl_kind, abs, cfg.mutant) {
        (K::Norec | K::Cnorec, AbstractKind::Dtms2, None) => flat::<Standard>(cfg, b),
        (K::Norec | K::Cnorec, AbstractKind::Dtms2, m) if m == skip => flat::<SkipV5GlbCheck>(cfg, b),
        (K::CnorecAm, AbstractKind::Dtms2, None) => modular::<Standard>(cfg, b),
        (K::CnorecAm, AbstractKind::Dtms2, m) if m == skip => modular::<SkipV5GlbCheck>(cfg, b),
        (K::CmLib, AbstractKind::Canonical, None) => cm::<Faithful>(cfg, b),
        (K::CmLib, AbstractKind::Canonical, Some(Mutant::NoUndoLog)) => cm::<NoUndoLog>(cfg, b),
        (K::CmLib, AbstractKind::Canonical, Some(Mutant::NoRecoveryRestore)) => {
            cm::<NoRecoveryRestore>(cfg, b)
        }
        (k, a, _) => {
            return Err(ConfigError::Invalid(format!(
                "unsupported simulation pair ({k}, {a})"
            )))
        }
    };
    Ok(SimcheckReport {
        config: cfg.clone(),
        abstract_kind: abs,
        outcome,
        pairs,
        concrete_states,
        transitions,
        elapsed: start.elapsed(),
    })
}
