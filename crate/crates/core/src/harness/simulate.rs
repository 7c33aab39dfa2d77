use super::config::{ConfigError, ImplKind, RunConfig};
use super::dispatch::with_sim_automaton;
use crate::history::{format_history, Event, History, RetVal};
use crate::ioa::{Action, ActionKind, Automaton, SeededScheduler};
use crate::memlib::library_history;
use rand::Rng;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    pub history: History,
    pub actions: Vec<Action>,
    pub crashes: usize,
}

/// Runs `aut` for at most `cfg.steps` steps. Only transactions of the
/// current era are scheduled. Before an internal step a crash is injected
/// with probability `cfg.crash_prob`; a crash is forced once the era has
/// used its share of the step budget or has nothing left to do. Each crash
/// is one step, and the last era never crashes.
///
/// dTMS2 may abort any pending operation, so uniform choice would end most
/// of its transactions at once. For it, abort responses are taken only one
/// time in ten when something else is enabled.
pub fn drive<A: Automaton>(aut: &A, cfg: &RunConfig) -> Vec<Action> {
    let mut sched = SeededScheduler::new(cfg.seed);
    let mut state = aut.start_states().swap_remove(0);
    let n = cfg.txs_per_era;
    let quota = (cfg.steps / usize::from(cfg.eras)).max(1);
    let mut era: u16 = 0;
    let mut era_steps = 0;
    let mut actions = Vec::new();
    let avoid_aborts = cfg.impl_kind == ImplKind::Dtms2;
    for _ in 0..cfg.steps {
        let options = aut.transitions(&state);
        let lo = era * n + 1;
        let in_era = |a: &Action| !a.is_crash() && a.tx().is_some_and(|t| (lo..lo + n).contains(&t.0));
        let can_crash = era + 1 < cfg.eras;
        let pick = if avoid_aborts && !sched.rng().gen_ratio(1, 10) {
            sched
                .pick_where(&options, |a| in_era(a) && !is_abort(a))
                .or_else(|| sched.pick_where(&options, &in_era))
        } else {
            sched.pick_where(&options, &in_era)
        };
        let crash_now = can_crash
            && match pick {
                None => true,
                Some(_) if era_steps >= quota => true,
                Some(i) => {
                    aut.classify(&options[i].0) == Some(ActionKind::Internal)
                        && sched
                            .rng()
                            .gen_ratio(cfg.crash_prob.num, cfg.crash_prob.den)
                }
            };
        let chosen = if crash_now {
            options.iter().position(|(a, _)| a.is_crash())
        } else {
            pick
        };
        let Some(i) = chosen else { break };
        let (a, s) = options.into_iter().nth(i).expect("index in range");
        if a.is_crash() {
            era += 1;
            era_steps = 0;
        } else {
            era_steps += 1;
        }
        actions.push(a);
        state = s;
    }
    actions
}

fn is_abort(a: &Action) -> bool {
    matches!(a.event(), Some(Event::Res { rval: RetVal::Abort, .. }))
}

/// The history a run exhibits: TM events and crashes for transactional
/// implementations, the library history (with recovery operations) for
/// `cm-lib`.
pub fn render(cfg: &RunConfig, actions: &[Action]) -> History {
    if cfg.impl_kind.is_tm() {
        actions
            .iter()
            .filter_map(Action::event)
            .filter(|e| e.is_crash() || e.op().is_some_and(|op| op.is_transactional()))
            .cloned()
            .collect()
    } else {
        library_history(actions, cfg.total_txs() + 1)
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<Simulation, ConfigError> {
    cfg.validate()?;
    let actions = with_sim_automaton!(cfg, aut => drive(&aut, cfg));
    let history = render(cfg, &actions);
    let crashes = history.iter().filter(|e| matches!(e, Event::Crash)).count();
    Ok(Simulation {
        history,
        actions,
        crashes,
    })
}

/// The trace file: a comment header with the replay flags, then the events.
pub fn trace_file_contents(cfg: &RunConfig, h: &History) -> String {
    format!("# dstm simulate {}\n{}", cfg.replay_args(), format_history(h))
}

pub fn write_trace(path: &Path, cfg: &RunConfig, h: &History) -> std::io::Result<()> {
    std::fs::write(path, trace_file_contents(cfg, h))
}
