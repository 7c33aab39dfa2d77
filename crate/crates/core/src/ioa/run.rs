use super::{Action, Automaton};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Picks the next transition of a run.
pub trait Scheduler {
    /// Chooses among the enabled transitions, or `None` to stop. `step` is
    /// the number of transitions taken so far.
    fn pick<S>(&mut self, step: usize, options: &[(Action, S)]) -> Option<usize>;

    fn pick_start(&mut self, count: usize) -> usize {
        let _ = count;
        0
    }
}

/// Uniform choice among distinct enabled actions, then among that action's
/// successors. Deterministic for a given seed.
#[derive(Clone, Debug)]
pub struct SeededScheduler {
    rng: ChaCha8Rng,
}

impl SeededScheduler {
    pub fn new(seed: u64) -> Self {
        SeededScheduler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Uniform pick over the distinct actions of `options` accepted by
    /// `keep`, then over the successors of the chosen action.
    pub fn pick_where<S>(
        &mut self,
        options: &[(Action, S)],
        mut keep: impl FnMut(&Action) -> bool,
    ) -> Option<usize> {
        let mut actions: Vec<&Action> = Vec::new();
        for (a, _) in options {
            if keep(a) && !actions.contains(&a) {
                actions.push(a);
            }
        }
        if actions.is_empty() {
            return None;
        }
        let chosen = actions[self.rng.gen_range(0..actions.len())].clone();
        let succ: Vec<usize> = options
            .iter()
            .enumerate()
            .filter(|(_, (a, _))| *a == chosen)
            .map(|(i, _)| i)
            .collect();
        Some(succ[self.rng.gen_range(0..succ.len())])
    }
}

impl Scheduler for SeededScheduler {
    fn pick<S>(&mut self, _step: usize, options: &[(Action, S)]) -> Option<usize> {
        self.pick_where(options, |_| true)
    }

    fn pick_start(&mut self, count: usize) -> usize {
        self.rng.gen_range(0..count)
    }
}

/// A finite execution `s0 a1 s1 ... an sn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution<S> {
    pub states: Vec<S>,
    pub actions: Vec<Action>,
}

impl<S> Execution<S> {
    pub fn last_state(&self) -> &S {
        self.states.last().expect("executions are non-empty")
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn trace<A: Automaton<State = S>>(&self, aut: &A) -> Vec<Action> {
        super::trace_of(aut, &self.actions)
    }
}

/// Runs `aut` for at most `max_steps` transitions, stopping early when
/// nothing is enabled or the scheduler declines.
pub fn run<A: Automaton>(
    aut: &A,
    scheduler: &mut impl Scheduler,
    max_steps: usize,
) -> Execution<A::State> {
    let starts = aut.start_states();
    let start = starts[scheduler.pick_start(starts.len())].clone();
    let mut exec = Execution {
        states: vec![start],
        actions: Vec::new(),
    };
    for step in 0..max_steps {
        let options = aut.transitions(exec.last_state());
        if options.is_empty() {
            break;
        }
        let Some(i) = scheduler.pick(step, &options) else {
            break;
        };
        let (a, s) = options.into_iter().nth(i).expect("scheduler index in range");
        exec.actions.push(a);
        exec.states.push(s);
    }
    exec
}
