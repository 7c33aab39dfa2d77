use super::{Action, ActionKind, Automaton, Namespace};

/// `A` with the external actions selected by `hide` turned internal.
#[derive(Clone, Copy, Debug)]
pub struct Hidden<A> {
    pub inner: A,
    pub hide: fn(&Action) -> bool,
}

impl<A> Hidden<A> {
    pub fn new(inner: A, hide: fn(&Action) -> bool) -> Self {
        Hidden { inner, hide }
    }
}

/// Library invocations, responses and thread starts.
pub fn library_actions(a: &Action) -> bool {
    match a {
        Action::Run(_) => true,
        Action::Event(e) => e.op().is_some_and(|op| op.is_library()),
        Action::Internal(_) => false,
    }
}

impl<A: Automaton> Automaton for Hidden<A> {
    type State = A::State;

    fn start_states(&self) -> Vec<Self::State> {
        self.inner.start_states()
    }

    fn transitions(&self, s: &Self::State) -> Vec<(Action, Self::State)> {
        self.inner.transitions(s)
    }

    fn classify(&self, a: &Action) -> Option<ActionKind> {
        let kind = self.inner.classify(a)?;
        if (self.hide)(a) {
            Some(ActionKind::Internal)
        } else {
            Some(kind)
        }
    }

    fn namespaces(&self) -> Vec<Namespace> {
        self.inner.namespaces()
    }

    fn show(&self, s: &Self::State) -> String {
        self.inner.show(s)
    }
}
