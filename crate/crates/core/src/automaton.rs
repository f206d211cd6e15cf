//! Nondeterministic I/O automata: the carrier every other module builds on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::ids::{render_opt, StateId, Symbol, EPS};

/// One component of a vector alphabet. Components are addressed by name in
/// the description format and by position inside an automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Port {
    pub name: String,
    pub symbols: BTreeSet<Symbol>,
}

impl Port {
    pub fn new<S: Into<Symbol>>(
        name: impl Into<String>,
        symbols: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            name: name.into(),
            symbols: symbols.into_iter().map(Into::into).collect(),
        }
    }
}

/// A value of a vector alphabet; `None` at a position is the empty character.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct IoVector(pub Vec<Option<Symbol>>);

impl IoVector {
    pub fn eps(len: usize) -> Self {
        Self(vec![None; len])
    }

    /// `ε⃗[v, k]`: the vector of length `len` holding `v` at position `k`.
    pub fn single(len: usize, k: usize, v: Option<Symbol>) -> Self {
        let mut out = Self::eps(len);
        out.0[k] = v;
        out
    }

    pub fn is_eps(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    pub fn non_eps_count(&self) -> usize {
        self.0.iter().filter(|s| s.is_some()).count()
    }

    pub fn get(&self, k: usize) -> Option<&Symbol> {
        self.0.get(k).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `port.sym` for every non-empty component, comma separated; `eps` if none.
    pub fn render(&self, ports: &[Port]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter_map(|(k, s)| {
                s.as_ref().map(|s| match ports.get(k) {
                    Some(p) => format!("{}.{}", p.name, s),
                    None => format!("#{k}.{s}"),
                })
            })
            .collect();
        if parts.is_empty() {
            EPS.to_string()
        } else {
            parts.join(",")
        }
    }
}

impl fmt::Display for IoVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|s| render_opt(s.as_ref())).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `from -[input/output]-> to`. The label identifies the transition inside
/// its automaton; product transitions are labelled `factor.label`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub label: String,
    pub from: StateId,
    pub to: StateId,
    pub input: IoVector,
    pub output: IoVector,
}

impl Transition {
    pub fn new(
        label: impl Into<String>,
        from: impl Into<StateId>,
        to: impl Into<StateId>,
        input: IoVector,
        output: IoVector,
    ) -> Self {
        Self {
            label: label.into(),
            from: from.into(),
            to: to.into(),
            input,
            output,
        }
    }

    pub fn is_spontaneous(&self) -> bool {
        self.input.is_eps()
    }

    /// Structural identity, ignoring the label.
    pub fn key(&self) -> (&StateId, &StateId, &IoVector, &IoVector) {
        (&self.from, &self.to, &self.input, &self.output)
    }
}

/// The acceptance component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    /// Accepting (final) state values of a finite computation.
    Finite(BTreeSet<StateId>),
    /// Sets of states that may form the infinity set of an accepted run.
    Muller(Vec<BTreeSet<StateId>>),
    /// Conjunction of factor conditions of a product; `parts` decomposes each
    /// product state into its factor states.
    Conjunction {
        factors: Vec<Acceptance>,
        parts: Arc<BTreeMap<StateId, Vec<StateId>>>,
    },
}

impl Acceptance {
    pub fn finite<S: Into<StateId>>(states: impl IntoIterator<Item = S>) -> Self {
        Self::Finite(states.into_iter().map(Into::into).collect())
    }

    /// Whether any part of the condition is an infinite-run (Muller) condition.
    pub fn is_muller(&self) -> bool {
        match self {
            Self::Finite(_) => false,
            Self::Muller(_) => true,
            Self::Conjunction { factors, .. } => factors.iter().any(Self::is_muller),
        }
    }

    /// Acceptance of a run that ends (or stutters forever) in `q`.
    pub fn accepts_state(&self, q: &StateId) -> bool {
        match self {
            Self::Finite(f) => f.contains(q),
            Self::Muller(family) => family.iter().any(|s| s.len() == 1 && s.contains(q)),
            Self::Conjunction { factors, parts } => match parts.get(q) {
                Some(ps) => factors.iter().zip(ps).all(|(acc, p)| acc.accepts_state(p)),
                None => false,
            },
        }
    }

    /// Acceptance of an infinite run whose infinity set is `set`. A finite
    /// condition accepts only a run that has come to rest in a final state.
    pub fn accepts_infinity_set(&self, set: &BTreeSet<StateId>) -> bool {
        match self {
            Self::Finite(f) => set.len() == 1 && set.iter().all(|q| f.contains(q)),
            Self::Muller(family) => family.iter().any(|s| s == set),
            Self::Conjunction { factors, parts } => {
                let mut projected = vec![BTreeSet::new(); factors.len()];
                for q in set {
                    let Some(ps) = parts.get(q) else { return false };
                    for (k, p) in ps.iter().enumerate() {
                        projected[k].insert(p.clone());
                    }
                }
                factors
                    .iter()
                    .zip(&projected)
                    .all(|(acc, s)| acc.accepts_infinity_set(s))
            }
        }
    }

    pub(crate) fn referenced_states(&self) -> BTreeSet<StateId> {
        match self {
            Self::Finite(f) => f.clone(),
            Self::Muller(family) => family.iter().flatten().cloned().collect(),
            Self::Conjunction { parts, .. } => parts.keys().cloned().collect(),
        }
    }
}

/// Factor bookkeeping of a weakly synchronized product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductInfo {
    pub factor_names: Vec<String>,
    pub parts: Arc<BTreeMap<StateId, Vec<StateId>>>,
    /// Factor index owning each input port.
    pub input_owner: Vec<usize>,
    /// Factor index owning each output port.
    pub output_owner: Vec<usize>,
}

impl ProductInfo {
    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factor_names.iter().position(|n| n == name)
    }
}

/// `(Q, I, O, q0, Acc, Δ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nioa {
    pub name: String,
    pub states: BTreeSet<StateId>,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    pub initial: StateId,
    pub acceptance: Acceptance,
    pub transitions: Vec<Transition>,
    pub product: Option<Arc<ProductInfo>>,
}

/// A single invariant violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

impl Nioa {
    pub fn new(name: impl Into<String>, initial: impl Into<StateId>) -> Self {
        let initial = initial.into();
        Self {
            name: name.into(),
            states: BTreeSet::from([initial.clone()]),
            inputs: Vec::new(),
            outputs: Vec::new(),
            initial,
            acceptance: Acceptance::Finite(BTreeSet::new()),
            transitions: Vec::new(),
            product: None,
        }
    }

    pub fn with_states<S: Into<StateId>>(mut self, states: impl IntoIterator<Item = S>) -> Self {
        self.states.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn with_input(mut self, port: Port) -> Self {
        self.inputs.push(port);
        self
    }

    pub fn with_output(mut self, port: Port) -> Self {
        self.outputs.push(port);
        self
    }

    pub fn with_acceptance(mut self, acc: Acceptance) -> Self {
        self.acceptance = acc;
        self
    }

    /// Add a transition written with port names: `input`/`output` are
    /// `(port, symbol)` pairs, every other position is ε.
    pub fn with_transition(
        mut self,
        label: &str,
        from: &str,
        input: &[(&str, &str)],
        output: &[(&str, &str)],
        to: &str,
    ) -> Self {
        let input = self.vector(&self.inputs, input);
        let output = self.vector(&self.outputs, output);
        self.states.insert(from.into());
        self.states.insert(to.into());
        self.transitions
            .push(Transition::new(label, from, to, input, output));
        self
    }

    fn vector(&self, ports: &[Port], items: &[(&str, &str)]) -> IoVector {
        let mut v = IoVector::eps(ports.len());
        for (port, sym) in items {
            let k = ports
                .iter()
                .position(|p| p.name == *port)
                .unwrap_or_else(|| panic!("automaton {}: unknown port {port}", self.name));
            v.0[k] = Some(Symbol::new(sym));
        }
        v
    }

    pub fn input_index(&self, port: &str) -> Option<usize> {
        self.inputs.iter().position(|p| p.name == port)
    }

    pub fn output_index(&self, port: &str) -> Option<usize> {
        self.outputs.iter().position(|p| p.name == port)
    }

    pub fn is_accepting(&self, q: &StateId) -> bool {
        self.acceptance.accepts_state(q)
    }

    /// Outgoing transition indices per state, in transition order.
    pub fn outgoing(&self) -> BTreeMap<&StateId, Vec<usize>> {
        let mut out: BTreeMap<&StateId, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            out.entry(&t.from).or_default().push(i);
        }
        out
    }

    pub fn transitions_from<'a>(
        &'a self,
        q: &'a StateId,
    ) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| &t.from == q)
    }

    pub fn render_input(&self, v: &IoVector) -> String {
        v.render(&self.inputs)
    }

    pub fn render_output(&self, v: &IoVector) -> String {
        v.render(&self.outputs)
    }

    /// Sort transitions into the canonical order and drop structural duplicates
    /// (the smallest label wins).
    pub fn canonicalize(&mut self) {
        self.transitions.sort_by(|a, b| {
            (&a.from, &a.input, &a.output, &a.to, &a.label)
                .cmp(&(&b.from, &b.input, &b.output, &b.to, &b.label))
        });
        self.transitions.dedup_by(|b, a| a.key() == b.key());
    }
}

/// Report every invariant violation of `a`.
pub fn validate(a: &Nioa) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push =
        |code: &'static str, message: String| violations.push(Violation { code, message });

    if a.states.is_empty() {
        push("empty-states", "state set is empty".into());
    }
    if !a.states.contains(&a.initial) {
        push(
            "initial-not-in-states",
            format!("initial not in states: {}", a.initial),
        );
    }
    for q in a.acceptance.referenced_states() {
        if !a.states.contains(&q) {
            push(
                "dangling-acceptance",
                format!("acceptance references unknown state {q}"),
            );
        }
    }
    if let Acceptance::Muller(family) = &a.acceptance {
        if family.iter().any(BTreeSet::is_empty) {
            push(
                "empty-muller-set",
                "Muller acceptance contains an empty set".into(),
            );
        }
    }
    for (kind, ports) in [("input", &a.inputs), ("output", &a.outputs)] {
        let mut seen = BTreeSet::new();
        for p in ports.iter() {
            if !seen.insert(&p.name) {
                push(
                    "duplicate-port",
                    format!("duplicate {kind} port {}", p.name),
                );
            }
            if p.symbols.iter().any(|s| s.as_str() == EPS) {
                push(
                    "eps-in-alphabet",
                    format!("{kind} port {} lists the empty character", p.name),
                );
            }
        }
    }
    for t in &a.transitions {
        for q in [&t.from, &t.to] {
            if !a.states.contains(q) {
                push(
                    "dangling-state",
                    format!("transition {} references unknown state {q}", t.label),
                );
            }
        }
        for (code, vec, ports) in [
            ("untyped-input", &t.input, &a.inputs),
            ("untyped-output", &t.output, &a.outputs),
        ] {
            if vec.len() != ports.len() {
                push(
                    code,
                    format!(
                        "transition {} has a vector of width {} for {} ports",
                        t.label,
                        vec.len(),
                        ports.len()
                    ),
                );
                continue;
            }
            for (s, p) in vec.0.iter().zip(ports.iter()) {
                if let Some(s) = s {
                    if !p.symbols.contains(s) {
                        push(
                            code,
                            format!("transition {}: {s} is not in port {}", t.label, p.name),
                        );
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Least fixed point of the one-step successor relation from the initial state.
pub fn reachable_states(a: &Nioa) -> BTreeSet<StateId> {
    let out = a.outgoing();
    let mut seen = BTreeSet::from([a.initial.clone()]);
    let mut queue = VecDeque::from([a.initial.clone()]);
    while let Some(q) = queue.pop_front() {
        for &i in out.get(&q).map(Vec::as_slice).unwrap_or_default() {
            let to = &a.transitions[i].to;
            if seen.insert(to.clone()) {
                queue.push_back(to.clone());
            }
        }
    }
    seen
}

/// At most one transition per `(state, input)` and no spontaneous transitions.
pub fn is_deterministic(a: &Nioa) -> bool {
    if a.transitions.iter().any(Transition::is_spontaneous) {
        return false;
    }
    let mut seen = BTreeSet::new();
    a.transitions
        .iter()
        .all(|t| seen.insert((&t.from, &t.input)))
}

/// First reachable state violating quasi-determinism, if any.
pub fn quasi_determinism_violation(a: &Nioa) -> Option<StateId> {
    let reachable = reachable_states(a);
    let out = a.outgoing();
    for q in &reachable {
        let mut inputs = BTreeSet::new();
        for &i in out.get(q).map(Vec::as_slice).unwrap_or_default() {
            // Two spontaneous transitions collide on the all-ε input as well.
            if !inputs.insert(&a.transitions[i].input) {
                return Some(q.clone());
            }
        }
    }
    None
}

/// From every reachable state at most one transition per input character
/// and at most a single spontaneous transition.
pub fn is_quasi_deterministic(a: &Nioa) -> bool {
    quasi_determinism_violation(a).is_none()
}

/// Restrict `a` to its reachable states and the transitions between them.
pub fn reachable_part(a: &Nioa) -> Nioa {
    let reach = reachable_states(a);
    let mut out = a.clone();
    out.transitions.retain(|t| reach.contains(&t.from));
    out.states = reach;
    out
}

/// Graph isomorphism of the reachable parts, matching initial states,
/// per-state finite acceptance and rendered edge labels.
pub fn isomorphic(a: &Nioa, b: &Nioa) -> bool {
    use petgraph::algo::is_isomorphic_matching;
    use petgraph::graph::DiGraph;

    fn graph(a: &Nioa) -> DiGraph<(bool, bool), String> {
        let r = reachable_part(a);
        let mut g = DiGraph::new();
        let idx: BTreeMap<&StateId, _> = r
            .states
            .iter()
            .map(|q| (q, g.add_node((q == &r.initial, r.is_accepting(q)))))
            .collect();
        let mut edges: BTreeSet<(&StateId, &StateId, String)> = BTreeSet::new();
        for t in &r.transitions {
            let label = format!(
                "{}/{}",
                r.render_input(&t.input),
                r.render_output(&t.output)
            );
            edges.insert((&t.from, &t.to, label));
        }
        for (from, to, label) in edges {
            g.add_edge(idx[from], idx[to], label);
        }
        g
    }

    let (ga, gb) = (graph(a), graph(b));
    ga.node_count() == gb.node_count()
        && ga.edge_count() == gb.edge_count()
        && is_isomorphic_matching(&ga, &gb, |x, y| x == y, |x, y| x == y)
}
