//! Projections `π = (π_Q, π_I, π_O)` and projected automata.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automaton::{Acceptance, IoVector, Nioa, Port, Transition};
use crate::ids::{StateId, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("projection is not idempotent: {0}")]
    NotIdempotent(String),
    #[error("projection is not total: no image for state {0}")]
    NotTotal(StateId),
    #[error("state component {0} requested from an automaton that is not a product with that many factors")]
    NoSuchComponent(usize),
    #[error("port index {0} out of range")]
    NoSuchPort(usize),
    #[error("acceptance cannot be projected: {0}")]
    Acceptance(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateMap {
    Identity,
    /// The k-th factor state of a product state.
    Component(usize),
    Table(BTreeMap<StateId, StateId>),
}

/// Keep a subset of ports (in the given order) under new names and map
/// symbols through `symbols`; symbols without an entry map to themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortMap {
    pub keep: Vec<usize>,
    pub names: Vec<String>,
    pub symbols: BTreeMap<Symbol, Symbol>,
}

impl PortMap {
    pub fn identity(ports: &[Port]) -> Self {
        Self {
            keep: (0..ports.len()).collect(),
            names: ports.iter().map(|p| p.name.clone()).collect(),
            symbols: BTreeMap::new(),
        }
    }

    pub fn drop_all() -> Self {
        Self {
            keep: Vec::new(),
            names: Vec::new(),
            symbols: BTreeMap::new(),
        }
    }

    /// Keep the ports whose names start with `prefix.`, stripping the prefix.
    pub fn with_prefix(ports: &[Port], prefix: &str) -> Self {
        let pre = format!("{prefix}.");
        let (keep, names) = ports
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.name.strip_prefix(&pre).map(|n| (i, n.to_string())))
            .unzip();
        Self {
            keep,
            names,
            symbols: BTreeMap::new(),
        }
    }

    fn apply(&self, v: &IoVector) -> IoVector {
        IoVector(
            self.keep
                .iter()
                .map(|&k| {
                    v.0[k]
                        .as_ref()
                        .map(|s| self.symbols.get(s).cloned().unwrap_or_else(|| s.clone()))
                })
                .collect(),
        )
    }

    fn image_ports(&self, ports: &[Port]) -> Result<Vec<Port>, ProjectionError> {
        self.keep
            .iter()
            .zip(&self.names)
            .map(|(&k, name)| {
                let p = ports.get(k).ok_or(ProjectionError::NoSuchPort(k))?;
                Ok(Port {
                    name: name.clone(),
                    symbols: p
                        .symbols
                        .iter()
                        .map(|s| self.symbols.get(s).cloned().unwrap_or_else(|| s.clone()))
                        .collect(),
                })
            })
            .collect()
    }

    fn check_idempotent(&self, what: &str) -> Result<(), ProjectionError> {
        for (a, b) in &self.symbols {
            if let Some(c) = self.symbols.get(b) {
                if c != b {
                    return Err(ProjectionError::NotIdempotent(format!(
                        "{what} symbol {a} -> {b} -> {c}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionMap {
    pub states: StateMap,
    pub inputs: PortMap,
    pub outputs: PortMap,
    /// When set, only transitions labelled `prefix.…` are events of the
    /// image; every other transition is a move of another component and
    /// projects to a stutter, which is not kept.
    pub events: Option<String>,
}

impl ProjectionMap {
    pub fn identity(a: &Nioa) -> Self {
        Self {
            states: StateMap::Identity,
            inputs: PortMap::identity(&a.inputs),
            outputs: PortMap::identity(&a.outputs),
            events: None,
        }
    }

    /// Project a weakly synchronized product onto factor `k` and its ports.
    pub fn onto_factor(product: &Nioa, k: usize) -> Result<Self, ProjectionError> {
        let info = product
            .product
            .as_ref()
            .ok_or(ProjectionError::NoSuchComponent(k))?;
        let name = info
            .factor_names
            .get(k)
            .ok_or(ProjectionError::NoSuchComponent(k))?;
        Ok(Self {
            states: StateMap::Component(k),
            inputs: PortMap::with_prefix(&product.inputs, name),
            outputs: PortMap::with_prefix(&product.outputs, name),
            events: Some(name.clone()),
        })
    }

    pub fn is_event(&self, label: &str) -> bool {
        match &self.events {
            None => true,
            Some(prefix) => label
                .strip_prefix(prefix.as_str())
                .is_some_and(|rest| rest.starts_with('.')),
        }
    }

    /// `π = π ∘ π` on the state and symbol maps.
    pub fn check_idempotent(&self) -> Result<(), ProjectionError> {
        if let StateMap::Table(map) = &self.states {
            for (p, q) in map {
                if let Some(r) = map.get(q) {
                    if r != q {
                        return Err(ProjectionError::NotIdempotent(format!(
                            "state {p} -> {q} -> {r}"
                        )));
                    }
                }
            }
        }
        self.inputs.check_idempotent("input")?;
        self.outputs.check_idempotent("output")
    }

    pub fn map_state(&self, a: &Nioa, q: &StateId) -> Result<StateId, ProjectionError> {
        match &self.states {
            StateMap::Identity => Ok(q.clone()),
            StateMap::Component(k) => a
                .product
                .as_ref()
                .and_then(|info| info.parts.get(q))
                .and_then(|ps| ps.get(*k))
                .cloned()
                .ok_or_else(|| ProjectionError::NotTotal(q.clone())),
            StateMap::Table(map) => map
                .get(q)
                .cloned()
                .ok_or_else(|| ProjectionError::NotTotal(q.clone())),
        }
    }

    fn map_acceptance(&self, a: &Nioa) -> Result<Acceptance, ProjectionError> {
        match (&self.states, &a.acceptance) {
            (StateMap::Identity, acc) => Ok(acc.clone()),
            (StateMap::Component(k), Acceptance::Conjunction { factors, .. }) => factors
                .get(*k)
                .cloned()
                .ok_or(ProjectionError::NoSuchComponent(*k)),
            (StateMap::Component(_), _) => Err(ProjectionError::Acceptance(
                "component projection of a non-product acceptance".into(),
            )),
            (StateMap::Table(_), Acceptance::Finite(f)) => Ok(Acceptance::Finite(
                f.iter()
                    .map(|q| self.map_state(a, q))
                    .collect::<Result<_, _>>()?,
            )),
            (StateMap::Table(_), Acceptance::Muller(family)) => Ok(Acceptance::Muller(
                family
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|q| self.map_state(a, q))
                            .collect::<Result<BTreeSet<_>, _>>()
                    })
                    .collect::<Result<_, _>>()?,
            )),
            (StateMap::Table(_), acc @ Acceptance::Conjunction { .. }) => {
                if acc.is_muller() {
                    return Err(ProjectionError::Acceptance(
                        "conjunction with Muller factors through a state table".into(),
                    ));
                }
                Ok(Acceptance::Finite(
                    a.states
                        .iter()
                        .filter(|q| acc.accepts_state(q))
                        .map(|q| self.map_state(a, q))
                        .collect::<Result<_, _>>()?,
                ))
            }
        }
    }
}

/// The projected automaton `π(a)`: image states, image acceptance and the
/// image of every transition, with structural duplicates merged.
pub fn project(a: &Nioa, p: &ProjectionMap) -> Result<Nioa, ProjectionError> {
    p.check_idempotent()?;
    let states = a
        .states
        .iter()
        .map(|q| p.map_state(a, q))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let transitions = a
        .transitions
        .iter()
        .filter(|t| p.is_event(&t.label))
        .map(|t| {
            Ok(Transition {
                label: t.label.clone(),
                from: p.map_state(a, &t.from)?,
                to: p.map_state(a, &t.to)?,
                input: p.inputs.apply(&t.input),
                output: p.outputs.apply(&t.output),
            })
        })
        .collect::<Result<Vec<_>, ProjectionError>>()?;
    let mut out = Nioa {
        name: a.name.clone(),
        states,
        inputs: p.inputs.image_ports(&a.inputs)?,
        outputs: p.outputs.image_ports(&a.outputs)?,
        initial: p.map_state(a, &a.initial)?,
        acceptance: p.map_acceptance(a)?,
        transitions,
        product: None,
    };
    out.canonicalize();
    Ok(out)
}

/// Transition sets compared by structure only.
pub fn transition_keys(a: &Nioa) -> BTreeSet<(StateId, StateId, IoVector, IoVector)> {
    a.transitions
        .iter()
        .map(|t| {
            (
                t.from.clone(),
                t.to.clone(),
                t.input.clone(),
                t.output.clone(),
            )
        })
        .collect()
}
