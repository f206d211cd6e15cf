//! Deterministic discrete systems `S = (Q, I, O, f_int, f_ext)` and their
//! composition calculus.

mod compose;
mod equivalence;
mod laws;
mod recursion;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{Acceptance, IoVector, Nioa, Port, Transition};
use crate::ids::{render_opt, StateId, Symbol};

pub use compose::{compose_parallel, compose_sequential, compose_u, UComposition};
pub use equivalence::{
    functionally_equivalent, EquivalenceOutcome, EquivalenceWitness, DEFAULT_EQUIVALENCE_CAP,
};
pub use laws::{
    check_compositionality, normal_form_search, CompositionKind, CompositionalityReport,
    CompositionalityVerdict, NormalForm,
};
pub use recursion::{
    compose_loop, compose_while, counter_system, primrec_body, zero_finder, LoopComposition,
    WhileOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("system {0} is unclocked: no spontaneous activity on the empty input")]
    NoSpontaneousActivity(String),
    #[error("system {system}: no transition for state {state} on input {input}")]
    Undefined {
        system: String,
        state: StateId,
        input: String,
    },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid system {system}: {reason}")]
    Invalid { system: String, reason: String },
    #[error("arithmetic overflow beyond 2^63-1")]
    Overflow,
    #[error("budget of {0} steps exhausted")]
    BudgetExhausted(usize),
    #[error("search exceeds the cap of {0} states")]
    CapExceeded(usize),
}

/// Whether a system reacts to the empty input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Clocking {
    Clocked,
    Unclocked,
}

pub type StepTable = BTreeMap<(StateId, Option<Symbol>), (StateId, Option<Symbol>)>;

/// A finite system. `table` holds `(f_int, f_ext)` as one map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec {
    pub name: String,
    pub states: BTreeSet<StateId>,
    pub inputs: BTreeSet<Symbol>,
    pub outputs: BTreeSet<Symbol>,
    pub initial: StateId,
    pub clocking: Clocking,
    pub table: StepTable,
}

/// Symbol for a pair of (possibly empty) characters, `(a,b)`.
pub fn pair_symbol(a: Option<&Symbol>, b: Option<&Symbol>) -> Symbol {
    Symbol::from(format!("({},{})", render_opt(a), render_opt(b)))
}

pub fn num(n: u64) -> Symbol {
    Symbol::from(n.to_string())
}

pub fn parse_num(s: &Symbol) -> Option<u64> {
    s.as_str().parse().ok()
}

impl SystemSpec {
    pub fn new(name: impl Into<String>, clocking: Clocking, initial: impl Into<StateId>) -> Self {
        let initial = initial.into();
        Self {
            name: name.into(),
            states: BTreeSet::from([initial.clone()]),
            inputs: BTreeSet::new(),
            outputs: BTreeSet::new(),
            initial,
            clocking,
            table: BTreeMap::new(),
        }
    }

    pub fn with_inputs<S: Into<Symbol>>(mut self, syms: impl IntoIterator<Item = S>) -> Self {
        self.inputs.extend(syms.into_iter().map(Into::into));
        self
    }

    pub fn with_outputs<S: Into<Symbol>>(mut self, syms: impl IntoIterator<Item = S>) -> Self {
        self.outputs.extend(syms.into_iter().map(Into::into));
        self
    }

    /// Add `f(q, i) = (q', o)`; states and symbols are declared on the fly.
    pub fn with_entry(mut self, q: &str, i: Option<&str>, q2: &str, o: Option<&str>) -> Self {
        self.insert(
            q.into(),
            i.map(Symbol::from),
            q2.into(),
            o.map(Symbol::from),
        );
        self
    }

    pub fn insert(&mut self, q: StateId, i: Option<Symbol>, q2: StateId, o: Option<Symbol>) {
        self.states.insert(q.clone());
        self.states.insert(q2.clone());
        if let Some(i) = &i {
            self.inputs.insert(i.clone());
        }
        if let Some(o) = &o {
            self.outputs.insert(o.clone());
        }
        self.table.insert((q, i), (q2, o));
    }

    /// A one-state system computing `f` pointwise on `inputs`.
    pub fn stateless<S: Into<Symbol>>(
        name: impl Into<String>,
        inputs: impl IntoIterator<Item = S>,
        f: impl Fn(&Symbol) -> Option<Symbol>,
    ) -> Self {
        let mut s = Self::new(name, Clocking::Unclocked, "q");
        for i in inputs.into_iter().map(Into::into) {
            let o = f(&i);
            s.insert("q".into(), Some(i), "q".into(), o);
        }
        s
    }

    pub fn identity<S: Into<Symbol>>(
        name: impl Into<String>,
        alphabet: impl IntoIterator<Item = S>,
    ) -> Self {
        Self::stateless(name, alphabet, |i| Some(i.clone()))
    }

    /// The empty input is part of the domain of a clocked system only.
    pub fn domain_inputs(&self) -> Vec<Option<Symbol>> {
        let mut out: Vec<Option<Symbol>> = Vec::new();
        if self.clocking == Clocking::Clocked {
            out.push(None);
        }
        out.extend(self.inputs.iter().cloned().map(Some));
        out
    }

    /// Totality of `f` on `Q × I` (plus ε when clocked) and typing of every entry.
    pub fn validate(&self) -> Result<(), SystemError> {
        let bad = |reason: String| {
            Err(SystemError::Invalid {
                system: self.name.clone(),
                reason,
            })
        };
        if !self.states.contains(&self.initial) {
            return bad(format!("initial state {} not in states", self.initial));
        }
        for ((q, i), (q2, o)) in &self.table {
            if !self.states.contains(q) || !self.states.contains(q2) {
                return bad(format!("entry for {q} names an unknown state"));
            }
            match i {
                None if self.clocking == Clocking::Unclocked => {
                    return bad(format!("unclocked system has an entry for ({q}, eps)"))
                }
                Some(i) if !self.inputs.contains(i) => {
                    return bad(format!("input {i} not in the input alphabet"))
                }
                _ => {}
            }
            if let Some(o) = o {
                if !self.outputs.contains(o) {
                    return bad(format!("output {o} not in the output alphabet"));
                }
            }
        }
        for q in &self.states {
            for i in self.domain_inputs() {
                if !self.table.contains_key(&(q.clone(), i.clone())) {
                    return bad(format!("f undefined at ({q}, {})", render_opt(i.as_ref())));
                }
            }
        }
        Ok(())
    }

    /// `(f_int(q, i), f_ext(q, i))`.
    pub fn step(
        &self,
        q: &StateId,
        i: Option<&Symbol>,
    ) -> Result<(StateId, Option<Symbol>), SystemError> {
        if i.is_none() && self.clocking == Clocking::Unclocked {
            return Err(SystemError::NoSpontaneousActivity(self.name.clone()));
        }
        self.lookup(q, i)
    }

    fn lookup(
        &self,
        q: &StateId,
        i: Option<&Symbol>,
    ) -> Result<(StateId, Option<Symbol>), SystemError> {
        self.table
            .get(&(q.clone(), i.cloned()))
            .cloned()
            .ok_or_else(|| SystemError::Undefined {
                system: self.name.clone(),
                state: q.clone(),
                input: render_opt(i).to_string(),
            })
    }

    /// A step inside a composite: an unclocked part that receives nothing
    /// stays inactive, keeping its state and emitting nothing.
    pub fn fire(
        &self,
        q: &StateId,
        i: Option<&Symbol>,
    ) -> Result<(StateId, Option<Symbol>), SystemError> {
        if i.is_none() && self.clocking == Clocking::Unclocked {
            return Ok((q.clone(), None));
        }
        self.lookup(q, i)
    }

    /// Outputs of a run from the initial state.
    pub fn run(&self, inputs: &[Option<Symbol>]) -> Result<Vec<Option<Symbol>>, SystemError> {
        let mut q = self.initial.clone();
        let mut out = Vec::with_capacity(inputs.len());
        for i in inputs {
            let (q2, o) = self.step(&q, i.as_ref())?;
            out.push(o);
            q = q2;
        }
        Ok(out)
    }

    /// The system's graph as an I/O automaton with one input and one output
    /// component. Every state accepts, since a system may stop at any time.
    pub fn to_diofa(&self) -> Nioa {
        let transitions = self
            .table
            .iter()
            .map(|((q, i), (q2, o))| Transition {
                label: format!("{q}/{}", render_opt(i.as_ref())),
                from: q.clone(),
                to: q2.clone(),
                input: IoVector(vec![i.clone()]),
                output: IoVector(vec![o.clone()]),
            })
            .collect();
        let mut a = Nioa {
            name: self.name.clone(),
            states: self.states.clone(),
            inputs: vec![Port {
                name: "in".into(),
                symbols: self.inputs.clone(),
            }],
            outputs: vec![Port {
                name: "out".into(),
                symbols: self.outputs.clone(),
            }],
            initial: self.initial.clone(),
            acceptance: Acceptance::Finite(self.states.clone()),
            transitions,
            product: None,
        };
        a.canonicalize();
        a
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((q, i), (q2, o)) in &self.table {
            writeln!(
                f,
                "{q}, {} -> {q2}, {}",
                render_opt(i.as_ref()),
                render_opt(o.as_ref())
            )?;
        }
        Ok(())
    }
}
