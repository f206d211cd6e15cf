//! Shannon channels and channel-based restricted (CBR) execution.
//!
//! A CBR state is a base state together with the character pending on each
//! channel. A pending character must be consumed by the next transition at
//! the channel's input component; with nothing pending, channel inputs are ε.

mod check;
mod protocol;

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::StateGraph;
use crate::automaton::{Nioa, Transition};
use crate::ids::{StateId, Symbol};

pub use check::{
    check_consistent, check_well_formed, CheckReport, Verdict, Witness, WitnessKind, WitnessStep,
    REPORT_VERSION,
};
pub(crate) use check::{liveness_witness as liveness_witness_for, steps as check_steps};
pub use protocol::{build_protocol, ChannelSpec, Protocol, ProtocolOptions};

pub const DEFAULT_CBR_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("channel {channel}: symbol {symbol} of the output component is not accepted by the input component")]
    TypeMismatch { channel: String, symbol: Symbol },
    #[error("channel {channel}: no {side} component {port}")]
    UnknownPort {
        channel: String,
        side: &'static str,
        port: String,
    },
    #[error("unknown role {0}")]
    UnknownRole(String),
    #[error("open coupling: component {0} is not connected to any channel")]
    OpenCoupling(String),
    #[error("role {0} has no channel endpoint")]
    Unconnected(String),
    #[error("not linear-executable: {0} (tree mode required)")]
    NonLinear(String),
    #[error("CBR exploration exceeds the cap of {0} states")]
    CapExceeded(usize),
    #[error(transparent)]
    Product(#[from] crate::product::ProductError),
}

/// Identification of output component `from` with input component `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShannonChannel {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

impl ShannonChannel {
    /// Resolve a channel by component names, checking `O_k ⊆ I_l`.
    pub fn between(
        base: &Nioa,
        name: &str,
        out_port: &str,
        in_port: &str,
    ) -> Result<Self, ChannelError> {
        let from = base
            .output_index(out_port)
            .ok_or_else(|| ChannelError::UnknownPort {
                channel: name.into(),
                side: "output",
                port: out_port.into(),
            })?;
        let to = base
            .input_index(in_port)
            .ok_or_else(|| ChannelError::UnknownPort {
                channel: name.into(),
                side: "input",
                port: in_port.into(),
            })?;
        let c = Self {
            name: name.into(),
            from,
            to,
        };
        c.type_check(base)?;
        Ok(c)
    }

    pub fn type_check(&self, base: &Nioa) -> Result<(), ChannelError> {
        let out = base
            .outputs
            .get(self.from)
            .ok_or_else(|| ChannelError::UnknownPort {
                channel: self.name.clone(),
                side: "output",
                port: self.from.to_string(),
            })?;
        let inp = base
            .inputs
            .get(self.to)
            .ok_or_else(|| ChannelError::UnknownPort {
                channel: self.name.clone(),
                side: "input",
                port: self.to.to_string(),
            })?;
        match out.symbols.iter().find(|s| !inp.symbols.contains(*s)) {
            Some(s) => Err(ChannelError::TypeMismatch {
                channel: self.name.clone(),
                symbol: s.clone(),
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CbrState {
    pub base: StateId,
    pub pending: Vec<Option<Symbol>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CbrTransition {
    pub from: usize,
    pub to: usize,
    /// Index into the base automaton's transitions.
    pub base: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CbrOptions {
    pub cap: usize,
    /// Allow several pending characters at once; each step consumes one.
    pub tree: bool,
}

impl Default for CbrOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CBR_CAP,
            tree: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CbrAutomaton {
    pub base: Nioa,
    pub channels: Vec<ShannonChannel>,
    /// Index 0 is the initial state.
    pub states: Vec<CbrState>,
    pub transitions: Vec<CbrTransition>,
    /// States whose successors were computed; all of them unless capped.
    pub expanded: Vec<bool>,
    pub capped: bool,
    pub graph: StateGraph,
}

/// The pending vector after taking `t` from `pending`, or `None` when the
/// channel rules forbid `t`.
pub fn cbr_step(
    channels: &[ShannonChannel],
    pending: &[Option<Symbol>],
    t: &Transition,
) -> Option<Vec<Option<Symbol>>> {
    let mut consumed = None;
    for (c, ch) in channels.iter().enumerate() {
        match (&pending[c], t.input.get(ch.to)) {
            (_, None) => {}
            (Some(o), Some(i)) if o == i && consumed.is_none() => consumed = Some(c),
            _ => return None,
        }
    }
    if consumed.is_none() && pending.iter().any(Option::is_some) {
        return None;
    }
    let mut next = pending.to_vec();
    if let Some(c) = consumed {
        next[c] = None;
    }
    for (c, ch) in channels.iter().enumerate() {
        if let Some(o) = t.output.get(ch.from) {
            if next[c].is_some() {
                return None;
            }
            next[c] = Some(o.clone());
        }
    }
    Some(next)
}

/// Explore the reachable CBR states breadth-first. Hitting the cap marks
/// the result `capped` instead of failing.
pub fn explore(
    base: &Nioa,
    channels: &[ShannonChannel],
    opts: CbrOptions,
) -> Result<CbrAutomaton, ChannelError> {
    for ch in channels {
        ch.type_check(base)?;
    }
    let outgoing = base.outgoing();
    let init = CbrState {
        base: base.initial.clone(),
        pending: vec![None; channels.len()],
    };
    let mut index: BTreeMap<CbrState, usize> = BTreeMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut transitions = Vec::new();
    let mut expanded = vec![false];
    let mut capped = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let st = states[n].clone();
        if !opts.tree && st.pending.iter().filter(|p| p.is_some()).count() > 1 {
            return Err(ChannelError::NonLinear(format!(
                "several characters pending at {}",
                render_state(&st, channels)
            )));
        }
        let mut complete = true;
        for &ti in outgoing
            .get(&st.base)
            .map(Vec::as_slice)
            .unwrap_or_default()
        {
            let t = &base.transitions[ti];
            let Some(pending) = cbr_step(channels, &st.pending, t) else {
                continue;
            };
            let next = CbrState {
                base: t.to.clone(),
                pending,
            };
            let to = match index.get(&next) {
                Some(&i) => i,
                None => {
                    if states.len() >= opts.cap {
                        capped = true;
                        complete = false;
                        continue;
                    }
                    let i = states.len();
                    index.insert(next.clone(), i);
                    states.push(next);
                    expanded.push(false);
                    queue.push_back(i);
                    i
                }
            };
            transitions.push(CbrTransition {
                from: n,
                to,
                base: ti,
            });
        }
        expanded[n] = complete;
    }
    let mut graph = StateGraph::with_nodes(states.len());
    for (e, t) in transitions.iter().enumerate() {
        graph.add_edge(t.from, e, t.to);
    }
    Ok(CbrAutomaton {
        base: base.clone(),
        channels: channels.to_vec(),
        states,
        transitions,
        expanded,
        capped,
        graph,
    })
}

/// The CBR automaton of `base` under `channels`; exceeding the cap is an error.
pub fn attach_channels(
    base: &Nioa,
    channels: &[ShannonChannel],
    opts: CbrOptions,
) -> Result<CbrAutomaton, ChannelError> {
    let cbr = explore(base, channels, opts)?;
    if cbr.capped {
        return Err(ChannelError::CapExceeded(opts.cap));
    }
    Ok(cbr)
}

/// Every input and output vector has at most one non-ε component.
pub fn is_linear_executable(a: &Nioa) -> bool {
    a.transitions
        .iter()
        .all(|t| t.input.non_eps_count() <= 1 && t.output.non_eps_count() <= 1)
}

pub fn render_state(s: &CbrState, channels: &[ShannonChannel]) -> String {
    let mut out = s.base.to_string();
    let pend: Vec<String> = channels
        .iter()
        .zip(&s.pending)
        .filter_map(|(c, p)| p.as_ref().map(|p| format!("{}:{p}", c.name)))
        .collect();
    if !pend.is_empty() {
        let _ = write!(out, "{{{}}}", pend.join(","));
    }
    out
}

impl CbrAutomaton {
    pub fn render_state(&self, n: usize) -> String {
        render_state(&self.states[n], &self.channels)
    }

    /// `label in/out` for a CBR transition.
    pub fn render_transition(&self, e: usize) -> String {
        let t = &self.base.transitions[self.transitions[e].base];
        format!(
            "{} {}/{}",
            t.label,
            self.base.render_input(&t.input),
            self.base.render_output(&t.output)
        )
    }

    pub fn is_linear_executable(&self) -> bool {
        self.transitions.iter().all(|t| {
            let b = &self.base.transitions[t.base];
            b.input.non_eps_count() <= 1 && b.output.non_eps_count() <= 1
        })
    }

    /// Accepting CBR states: accepting base state and nothing pending.
    pub fn is_accepting(&self, n: usize) -> bool {
        let s = &self.states[n];
        s.pending.iter().all(Option::is_none) && self.base.is_accepting(&s.base)
    }

    pub fn has_pending(&self, n: usize) -> bool {
        self.states[n].pending.iter().any(Option::is_some)
    }

    pub fn successors(&self, n: usize) -> &[(usize, usize)] {
        &self.graph.succ[n]
    }

    /// The restricted automaton over CBR states, for export and execution.
    pub fn to_nioa(&self) -> Nioa {
        let ids: Vec<StateId> = (0..self.states.len())
            .map(|n| StateId::from(self.render_state(n)))
            .collect();
        let accepting = (0..self.states.len())
            .filter(|&n| self.is_accepting(n))
            .map(|n| ids[n].clone());
        let acceptance = if self.base.acceptance.is_muller() {
            crate::automaton::Acceptance::Muller(Default::default())
        } else {
            crate::automaton::Acceptance::Finite(accepting.collect())
        };
        let mut a = Nioa {
            name: self.base.name.clone(),
            states: ids.iter().cloned().collect(),
            inputs: self.base.inputs.clone(),
            outputs: self.base.outputs.clone(),
            initial: ids[0].clone(),
            acceptance,
            transitions: self
                .transitions
                .iter()
                .map(|t| {
                    let b = &self.base.transitions[t.base];
                    Transition {
                        label: b.label.clone(),
                        from: ids[t.from].clone(),
                        to: ids[t.to].clone(),
                        input: b.input.clone(),
                        output: b.output.clone(),
                    }
                })
                .collect(),
            product: None,
        };
        a.canonicalize();
        a
    }
}
