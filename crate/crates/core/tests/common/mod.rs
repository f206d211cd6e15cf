#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use ioa_calculus::automaton::{is_quasi_deterministic, isomorphic};
use ioa_calculus::channel::{ChannelSpec, Protocol, ProtocolOptions};
use ioa_calculus::coordination::CoordinatedAutomaton;
use ioa_calculus::dsl::{parse, Model};
use ioa_calculus::system::SystemSpec;
use ioa_calculus::{Nioa, StateId, Symbol, Transition};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_files() -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "ioa"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).expect("readable"),
            )
        })
        .collect();
    v.sort();
    v
}

pub fn model(file: &str) -> Model {
    let text = std::fs::read_to_string(corpus_dir().join(file)).expect("corpus file");
    Model::from_document(&parse(&text).expect("parses")).expect("resolves")
}

/// Every protocol declared anywhere in the corpus, built.
pub fn corpus_protocols() -> Vec<(String, Protocol)> {
    let mut out = Vec::new();
    for (file, _) in corpus_files() {
        let m = model(&file);
        for name in m.protocols.keys() {
            let p = m
                .protocol(name, ProtocolOptions::default())
                .expect("builds");
            out.push((format!("{file}:{name}"), p));
        }
    }
    out
}

/// A stateless unclocked system on `inputs` with outputs drawn from `outputs`.
pub fn random_stateless(
    rng: &mut impl Rng,
    name: &str,
    inputs: &[String],
    outputs: &[String],
) -> SystemSpec {
    let table: BTreeMap<String, String> = inputs
        .iter()
        .map(|i| (i.clone(), outputs.choose(rng).unwrap().clone()))
        .collect();
    SystemSpec::stateless(name, inputs.iter().map(String::as_str), |i| {
        table.get(i.as_str()).map(|o| Symbol::from(o.as_str()))
    })
}

/// An alphabet of random size between 1 and `max`.
pub fn sized(rng: &mut impl Rng, prefix: &str, max: usize) -> Vec<String> {
    let n = rng.random_range(1..=max);
    alphabet(prefix, n)
}

pub fn alphabet(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// Pointwise output of a stateless system.
pub fn apply(s: &SystemSpec, x: &str) -> Option<String> {
    s.table
        .get(&(s.initial.clone(), Some(Symbol::from(x))))
        .and_then(|(_, o)| o.as_ref().map(|o| o.to_string()))
}

/// Channel semantics written out independently of the library: a state is
/// the base state plus the character held by each channel.
pub struct ChannelOracle<'a> {
    pub base: &'a Nioa,
    /// `(output index, input index)` per channel.
    pub links: Vec<(usize, usize)>,
}

pub type OracleState = (StateId, Vec<Option<Symbol>>);

impl<'a> ChannelOracle<'a> {
    pub fn new(base: &'a Nioa, channels: &[ChannelSpec]) -> Self {
        let links = channels
            .iter()
            .map(|c| {
                let o = format!("{}.{}", c.from_role, c.from_port);
                let i = format!("{}.{}", c.to_role, c.to_port);
                (
                    base.outputs
                        .iter()
                        .position(|p| p.name == o)
                        .expect("output"),
                    base.inputs.iter().position(|p| p.name == i).expect("input"),
                )
            })
            .collect();
        Self { base, links }
    }

    pub fn initial(&self) -> OracleState {
        (self.base.initial.clone(), vec![None; self.links.len()])
    }

    /// Take `t` from `s` if the channel rules allow it.
    pub fn step(&self, s: &OracleState, t: &Transition) -> Option<OracleState> {
        if t.from != s.0 {
            return None;
        }
        let waiting: Vec<usize> = (0..self.links.len())
            .filter(|&c| s.1[c].is_some())
            .collect();
        let reads: Vec<usize> = (0..self.links.len())
            .filter(|&c| t.input.0[self.links[c].1].is_some())
            .collect();
        let mut held = s.1.clone();
        match (waiting.is_empty(), reads.as_slice()) {
            (true, []) => {}
            (false, [c]) if s.1[*c] == t.input.0[self.links[*c].1] => held[*c] = None,
            _ => return None,
        }
        for (c, &(o, _)) in self.links.iter().enumerate() {
            if let Some(x) = &t.output.0[o] {
                if held[c].is_some() {
                    return None;
                }
                held[c] = Some(x.clone());
            }
        }
        Some((t.to.clone(), held))
    }

    pub fn successors(&self, s: &OracleState) -> Vec<(usize, OracleState)> {
        self.base
            .transitions
            .iter()
            .enumerate()
            .filter_map(|(k, t)| self.step(s, t).map(|n| (k, n)))
            .collect()
    }

    pub fn accepting(&self, s: &OracleState) -> bool {
        s.1.iter().all(Option::is_none) && self.base.is_accepting(&s.0)
    }

    /// All reachable states with their successor lists.
    pub fn explore(&self) -> BTreeMap<OracleState, Vec<(usize, OracleState)>> {
        let mut seen = BTreeMap::new();
        let mut queue = VecDeque::from([self.initial()]);
        while let Some(s) = queue.pop_front() {
            if seen.contains_key(&s) {
                continue;
            }
            let succ = self.successors(&s);
            for (_, n) in &succ {
                queue.push_back(n.clone());
            }
            seen.insert(s, succ);
        }
        seen
    }

    /// A reachable state holding a character nobody can take.
    pub fn has_stuck_send(&self) -> bool {
        self.explore()
            .iter()
            .any(|(s, succ)| s.1.iter().any(Option::is_some) && succ.is_empty())
    }

    /// Reachable states from which no accepting state can be reached.
    pub fn hopeless(&self) -> BTreeSet<OracleState> {
        let graph = self.explore();
        let mut good: BTreeSet<OracleState> = graph
            .keys()
            .filter(|s| self.accepting(s))
            .cloned()
            .collect();
        loop {
            let more: Vec<OracleState> = graph
                .iter()
                .filter(|(s, succ)| {
                    !good.contains(*s) && succ.iter().any(|(_, n)| good.contains(n))
                })
                .map(|(s, _)| s.clone())
                .collect();
            if more.is_empty() {
                break;
            }
            good.extend(more);
        }
        graph
            .keys()
            .filter(|s| !good.contains(*s))
            .cloned()
            .collect()
    }
}

/// A small random role automaton over the given ports, all states listed.
pub fn random_role(rng: &mut impl Rng, name: &str, states: usize, transitions: usize) -> Nioa {
    use ioa_calculus::{Acceptance, Port};
    let qs: Vec<String> = (0..states)
        .map(|k| format!("{}{k}", name.to_lowercase()))
        .collect();
    let mut a = Nioa::new(name, qs[0].as_str())
        .with_states(qs.iter().map(String::as_str))
        .with_input(Port::new("i", ["x", "y"]))
        .with_output(Port::new("o", ["x", "y"]))
        .with_acceptance(Acceptance::finite(
            qs.iter()
                .filter(|_| rng.random_bool(0.5))
                .map(String::as_str),
        ));
    for k in 0..transitions {
        let from = qs.choose(rng).unwrap().clone();
        let to = qs.choose(rng).unwrap().clone();
        let sym = *["x", "y"].choose(rng).unwrap();
        let label = format!("t{k}");
        a = match rng.random_range(0..3) {
            0 => a.with_transition(&label, &from, &[("i", sym)], &[], &to),
            1 => a.with_transition(&label, &from, &[], &[("o", sym)], &to),
            _ => a.with_transition(&label, &from, &[], &[], &to),
        };
    }
    a.canonicalize();
    a
}

pub fn reach_from(a: &Nioa, q: &StateId) -> BTreeSet<StateId> {
    let mut seen = BTreeSet::from([q.clone()]);
    let mut queue = VecDeque::from([q.clone()]);
    while let Some(s) = queue.pop_front() {
        for t in a.transitions.iter().filter(|t| t.from == s) {
            if seen.insert(t.to.clone()) {
                queue.push_back(t.to.clone());
            }
        }
    }
    seen
}

/// Quasi-determinism, role projections and reachable acceptance.
pub fn retains(c: &CoordinatedAutomaton) -> Result<(), String> {
    let a = &c.result;
    if !is_quasi_deterministic(a) {
        return Err("result is not quasi-deterministic".into());
    }
    for (k, role) in c.roles.iter().enumerate() {
        let image = c.project_role(k).map_err(|e| e.to_string())?;
        if !isomorphic(&image, role) {
            return Err(format!("projection onto {} is not isomorphic", role.name));
        }
    }
    for q in reach_from(a, &a.initial) {
        if !reach_from(a, &q).iter().any(|r| a.is_accepting(r)) {
            return Err(format!("acceptance unreachable from {q}"));
        }
    }
    Ok(())
}
