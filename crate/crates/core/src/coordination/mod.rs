//! Inner coupling: restricting the weakly synchronized product of one
//! system's roles by guard rules until it is quasi-deterministic, while
//! keeping acceptance reachable and every role recoverable by projection.

mod process;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::StateGraph;
use crate::automaton::{quasi_determinism_violation, reachable_part, Nioa, Transition};
use crate::channel::{CheckReport, Verdict, Witness, WitnessKind, WitnessStep};
use crate::ids::{StateId, Symbol, EPS};
use crate::projection::{project, transition_keys, ProjectionMap};

pub use process::{compose_processes, Binding, ProcessSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordinationError {
    #[error("rule {rule}: unknown transition class {class}")]
    UnknownClass { rule: String, class: String },
    #[error("rule {rule}: unknown role {role}")]
    UnknownRole { rule: String, role: String },
    #[error("rule {rule}: unknown input component {port}")]
    UnknownPort { rule: String, port: String },
    #[error("base automaton is not a weakly synchronized product of the given roles")]
    NotAProduct,
    #[error("coordination violated:\n{0}")]
    Violation(Box<CheckReport>),
    #[error("synthesis budget of {0} candidates exceeded")]
    BudgetExceeded(usize),
    #[error("process rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error(transparent)]
    Product(#[from] crate::product::ProductError),
    #[error(transparent)]
    Projection(#[from] crate::projection::ProjectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum GuardOp {
    Eq,
    Ne,
}

/// `role = state` or `role != state` on a component of the product state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Guard {
    pub role: String,
    pub op: GuardOp,
    pub state: StateId,
}

/// The input document a transition consumes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum InputClass {
    Eps,
    /// A character on a product input component such as `A.req`.
    Symbol {
        port: String,
        symbol: Symbol,
    },
}

impl fmt::Display for InputClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputClass::Eps => f.write_str(EPS),
            InputClass::Symbol { port, symbol } => write!(f, "{port}.{symbol}"),
        }
    }
}

/// When every guard holds (and the input class matches, if given), the
/// transition classes in `forbid` are removed. A class is `role.label`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoordinationRule {
    pub name: String,
    pub when: Vec<Guard>,
    pub on: Option<InputClass>,
    pub forbid: BTreeSet<String>,
}

impl CoordinationRule {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            when: Vec::new(),
            on: None,
            forbid: BTreeSet::new(),
        }
    }

    pub fn when(mut self, role: &str, op: GuardOp, state: &str) -> Self {
        self.when.push(Guard {
            role: role.into(),
            op,
            state: state.into(),
        });
        self
    }

    pub fn on(mut self, class: InputClass) -> Self {
        self.on = Some(class);
        self
    }

    pub fn forbid(mut self, class: &str) -> Self {
        self.forbid.insert(class.into());
        self
    }
}

/// The input class of a product transition (its first non-ε input).
pub fn input_class(a: &Nioa, t: &Transition) -> InputClass {
    t.input
        .0
        .iter()
        .enumerate()
        .find_map(|(k, s)| {
            s.as_ref().map(|s| InputClass::Symbol {
                port: a.inputs[k].name.clone(),
                symbol: s.clone(),
            })
        })
        .unwrap_or(InputClass::Eps)
}

struct Compiled<'a> {
    rule: &'a CoordinationRule,
    guards: Vec<(usize, GuardOp, StateId)>,
}

fn compile<'a>(
    base: &Nioa,
    rules: &'a [CoordinationRule],
) -> Result<Vec<Compiled<'a>>, CoordinationError> {
    let info = base
        .product
        .as_ref()
        .ok_or(CoordinationError::NotAProduct)?;
    let classes: BTreeSet<&str> = base.transitions.iter().map(|t| t.label.as_str()).collect();
    rules
        .iter()
        .map(|rule| {
            let guards = rule
                .when
                .iter()
                .map(|g| {
                    let k = info.factor_index(&g.role).ok_or_else(|| {
                        CoordinationError::UnknownRole {
                            rule: rule.name.clone(),
                            role: g.role.clone(),
                        }
                    })?;
                    Ok((k, g.op, g.state.clone()))
                })
                .collect::<Result<_, CoordinationError>>()?;
            if let Some(InputClass::Symbol { port, .. }) = &rule.on {
                if base.input_index(port).is_none() {
                    return Err(CoordinationError::UnknownPort {
                        rule: rule.name.clone(),
                        port: port.clone(),
                    });
                }
            }
            if let Some(c) = rule.forbid.iter().find(|c| !classes.contains(c.as_str())) {
                return Err(CoordinationError::UnknownClass {
                    rule: rule.name.clone(),
                    class: c.clone(),
                });
            }
            Ok(Compiled { rule, guards })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CoordinatedAutomaton {
    pub base: Nioa,
    pub roles: Vec<Nioa>,
    pub rules: Vec<CoordinationRule>,
    /// `Δ_P ⊆ Δ_T`; states, alphabets, initial state and acceptance as in `base`.
    pub result: Nioa,
    /// Indices of the removed base transitions.
    pub removed: Vec<usize>,
}

impl CoordinatedAutomaton {
    pub fn role_projection(&self, k: usize) -> Result<ProjectionMap, CoordinationError> {
        Ok(ProjectionMap::onto_factor(&self.result, k)?)
    }

    /// `π_k` applied to the reachable part of the result.
    pub fn project_role(&self, k: usize) -> Result<Nioa, CoordinationError> {
        let reach = reachable_part(&self.result);
        Ok(project(&reach, &self.role_projection(k)?)?)
    }
}

/// Remove each transition whose class a firing rule forbids, without
/// checking the retention conditions.
pub fn restrict(
    base: &Nioa,
    rules: &[CoordinationRule],
) -> Result<(Nioa, Vec<usize>), CoordinationError> {
    let compiled = compile(base, rules)?;
    let info = base
        .product
        .as_ref()
        .ok_or(CoordinationError::NotAProduct)?;
    let mut removed = Vec::new();
    let mut result = base.clone();
    result.transitions.clear();
    for (i, t) in base.transitions.iter().enumerate() {
        let parts = info
            .parts
            .get(&t.from)
            .ok_or(CoordinationError::NotAProduct)?;
        let class = input_class(base, t);
        let forbidden = compiled.iter().any(|c| {
            c.rule.forbid.contains(&t.label)
                && c.rule.on.as_ref().is_none_or(|on| on == &class)
                && c.guards
                    .iter()
                    .all(|(k, op, s)| (parts[*k] == *s) == (*op == GuardOp::Eq))
        });
        if forbidden {
            removed.push(i);
        } else {
            result.transitions.push(t.clone());
        }
    }
    Ok((result, removed))
}

/// Restrict `base` by `rules` and verify quasi-determinism, acceptance
/// retention and projection retention.
pub fn apply_rules(
    base: &Nioa,
    roles: &[Nioa],
    rules: &[CoordinationRule],
) -> Result<CoordinatedAutomaton, CoordinationError> {
    check_is_product(base, roles)?;
    let (result, removed) = restrict(base, rules)?;
    let c = CoordinatedAutomaton {
        base: base.clone(),
        roles: roles.to_vec(),
        rules: rules.to_vec(),
        result,
        removed,
    };
    let report = check_coordinated(&c);
    if report.verdict != Verdict::Pass {
        return Err(CoordinationError::Violation(Box::new(report)));
    }
    Ok(c)
}

fn check_is_product(base: &Nioa, roles: &[Nioa]) -> Result<(), CoordinationError> {
    let info = base
        .product
        .as_ref()
        .ok_or(CoordinationError::NotAProduct)?;
    if info.factor_names.len() != roles.len()
        || info
            .factor_names
            .iter()
            .zip(roles)
            .any(|(n, r)| n != &r.name)
    {
        return Err(CoordinationError::NotAProduct);
    }
    Ok(())
}

/// Reachable state graph of a plain automaton; node 0 is the initial state
/// and edge ids are transition indices.
pub(crate) fn state_graph(a: &Nioa) -> (StateGraph, Vec<StateId>) {
    let reach = crate::automaton::reachable_states(a);
    let mut ids: Vec<StateId> = vec![a.initial.clone()];
    ids.extend(reach.iter().filter(|q| **q != a.initial).cloned());
    let index: BTreeMap<&StateId, usize> = ids.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let mut g = StateGraph::with_nodes(ids.len());
    for (e, t) in a.transitions.iter().enumerate() {
        if let (Some(&f), Some(&to)) = (index.get(&t.from), index.get(&t.to)) {
            g.add_edge(f, e, to);
        }
    }
    (g, ids)
}

/// Nodes at which the acceptance condition can be met.
pub(crate) fn acceptance_targets(a: &Nioa, g: &StateGraph, ids: &[StateId]) -> Vec<bool> {
    if !a.acceptance.is_muller() {
        return ids.iter().map(|q| a.is_accepting(q)).collect();
    }
    let accept = |set: &[usize]| {
        a.acceptance
            .accepts_infinity_set(&set.iter().map(|&i| ids[i].clone()).collect())
    };
    let mut good = g.good_cycle_nodes(&accept);
    for (i, q) in ids.iter().enumerate() {
        if g.succ[i].is_empty() && a.acceptance.accepts_state(q) {
            good[i] = true;
        }
    }
    good
}

fn path_witness(
    a: &Nioa,
    g: &StateGraph,
    ids: &[StateId],
    goal: usize,
    kind: WitnessKind,
    message: String,
) -> Witness {
    let path = g.shortest_path(0, |n| n == goal).unwrap_or_default();
    let mut steps = vec![WitnessStep {
        transition: String::new(),
        state: ids[0].to_string(),
    }];
    steps.extend(crate::channel::check_steps(
        &path,
        &|e| render_transition(a, e),
        &|n| ids[n].to_string(),
    ));
    Witness {
        kind,
        message,
        path: steps,
        cycle: Vec::new(),
        edges: path.iter().map(|s| s.0).collect(),
    }
}

pub(crate) fn render_transition(a: &Nioa, e: usize) -> String {
    let t = &a.transitions[e];
    format!(
        "{} {}/{}",
        t.label,
        a.render_input(&t.input),
        a.render_output(&t.output)
    )
}

/// Independent re-check of the three retention conditions.
pub fn check_coordinated(c: &CoordinatedAutomaton) -> CheckReport {
    let a = &c.result;
    let mut report = CheckReport::new("coordinated", &a.name);
    let (g, ids) = state_graph(a);
    report.explored = ids.len();

    if let Some(q) = quasi_determinism_violation(a) {
        let n = ids.iter().position(|x| *x == q).unwrap_or(0);
        report.fail(path_witness(
            a,
            &g,
            &ids,
            n,
            WitnessKind::QuasiDeterminism,
            format!("state {q} has two transitions on one input"),
        ));
    }

    let coreach = g.can_reach(&acceptance_targets(a, &g, &ids));
    if let Some(prefix) = g.shortest_path(0, |n| !coreach[n]) {
        let bad = prefix.last().map_or(0, |s| s.1);
        let mut w = crate::channel::liveness_witness_for(
            &g,
            prefix,
            bad,
            &|e| render_transition(a, e),
            &|n| ids[n].to_string(),
            &|_| false,
        );
        w.message = format!("acceptance lost: {}", w.message);
        w.kind = WitnessKind::Acceptance;
        report.fail(w);
    }

    for (k, role) in c.roles.iter().enumerate() {
        let Ok(image) = c.project_role(k) else {
            report.fail(Witness {
                kind: WitnessKind::Projection,
                message: format!("role {} cannot be projected", role.name),
                path: Vec::new(),
                cycle: Vec::new(),
                edges: Vec::new(),
            });
            continue;
        };
        let want = transition_keys(&reachable_part(role));
        let got = transition_keys(&image);
        if let Some((from, to, i, o)) = want.difference(&got).next() {
            let info = a.product.as_ref();
            let goal = ids
                .iter()
                .position(|q| {
                    info.and_then(|p| p.parts.get(q))
                        .is_some_and(|ps| ps[k] == *from)
                })
                .unwrap_or(0);
            let message = format!(
                "role {} loses {from} -[{}/{}]-> {to}",
                role.name,
                role.render_input(i),
                role.render_output(o)
            );
            report.fail(path_witness(
                a,
                &g,
                &ids,
                goal,
                WitnessKind::Projection,
                message,
            ));
        } else if let Some((from, to, _, _)) = got.difference(&want).next() {
            let message = format!("projection onto role {} gains {from} -> {to}", role.name);
            report.fail(Witness {
                kind: WitnessKind::Projection,
                message,
                path: Vec::new(),
                cycle: Vec::new(),
                edges: Vec::new(),
            });
        }
    }
    report
}

#[derive(Debug, Clone)]
pub enum Synthesis {
    Found {
        rules: Vec<CoordinationRule>,
        coordinated: Box<CoordinatedAutomaton>,
        candidates: usize,
    },
    Exhausted {
        candidates: usize,
    },
}

/// Per-state forbid rules that remove exactly the given base transitions.
pub fn rules_for_removal(base: &Nioa, removed: &[usize]) -> Vec<CoordinationRule> {
    let Some(info) = base.product.as_ref() else {
        return Vec::new();
    };
    removed
        .iter()
        .enumerate()
        .map(|(n, &i)| {
            let t = &base.transitions[i];
            let mut r = CoordinationRule::new(&format!("syn{n}"))
                .on(input_class(base, t))
                .forbid(&t.label);
            if let Some(parts) = info.parts.get(&t.from) {
                for (k, s) in parts.iter().enumerate() {
                    r = r.when(&info.factor_names[k], GuardOp::Eq, s.as_str());
                }
            }
            r
        })
        .collect()
}

/// Brute force over removal sets by ascending size, lexicographic in
/// transition index, skipping sets that remove every product transition of
/// some role transition. `budget` bounds the number of sets enumerated.
pub fn synthesize_rules(
    base: &Nioa,
    roles: &[Nioa],
    budget: usize,
) -> Result<Synthesis, CoordinationError> {
    check_is_product(base, roles)?;
    let n = base.transitions.len();
    let mut per_label: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &base.transitions {
        *per_label.entry(t.label.as_str()).or_default() += 1;
    }
    let mut candidates = 0usize;
    for size in 0..=n {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            candidates += 1;
            if candidates > budget {
                return Ok(Synthesis::Exhausted { candidates: budget });
            }
            let mut left = per_label.clone();
            for &i in &comb {
                if let Some(c) = left.get_mut(base.transitions[i].label.as_str()) {
                    *c -= 1;
                }
            }
            if left.values().all(|&c| c > 0) {
                let mut result = base.clone();
                result.transitions = base
                    .transitions
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !comb.contains(i))
                    .map(|(_, t)| t.clone())
                    .collect();
                let c = CoordinatedAutomaton {
                    base: base.clone(),
                    roles: roles.to_vec(),
                    rules: Vec::new(),
                    result,
                    removed: comb.clone(),
                };
                if check_coordinated(&c).verdict == Verdict::Pass {
                    let rules = rules_for_removal(base, &comb);
                    let coordinated = apply_rules(base, roles, &rules)?;
                    return Ok(Synthesis::Found {
                        rules,
                        coordinated: Box::new(coordinated),
                        candidates,
                    });
                }
            }
            if !next_combination(&mut comb, n) {
                break;
            }
        }
    }
    Ok(Synthesis::Exhausted { candidates })
}

fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::automaton::{is_quasi_deterministic, isomorphic, Acceptance, Port};
    use crate::product::{weakly_synchronized_product, ProductOptions};

    pub fn gatekeeper() -> (Nioa, Nioa) {
        let a = Nioa::new("A", "idle")
            .with_input(Port::new("req", ["request"]))
            .with_input(Port::new("done", ["release"]))
            .with_output(Port::new("grant", ["grant"]))
            .with_acceptance(Acceptance::finite(["idle"]))
            .with_transition("request", "idle", &[("req", "request")], &[], "pending")
            .with_transition("grant", "pending", &[], &[("grant", "grant")], "granted")
            .with_transition("release", "granted", &[("done", "release")], &[], "idle");
        let b = Nioa::new("B", "quiet")
            .with_input(Port::new("ack", ["ack"]))
            .with_output(Port::new("note", ["notify"]))
            .with_acceptance(Acceptance::finite(["quiet"]))
            .with_transition("notify", "quiet", &[], &[("note", "notify")], "notified")
            .with_transition("ack", "notified", &[("ack", "ack")], &[], "quiet");
        (a, b)
    }

    pub fn gate_rule() -> CoordinationRule {
        CoordinationRule::new("only_when_granted")
            .when("A", GuardOp::Ne, "granted")
            .forbid("B.notify")
    }

    fn product(a: &Nioa, b: &Nioa) -> Nioa {
        weakly_synchronized_product(&[a.clone(), b.clone()], ProductOptions::default()).unwrap()
    }

    #[test]
    fn gatekeeper_rule_coordinates() {
        let (a, b) = gatekeeper();
        let p = product(&a, &b);
        assert_eq!((p.states.len(), p.transitions.len()), (6, 12));
        assert!(!is_quasi_deterministic(&p));
        let c = apply_rules(&p, &[a.clone(), b.clone()], &[gate_rule()]).unwrap();
        assert!(is_quasi_deterministic(&c.result));
        assert_eq!(c.removed.len(), 2);
        assert!(isomorphic(&c.project_role(0).unwrap(), &a));
        assert!(isomorphic(&c.project_role(1).unwrap(), &b));
        assert_eq!(check_coordinated(&c).verdict, Verdict::Pass);
    }

    fn listener(name: &str) -> Nioa {
        Nioa::new(name, "r0")
            .with_input(Port::new("x", ["a", "b"]))
            .with_acceptance(Acceptance::finite(["r0"]))
            .with_transition("a", "r0", &[("x", "a")], &[], "r1")
            .with_transition("b", "r1", &[("x", "b")], &[], "r0")
    }

    #[test]
    fn empty_rules_on_quasi_deterministic_product() {
        let (r, s) = (listener("R"), listener("S"));
        let p = product(&r, &s);
        let c = apply_rules(&p, &[r, s], &[]).unwrap();
        assert_eq!(c.result.transitions, p.transitions);
    }

    #[test]
    fn removing_last_transition_breaks_projection() {
        let (a, b) = gatekeeper();
        let p = product(&a, &b);
        let rule = CoordinationRule::new("never").forbid("B.notify");
        let Err(CoordinationError::Violation(r)) = apply_rules(&p, &[a, b], &[rule]) else {
            panic!()
        };
        let w = r
            .witnesses
            .iter()
            .find(|w| w.kind == WitnessKind::Projection)
            .unwrap();
        assert!(w.message.starts_with("role B loses"), "{}", w.message);
    }

    #[test]
    fn hand_edits_are_caught() {
        let (a, b) = gatekeeper();
        let p = product(&a, &b);
        let c = CoordinatedAutomaton {
            base: p.clone(),
            roles: vec![a.clone(), b.clone()],
            rules: Vec::new(),
            result: p.clone(),
            removed: Vec::new(),
        };
        let r = check_coordinated(&c);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.kind == WitnessKind::QuasiDeterminism && w.replays_on_nioa(&p)));
        // cut every way back to (idle|quiet)
        let mut cut = apply_rules(&p, &[a, b], &[gate_rule()]).unwrap();
        let init = cut.result.initial.clone();
        cut.result.transitions.retain(|t| t.to != init);
        let r = check_coordinated(&cut);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.kind == WitnessKind::Acceptance));
    }

    #[test]
    fn unknown_references() {
        let (a, b) = gatekeeper();
        let p = product(&a, &b);
        let bad = CoordinationRule::new("r").forbid("C.x");
        assert!(matches!(
            apply_rules(&p, &[a.clone(), b.clone()], &[bad]),
            Err(CoordinationError::UnknownClass { .. })
        ));
        let bad = CoordinationRule::new("r").when("Z", GuardOp::Eq, "x");
        assert!(matches!(
            apply_rules(&p, &[a, b], &[bad]),
            Err(CoordinationError::UnknownRole { .. })
        ));
    }

    #[test]
    fn synthesis_finds_single_removal() {
        let (a, b) = gatekeeper();
        let p = product(&a, &b);
        let Synthesis::Found {
            rules, coordinated, ..
        } = synthesize_rules(&p, &[a.clone(), b.clone()], 10_000).unwrap()
        else {
            panic!()
        };
        assert_eq!(rules.len(), 1);
        assert!(rules[0].forbid.contains("B.notify"));
        assert_eq!(check_coordinated(&coordinated).verdict, Verdict::Pass);
        let (r, s) = (listener("R"), listener("S"));
        let Synthesis::Found { rules, .. } =
            synthesize_rules(&product(&r, &s), &[r, s], 10).unwrap()
        else {
            panic!()
        };
        assert!(rules.is_empty());
    }

    #[test]
    fn synthesis_exhausts_on_conflicting_role() {
        let x = Nioa::new("X", "x0")
            .with_acceptance(Acceptance::finite(["x1", "x2"]))
            .with_transition("t1", "x0", &[], &[], "x1")
            .with_transition("t2", "x0", &[], &[], "x2");
        let p = weakly_synchronized_product(std::slice::from_ref(&x), ProductOptions::default())
            .unwrap();
        assert!(matches!(
            synthesize_rules(&p, &[x], 100).unwrap(),
            Synthesis::Exhausted { .. }
        ));
    }
}
