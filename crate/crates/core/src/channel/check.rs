//! Safety (well-formedness) and liveness (consistency) checks over the CBR
//! state space, with shortest replayable witnesses.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::analysis::StateGraph;
use crate::automaton::Nioa;

use super::{CbrAutomaton, Protocol};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    /// 0 pass, 1 fail, 3 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 3,
        }
    }

    /// Combine verdicts of several checks: any failure fails, then unknown.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    UnreceivedSend,
    Deadlock,
    Livelock,
    NonTerminatingChain,
    QuasiDeterminism,
    Acceptance,
    Projection,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    /// Empty for the starting state.
    pub transition: String,
    pub state: String,
}

/// A path from the initial state, optionally followed by a cycle that
/// returns to the path's last state. `edges` indexes the transitions of the
/// automaton the witness was found on, path first then cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub message: String,
    pub path: Vec<WitnessStep>,
    pub cycle: Vec<WitnessStep>,
    pub edges: Vec<usize>,
}

impl Witness {
    /// Follow `edges` from the initial CBR state; the cycle must close.
    pub fn replays_on(&self, cbr: &CbrAutomaton) -> bool {
        let split = self.path.len().saturating_sub(1);
        if split + self.cycle.len() != self.edges.len() {
            return false;
        }
        let mut cur = 0;
        let mut entry = 0;
        for (k, &e) in self.edges.iter().enumerate() {
            if k == split {
                entry = cur;
            }
            let Some(t) = cbr.transitions.get(e) else {
                return false;
            };
            if t.from != cur {
                return false;
            }
            cur = t.to;
        }
        self.cycle.is_empty() || cur == entry
    }

    /// Follow `edges` over a plain automaton from its initial state.
    pub fn replays_on_nioa(&self, a: &Nioa) -> bool {
        let mut cur = a.initial.clone();
        for &e in &self.edges {
            let Some(t) = a.transitions.get(e) else {
                return false;
            };
            if t.from != cur {
                return false;
            }
            cur = t.to.clone();
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub target: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub explored: usize,
    pub capped: bool,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct Versioned<'a> {
    report_version: u32,
    #[serde(flatten)]
    report: &'a CheckReport,
}

impl CheckReport {
    pub fn new(check: &str, target: &str) -> Self {
        Self {
            check: check.into(),
            target: target.into(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
            explored: 0,
            capped: false,
            warnings: Vec::new(),
        }
    }

    pub fn fail(&mut self, w: Witness) {
        self.verdict = Verdict::Fail;
        self.witnesses.push(w);
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(Versioned {
            report_version: REPORT_VERSION,
            report: self,
        })
        .unwrap_or_default()
    }

    /// Line-oriented text: verdict line, counts, warnings, then witnesses.
    pub fn text(&self) -> String {
        let mut out = String::new();
        let capped = if self.capped { " (capped)" } else { "" };
        let _ = writeln!(
            out,
            "{} {}: {}{capped}",
            self.check, self.target, self.verdict
        );
        let _ = writeln!(out, "explored {} states", self.explored);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness {}: {}", w.kind, w.message);
            for s in &w.path {
                if s.transition.is_empty() {
                    let _ = writeln!(out, "  {}", s.state);
                } else {
                    let _ = writeln!(out, "  -[{}]-> {}", s.transition, s.state);
                }
            }
            if !w.cycle.is_empty() {
                let _ = writeln!(out, "  cycle:");
                for s in &w.cycle {
                    let _ = writeln!(out, "  -[{}]-> {}", s.transition, s.state);
                }
            }
        }
        out
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Render graph steps for a witness; `render_edge` names an edge id,
/// `render_node` a node.
pub(crate) fn steps(
    path: &[(usize, usize)],
    render_edge: &dyn Fn(usize) -> String,
    render_node: &dyn Fn(usize) -> String,
) -> Vec<WitnessStep> {
    path.iter()
        .map(|&(e, n)| WitnessStep {
            transition: render_edge(e),
            state: render_node(n),
        })
        .collect()
}

/// Classify why acceptance is unreachable from node `bad` (reached by
/// `prefix`): a halting state is a deadlock, otherwise a cycle is entered.
pub(crate) fn liveness_witness(
    g: &StateGraph,
    prefix: Vec<(usize, usize)>,
    bad: usize,
    render_edge: &dyn Fn(usize) -> String,
    render_node: &dyn Fn(usize) -> String,
    pending_only: &dyn Fn(usize) -> bool,
) -> Witness {
    let start = WitnessStep {
        transition: String::new(),
        state: render_node(0),
    };
    let build = |kind, message: String, path: Vec<(usize, usize)>, cycle: Vec<(usize, usize)>| {
        let mut p = vec![start.clone()];
        p.extend(steps(&path, render_edge, render_node));
        let edges = path.iter().chain(&cycle).map(|s| s.0).collect();
        Witness {
            kind,
            message,
            path: p,
            cycle: steps(&cycle, render_edge, render_node),
            edges,
        }
    };
    if let Some(tail) = g.shortest_path(bad, |n| g.succ[n].is_empty()) {
        let mut path = prefix;
        path.extend(tail);
        let end = path.last().map_or(0, |s| s.1);
        return build(
            WitnessKind::Deadlock,
            format!("state {} has no continuation", render_node(end)),
            path,
            Vec::new(),
        );
    }
    let sccs = g.sccs();
    let mut comp_of = vec![usize::MAX; g.len()];
    for (c, comp) in sccs.iter().enumerate() {
        for &n in comp {
            comp_of[n] = c;
        }
    }
    let on_cycle = |n: usize| g.has_cycle(&sccs[comp_of[n]]);
    let tail = g.shortest_path(bad, on_cycle).unwrap_or_default();
    let entry = tail.last().map_or(bad, |s| s.1);
    let comp = &sccs[comp_of[entry]];
    let cycle = g.cycle_through(entry, comp);
    let mut path = prefix;
    path.extend(tail);
    let chain = cycle.iter().all(|s| pending_only(s.1));
    let (kind, what) = if chain {
        (
            WitnessKind::NonTerminatingChain,
            "interaction chain through",
        )
    } else {
        (WitnessKind::Livelock, "cycle through")
    };
    build(
        kind,
        format!("{what} {} never reaches acceptance", render_node(entry)),
        path,
        cycle,
    )
}

/// Safety: every reachable pending character has a receiving transition.
pub fn check_well_formed(p: &Protocol) -> CheckReport {
    let cbr = &p.cbr;
    let mut report = CheckReport::new("wellformed", &p.name);
    report.explored = cbr.states.len();
    report.capped = cbr.capped;
    report.warnings = p.warnings.clone();
    let bad = |n: usize| cbr.expanded[n] && cbr.has_pending(n) && cbr.successors(n).is_empty();
    if let Some(path) = cbr.graph.shortest_path(0, bad) {
        let end = path.last().map_or(0, |s| s.1);
        let mut steps_out = vec![WitnessStep {
            transition: String::new(),
            state: cbr.render_state(0),
        }];
        steps_out.extend(steps(&path, &|e| cbr.render_transition(e), &|n| {
            cbr.render_state(n)
        }));
        report.fail(Witness {
            kind: WitnessKind::UnreceivedSend,
            message: format!(
                "pending character at {} has no receiving transition",
                cbr.render_state(end)
            ),
            path: steps_out,
            cycle: Vec::new(),
            edges: path.iter().map(|s| s.0).collect(),
        });
    } else if cbr.capped {
        report.verdict = Verdict::Unknown;
    }
    report
}

/// Nodes of the CBR graph at which the acceptance condition is met: with
/// Finite acceptance the accepting states, with Muller acceptance halting
/// states whose stutter is accepted plus nodes on accepted cycles.
pub(crate) fn cbr_targets(cbr: &CbrAutomaton) -> Vec<bool> {
    let acc = &cbr.base.acceptance;
    let n = cbr.states.len();
    if !acc.is_muller() {
        return (0..n).map(|i| cbr.is_accepting(i)).collect();
    }
    let accept = |set: &[usize]| {
        let base: std::collections::BTreeSet<_> =
            set.iter().map(|&i| cbr.states[i].base.clone()).collect();
        acc.accepts_infinity_set(&base)
    };
    let mut good = cbr.graph.good_cycle_nodes(&accept);
    for (i, g) in good.iter_mut().enumerate() {
        if cbr.successors(i).is_empty()
            && !cbr.has_pending(i)
            && acc.accepts_state(&cbr.states[i].base)
        {
            *g = true;
        }
    }
    good
}

/// Liveness: from every reachable CBR state the acceptance condition can
/// still be met. Failures are classified as deadlock, livelock or a
/// non-terminating chain of forced receives.
pub fn check_consistent(p: &Protocol) -> CheckReport {
    let cbr = &p.cbr;
    let mut report = CheckReport::new("consistent", &p.name);
    report.explored = cbr.states.len();
    report.capped = cbr.capped;
    report.warnings = p.warnings.clone();
    if cbr.capped {
        report.verdict = Verdict::Unknown;
        return report;
    }
    let coreach = cbr.graph.can_reach(&cbr_targets(cbr));
    if let Some(prefix) = cbr.graph.shortest_path(0, |n| !coreach[n]) {
        let bad = prefix.last().map_or(0, |s| s.1);
        let w = liveness_witness(
            &cbr.graph,
            prefix,
            bad,
            &|e| cbr.render_transition(e),
            &|n| cbr.render_state(n),
            &|n| cbr.has_pending(n),
        );
        report.fail(w);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Acceptance, Nioa, Port};
    use crate::channel::tests::ping_pong;
    use crate::channel::{build_protocol, ChannelSpec, ProtocolOptions};

    fn pp(a: Nioa, b: Nioa) -> Protocol {
        let chans = [
            ChannelSpec::new("ab", ("A", "tx"), ("B", "rx")),
            ChannelSpec::new("ba", ("B", "tx"), ("A", "rx")),
        ];
        build_protocol("pp", vec![a, b], &chans, ProtocolOptions::default()).unwrap()
    }

    #[test]
    fn consistent_ping_pong_passes() {
        let (a, b) = ping_pong();
        let p = pp(a, b);
        assert_eq!(check_well_formed(&p).verdict, Verdict::Pass);
        let r = check_consistent(&p);
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.text());
    }

    #[test]
    fn removing_receive_breaks_well_formedness() {
        let (mut a, b) = ping_pong();
        a.transitions.retain(|t| t.label != "pong");
        let p = pp(a, b);
        let r = check_well_formed(&p);
        assert_eq!(r.verdict, Verdict::Fail);
        let w = &r.witnesses[0];
        assert!(w.replays_on(&p.cbr));
        assert_eq!(w.path.last().unwrap().state, "(a1|b0){ba:q}");
        assert!(r.text().contains("witness unreceived-send"));
    }

    #[test]
    fn both_waiting_is_a_deadlock() {
        let wait = |n: &str| {
            Nioa::new(n, "w")
                .with_input(Port::new("rx", ["m"]))
                .with_output(Port::new("tx", ["m"]))
                .with_acceptance(Acceptance::finite(["done"]))
                .with_transition("get", "w", &[("rx", "m")], &[], "got")
                .with_transition("put", "got", &[], &[("tx", "m")], "done")
        };
        let p = pp(wait("A"), wait("B"));
        let r = check_consistent(&p);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witnesses[0].kind, WitnessKind::Deadlock);
        assert_eq!(r.witnesses[0].path.len(), 1);
    }

    #[test]
    fn endless_ping_pong_is_a_livelock() {
        let (mut a, b) = ping_pong();
        a.transitions.retain(|t| t.label != "stop");
        a.acceptance = Acceptance::finite(["a2"]);
        a.states.insert("a2".into());
        let p = pp(a, b);
        let r = check_consistent(&p);
        assert_eq!(r.verdict, Verdict::Fail);
        let w = &r.witnesses[0];
        assert_eq!(w.kind, WitnessKind::Livelock);
        assert!(!w.cycle.is_empty());
        assert!(w.replays_on(&p.cbr));
    }

    #[test]
    fn json_is_versioned() {
        let (a, b) = ping_pong();
        let j = check_consistent(&pp(a, b)).to_json();
        assert_eq!(j["report_version"], 1);
        assert_eq!(j["verdict"], "pass");
    }

    #[test]
    fn muller_consistency() {
        let (mut a, mut b) = ping_pong();
        a.transitions.retain(|t| t.label != "stop");
        a.acceptance = Acceptance::Muller(
            [["a0", "a1"].into_iter().map(Into::into).collect()]
                .into_iter()
                .collect(),
        );
        b.acceptance = Acceptance::Muller(
            [["b0", "b1"].into_iter().map(Into::into).collect()]
                .into_iter()
                .collect(),
        );
        let p = pp(a, b);
        assert_eq!(check_consistent(&p).verdict, Verdict::Pass);
    }
}
