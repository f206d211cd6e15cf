//! Step-by-step execution with seeded scheduling.
//!
//! Every step collects the transitions enabled in the current state,
//! spontaneous ones included, sorts them by `(label, index)` and lets the
//! policy choose. Choices depend only on the seed, the step index and the
//! sorted enabled set (plus the run's own history for the fair policies).

mod fairness;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::{quasi_determinism_violation, validate as validate_nioa, IoVector, Nioa};
use crate::channel::CbrAutomaton;
use crate::coordination::CoordinatedAutomaton;
use crate::ids::{StateId, Symbol};

pub use fairness::{
    check_fairness, FairnessKind, FairnessReport, FairnessViolation, DEFAULT_WINDOW,
};
pub use validate::{validate_cbr_trace, validate_trace, CbrViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("invalid scheduler configuration: {0}")]
    Config(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("input rejected at step {0}")]
    InputRejected(usize),
    #[error("scripted input {input} at step {step}: {reason}")]
    ScriptType {
        step: usize,
        input: String,
        reason: String,
    },
    #[error("not quasi-deterministic at state {0}")]
    NotQuasiDeterministic(StateId),
    #[error("trace does not match target at step {step}: {reason}")]
    Mismatch { step: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Arbitrary,
    WeakFair,
    StrongFair,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Arbitrary => "arbitrary",
            Self::WeakFair => "weak-fair",
            Self::StrongFair => "strong-fair",
        })
    }
}

impl std::str::FromStr for Policy {
    type Err = ExecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arbitrary" => Ok(Self::Arbitrary),
            "weak-fair" | "weak" => Ok(Self::WeakFair),
            "strong-fair" | "strong" => Ok(Self::StrongFair),
            _ => Err(ExecError::Config(format!("unknown policy {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SchedulerConfig {
    pub seed: u64,
    pub policy: Policy,
    pub max_steps: usize,
}

impl SchedulerConfig {
    pub fn new(seed: u64, policy: Policy, max_steps: usize) -> Result<Self, ExecError> {
        if max_steps == 0 {
            return Err(ExecError::Config("max_steps must be at least 1".into()));
        }
        Ok(Self {
            seed,
            policy,
            max_steps,
        })
    }
}

/// What to execute.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Automaton(&'a Nioa),
    Cbr(&'a CbrAutomaton),
    Coordinated(&'a CoordinatedAutomaton),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptanceVerdict {
    Accepted,
    Rejected,
    UndeterminedAtHorizon,
}

impl fmt::Display for AcceptanceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Accepted => "accepted",
            Self::Rejected => "rejected",
            Self::UndeterminedAtHorizon => "undetermined-at-horizon",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    /// Node of the executed state space before and after the step.
    pub from: usize,
    pub to: usize,
    pub state: String,
    /// Index into the executed automaton's transitions.
    pub transition: usize,
    pub label: String,
    pub input: String,
    pub output: String,
    /// Pending channel contents after the step.
    pub pending: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionTrace {
    pub target: String,
    pub seed: u64,
    pub policy: Policy,
    pub max_steps: usize,
    pub steps: Vec<TraceStep>,
    pub final_state: String,
    pub halted: bool,
    /// States on the detected lasso cycle, if any.
    pub lasso: Option<Vec<String>>,
    pub accepted: AcceptanceVerdict,
}

impl ExecutionTrace {
    /// One line per step, `step|state|in|out|pending`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# trace {} seed={} policy={} max_steps={}\n",
            self.target, self.seed, self.policy, self.max_steps
        );
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{}|{}|{}|{}|{}",
                s.index, s.state, s.input, s.output, s.pending
            );
        }
        let _ = writeln!(
            out,
            "# final {} halted={} {}",
            self.final_state, self.halted, self.accepted
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// Rendered states visited, the initial one first.
    pub fn states(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.steps.iter().map(|s| s.state.as_str()).collect();
        v.push(&self.final_state);
        v
    }
}

/// A flat view of an executable state space.
pub(crate) struct Space<'a> {
    pub name: String,
    pub automaton: &'a Nioa,
    pub states: Vec<StateId>,
    pub pending: Vec<String>,
    /// Outgoing `(transition, target node)` per node.
    pub succ: Vec<Vec<(usize, usize)>>,
    pub expanded: Vec<bool>,
    pub open_inputs: Vec<usize>,
    pub accepting: Vec<bool>,
}

impl<'a> Space<'a> {
    pub fn of(target: Target<'a>) -> Result<Self, ExecError> {
        match target {
            Target::Automaton(a) => {
                let report = validate_nioa(a);
                if let Some(v) = report.violations.first() {
                    return Err(ExecError::InvalidTarget(v.message.clone()));
                }
                Ok(Self::of_nioa(a))
            }
            Target::Coordinated(c) => {
                if let Some(q) = quasi_determinism_violation(&c.result) {
                    return Err(ExecError::NotQuasiDeterministic(q));
                }
                Ok(Self::of_nioa(&c.result))
            }
            Target::Cbr(c) => {
                let hidden: BTreeSet<usize> = c.channels.iter().map(|ch| ch.to).collect();
                let succ = (0..c.states.len())
                    .map(|n| {
                        c.successors(n)
                            .iter()
                            .map(|&(e, to)| (c.transitions[e].base, to))
                            .collect()
                    })
                    .collect();
                Ok(Self {
                    name: c.base.name.clone(),
                    automaton: &c.base,
                    states: c.states.iter().map(|s| s.base.clone()).collect(),
                    pending: c
                        .states
                        .iter()
                        .map(|s| render_pending(&s.pending, c))
                        .collect(),
                    succ,
                    expanded: c.expanded.clone(),
                    open_inputs: (0..c.base.inputs.len())
                        .filter(|k| !hidden.contains(k))
                        .collect(),
                    accepting: (0..c.states.len()).map(|n| c.is_accepting(n)).collect(),
                })
            }
        }
    }

    fn of_nioa(a: &'a Nioa) -> Self {
        let states: Vec<StateId> = std::iter::once(a.initial.clone())
            .chain(a.states.iter().filter(|q| **q != a.initial).cloned())
            .collect();
        let index: BTreeMap<&StateId, usize> =
            states.iter().enumerate().map(|(n, q)| (q, n)).collect();
        let mut succ = vec![Vec::new(); states.len()];
        for (k, t) in a.transitions.iter().enumerate() {
            succ[index[&t.from]].push((k, index[&t.to]));
        }
        Self {
            name: a.name.clone(),
            automaton: a,
            pending: vec![String::new(); states.len()],
            expanded: vec![true; states.len()],
            open_inputs: (0..a.inputs.len()).collect(),
            accepting: states.iter().map(|q| a.is_accepting(q)).collect(),
            succ,
            states,
        }
    }

    /// Rendered state of node `n`.
    pub fn render(&self, n: usize) -> String {
        self.states[n].to_string()
    }

    /// Enabled `(transition, target)` pairs, sorted by label then index.
    pub fn enabled(&self, n: usize) -> Vec<(usize, usize)> {
        let mut v = self.succ[n].clone();
        v.sort_by(|x, y| {
            let (a, b) = (
                &self.automaton.transitions[x.0],
                &self.automaton.transitions[y.0],
            );
            (&a.label, x.0, x.1).cmp(&(&b.label, y.0, y.1))
        });
        v
    }

    fn open_input(&self, t: usize) -> IoVector {
        let input = &self.automaton.transitions[t].input;
        IoVector(
            self.open_inputs
                .iter()
                .map(|&k| input.0[k].clone())
                .collect(),
        )
    }

    /// Resolve a scripted item: `eps`, `port.sym` pairs joined by `+`, or a
    /// bare symbol when it belongs to exactly one open port.
    fn resolve(&self, step: usize, item: &str) -> Result<IoVector, ExecError> {
        let ports = &self.automaton.inputs;
        let mut v = IoVector::eps(self.open_inputs.len());
        let err = |reason: String| ExecError::ScriptType {
            step,
            input: item.to_string(),
            reason,
        };
        if item.trim() == crate::ids::EPS {
            return Ok(v);
        }
        for part in item.split('+').map(str::trim) {
            let slot = match part.rsplit_once('.') {
                Some((port, sym)) => self
                    .open_inputs
                    .iter()
                    .position(|&k| ports[k].name == port)
                    .filter(|&j| {
                        ports[self.open_inputs[j]]
                            .symbols
                            .iter()
                            .any(|x| x.as_str() == sym)
                    })
                    .map(|j| (j, sym)),
                None => {
                    let hits: Vec<usize> = (0..self.open_inputs.len())
                        .filter(|&j| {
                            ports[self.open_inputs[j]]
                                .symbols
                                .iter()
                                .any(|x| x.as_str() == part)
                        })
                        .collect();
                    (hits.len() == 1).then(|| (hits[0], part))
                }
            };
            let (j, sym) = slot.ok_or_else(|| err("no matching open input port".into()))?;
            if v.0[j].is_some() {
                return Err(err("port given twice".into()));
            }
            v.0[j] = Some(Symbol::from(sym));
        }
        Ok(v)
    }
}

fn render_pending(pending: &[Option<Symbol>], c: &CbrAutomaton) -> String {
    c.channels
        .iter()
        .zip(pending)
        .filter_map(|(ch, p)| p.as_ref().map(|p| format!("{}:{p}", ch.name)))
        .collect::<Vec<_>>()
        .join(",")
}

fn rng_for(seed: u64, step: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step as u64);
    rng
}

/// Scheduler bookkeeping per transition label.
#[derive(Default)]
struct History {
    streak: BTreeMap<String, usize>,
    last_chosen: BTreeMap<String, usize>,
}

impl History {
    fn choose(&self, policy: Policy, rng: &mut ChaCha8Rng, step: usize, labels: &[&str]) -> usize {
        let score = |l: &str| match policy {
            Policy::Arbitrary => 0,
            Policy::WeakFair => self.streak.get(l).copied().unwrap_or(0),
            Policy::StrongFair => self.last_chosen.get(l).map_or(step + 1, |&t| step - t),
        };
        let best = labels.iter().map(|l| score(l)).max().unwrap_or(0);
        let tied: Vec<usize> = (0..labels.len())
            .filter(|&k| score(labels[k]) == best)
            .collect();
        tied[rng.random_range(0..tied.len())]
    }

    fn record(&mut self, step: usize, enabled: &BTreeSet<&str>, chosen: &str) {
        self.streak.retain(|l, _| enabled.contains(l.as_str()));
        for l in enabled {
            *self.streak.entry(l.to_string()).or_default() += 1;
        }
        self.streak.insert(chosen.to_string(), 0);
        self.last_chosen.insert(chosen.to_string(), step);
    }
}

/// Execute `target` for at most `cfg.max_steps` steps. With a script, each
/// step must consume the next scripted input on the open input ports and
/// the run ends when the script does.
pub fn run(
    target: Target<'_>,
    cfg: &SchedulerConfig,
    inputs: Option<&[String]>,
) -> Result<ExecutionTrace, ExecError> {
    if cfg.max_steps == 0 {
        return Err(ExecError::Config("max_steps must be at least 1".into()));
    }
    let space = Space::of(target)?;
    let a = space.automaton;
    let script = match inputs {
        Some(items) => Some(
            items
                .iter()
                .enumerate()
                .map(|(n, s)| space.resolve(n, s))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let mut node = 0usize;
    let mut steps = Vec::new();
    let mut history = History::default();
    let mut halted = false;
    let mut visits: BTreeMap<usize, usize> = BTreeMap::from([(0, 0)]);
    let mut lasso_from = None;
    let mut script_done = false;
    for step in 0..cfg.max_steps {
        if !space.expanded[node] {
            break;
        }
        let all = space.enabled(node);
        let enabled: Vec<(usize, usize)> = match &script {
            Some(items) if step >= items.len() => {
                script_done = true;
                break;
            }
            Some(items) => {
                let v: Vec<_> = all
                    .iter()
                    .copied()
                    .filter(|&(t, _)| space.open_input(t) == items[step])
                    .collect();
                if v.is_empty() {
                    return Err(ExecError::InputRejected(step));
                }
                v
            }
            None => all.clone(),
        };
        if enabled.is_empty() {
            halted = true;
            break;
        }
        let labels: Vec<&str> = enabled
            .iter()
            .map(|&(t, _)| a.transitions[t].label.as_str())
            .collect();
        let mut rng = rng_for(cfg.seed, step);
        let k = history.choose(cfg.policy, &mut rng, step, &labels);
        let (t, to) = enabled[k];
        let label_set: BTreeSet<&str> = all
            .iter()
            .map(|&(t, _)| a.transitions[t].label.as_str())
            .collect();
        history.record(step, &label_set, labels[k]);
        let tr = &a.transitions[t];
        steps.push(TraceStep {
            index: step,
            from: node,
            to,
            state: space.render(node),
            transition: t,
            label: tr.label.clone(),
            input: a.render_input(&tr.input),
            output: a.render_output(&tr.output),
            pending: space.pending[to].clone(),
        });
        node = to;
        lasso_from = visits.insert(node, step + 1);
    }
    if !halted && script.is_none() && space.expanded[node] && space.succ[node].is_empty() {
        halted = true;
    }
    let finished = halted || script_done;
    let acceptance = &a.acceptance;
    let lasso = (!finished && acceptance.is_muller())
        .then_some(lasso_from)
        .flatten()
        .map(|first| {
            let nodes: Vec<usize> = steps[first..].iter().map(|s| s.from).collect();
            nodes
        });
    let accepted = if finished {
        if space.accepting[node] {
            AcceptanceVerdict::Accepted
        } else {
            AcceptanceVerdict::Rejected
        }
    } else if let Some(nodes) = &lasso {
        let set: BTreeSet<StateId> = nodes.iter().map(|&n| space.states[n].clone()).collect();
        if acceptance.accepts_infinity_set(&set) {
            AcceptanceVerdict::Accepted
        } else {
            AcceptanceVerdict::Rejected
        }
    } else {
        AcceptanceVerdict::UndeterminedAtHorizon
    };
    Ok(ExecutionTrace {
        target: space.name.clone(),
        seed: cfg.seed,
        policy: cfg.policy,
        max_steps: cfg.max_steps,
        final_state: space.render(node),
        halted,
        lasso: lasso.map(|v| v.iter().map(|&n| space.render(n)).collect()),
        accepted,
        steps,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::automaton::{Acceptance, Port};
    use crate::channel::tests::{ping_pong, ping_pong_channels};
    use crate::channel::{explore, CbrOptions};
    use crate::product::{weakly_synchronized_product, ProductOptions};

    pub fn toggle() -> Nioa {
        Nioa::new("toggle", "q0")
            .with_input(Port::new("in", ["a"]))
            .with_acceptance(Acceptance::finite(["q0"]))
            .with_transition("t0", "q0", &[("in", "a")], &[], "q1")
            .with_transition("t1", "q1", &[("in", "a")], &[], "q0")
    }

    /// One state, two spontaneous self-loops.
    pub fn two_choices() -> Nioa {
        Nioa::new("two", "s")
            .with_acceptance(Acceptance::Muller(vec![BTreeSet::from(["s".into()])]))
            .with_transition("a", "s", &[], &[], "s")
            .with_transition("b", "s", &[], &[], "s")
    }

    pub fn ping_pong_cbr() -> CbrAutomaton {
        let (a, b) = ping_pong();
        let p = weakly_synchronized_product(&[a, b], ProductOptions::default()).unwrap();
        explore(&p, &ping_pong_channels(&p), CbrOptions::default()).unwrap()
    }

    fn cfg(seed: u64, max_steps: usize) -> SchedulerConfig {
        SchedulerConfig::new(seed, Policy::Arbitrary, max_steps).unwrap()
    }

    #[test]
    fn scripted_toggle() {
        let t = toggle();
        let script: Vec<String> = vec!["a".into(); 4];
        let tr = run(Target::Automaton(&t), &cfg(1, 10), Some(&script)).unwrap();
        assert_eq!(tr.states(), ["q0", "q1", "q0", "q1", "q0"]);
        assert_eq!(tr.accepted, AcceptanceVerdict::Accepted);
        let bad: Vec<String> = vec!["a".into(), "in.b".into()];
        assert!(matches!(
            run(Target::Automaton(&t), &cfg(1, 10), Some(&bad)),
            Err(ExecError::ScriptType { step: 1, .. })
        ));
    }

    #[test]
    fn rejected_input_names_the_step() {
        let t = toggle().with_transition("x", "q0", &[], &[], "q0");
        let script: Vec<String> = vec!["a".into(), "eps".into()];
        let err = run(Target::Automaton(&t), &cfg(1, 10), Some(&script)).unwrap_err();
        assert_eq!(err.to_string(), "input rejected at step 1");
    }

    #[test]
    fn ping_pong_alternates_for_any_seed() {
        let c = ping_pong_cbr();
        for seed in 0..100 {
            let tr = run(Target::Cbr(&c), &cfg(seed, 30), None).unwrap();
            validate_cbr_trace(&tr, &c).unwrap();
            let kinds: Vec<&str> = tr
                .steps
                .iter()
                .filter(|s| s.label != "A.stop")
                .map(|s| s.label.as_str())
                .collect();
            for w in kinds.chunks(4) {
                let expect = ["A.ping", "B.recv", "B.reply", "A.pong"];
                assert_eq!(w, &expect[..w.len()]);
            }
        }
    }

    #[test]
    fn replay_is_byte_identical() {
        let c = ping_pong_cbr();
        for policy in [Policy::Arbitrary, Policy::WeakFair, Policy::StrongFair] {
            let cfg = SchedulerConfig::new(7, policy, 40).unwrap();
            let a = run(Target::Cbr(&c), &cfg, None).unwrap();
            let b = run(Target::Cbr(&c), &cfg, None).unwrap();
            assert_eq!(a.to_text(), b.to_text());
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn muller_lasso() {
        let t = two_choices();
        let tr = run(Target::Automaton(&t), &cfg(3, 5), None).unwrap();
        assert_eq!(tr.lasso, Some(vec!["s".to_string()]));
        assert_eq!(tr.accepted, AcceptanceVerdict::Accepted);
        let rej = Nioa {
            acceptance: Acceptance::Muller(Vec::new()),
            ..t
        };
        let tr = run(Target::Automaton(&rej), &cfg(3, 5), None).unwrap();
        assert_eq!(tr.accepted, AcceptanceVerdict::Rejected);
    }

    #[test]
    fn finite_run_at_horizon_is_undetermined() {
        let t = Nioa {
            acceptance: Acceptance::finite(["s"]),
            ..two_choices()
        };
        let tr = run(Target::Automaton(&t), &cfg(3, 5), None).unwrap();
        assert_eq!(tr.accepted, AcceptanceVerdict::UndeterminedAtHorizon);
        assert!(SchedulerConfig::new(0, Policy::Arbitrary, 0).is_err());
    }

    #[test]
    fn halting_run_is_judged_at_halt() {
        let c = ping_pong_cbr();
        let tr = run(Target::Cbr(&c), &cfg(0, 200), None).unwrap();
        if tr.halted {
            assert_eq!(tr.final_state, "(a2|b0)");
            assert_eq!(tr.accepted, AcceptanceVerdict::Accepted);
        }
    }

    #[test]
    fn uncoordinated_target_names_state() {
        use crate::coordination::CoordinatedAutomaton;
        let t = two_choices();
        let c = CoordinatedAutomaton {
            base: t.clone(),
            roles: vec![t.clone()],
            rules: Vec::new(),
            result: t,
            removed: Vec::new(),
        };
        assert_eq!(
            run(Target::Coordinated(&c), &cfg(0, 5), None).unwrap_err(),
            ExecError::NotQuasiDeterministic("s".into())
        );
    }
}
