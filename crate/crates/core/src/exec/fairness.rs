//! Windowed fairness surrogates for finite traces.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{ExecError, ExecutionTrace, Space, Target};

pub const DEFAULT_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FairnessKind {
    /// Continuously enabled for `W` steps without being chosen.
    Weak,
    /// Enabled at both ends of a `W`-step stretch without being chosen.
    Strong,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairnessViolation {
    pub position: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairnessReport {
    pub kind: FairnessKind,
    pub window: usize,
    pub fair: bool,
    pub violation: Option<FairnessViolation>,
}

/// Check the trace for a transition label that stays available for
/// `window` steps without being taken.
pub fn check_fairness(
    trace: &ExecutionTrace,
    target: Target<'_>,
    kind: FairnessKind,
    window: usize,
) -> Result<FairnessReport, ExecError> {
    if window == 0 {
        return Err(ExecError::Config(
            "fairness window must be at least 1".into(),
        ));
    }
    let space = Space::of(target)?;
    super::validate::check_steps(trace, &space)?;
    let mut since: BTreeMap<String, usize> = BTreeMap::new();
    let mut violation = None;
    for s in &trace.steps {
        let enabled: BTreeSet<&str> = space
            .enabled(s.from)
            .iter()
            .map(|&(t, _)| space.automaton.transitions[t].label.as_str())
            .collect();
        if kind == FairnessKind::Weak {
            since.retain(|l, _| enabled.contains(l.as_str()));
        }
        since.remove(&s.label);
        for l in enabled.iter().filter(|l| **l != s.label) {
            let start = *since.entry(l.to_string()).or_insert(s.index);
            if s.index + 1 - start >= window {
                violation = Some(FairnessViolation {
                    position: s.index,
                    label: l.to_string(),
                });
                break;
            }
        }
        if violation.is_some() {
            break;
        }
    }
    Ok(FairnessReport {
        kind,
        window,
        fair: violation.is_none(),
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::tests::{ping_pong_cbr, two_choices};
    use crate::exec::{run, Policy, SchedulerConfig, TraceStep};

    fn forced(labels: &[&str]) -> ExecutionTrace {
        let a = two_choices();
        let steps = labels
            .iter()
            .enumerate()
            .map(|(n, l)| TraceStep {
                index: n,
                from: 0,
                to: 0,
                state: "s".into(),
                transition: a.transitions.iter().position(|t| t.label == *l).unwrap(),
                label: l.to_string(),
                input: "eps".into(),
                output: "eps".into(),
                pending: String::new(),
            })
            .collect();
        ExecutionTrace {
            target: "two".into(),
            seed: 0,
            policy: Policy::Arbitrary,
            max_steps: labels.len(),
            steps,
            final_state: "s".into(),
            halted: false,
            lasso: None,
            accepted: crate::exec::AcceptanceVerdict::UndeterminedAtHorizon,
        }
    }

    #[test]
    fn round_robin_is_fair() {
        let a = two_choices();
        let labels: Vec<&str> = (0..300)
            .map(|n| if n % 2 == 0 { "a" } else { "b" })
            .collect();
        let r = check_fairness(
            &forced(&labels),
            Target::Automaton(&a),
            FairnessKind::Weak,
            100,
        )
        .unwrap();
        assert!(r.fair);
    }

    #[test]
    fn starvation_at_window_edge() {
        let a = two_choices();
        let r = check_fairness(
            &forced(&["a"; 150]),
            Target::Automaton(&a),
            FairnessKind::Weak,
            100,
        )
        .unwrap();
        assert_eq!(
            r.violation,
            Some(FairnessViolation {
                position: 99,
                label: "b".into()
            })
        );
        let short = check_fairness(
            &forced(&["a"; 99]),
            Target::Automaton(&a),
            FairnessKind::Weak,
            100,
        )
        .unwrap();
        assert!(short.fair);
    }

    #[test]
    fn weak_fair_policy_never_starves() {
        let a = two_choices();
        for seed in 0..50 {
            let cfg = SchedulerConfig::new(seed, Policy::WeakFair, 400).unwrap();
            let tr = run(Target::Automaton(&a), &cfg, None).unwrap();
            for w in [2, 3, 10, 200] {
                let r = check_fairness(&tr, Target::Automaton(&a), FairnessKind::Weak, w).unwrap();
                assert!(r.fair, "seed {seed} window {w}: {:?}", r.violation);
            }
        }
    }

    #[test]
    fn strong_surrogate_sees_intermittent_choices() {
        let c = ping_pong_cbr();
        let cfg = SchedulerConfig::new(1, Policy::StrongFair, 100).unwrap();
        let tr = run(Target::Cbr(&c), &cfg, None).unwrap();
        let r = check_fairness(&tr, Target::Cbr(&c), FairnessKind::Strong, 50).unwrap();
        assert!(r.fair, "{:?}", r.violation);
    }

    #[test]
    fn mismatched_trace_is_an_error() {
        let a = two_choices();
        let mut t = forced(&["a", "b"]);
        t.steps[1].state = "x".into();
        assert!(matches!(
            check_fairness(&t, Target::Automaton(&a), FairnessKind::Weak, 10),
            Err(ExecError::Mismatch { step: 1, .. })
        ));
    }
}
