//! Post-hoc trace validation.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::channel::CbrAutomaton;
use crate::ids::{StateId, Symbol};

use super::{ExecError, ExecutionTrace, Space, Target};

pub(crate) fn check_steps(trace: &ExecutionTrace, space: &Space<'_>) -> Result<(), ExecError> {
    let mismatch = |step: usize, reason: String| ExecError::Mismatch { step, reason };
    let mut node = 0usize;
    for s in &trace.steps {
        if s.from != node {
            return Err(mismatch(
                s.index,
                format!("expected to start at node {node}"),
            ));
        }
        if s.from >= space.states.len() || space.render(s.from) != s.state {
            return Err(mismatch(s.index, format!("unknown state {}", s.state)));
        }
        if !space.succ[s.from].contains(&(s.transition, s.to)) {
            return Err(mismatch(s.index, format!("no transition {} here", s.label)));
        }
        if space.automaton.transitions[s.transition].label != s.label {
            return Err(mismatch(s.index, format!("label {} differs", s.label)));
        }
        node = s.to;
    }
    if space.render(node) != trace.final_state {
        return Err(mismatch(trace.steps.len(), "final state differs".into()));
    }
    Ok(())
}

/// Consecutive states chain and every step is a transition of the target.
pub fn validate_trace(trace: &ExecutionTrace, target: Target<'_>) -> Result<(), ExecError> {
    check_steps(trace, &Space::of(target)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("channel rule violated at step {step}: {reason}")]
pub struct CbrViolation {
    pub step: usize,
    pub reason: String,
}

/// Replay the trace's base transitions against the channels alone, without
/// the explored CBR graph, and check every step obeys the channel rules.
pub fn validate_cbr_trace(trace: &ExecutionTrace, cbr: &CbrAutomaton) -> Result<(), CbrViolation> {
    let base = &cbr.base;
    let mut state: StateId = base.initial.clone();
    let mut channel: BTreeMap<&str, Option<Symbol>> = cbr
        .channels
        .iter()
        .map(|c| (c.name.as_str(), None))
        .collect();
    for s in &trace.steps {
        let fail = |reason: String| CbrViolation {
            step: s.index,
            reason,
        };
        let t = base
            .transitions
            .get(s.transition)
            .ok_or_else(|| fail("unknown transition".into()))?;
        if t.from != state {
            return Err(fail(format!("{} does not start at {state}", t.label)));
        }
        let waiting = channel.values().filter(|v| v.is_some()).count();
        let mut received = 0;
        for c in &cbr.channels {
            let got = &t.input.0[c.to];
            let held = &channel[c.name.as_str()];
            match (held, got) {
                (_, None) => {}
                (None, Some(x)) => {
                    return Err(fail(format!("reads {x} from empty channel {}", c.name)))
                }
                (Some(h), Some(x)) if h != x => {
                    return Err(fail(format!("reads {x} but {} holds {h}", c.name)))
                }
                _ => {
                    received += 1;
                    channel.insert(&c.name, None);
                }
            }
        }
        if waiting > 0 && received != 1 {
            return Err(fail(format!(
                "{} pending characters but {received} received",
                waiting
            )));
        }
        for c in &cbr.channels {
            if let Some(o) = &t.output.0[c.from] {
                if channel[c.name.as_str()].is_some() {
                    return Err(fail(format!("sends {o} onto occupied channel {}", c.name)));
                }
                channel.insert(&c.name, Some(o.clone()));
            }
        }
        let shown: Vec<String> = cbr
            .channels
            .iter()
            .filter_map(|c| {
                channel[c.name.as_str()]
                    .as_ref()
                    .map(|v| format!("{}:{v}", c.name))
            })
            .collect();
        if shown.join(",") != s.pending {
            return Err(fail(format!("pending column {} disagrees", s.pending)));
        }
        state = t.to.clone();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::tests::{ping_pong_cbr, toggle};
    use crate::exec::{run, Policy, SchedulerConfig};

    #[test]
    fn traces_validate() {
        let c = ping_pong_cbr();
        let cfg = SchedulerConfig::new(5, Policy::Arbitrary, 50).unwrap();
        let tr = run(Target::Cbr(&c), &cfg, None).unwrap();
        validate_trace(&tr, Target::Cbr(&c)).unwrap();
        validate_cbr_trace(&tr, &c).unwrap();
        let t = toggle();
        let tr = run(Target::Automaton(&t), &cfg, None).unwrap();
        validate_trace(&tr, Target::Automaton(&t)).unwrap();
    }

    #[test]
    fn skipping_a_receive_is_caught() {
        let c = ping_pong_cbr();
        let cfg = SchedulerConfig::new(2, Policy::WeakFair, 50).unwrap();
        let mut tr = run(Target::Cbr(&c), &cfg, None).unwrap();
        let k = tr.steps.iter().position(|s| s.label == "B.recv").unwrap();
        tr.steps.remove(k);
        for (n, s) in tr.steps.iter_mut().enumerate() {
            s.index = n;
        }
        assert!(validate_cbr_trace(&tr, &c).is_err());
        assert!(validate_trace(&tr, Target::Cbr(&c)).is_err());
    }
}
