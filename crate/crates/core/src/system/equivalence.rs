//! Functional equivalence of finite systems.
//!
//! Inputs are matched identically and time by index (shift 0). Both
//! systems are run in lockstep; every output character of the first must
//! correspond to exactly one of the second, and ε to ε.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::ids::{StateId, Symbol};

use super::{Clocking, SystemError, SystemSpec};

pub const DEFAULT_EQUIVALENCE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceWitness {
    /// Reachable state pairs reached by a common input sequence, in BFS order.
    pub state_pairs: Vec<(StateId, StateId)>,
    /// The pairing is a bijection on reachable states. Otherwise it is one
    /// between classes of behaviourally equal states.
    pub bijective: bool,
    pub output_map: BTreeMap<Symbol, Symbol>,
    pub time_shift: u64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EquivalenceOutcome {
    Equivalent(EquivalenceWitness),
    Distinguished {
        inputs: Vec<Option<Symbol>>,
        reason: String,
    },
    Inconclusive {
        horizon: usize,
    },
}

impl EquivalenceOutcome {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent(_))
    }
}

fn domain(s1: &SystemSpec, s2: &SystemSpec) -> Vec<Option<Symbol>> {
    let clocked = s1.clocking == Clocking::Clocked || s2.clocking == Clocking::Clocked;
    let mut d: Vec<Option<Symbol>> = Vec::new();
    if clocked {
        d.push(None);
    }
    d.extend(s1.inputs.iter().cloned().map(Some));
    d
}

#[derive(Default)]
struct OutputMap {
    fwd: BTreeMap<Symbol, Symbol>,
    back: BTreeMap<Symbol, Symbol>,
}

impl OutputMap {
    fn admit(&mut self, o1: Option<&Symbol>, o2: Option<&Symbol>) -> Result<(), String> {
        match (o1, o2) {
            (None, None) => Ok(()),
            (Some(a), None) => Err(format!("output {a} against eps")),
            (None, Some(b)) => Err(format!("output eps against {b}")),
            (Some(a), Some(b)) => {
                if let Some(prev) = self.fwd.get(a) {
                    if prev != b {
                        return Err(format!("output {a} corresponds to both {prev} and {b}"));
                    }
                }
                if let Some(prev) = self.back.get(b) {
                    if prev != a {
                        return Err(format!("outputs {prev} and {a} both correspond to {b}"));
                    }
                }
                self.fwd.insert(a.clone(), b.clone());
                self.back.insert(b.clone(), a.clone());
                Ok(())
            }
        }
    }
}

/// Search for a witness within `horizon` steps. Distinguishing input
/// sequences are shortest, ties broken by input order.
pub fn functionally_equivalent(
    s1: &SystemSpec,
    s2: &SystemSpec,
    horizon: usize,
) -> Result<EquivalenceOutcome, SystemError> {
    equivalent_capped(s1, s2, horizon, DEFAULT_EQUIVALENCE_CAP)
}

pub(crate) fn equivalent_capped(
    s1: &SystemSpec,
    s2: &SystemSpec,
    horizon: usize,
    cap: usize,
) -> Result<EquivalenceOutcome, SystemError> {
    if s1.inputs != s2.inputs {
        return Err(SystemError::AlphabetMismatch(format!(
            "input alphabets of {} and {} differ",
            s1.name, s2.name
        )));
    }
    let dom = domain(s1, s2);
    let start = (s1.initial.clone(), s2.initial.clone());
    let mut index: BTreeMap<(StateId, StateId), usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut pairs = vec![start];
    let mut parent: Vec<Option<(usize, Option<Symbol>)>> = vec![None];
    let mut depth = vec![0usize];
    let mut outputs = OutputMap::default();
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;

    let path = |parent: &[Option<(usize, Option<Symbol>)>], mut n: usize| {
        let mut seq = Vec::new();
        while let Some((p, i)) = &parent[n] {
            seq.push(i.clone());
            n = *p;
        }
        seq.reverse();
        seq
    };

    while let Some(n) = queue.pop_front() {
        if depth[n] >= horizon {
            truncated = true;
            continue;
        }
        let (q1, q2) = pairs[n].clone();
        for i in &dom {
            let (r1, o1) = s1.fire(&q1, i.as_ref())?;
            let (r2, o2) = s2.fire(&q2, i.as_ref())?;
            if let Err(reason) = outputs.admit(o1.as_ref(), o2.as_ref()) {
                let mut inputs = path(&parent, n);
                inputs.push(i.clone());
                return Ok(EquivalenceOutcome::Distinguished { inputs, reason });
            }
            let key = (r1, r2);
            if !index.contains_key(&key) {
                if pairs.len() >= cap {
                    return Err(SystemError::CapExceeded(cap));
                }
                index.insert(key.clone(), pairs.len());
                pairs.push(key);
                parent.push(Some((n, i.clone())));
                depth.push(depth[n] + 1);
                queue.push_back(pairs.len() - 1);
            }
        }
    }
    if truncated {
        return Ok(EquivalenceOutcome::Inconclusive { horizon });
    }
    let lefts: BTreeSet<&StateId> = pairs.iter().map(|p| &p.0).collect();
    let rights: BTreeSet<&StateId> = pairs.iter().map(|p| &p.1).collect();
    let bijective = lefts.len() == pairs.len() && rights.len() == pairs.len();
    let mut witness = EquivalenceWitness {
        state_pairs: pairs,
        bijective,
        output_map: outputs.fwd,
        time_shift: 0,
        verified: false,
    };
    witness.verified = witness.replay(s1, s2);
    Ok(EquivalenceOutcome::Equivalent(witness))
}

impl EquivalenceWitness {
    /// Independent check: the pairing is closed under both step functions
    /// and outputs correspond through `output_map`.
    pub fn replay(&self, s1: &SystemSpec, s2: &SystemSpec) -> bool {
        let rel: BTreeSet<&(StateId, StateId)> = self.state_pairs.iter().collect();
        let dom = domain(s1, s2);
        self.state_pairs.iter().all(|(q1, q2)| {
            dom.iter().all(
                |i| match (s1.fire(q1, i.as_ref()), s2.fire(q2, i.as_ref())) {
                    (Ok((r1, o1)), Ok((r2, o2))) => {
                        let mapped = o1.as_ref().map(|o| self.output_map.get(o));
                        let outputs_ok = match (mapped, o2.as_ref()) {
                            (None, None) => true,
                            (Some(Some(m)), Some(o)) => m == o,
                            _ => false,
                        };
                        outputs_ok && rel.contains(&(r1, r2))
                    }
                    _ => false,
                },
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::tests::toggle;

    #[test]
    fn self_equivalence_is_identity() {
        let t = toggle("t");
        let EquivalenceOutcome::Equivalent(w) = functionally_equivalent(&t, &t, 10).unwrap() else {
            panic!()
        };
        assert!(w.bijective && w.verified);
        assert!(w.state_pairs.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn renamed_copy_gives_renaming() {
        let t = toggle("t");
        let r = SystemSpec::new("r", Clocking::Unclocked, "x")
            .with_entry("x", Some("a"), "y", Some("w"))
            .with_entry("y", Some("a"), "x", Some("w"));
        let EquivalenceOutcome::Equivalent(w) = functionally_equivalent(&t, &r, 10).unwrap() else {
            panic!()
        };
        assert_eq!(
            w.state_pairs,
            vec![("q0".into(), "x".into()), ("q1".into(), "y".into())]
        );
        assert_eq!(w.output_map[&Symbol::from("z")], Symbol::from("w"));
    }

    #[test]
    fn distinguishing_sequence_is_shortest() {
        let a = SystemSpec::new("a", Clocking::Unclocked, "0")
            .with_entry("0", Some("x"), "1", Some("p"))
            .with_entry("1", Some("x"), "0", Some("q"));
        let b = SystemSpec::new("b", Clocking::Unclocked, "0").with_entry(
            "0",
            Some("x"),
            "0",
            Some("p"),
        );
        let EquivalenceOutcome::Distinguished { inputs, .. } =
            functionally_equivalent(&a, &b, 10).unwrap()
        else {
            panic!()
        };
        assert_eq!(inputs.len(), 2);
    }

    #[test]
    fn horizon_limits_search() {
        let t = toggle("t");
        assert_eq!(
            functionally_equivalent(&t, &t, 1).unwrap(),
            EquivalenceOutcome::Inconclusive { horizon: 1 }
        );
        assert_eq!(
            equivalent_capped(&t, &t, 10, 1).unwrap_err(),
            SystemError::CapExceeded(1)
        );
    }
}
