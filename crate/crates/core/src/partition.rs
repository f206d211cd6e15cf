//! Partitioned (extended) automata: transitions grouped into classes by
//! document class, source/target mode and a condition on the rest state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{IoVector, Nioa};
use crate::ids::{StateId, Symbol, EPS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("symbol {0} has no document class")]
    MissingDocClass(Symbol),
    #[error("state {0} has no mode assignment")]
    MissingMode(StateId),
}

/// `parse(a) = (docCls, param)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocAssignment {
    pub class: String,
    pub param: String,
}

/// A condition `cond(p_rest, param_i)` attached to an input document class,
/// given by the set of `(rest, param)` pairs on which it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub applies_to: String,
    pub holds: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionPartition {
    pub documents: BTreeMap<Symbol, DocAssignment>,
    /// `Q = Q_mode × Q_rest`.
    pub modes: BTreeMap<StateId, (String, String)>,
    pub conditions: Vec<Condition>,
}

/// Value of the partition function for one transition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassKey {
    pub input_class: String,
    pub output_class: String,
    pub from_mode: String,
    pub to_mode: String,
    pub condition: Option<(String, bool)>,
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -[{}", self.from_mode, self.input_class)?;
        if let Some((name, value)) = &self.condition {
            if *value {
                write!(f, " when {name}")?;
            } else {
                write!(f, " when !{name}")?;
            }
        }
        write!(f, " / {}]-> {}", self.output_class, self.to_mode)
    }
}

impl TransitionPartition {
    /// Trivial partition: one document class for every symbol, one mode.
    pub fn single_class(a: &Nioa, class: &str, mode: &str) -> Self {
        let documents = a
            .inputs
            .iter()
            .chain(&a.outputs)
            .flat_map(|p| p.symbols.iter())
            .map(|s| {
                (
                    s.clone(),
                    DocAssignment {
                        class: class.into(),
                        param: s.to_string(),
                    },
                )
            })
            .collect();
        let modes = a
            .states
            .iter()
            .map(|q| (q.clone(), (mode.to_string(), q.to_string())))
            .collect();
        Self {
            documents,
            modes,
            conditions: Vec::new(),
        }
    }

    fn doc_class(&self, v: &IoVector) -> Result<(String, Option<String>), PartitionError> {
        let mut classes = Vec::new();
        let mut first_param = None;
        for s in v.0.iter().flatten() {
            let d = self
                .documents
                .get(s)
                .ok_or_else(|| PartitionError::MissingDocClass(s.clone()))?;
            classes.push(d.class.clone());
            first_param.get_or_insert_with(|| d.param.clone());
        }
        if classes.is_empty() {
            Ok((EPS.to_string(), None))
        } else {
            Ok((classes.join(","), first_param))
        }
    }

    fn mode(&self, q: &StateId) -> Result<&(String, String), PartitionError> {
        self.modes
            .get(q)
            .ok_or_else(|| PartitionError::MissingMode(q.clone()))
    }

    pub fn class_of(&self, a: &Nioa, index: usize) -> Result<ClassKey, PartitionError> {
        let t = &a.transitions[index];
        let (input_class, param) = self.doc_class(&t.input)?;
        let (output_class, _) = self.doc_class(&t.output)?;
        let (from_mode, rest) = self.mode(&t.from)?;
        let (to_mode, _) = self.mode(&t.to)?;
        let condition = self
            .conditions
            .iter()
            .find(|c| c.applies_to == input_class)
            .map(|c| {
                let holds = param
                    .as_ref()
                    .is_some_and(|p| c.holds.contains(&(rest.clone(), p.clone())));
                (c.name.clone(), holds)
            });
        Ok(ClassKey {
            input_class,
            output_class,
            from_mode: from_mode.clone(),
            to_mode: to_mode.clone(),
            condition,
        })
    }
}

/// Partition `Δ` into disjoint classes keyed by the partition function.
/// Values are transition indices into `a.transitions`.
pub fn partition_transitions(
    a: &Nioa,
    tp: &TransitionPartition,
) -> Result<BTreeMap<ClassKey, Vec<usize>>, PartitionError> {
    let mut classes: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for i in 0..a.transitions.len() {
        classes.entry(tp.class_of(a, i)?).or_default().push(i);
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Port;

    /// A seller whose state is `mode_customer`; Order/Confirmation symbols
    /// carry the customer as parameter.
    pub(crate) fn seller() -> (Nioa, TransitionPartition) {
        let a = Nioa::new("seller", "listening_alice")
            .with_input(Port::new("order", ["Order_alice", "Order_bob"]))
            .with_output(Port::new(
                "confirm",
                ["Confirmation_alice", "Confirmation_bob"],
            ))
            .with_transition(
                "oa",
                "listening_alice",
                &[("order", "Order_alice")],
                &[("confirm", "Confirmation_alice")],
                "ordered_alice",
            )
            .with_transition(
                "ob",
                "listening_bob",
                &[("order", "Order_bob")],
                &[("confirm", "Confirmation_bob")],
                "ordered_bob",
            )
            .with_transition(
                "ox",
                "listening_mallory",
                &[("order", "Order_bob")],
                &[],
                "listening_mallory",
            );
        let mut tp = TransitionPartition::default();
        for who in ["alice", "bob"] {
            tp.documents.insert(
                format!("Order_{who}").into(),
                DocAssignment {
                    class: "Order".into(),
                    param: who.into(),
                },
            );
            tp.documents.insert(
                format!("Confirmation_{who}").into(),
                DocAssignment {
                    class: "Confirmation".into(),
                    param: who.into(),
                },
            );
        }
        for q in &a.states {
            let (m, r) = q.as_str().split_once('_').unwrap();
            tp.modes.insert(q.clone(), (m.into(), r.into()));
        }
        tp.conditions.push(Condition {
            name: "isTrustworthy".into(),
            applies_to: "Order".into(),
            holds: [("alice", "alice"), ("bob", "bob")]
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        });
        (a, tp)
    }

    #[test]
    fn trustworthy_orders_form_one_class() {
        let (a, tp) = seller();
        let classes = partition_transitions(&a, &tp).unwrap();
        let key = ClassKey {
            input_class: "Order".into(),
            output_class: "Confirmation".into(),
            from_mode: "listening".into(),
            to_mode: "ordered".into(),
            condition: Some(("isTrustworthy".into(), true)),
        };
        assert_eq!(
            key.to_string(),
            "listening -[Order when isTrustworthy / Confirmation]-> ordered"
        );
        // the two confirmed orders differ only in rest state and parameters
        assert_eq!(classes[&key], vec![0, 1]);
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn single_class_partition_covers_everything() {
        let (mut a, _) = seller();
        a.transitions.retain(|t| !t.output.is_eps());
        let tp = TransitionPartition::single_class(&a, "Doc", "m");
        let classes = partition_transitions(&a, &tp).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes.values().next().unwrap(), &vec![0, 1]);
    }

    #[test]
    fn missing_assignments_are_errors() {
        let (a, mut tp) = seller();
        tp.modes.remove(&StateId::from("ordered_bob"));
        assert_eq!(
            partition_transitions(&a, &tp).unwrap_err(),
            PartitionError::MissingMode("ordered_bob".into())
        );
        let (a, mut tp) = seller();
        tp.documents.remove(&Symbol::from("Order_bob"));
        assert!(matches!(
            partition_transitions(&a, &tp),
            Err(PartitionError::MissingDocClass(_))
        ));
    }
}
