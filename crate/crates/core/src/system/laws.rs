//! Compositionality checks and the bounded normal-form search.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ids::{render_opt, tuple_id, StateId, Symbol, EPS};

use super::equivalence::EquivalenceWitness;
use super::{
    compose_loop, compose_parallel, compose_sequential, compose_while, functionally_equivalent,
    Clocking, EquivalenceOutcome, StepTable, SystemError, SystemSpec, WhileOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CompositionKind {
    Sequential,
    Parallel,
    Loop { preload: Symbol, n: u64 },
    While { budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompositionalityVerdict {
    Compositional,
    Emergent,
    NotCompositional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionalityReport {
    pub kind: CompositionKind,
    pub verdict: CompositionalityVerdict,
    pub detail: String,
}

/// A table step that needs nothing but the table: a part without an entry
/// for ε is inactive on ε.
fn table_step(t: &StepTable, q: &StateId, i: &Option<Symbol>) -> Option<(StateId, Option<Symbol>)> {
    match t.get(&(q.clone(), i.clone())) {
        Some(v) => Some(v.clone()),
        None if i.is_none() => Some((q.clone(), None)),
        None => None,
    }
}

fn states_of(t: &StepTable) -> Vec<StateId> {
    let mut v: Vec<StateId> = t
        .keys()
        .map(|(q, _)| q.clone())
        .chain(t.values().map(|(q, _)| q.clone()))
        .collect();
    v.sort();
    v.dedup();
    v
}

fn inputs_of(t: &StepTable) -> Vec<Option<Symbol>> {
    let mut v: Vec<Option<Symbol>> = t.keys().map(|(_, i)| i.clone()).collect();
    v.sort();
    v.dedup();
    v
}

fn outputs_of(t: &StepTable) -> Vec<Option<Symbol>> {
    let mut v: Vec<Option<Symbol>> = std::iter::once(None)
        .chain(t.values().map(|(_, o)| o.clone()))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Sequential combinator on tables alone.
fn seq_tables(t1: &StepTable, t2: &StepTable) -> Option<StepTable> {
    let mut out = StepTable::new();
    let mut domain = inputs_of(t1);
    if !domain.contains(&None) && inputs_of(t2).contains(&None) {
        domain.insert(0, None);
    }
    for q1 in states_of(t1) {
        for line in outputs_of(t1) {
            for q2 in states_of(t2) {
                for i in &domain {
                    let (r1, o1) = table_step(t1, &q1, i)?;
                    let (r2, o2) = table_step(t2, &q2, &o1)?;
                    let from = tuple_id(&[
                        q1.clone(),
                        StateId::from(render_opt(line.as_ref())),
                        q2.clone(),
                    ]);
                    out.insert(
                        (from, i.clone()),
                        (
                            tuple_id(&[r1, StateId::from(render_opt(o1.as_ref())), r2]),
                            o2,
                        ),
                    );
                }
            }
        }
    }
    Some(out)
}

fn par_tables(t1: &StepTable, t2: &StepTable) -> Option<StepTable> {
    let mut out = StepTable::new();
    let mut domain = inputs_of(t1);
    if !domain.contains(&None) && inputs_of(t2).contains(&None) {
        domain.insert(0, None);
    }
    for q1 in states_of(t1) {
        for q2 in states_of(t2) {
            for i in &domain {
                let (r1, o1) = table_step(t1, &q1, i)?;
                let (r2, o2) = table_step(t2, &q2, i)?;
                let o = (o1.is_some() || o2.is_some())
                    .then(|| super::pair_symbol(o1.as_ref(), o2.as_ref()));
                out.insert(
                    (tuple_id(&[q1.clone(), q2.clone()]), i.clone()),
                    (tuple_id(&[r1, r2]), o),
                );
            }
        }
    }
    Some(out)
}

/// Loop combinator on tables: unroll the counter/body/feedback wiring.
fn loop_tables(
    iter: &StepTable,
    iter0: &StateId,
    body: &StepTable,
    body0: &StateId,
    preload: &Symbol,
) -> Option<StepTable> {
    let mut out = StepTable::new();
    let mut todo = vec![(iter0.clone(), body0.clone(), preload.clone())];
    while let Some((c, qb, v)) = todo.pop() {
        let from = tuple_id(&[c.clone(), qb.clone(), StateId::from(v.as_str())]);
        if out.contains_key(&(from.clone(), None)) {
            continue;
        }
        let (c2, b) = table_step(iter, &c, &None)?;
        let (qb2, o) = match &b {
            None => (qb.clone(), None),
            Some(b) => table_step(body, &qb, &Some(super::pair_symbol(Some(b), Some(&v))))?,
        };
        let v2 = o.clone().unwrap_or_else(|| v.clone());
        out.insert(
            (from, None),
            (
                tuple_id(&[c2.clone(), qb2.clone(), StateId::from(v2.as_str())]),
                o,
            ),
        );
        todo.push((c2, qb2, v2));
    }
    Some(out)
}

fn agree(
    kind: CompositionKind,
    composed: &StepTable,
    rebuilt: Option<StepTable>,
) -> CompositionalityReport {
    let (verdict, detail) = match rebuilt {
        Some(t) if &t == composed => (
            CompositionalityVerdict::Compositional,
            format!(
                "table of {} entries rebuilt from the factor tables",
                t.len()
            ),
        ),
        Some(t) => (
            CompositionalityVerdict::NotCompositional,
            format!(
                "rebuilt table has {} entries, composed has {}",
                t.len(),
                composed.len()
            ),
        ),
        None => (
            CompositionalityVerdict::NotCompositional,
            "factor tables are not total on the wired inputs".into(),
        ),
    };
    CompositionalityReport {
        kind,
        verdict,
        detail,
    }
}

/// For sequential, parallel and loop composition the composed function
/// table is rebuilt from the factor tables and compared with the operator's
/// result. For While, `instances = [iter, g1, g2]`: if `g1` and `g2` agree
/// on a prefix of counter values but reach zero at different counts beyond
/// it, no combinator over the known table prefix can predict the count.
pub fn check_compositionality(
    kind: &CompositionKind,
    instances: &[SystemSpec],
) -> Result<CompositionalityReport, SystemError> {
    let need = |n: usize| {
        if instances.len() == n {
            Ok(())
        } else {
            Err(SystemError::Invalid {
                system: "instances".into(),
                reason: format!("expected {n} systems, got {}", instances.len()),
            })
        }
    };
    match kind {
        CompositionKind::Sequential => {
            need(2)?;
            let c = compose_sequential(&instances[0], &instances[1])?;
            Ok(agree(
                kind.clone(),
                &c.table,
                seq_tables(&instances[0].table, &instances[1].table),
            ))
        }
        CompositionKind::Parallel => {
            need(2)?;
            let c = compose_parallel(&instances[0], &instances[1])?;
            Ok(agree(
                kind.clone(),
                &c.table,
                par_tables(&instances[0].table, &instances[1].table),
            ))
        }
        CompositionKind::Loop { preload, n } => {
            need(2)?;
            let (iter, body) = (&instances[0], &instances[1]);
            let c = compose_loop(iter, body, preload.clone(), *n)?;
            Ok(agree(
                kind.clone(),
                &c.system.table,
                loop_tables(
                    &iter.table,
                    &iter.initial,
                    &body.table,
                    &body.initial,
                    preload,
                ),
            ))
        }
        CompositionKind::While { budget } => {
            need(3)?;
            let (iter, g1, g2) = (&instances[0], &instances[1], &instances[2]);
            let prefix = (0u64..)
                .map(super::num)
                .take_while(|b| {
                    let q = |g: &SystemSpec| {
                        g.table.get(&(g.initial.clone(), Some(b.clone()))).cloned()
                    };
                    q(g1).is_some() && q(g1) == q(g2)
                })
                .count();
            let d1 = compose_while(iter, g1, *budget)?;
            let d2 = compose_while(iter, g2, *budget)?;
            let beyond = |d: &WhileOutcome| match d {
                WhileOutcome::Found { delta, .. } => *delta >= prefix as u64,
                WhileOutcome::BudgetExhausted { .. } => true,
            };
            let (verdict, detail) = if d1 != d2 && beyond(&d1) && beyond(&d2) {
                (
                    CompositionalityVerdict::Emergent,
                    format!("g tables agree for b < {prefix}; step counts {d1:?} vs {d2:?}"),
                )
            } else {
                (
                    CompositionalityVerdict::NotCompositional,
                    format!(
                        "no emergence witness: tables agree for b < {prefix}; {d1:?} vs {d2:?}"
                    ),
                )
            };
            Ok(CompositionalityReport {
                kind: kind.clone(),
                verdict,
                detail,
            })
        }
    }
}

/// `S ∘ (P1 ∥ … ∥ Pn)` equivalent to a stateless target.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub parts: Vec<SystemSpec>,
    pub combiner: SystemSpec,
    pub system: SystemSpec,
    pub witness: EquivalenceWitness,
}

const MAX_NORMAL_FORM_INPUTS: usize = 16;

/// Bounded search over one-bit parts `Pk: I → {0,1}` (up to `max_parts` of
/// them) and a combiner `S` read off the target. Returns `None` when the
/// bound is too small.
pub fn normal_form_search(
    target: &SystemSpec,
    max_parts: usize,
) -> Result<Option<NormalForm>, SystemError> {
    let invalid = |reason: &str| SystemError::Invalid {
        system: target.name.clone(),
        reason: reason.into(),
    };
    if target.states.len() != 1 || target.clocking != Clocking::Unclocked {
        return Err(invalid(
            "normal-form search needs a stateless unclocked system",
        ));
    }
    let inputs: Vec<Symbol> = target.inputs.iter().cloned().collect();
    if inputs.len() > MAX_NORMAL_FORM_INPUTS {
        return Err(invalid("input alphabet too large for the bounded search"));
    }
    let f: BTreeMap<Symbol, Option<Symbol>> = inputs
        .iter()
        .map(|i| Ok((i.clone(), target.step(&target.initial, Some(i))?.1)))
        .collect::<Result<_, SystemError>>()?;
    let masks: u64 = 1 << inputs.len();
    for n in 1..=max_parts {
        let mut choice = vec![0u64; n];
        loop {
            if let Some(nf) = try_masks(target, &inputs, &f, &choice)? {
                return Ok(Some(nf));
            }
            let mut k = n;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < masks {
                    break;
                }
                choice[k] = 0;
            }
            if choice.iter().all(|&m| m == 0) {
                break;
            }
        }
    }
    Ok(None)
}

fn try_masks(
    target: &SystemSpec,
    inputs: &[Symbol],
    f: &BTreeMap<Symbol, Option<Symbol>>,
    masks: &[u64],
) -> Result<Option<NormalForm>, SystemError> {
    let parts: Vec<SystemSpec> = masks
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let bit = |i: &Symbol| {
                let pos = inputs.iter().position(|x| x == i).unwrap_or(0);
                Some(Symbol::from(if m >> pos & 1 == 1 { "1" } else { "0" }))
            };
            let mut p = SystemSpec::stateless(format!("p{k}"), inputs.iter().cloned(), bit);
            p.outputs.extend(["0", "1"].map(Symbol::from));
            p
        })
        .collect();
    let mut par = parts[0].clone();
    for p in &parts[1..] {
        par = compose_parallel(&par, p)?;
    }
    let mut table: BTreeMap<Symbol, Option<Symbol>> = BTreeMap::new();
    for i in inputs {
        let key = par
            .step(&par.initial, Some(i))?
            .1
            .unwrap_or_else(|| Symbol::from(EPS));
        match table.get(&key) {
            Some(prev) if prev != &f[i] => return Ok(None),
            _ => {
                table.insert(key, f[i].clone());
            }
        }
    }
    let mut combiner = SystemSpec::stateless("s", par.outputs.iter().cloned(), |k| {
        table.get(k).cloned().flatten()
    });
    combiner.outputs.extend(target.outputs.iter().cloned());
    let system = compose_sequential(&par, &combiner)?;
    match functionally_equivalent(target, &system, 4)? {
        EquivalenceOutcome::Equivalent(witness) if witness.verified => Ok(Some(NormalForm {
            parts,
            combiner,
            system,
            witness,
        })),
        _ => Ok(None),
    }
}
