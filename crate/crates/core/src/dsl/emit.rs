//! Declarations built from model objects, for writing results back out.

use std::collections::BTreeSet;

use crate::automaton::{Acceptance, IoVector, Nioa, Port};
use crate::coordination::{CoordinationRule, GuardOp, InputClass};
use crate::ids::StateId;
use crate::system::{Clocking, SystemSpec};

use super::ast::*;
use super::Spanned;

/// Muller conjunctions are spelled out by subset enumeration up to this
/// many states.
const MAX_ENUMERATED_STATES: usize = 12;

fn id(s: &str) -> Ident {
    Spanned::bare(s.to_string())
}

fn ids<'a>(v: impl IntoIterator<Item = &'a StateId>) -> Vec<Ident> {
    v.into_iter().map(|q| id(q.as_str())).collect()
}

fn port_decl(p: &Port) -> Spanned<PortDecl> {
    Spanned::bare(PortDecl {
        name: id(&p.name),
        symbols: p.symbols.iter().map(|s| id(s.as_str())).collect(),
    })
}

fn items(v: &IoVector, ports: &[Port]) -> Vec<IoItem> {
    v.0.iter()
        .zip(ports)
        .filter_map(|(s, p)| s.as_ref().map(|s| (id(&p.name), id(s.as_str()))))
        .collect()
}

fn accept_decl(a: &Nioa) -> Result<AcceptDecl, String> {
    match &a.acceptance {
        Acceptance::Finite(f) => Ok(AcceptDecl::Finite(ids(f))),
        Acceptance::Muller(family) => Ok(AcceptDecl::Muller(family.iter().map(ids).collect())),
        acc if !acc.is_muller() => Ok(AcceptDecl::Finite(ids(a
            .states
            .iter()
            .filter(|q| acc.accepts_state(q))))),
        acc => {
            let states: Vec<&StateId> = a.states.iter().collect();
            if states.len() > MAX_ENUMERATED_STATES {
                return Err(format!(
                    "acceptance of {} is a Muller conjunction over more than {MAX_ENUMERATED_STATES} states",
                    a.name
                ));
            }
            let mut family = Vec::new();
            for mask in 1u32..(1 << states.len()) {
                let set: BTreeSet<StateId> = (0..states.len())
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| states[k].clone())
                    .collect();
                if acc.accepts_infinity_set(&set) {
                    family.push(ids(&set));
                }
            }
            Ok(AcceptDecl::Muller(family))
        }
    }
}

/// An `automaton` declaration equal to `a` after resolution. Product
/// acceptance is flattened onto the product states.
pub fn automaton_decl(a: &Nioa) -> Result<AutomatonDecl, String> {
    let mut d = AutomatonDecl::new(id(&a.name));
    d.states = Some(ids(&a.states));
    d.initial = Some(id(a.initial.as_str()));
    d.accept = Some(Spanned::bare(accept_decl(a)?));
    d.inputs = a.inputs.iter().map(port_decl).collect();
    d.outputs = a.outputs.iter().map(port_decl).collect();
    d.transitions = a
        .transitions
        .iter()
        .map(|t| {
            Spanned::bare(TransitionDecl {
                label: id(&t.label),
                from: id(t.from.as_str()),
                input: items(&t.input, &a.inputs),
                output: items(&t.output, &a.outputs),
                to: id(t.to.as_str()),
            })
        })
        .collect();
    Ok(d)
}

pub fn system_decl(s: &SystemSpec) -> SystemDecl {
    let mut d = SystemDecl::new(id(&s.name));
    d.clocked = s.clocking == Clocking::Clocked;
    d.initial = Some(id(s.initial.as_str()));
    d.states = Some(ids(&s.states));
    d.inputs = Some(s.inputs.iter().map(|x| id(x.as_str())).collect());
    d.outputs = Some(s.outputs.iter().map(|x| id(x.as_str())).collect());
    d.entries = s
        .table
        .iter()
        .map(|((q, i), (q2, o))| {
            Spanned::bare(EntryDecl {
                state: id(q.as_str()),
                input: i.as_ref().map(|i| id(i.as_str())),
                next: id(q2.as_str()),
                output: o.as_ref().map(|o| id(o.as_str())),
            })
        })
        .collect();
    d
}

fn path(parts: Vec<&str>) -> Path {
    Spanned::bare(parts.into_iter().map(String::from).collect())
}

/// Rules over product transition classes `Role.label` and input classes
/// `Role.port.symbol`.
pub fn rules_decl(name: &str, roles: &[String], rules: &[CoordinationRule]) -> RulesDecl {
    let rules = rules
        .iter()
        .map(|r| {
            Spanned::bare(RuleDecl {
                name: id(&r.name),
                when: r
                    .when
                    .iter()
                    .map(|g| GuardDecl {
                        role: id(&g.role),
                        negated: g.op == GuardOp::Ne,
                        state: id(g.state.as_str()),
                    })
                    .collect(),
                on: r.on.as_ref().map(|c| match c {
                    InputClass::Eps => OnDecl::Eps,
                    InputClass::Symbol { port, symbol } => {
                        let mut parts: Vec<&str> = port.splitn(2, '.').collect();
                        parts.push(symbol.as_str());
                        OnDecl::Symbol(path(parts))
                    }
                }),
                forbid: r
                    .forbid
                    .iter()
                    .map(|f| path(f.splitn(2, '.').collect()))
                    .collect(),
            })
        })
        .collect();
    RulesDecl {
        name: id(name),
        roles: roles.iter().map(|r| id(r)).collect(),
        rules,
    }
}

pub fn document(decls: Vec<Decl>) -> Document {
    Document {
        decls: decls.into_iter().map(Spanned::bare).collect(),
        ..Document::default()
    }
}
