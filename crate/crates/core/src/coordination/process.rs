//! Processes and their composition through a connecting protocol.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::automaton::{reachable_part, Acceptance, IoVector, Nioa, Transition};
use crate::channel::{
    check_consistent, explore, is_linear_executable, CbrOptions, Protocol, ShannonChannel, Verdict,
};
use crate::ids::StateId;
use crate::product::{weakly_synchronized_product, ProductOptions};
use crate::projection::{project, PortMap, ProjectionMap, StateMap};

use super::{CoordinatedAutomaton, CoordinationError};

/// The protocol a role takes part in and the party on the other side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Binding {
    pub protocol: String,
    pub counterparty: String,
}

/// Where a role lives inside a process automaton: its components carry the
/// prefix `prefix.`, its transitions are labelled `prefix.…`, and `states`
/// maps process states to role states.
#[derive(Debug, Clone)]
pub struct RoleView {
    pub prefix: String,
    pub states: StateMap,
}

#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub name: String,
    pub automaton: Nioa,
    pub roles: Vec<Nioa>,
    /// Role name to its external interaction.
    pub bindings: BTreeMap<String, Binding>,
    pub views: BTreeMap<String, RoleView>,
}

fn check_bindings(
    name: &str,
    bindings: &BTreeMap<String, Binding>,
) -> Result<(), CoordinationError> {
    let parties: BTreeSet<&str> = bindings.values().map(|b| b.counterparty.as_str()).collect();
    if bindings.len() < 2 || parties.len() < 2 {
        return Err(CoordinationError::Rejected(format!(
            "{name} needs at least two roles bound to two different counterparties"
        )));
    }
    Ok(())
}

impl ProcessSpec {
    pub fn from_coordinated(
        name: &str,
        c: &CoordinatedAutomaton,
        bindings: BTreeMap<String, Binding>,
    ) -> Result<Self, CoordinationError> {
        for role in bindings.keys() {
            if !c.roles.iter().any(|r| &r.name == role) {
                return Err(CoordinationError::Rejected(format!(
                    "{name}: binding for unknown role {role}"
                )));
            }
        }
        check_bindings(name, &bindings)?;
        let views = c
            .roles
            .iter()
            .enumerate()
            .map(|(k, r)| {
                (
                    r.name.clone(),
                    RoleView {
                        prefix: r.name.clone(),
                        states: StateMap::Component(k),
                    },
                )
            })
            .collect();
        let mut automaton = c.result.clone();
        automaton.name = name.into();
        Ok(Self {
            name: name.into(),
            automaton,
            roles: c.roles.clone(),
            bindings,
            views,
        })
    }

    pub fn role_projection(&self, role: &str) -> Option<ProjectionMap> {
        let v = self.views.get(role)?;
        Some(ProjectionMap {
            states: v.states.clone(),
            inputs: PortMap::with_prefix(&self.automaton.inputs, &v.prefix),
            outputs: PortMap::with_prefix(&self.automaton.outputs, &v.prefix),
            events: Some(v.prefix.clone()),
        })
    }

    /// The role as seen in the reachable behaviour of the process.
    pub fn project_role(&self, role: &str) -> Result<Nioa, CoordinationError> {
        let map = self
            .role_projection(role)
            .ok_or_else(|| CoordinationError::Rejected(format!("{}: no role {role}", self.name)))?;
        let mut image = project(&reachable_part(&self.automaton), &map)?;
        image.name = role.into();
        Ok(image)
    }
}

fn bound_role<'a>(p: &'a ProcessSpec, via: &Protocol) -> Result<&'a str, CoordinationError> {
    p.bindings
        .iter()
        .find(|(r, b)| b.protocol == via.name && via.role(r).is_some())
        .map(|(r, _)| r.as_str())
        .ok_or_else(|| {
            CoordinationError::Rejected(format!(
                "{} takes no part in protocol {}",
                p.name, via.name
            ))
        })
}

/// Merge two processes through `via`, which connects one role of each. The
/// connecting characters are hidden and the remaining roles keep their
/// external interactions, which must lead to different counterparties.
pub fn compose_processes(
    p1: &ProcessSpec,
    p2: &ProcessSpec,
    via: &Protocol,
) -> Result<ProcessSpec, CoordinationError> {
    if check_consistent(via).verdict != Verdict::Pass {
        return Err(CoordinationError::Rejected(format!(
            "connecting protocol {} is not consistent",
            via.name
        )));
    }
    for p in [p1, p2] {
        if !is_linear_executable(&p.automaton) {
            return Err(CoordinationError::Rejected(format!(
                "{} is not linear-executable",
                p.name
            )));
        }
    }
    let r1 = bound_role(p1, via)?;
    let r2 = bound_role(p2, via)?;
    let mut bindings = BTreeMap::new();
    let mut sides: Vec<BTreeSet<&str>> = Vec::new();
    for (p, r) in [(p1, r1), (p2, r2)] {
        let rest: BTreeMap<_, _> = p
            .bindings
            .iter()
            .filter(|(role, _)| role.as_str() != r)
            .collect();
        if rest.is_empty() {
            return Err(CoordinationError::Rejected(format!(
                "{} keeps no external interaction",
                p.name
            )));
        }
        sides.push(rest.values().map(|b| b.counterparty.as_str()).collect());
        for (role, b) in rest {
            if bindings.insert(role.clone(), b.clone()).is_some() {
                return Err(CoordinationError::Rejected(format!(
                    "role name {role} occurs in both processes"
                )));
            }
        }
    }
    let all: BTreeSet<&str> = sides.iter().flatten().copied().collect();
    if all.len() < 2 {
        let party = all.iter().next().copied().unwrap_or_default();
        return Err(CoordinationError::Rejected(format!(
            "closed chain: every remaining interaction leads to {party}"
        )));
    }

    let name = format!("{}+{}", p1.name, p2.name);
    let merged = weakly_synchronized_product(
        &[p1.automaton.clone(), p2.automaton.clone()],
        ProductOptions::default(),
    )?;
    let owner = |role: &str| if role == r1 { &p1.name } else { &p2.name };
    let channels = via
        .channels
        .iter()
        .map(|c| {
            ShannonChannel::between(
                &merged,
                &c.name,
                &format!("{}.{}.{}", owner(&c.from_role), c.from_role, c.from_port),
                &format!("{}.{}.{}", owner(&c.to_role), c.to_role, c.to_port),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cbr = explore(&merged, &channels, CbrOptions::default())?;
    if cbr.capped {
        return Err(crate::channel::ChannelError::CapExceeded(CbrOptions::default().cap).into());
    }

    let hidden_in: BTreeSet<usize> = channels.iter().map(|c| c.to).collect();
    let hidden_out: BTreeSet<usize> = channels.iter().map(|c| c.from).collect();
    let keep_in: Vec<usize> = (0..merged.inputs.len())
        .filter(|k| !hidden_in.contains(k))
        .collect();
    let keep_out: Vec<usize> = (0..merged.outputs.len())
        .filter(|k| !hidden_out.contains(k))
        .collect();
    let pick =
        |v: &IoVector, keep: &[usize]| IoVector(keep.iter().map(|&k| v.0[k].clone()).collect());
    let ids: Vec<StateId> = (0..cbr.states.len())
        .map(|n| StateId::from(cbr.render_state(n)))
        .collect();
    let acceptance = if merged.acceptance.is_muller() {
        Acceptance::Muller(Vec::new())
    } else {
        Acceptance::Finite(
            (0..ids.len())
                .filter(|&n| cbr.is_accepting(n))
                .map(|n| ids[n].clone())
                .collect(),
        )
    };
    let mut automaton = Nioa {
        name: name.clone(),
        states: ids.iter().cloned().collect(),
        inputs: keep_in.iter().map(|&k| merged.inputs[k].clone()).collect(),
        outputs: keep_out
            .iter()
            .map(|&k| merged.outputs[k].clone())
            .collect(),
        initial: ids[0].clone(),
        acceptance,
        transitions: cbr
            .transitions
            .iter()
            .map(|t| {
                let b = &merged.transitions[t.base];
                Transition {
                    label: b.label.clone(),
                    from: ids[t.from].clone(),
                    to: ids[t.to].clone(),
                    input: pick(&b.input, &keep_in),
                    output: pick(&b.output, &keep_out),
                }
            })
            .collect(),
        product: None,
    };
    automaton.canonicalize();

    let parts = merged
        .product
        .as_ref()
        .map(|i| i.parts.clone())
        .unwrap_or_default();
    let mut roles = Vec::new();
    let mut views = BTreeMap::new();
    for (side, (p, r)) in [(p1, r1), (p2, r2)].into_iter().enumerate() {
        for role in p.roles.iter().filter(|x| x.name != r) {
            let view = &p.views[&role.name];
            let inner = ProjectionMap {
                states: view.states.clone(),
                inputs: PortMap::drop_all(),
                outputs: PortMap::drop_all(),
                events: None,
            };
            let mut table = BTreeMap::new();
            for (n, id) in ids.iter().enumerate() {
                let pstate = &parts[&cbr.states[n].base][side];
                table.insert(id.clone(), inner.map_state(&p.automaton, pstate)?);
            }
            views.insert(
                role.name.clone(),
                RoleView {
                    prefix: format!("{}.{}", p.name, view.prefix),
                    states: StateMap::Table(table),
                },
            );
            roles.push(role.clone());
        }
    }
    Ok(ProcessSpec {
        name,
        automaton,
        roles,
        bindings,
        views,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::automaton::{Acceptance, Port};
    use crate::channel::{build_protocol, ChannelSpec, ProtocolOptions};
    use crate::coordination::{apply_rules, CoordinationRule, GuardOp};
    use crate::projection::transition_keys;

    fn role(
        name: &str,
        s: [&str; 3],
        send: (&str, &str),
        recv: (&str, &str),
        send_first: bool,
        acc: &[&str],
    ) -> Nioa {
        let a = Nioa::new(name, s[0])
            .with_output(Port::new(send.0, [send.1]))
            .with_input(Port::new(recv.0, [recv.1]))
            .with_acceptance(Acceptance::finite(acc.iter().copied()));
        if send_first {
            a.with_transition(send.0, s[0], &[], &[send], s[1])
                .with_transition(recv.0, s[1], &[recv], &[], s[2])
        } else {
            a.with_transition(recv.0, s[0], &[recv], &[], s[1])
                .with_transition(send.0, s[1], &[], &[send], s[2])
        }
    }

    pub fn buyer() -> Nioa {
        role(
            "Buyer",
            ["b0", "b1", "b2"],
            ("order", "Order"),
            ("conf", "Confirmation"),
            true,
            &["b2"],
        )
    }
    pub fn seller() -> Nioa {
        role(
            "Seller",
            ["s0", "s1", "s2"],
            ("conf", "Confirmation"),
            ("order", "Order"),
            false,
            &["s0", "s2"],
        )
    }
    fn payer() -> Nioa {
        role(
            "Payer",
            ["p0", "p1", "p2"],
            ("pay", "Payment"),
            ("receipt", "Receipt"),
            true,
            &["p0", "p2"],
        )
    }
    fn stocker() -> Nioa {
        role(
            "Stocker",
            ["k0", "k1", "k2"],
            ("reserve", "Reserve"),
            ("ok", "Ok"),
            true,
            &["k0", "k2"],
        )
    }

    fn process(
        name: &str,
        roles: [Nioa; 2],
        rule: CoordinationRule,
        binds: [(&str, &str, &str); 2],
    ) -> ProcessSpec {
        let base = weakly_synchronized_product(&roles, ProductOptions::default()).unwrap();
        let c = apply_rules(&base, &roles, &[rule]).unwrap();
        let bindings = binds
            .iter()
            .map(|(r, p, c)| {
                (
                    r.to_string(),
                    Binding {
                        protocol: p.to_string(),
                        counterparty: c.to_string(),
                    },
                )
            })
            .collect();
        ProcessSpec::from_coordinated(name, &c, bindings).unwrap()
    }

    fn order_protocol(s: Nioa) -> Protocol {
        let chans = [
            ChannelSpec::new("order", ("Buyer", "order"), ("Seller", "order")),
            ChannelSpec::new("conf", ("Seller", "conf"), ("Buyer", "conf")),
        ];
        build_protocol(
            "order_protocol",
            vec![buyer(), s],
            &chans,
            ProtocolOptions::default(),
        )
        .unwrap()
    }

    fn network(third: &str) -> (ProcessSpec, ProcessSpec) {
        let pb = process(
            "buyer",
            [buyer(), payer()],
            CoordinationRule::new("pay_after_confirmation")
                .when("Buyer", GuardOp::Ne, "b2")
                .forbid("Payer.pay"),
            [
                ("Buyer", "order_protocol", "seller"),
                (
                    "Payer",
                    "payment",
                    if third.is_empty() { "bank" } else { third },
                ),
            ],
        );
        let ps = process(
            "seller",
            [seller(), stocker()],
            CoordinationRule::new("confirm_when_reserved")
                .when("Stocker", GuardOp::Ne, "k2")
                .forbid("Seller.conf"),
            [
                ("Seller", "order_protocol", "buyer"),
                (
                    "Stocker",
                    "stock",
                    if third.is_empty() { "warehouse" } else { third },
                ),
            ],
        );
        (pb, ps)
    }

    #[test]
    fn buyer_seller_composition() {
        let (pb, ps) = network("");
        let merged = compose_processes(&pb, &ps, &order_protocol(seller())).unwrap();
        assert_eq!(
            merged.bindings.keys().collect::<Vec<_>>(),
            ["Payer", "Stocker"]
        );
        assert!(is_linear_executable(&merged.automaton));
        assert!(merged
            .automaton
            .inputs
            .iter()
            .all(|p| !p.name.contains(".Buyer.") && !p.name.contains(".Seller.")));
        for (role, r) in [("Payer", payer()), ("Stocker", stocker())] {
            let image = merged.project_role(role).unwrap();
            assert_eq!(transition_keys(&image), transition_keys(&r), "{role}");
        }
    }

    #[test]
    fn closed_triangle_rejected() {
        let (pb, ps) = network("third");
        let err = compose_processes(&pb, &ps, &order_protocol(seller())).unwrap_err();
        assert!(err.to_string().contains("closed chain"), "{err}");
    }

    #[test]
    fn inconsistent_connection_rejected() {
        let (pb, ps) = network("");
        let mut mute = seller();
        mute.transitions.retain(|t| t.label != "conf");
        let err = compose_processes(&pb, &ps, &order_protocol(mute)).unwrap_err();
        assert!(err.to_string().contains("not consistent"));
    }

    #[test]
    fn a_process_needs_two_counterparties() {
        let roles = [buyer(), payer()];
        let base = weakly_synchronized_product(&roles, ProductOptions::default()).unwrap();
        let c = apply_rules(
            &base,
            &roles,
            &[CoordinationRule::new("r")
                .when("Buyer", GuardOp::Ne, "b2")
                .forbid("Payer.pay")],
        )
        .unwrap();
        let same = [("Buyer", "x"), ("Payer", "y")]
            .iter()
            .map(|(r, p)| {
                (
                    r.to_string(),
                    Binding {
                        protocol: p.to_string(),
                        counterparty: "z".into(),
                    },
                )
            })
            .collect();
        assert!(ProcessSpec::from_coordinated("p", &c, same).is_err());
    }
}
