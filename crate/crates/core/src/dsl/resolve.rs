//! From documents to model objects.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automaton::{validate, Acceptance, IoVector, Nioa, Port, Transition};
use crate::channel::{build_protocol, ChannelError, ChannelSpec, Protocol, ProtocolOptions};
use crate::coordination::{
    apply_rules, Binding, CoordinatedAutomaton, CoordinationError, CoordinationRule, Guard,
    GuardOp, InputClass, ProcessSpec,
};
use crate::ids::{tuple_id, StateId, Symbol};
use crate::partition::{Condition, DocAssignment, TransitionPartition};
use crate::product::{weakly_synchronized_product, ProductError, ProductOptions};
use crate::system::{Clocking, SystemSpec};

use super::ast::*;
use super::{DslError, ErrorKind, Span, Spanned};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolDef {
    pub name: String,
    pub roles: Vec<String>,
    pub channels: Vec<ChannelSpec>,
    pub tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulesDef {
    pub name: String,
    pub roles: Vec<String>,
    pub rules: Vec<CoordinationRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: String,
    pub coordinate: String,
    pub bindings: BTreeMap<String, Binding>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("no {kind} named {name}")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Coordination(#[from] CoordinationError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// Everything declared in a set of documents, resolved and type-checked.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub automata: BTreeMap<String, Nioa>,
    /// Transition partitions of extended automata.
    pub partitions: BTreeMap<String, TransitionPartition>,
    pub systems: BTreeMap<String, SystemSpec>,
    pub channels: BTreeMap<String, ChannelSpec>,
    pub protocols: BTreeMap<String, ProtocolDef>,
    pub rules: BTreeMap<String, RulesDef>,
    pub processes: BTreeMap<String, ProcessDef>,
}

struct Errors(Vec<DslError>);

impl Errors {
    fn at(&mut self, span: Span, message: impl Into<String>) {
        self.0
            .push(DslError::new(ErrorKind::Resolution, span, message));
    }
}

/// Input side, port index, and the symbols of a class with their parameter.
type ClassPorts = (bool, usize, Vec<(Symbol, String)>);

fn unknown(kind: &'static str, name: &str) -> ModelError {
    ModelError::Unknown {
        kind,
        name: name.to_string(),
    }
}

impl Model {
    pub fn from_document(d: &Document) -> Result<Self, Vec<DslError>> {
        Self::resolve(&[d])
    }

    /// Resolve declarations from several documents as one namespace.
    pub fn resolve(docs: &[&Document]) -> Result<Self, Vec<DslError>> {
        let mut errs = Errors(Vec::new());
        let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
        let mut decls = Vec::new();
        for d in docs.iter().flat_map(|d| &d.decls) {
            let name = d.name();
            if !seen.insert((d.kind(), name.as_str())) {
                errs.at(name.span, format!("duplicate {} {}", d.kind(), name.node));
                continue;
            }
            decls.push(&d.node);
        }
        let mut m = Model::default();
        for d in &decls {
            match d {
                Decl::Automaton(a) => {
                    if let Some(n) = automaton(a, &mut errs) {
                        m.automata.insert(a.name.node.clone(), n);
                    }
                }
                Decl::Extended(e) => {
                    if let Some((n, p)) = extended(e, &mut errs) {
                        m.automata.insert(e.name.node.clone(), n);
                        m.partitions.insert(e.name.node.clone(), p);
                    }
                }
                Decl::System(s) => {
                    if let Some(s2) = system(s, &mut errs) {
                        m.systems.insert(s.name.node.clone(), s2);
                    }
                }
                _ => {}
            }
        }
        for d in &decls {
            if let Decl::Channel(c) = d {
                if let Some(spec) = m.channel(c, &mut errs) {
                    m.channels.insert(c.name.node.clone(), spec);
                }
            }
        }
        for d in &decls {
            if let Decl::Protocol(p) = d {
                if let Some(def) = m.protocol_def(p, &mut errs) {
                    m.protocols.insert(p.name.node.clone(), def);
                }
            }
        }
        for d in &decls {
            if let Decl::Rules(r) = d {
                if let Some(def) = m.rules_def(r, &mut errs) {
                    m.rules.insert(r.name.node.clone(), def);
                }
            }
        }
        for d in &decls {
            if let Decl::Process(p) = d {
                if let Some(def) = m.process_def(p, &mut errs) {
                    m.processes.insert(p.name.node.clone(), def);
                }
            }
        }
        if errs.0.is_empty() {
            Ok(m)
        } else {
            errs.0.sort_by_key(|e| e.span.start);
            Err(errs.0)
        }
    }

    /// The kinds under which `name` is declared.
    pub fn kinds_of(&self, name: &str) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.automata.contains_key(name) {
            v.push("automaton");
        }
        if self.systems.contains_key(name) {
            v.push("system");
        }
        if self.channels.contains_key(name) {
            v.push("channel");
        }
        if self.protocols.contains_key(name) {
            v.push("protocol");
        }
        if self.rules.contains_key(name) {
            v.push("rules");
        }
        if self.processes.contains_key(name) {
            v.push("process");
        }
        v
    }

    pub fn automaton(&self, name: &str) -> Result<&Nioa, ModelError> {
        self.automata
            .get(name)
            .ok_or_else(|| unknown("automaton", name))
    }

    pub fn system(&self, name: &str) -> Result<&SystemSpec, ModelError> {
        self.systems
            .get(name)
            .ok_or_else(|| unknown("system", name))
    }

    fn roles(&self, names: &[String]) -> Result<Vec<Nioa>, ModelError> {
        names.iter().map(|n| self.automaton(n).cloned()).collect()
    }

    pub fn protocol(&self, name: &str, mut opts: ProtocolOptions) -> Result<Protocol, ModelError> {
        let def = self
            .protocols
            .get(name)
            .ok_or_else(|| unknown("protocol", name))?;
        opts.tree |= def.tree;
        Ok(build_protocol(
            name,
            self.roles(&def.roles)?,
            &def.channels,
            opts,
        )?)
    }

    /// The product of a rule set's roles, before restriction.
    pub fn rules_product(&self, name: &str) -> Result<(Nioa, Vec<Nioa>), ModelError> {
        let def = self.rules.get(name).ok_or_else(|| unknown("rules", name))?;
        let roles = self.roles(&def.roles)?;
        let product = weakly_synchronized_product(&roles, ProductOptions::default())?;
        Ok((product, roles))
    }

    pub fn coordinated(&self, name: &str) -> Result<CoordinatedAutomaton, ModelError> {
        let (product, roles) = self.rules_product(name)?;
        Ok(apply_rules(&product, &roles, &self.rules[name].rules)?)
    }

    pub fn process(&self, name: &str) -> Result<ProcessSpec, ModelError> {
        let def = self
            .processes
            .get(name)
            .ok_or_else(|| unknown("process", name))?;
        let c = self.coordinated(&def.coordinate)?;
        Ok(ProcessSpec::from_coordinated(
            name,
            &c,
            def.bindings.clone(),
        )?)
    }

    fn channel(&self, c: &ChannelDecl, errs: &mut Errors) -> Option<ChannelSpec> {
        let mut ok = true;
        for ((role, port), outgoing) in [(&c.from, true), (&c.to, false)] {
            let Some(a) = self.automata.get(role.as_str()) else {
                errs.at(role.span, format!("unknown automaton {}", role.node));
                ok = false;
                continue;
            };
            let found = if outgoing {
                a.output_index(port)
            } else {
                a.input_index(port)
            };
            if found.is_none() {
                let dir = if outgoing { "output" } else { "input" };
                errs.at(
                    port.span,
                    format!("{} has no {dir} port {}", role.node, port.node),
                );
                ok = false;
            }
        }
        ok.then(|| ChannelSpec::new(&c.name, (&c.from.0, &c.from.1), (&c.to.0, &c.to.1)))
    }

    fn protocol_def(&self, p: &ProtocolDecl, errs: &mut Errors) -> Option<ProtocolDef> {
        let before = errs.0.len();
        let roles: Vec<String> = p.roles.iter().map(|r| r.node.clone()).collect();
        if roles.is_empty() {
            errs.at(
                p.name.span,
                format!("protocol {} has no roles", p.name.node),
            );
        }
        for r in &p.roles {
            if !self.automata.contains_key(r.as_str()) {
                errs.at(r.span, format!("unknown automaton {}", r.node));
            }
        }
        let mut channels = Vec::new();
        for c in &p.channels {
            match self.channels.get(c.as_str()) {
                None => errs.at(c.span, format!("unknown channel {}", c.node)),
                Some(spec) => {
                    for role in [&spec.from_role, &spec.to_role] {
                        if !roles.contains(role) {
                            errs.at(
                                c.span,
                                format!("channel {} connects {role}, which is not a role", c.node),
                            );
                        }
                    }
                    channels.push(spec.clone());
                }
            }
        }
        (errs.0.len() == before).then(|| ProtocolDef {
            name: p.name.node.clone(),
            roles,
            channels,
            tree: p.tree,
        })
    }

    fn rules_def(&self, r: &RulesDecl, errs: &mut Errors) -> Option<RulesDef> {
        let before = errs.0.len();
        let roles: Vec<String> = r.roles.iter().map(|x| x.node.clone()).collect();
        for x in &r.roles {
            if !self.automata.contains_key(x.as_str()) {
                errs.at(x.span, format!("unknown automaton {}", x.node));
            }
        }
        if errs.0.len() > before {
            return None;
        }
        let role = |name: &Ident, errs: &mut Errors| {
            if roles.contains(&name.node) {
                Some(&self.automata[name.as_str()])
            } else {
                errs.at(
                    name.span,
                    format!("{} is not a role of {}", name.node, r.name.node),
                );
                None
            }
        };
        let mut rules = Vec::new();
        for rd in &r.rules {
            let mut rule = CoordinationRule::new(&rd.name);
            for g in &rd.when {
                if let Some(a) = role(&g.role, errs) {
                    if !a.states.contains(&StateId::from(g.state.as_str())) {
                        errs.at(
                            g.state.span,
                            format!("{} has no state {}", g.role.node, g.state.node),
                        );
                    }
                }
                rule.when.push(Guard {
                    role: g.role.node.clone(),
                    op: if g.negated { GuardOp::Ne } else { GuardOp::Eq },
                    state: g.state.as_str().into(),
                });
            }
            match &rd.on {
                None => {}
                Some(OnDecl::Eps) => rule.on = Some(InputClass::Eps),
                Some(OnDecl::Symbol(p)) => {
                    if let [ro, port, sym] = p.node.as_slice() {
                        let ok = self.automata.get(ro.as_str()).is_some_and(|a| {
                            roles.contains(ro)
                                && a.inputs.iter().any(|x| {
                                    &x.name == port && x.symbols.iter().any(|s| s.as_str() == sym)
                                })
                        });
                        if !ok {
                            errs.at(p.span, format!("no input class {}", joined(p)));
                        }
                        rule.on = Some(InputClass::Symbol {
                            port: format!("{ro}.{port}"),
                            symbol: Symbol::from(sym.as_str()),
                        });
                    } else {
                        errs.at(p.span, "input class must be Role.port.symbol");
                    }
                }
            }
            for f in &rd.forbid {
                if let [ro, label] = f.node.as_slice() {
                    let ok = roles.contains(ro)
                        && self.automata[ro.as_str()]
                            .transitions
                            .iter()
                            .any(|t| &t.label == label);
                    if !ok {
                        errs.at(f.span, format!("no transition class {}", joined(f)));
                    }
                    rule.forbid.insert(joined(f));
                } else {
                    errs.at(f.span, "transition class must be Role.label");
                }
            }
            rules.push(rule);
        }
        (errs.0.len() == before).then(|| RulesDef {
            name: r.name.node.clone(),
            roles,
            rules,
        })
    }

    fn process_def(&self, p: &ProcessDecl, errs: &mut Errors) -> Option<ProcessDef> {
        let before = errs.0.len();
        let Some(c) = &p.coordinate else {
            errs.at(
                p.name.span,
                format!("process {} names no rule set", p.name.node),
            );
            return None;
        };
        let Some(rules) = self.rules.get(c.as_str()) else {
            errs.at(c.span, format!("unknown rules {}", c.node));
            return None;
        };
        let mut bindings = BTreeMap::new();
        for b in &p.bindings {
            if !rules.roles.contains(&b.role.node) {
                errs.at(
                    b.role.span,
                    format!("{} is not a role of {}", b.role.node, c.node),
                );
            }
            match self.protocols.get(b.protocol.as_str()) {
                None => errs.at(
                    b.protocol.span,
                    format!("unknown protocol {}", b.protocol.node),
                ),
                Some(def) if !def.roles.contains(&b.role.node) => errs.at(
                    b.protocol.span,
                    format!(
                        "{} is not a role of protocol {}",
                        b.role.node, b.protocol.node
                    ),
                ),
                Some(_) => {}
            }
            let binding = Binding {
                protocol: b.protocol.node.clone(),
                counterparty: b.counterparty.node.clone(),
            };
            if bindings.insert(b.role.node.clone(), binding).is_some() {
                errs.at(b.role.span, format!("role {} bound twice", b.role.node));
            }
        }
        (errs.0.len() == before).then(|| ProcessDef {
            name: p.name.node.clone(),
            coordinate: c.node.clone(),
            bindings,
        })
    }
}

fn ports(decls: &[Spanned<PortDecl>]) -> Vec<Port> {
    decls
        .iter()
        .map(|p| Port::new(p.name.as_str(), p.symbols.iter().map(|s| s.as_str())))
        .collect()
}

fn vector(items: &[IoItem], ports: &[Port], dir: &str, errs: &mut Errors) -> Option<IoVector> {
    let mut v = IoVector::eps(ports.len());
    let mut ok = true;
    for (port, sym) in items {
        let Some(k) = ports.iter().position(|p| p.name == port.node) else {
            errs.at(port.span, format!("undeclared {dir} port {}", port.node));
            ok = false;
            continue;
        };
        if !ports[k].symbols.iter().any(|s| s.as_str() == sym.as_str()) {
            errs.at(
                sym.span,
                format!("{} is not a symbol of port {}", sym.node, port.node),
            );
            ok = false;
        }
        if v.0[k].is_some() {
            errs.at(port.span, format!("port {} used twice", port.node));
            ok = false;
        }
        v.0[k] = Some(Symbol::from(sym.as_str()));
    }
    ok.then_some(v)
}

fn acceptance(a: &Option<Spanned<AcceptDecl>>, map: impl Fn(&str) -> Vec<StateId>) -> Acceptance {
    match a.as_ref().map(|a| &a.node) {
        None => Acceptance::Finite(BTreeSet::new()),
        Some(AcceptDecl::Finite(v)) => Acceptance::Finite(v.iter().flat_map(|s| map(s)).collect()),
        Some(AcceptDecl::Muller(sets)) => Acceptance::Muller(
            sets.iter()
                .map(|s| s.iter().flat_map(|x| map(x)).collect())
                .collect(),
        ),
    }
}

fn check_valid(a: &Nioa, at: Span, errs: &mut Errors) -> bool {
    let report = validate(a);
    for v in &report.violations {
        errs.at(at, format!("automaton {}: {}", a.name, v.message));
    }
    report.is_ok()
}

fn automaton(d: &AutomatonDecl, errs: &mut Errors) -> Option<Nioa> {
    let before = errs.0.len();
    let Some(initial) = &d.initial else {
        errs.at(
            d.name.span,
            format!("automaton {} has no initial state", d.name.node),
        );
        return None;
    };
    let declared: Option<BTreeSet<&str>> = d
        .states
        .as_ref()
        .map(|v| v.iter().map(|s| s.as_str()).collect());
    let check_state = |q: &Ident, errs: &mut Errors| {
        if declared.as_ref().is_some_and(|s| !s.contains(q.as_str())) {
            errs.at(q.span, format!("undeclared state {}", q.node));
        }
    };
    check_state(initial, errs);
    let mut a = Nioa::new(d.name.node.clone(), initial.as_str());
    a.inputs = ports(&d.inputs);
    a.outputs = ports(&d.outputs);
    if let Some(s) = &d.states {
        a.states.extend(s.iter().map(|q| StateId::from(q.as_str())));
    }
    if let Some(acc) = &d.accept {
        let states: Vec<&Ident> = match &acc.node {
            AcceptDecl::Finite(v) => v.iter().collect(),
            AcceptDecl::Muller(sets) => sets.iter().flatten().collect(),
        };
        for q in states {
            check_state(q, errs);
        }
    }
    a.acceptance = acceptance(&d.accept, |q| vec![StateId::from(q)]);
    for t in &d.transitions {
        check_state(&t.from, errs);
        check_state(&t.to, errs);
        let input = vector(&t.input, &a.inputs, "input", errs);
        let output = vector(&t.output, &a.outputs, "output", errs);
        if let (Some(input), Some(output)) = (input, output) {
            a.states.insert(t.from.as_str().into());
            a.states.insert(t.to.as_str().into());
            a.transitions.push(Transition::new(
                t.label.as_str(),
                t.from.as_str(),
                t.to.as_str(),
                input,
                output,
            ));
        }
    }
    if errs.0.len() > before || !check_valid(&a, d.name.span, errs) {
        return None;
    }
    Some(a)
}

/// Expand the class transitions of an extended automaton into single
/// transitions over `(mode|rest)` states. The rest component is kept.
fn extended(d: &ExtendedDecl, errs: &mut Errors) -> Option<(Nioa, TransitionPartition)> {
    let before = errs.0.len();
    let modes: BTreeSet<&str> = d.modes.iter().map(|m| m.as_str()).collect();
    let rests: Vec<&str> = if d.rest.is_empty() {
        vec![""]
    } else {
        d.rest.iter().map(|r| r.as_str()).collect()
    };
    let state = |m: &str, r: &str| {
        if r.is_empty() {
            StateId::from(m)
        } else {
            tuple_id(&[StateId::from(m), StateId::from(r)])
        }
    };
    let check_mode = |m: &Ident, errs: &mut Errors| {
        if !modes.contains(m.as_str()) {
            errs.at(m.span, format!("undeclared mode {}", m.node));
        }
    };
    if d.modes.is_empty() {
        errs.at(
            d.name.span,
            format!("extended automaton {} has no modes", d.name.node),
        );
    }
    if !d.conditions.is_empty() && d.rest.is_empty() {
        errs.at(d.name.span, "conditions need a rest clause");
    }
    let Some((init_mode, init_rest)) = &d.initial else {
        errs.at(
            d.name.span,
            format!("automaton {} has no initial state", d.name.node),
        );
        return None;
    };
    check_mode(init_mode, errs);
    if let Some(r) = init_rest {
        if !d.rest.iter().any(|x| x.node == r.node) {
            errs.at(r.span, format!("undeclared rest value {}", r.node));
        }
    }
    let mut classes: BTreeMap<&str, ClassPorts> = BTreeMap::new();
    let mut partition = TransitionPartition::default();
    let mut side_ports = [Vec::new(), Vec::new()];
    for (side, decls) in [(0usize, &d.inputs), (1, &d.outputs)] {
        for (k, p) in decls.iter().enumerate() {
            let mut syms = Vec::new();
            for c in &p.classes {
                let members: Vec<(Symbol, String)> = if c.params.is_empty() {
                    vec![(Symbol::from(c.class.as_str()), String::new())]
                } else {
                    c.params
                        .iter()
                        .map(|x| {
                            (
                                Symbol::from(format!("{}:{}", c.class.node, x.node)),
                                x.node.clone(),
                            )
                        })
                        .collect()
                };
                for (s, param) in &members {
                    partition.documents.insert(
                        s.clone(),
                        DocAssignment {
                            class: c.class.node.clone(),
                            param: param.clone(),
                        },
                    );
                    syms.push(s.clone());
                }
                if classes.insert(&c.class, (side == 0, k, members)).is_some() {
                    errs.at(
                        c.class.span,
                        format!("document class {} declared twice", c.class.node),
                    );
                }
            }
            side_ports[side].push(Port::new(p.name.as_str(), syms));
        }
    }
    let [inputs, outputs] = side_ports;
    for c in &d.conditions {
        match classes.get(c.on.as_str()) {
            Some((true, _, members)) => {
                for (r, p) in &c.holds {
                    if !d.rest.iter().any(|x| x.node == r.node) {
                        errs.at(r.span, format!("undeclared rest value {}", r.node));
                    }
                    if !members.iter().any(|(_, param)| param == &p.node) {
                        errs.at(
                            p.span,
                            format!("{} carries no parameter {}", c.on.node, p.node),
                        );
                    }
                }
            }
            _ => errs.at(c.on.span, format!("no input document class {}", c.on.node)),
        }
        partition.conditions.push(Condition {
            name: c.name.node.clone(),
            applies_to: c.on.node.clone(),
            holds: c
                .holds
                .iter()
                .map(|(r, p)| (r.node.clone(), p.node.clone()))
                .collect(),
        });
    }
    let initial = state(
        init_mode,
        init_rest.as_ref().map_or(rests[0], |r| r.as_str()),
    );
    let mut a = Nioa::new(d.name.node.clone(), initial);
    a.inputs = inputs;
    a.outputs = outputs;
    for m in &modes {
        for r in &rests {
            let q = state(m, r);
            partition
                .modes
                .insert(q.clone(), (m.to_string(), r.to_string()));
            a.states.insert(q);
        }
    }
    if let Some(acc) = &d.accept {
        let listed: Vec<&Ident> = match &acc.node {
            AcceptDecl::Finite(v) => v.iter().collect(),
            AcceptDecl::Muller(sets) => sets.iter().flatten().collect(),
        };
        for m in listed {
            check_mode(m, errs);
        }
    }
    a.acceptance = acceptance(&d.accept, |m| rests.iter().map(|r| state(m, r)).collect());
    for t in &d.transitions {
        check_mode(&t.from, errs);
        check_mode(&t.to, errs);
        let side = |c: &Option<Ident>, input: bool, errs: &mut Errors| match c {
            None => Some(None),
            Some(c) => match classes.get(c.as_str()) {
                Some((i, k, members)) if *i == input => Some(Some((*k, members.clone()))),
                _ => {
                    let dir = if input { "input" } else { "output" };
                    errs.at(c.span, format!("no {dir} document class {}", c.node));
                    None
                }
            },
        };
        let (Some(input), Some(output)) =
            (side(&t.input, true, errs), side(&t.output, false, errs))
        else {
            continue;
        };
        let cond = match &t.when {
            None => None,
            Some((holds, name)) => {
                let c = d.conditions.iter().find(|c| c.name.node == name.node);
                match c {
                    Some(c) if t.input.as_ref().is_some_and(|i| i.node == c.on.node) => Some((
                        *holds,
                        &partition.conditions[d
                            .conditions
                            .iter()
                            .position(|x| x.name.node == name.node)
                            .unwrap_or(0)],
                        c,
                    )),
                    _ => {
                        errs.at(
                            name.span,
                            format!("no condition {} on this input class", name.node),
                        );
                        continue;
                    }
                }
            }
        };
        let ins: Vec<Option<(usize, Symbol, String)>> = match &input {
            None => vec![None],
            Some((k, members)) => members
                .iter()
                .map(|(s, p)| Some((*k, s.clone(), p.clone())))
                .collect(),
        };
        let outs: Vec<Option<(usize, Symbol)>> = match &output {
            None => vec![None],
            Some((k, members)) => members.iter().map(|(s, _)| Some((*k, s.clone()))).collect(),
        };
        for r in &rests {
            for i in &ins {
                if let (Some((want, c, _)), Some((_, _, param))) = (&cond, i) {
                    if c.holds.contains(&(r.to_string(), param.clone())) != *want {
                        continue;
                    }
                }
                for o in &outs {
                    let mut iv = IoVector::eps(a.inputs.len());
                    if let Some((k, s, _)) = i {
                        iv.0[*k] = Some(s.clone());
                    }
                    let mut ov = IoVector::eps(a.outputs.len());
                    if let Some((k, s)) = o {
                        ov.0[*k] = Some(s.clone());
                    }
                    a.transitions.push(Transition::new(
                        t.label.as_str(),
                        state(&t.from, r).as_str(),
                        state(&t.to, r).as_str(),
                        iv,
                        ov,
                    ));
                }
            }
        }
    }
    if errs.0.len() > before || !check_valid(&a, d.name.span, errs) {
        return None;
    }
    Some((a, partition))
}

fn system(d: &SystemDecl, errs: &mut Errors) -> Option<SystemSpec> {
    let before = errs.0.len();
    let Some(initial) = &d.initial else {
        errs.at(
            d.name.span,
            format!("system {} has no initial state", d.name.node),
        );
        return None;
    };
    let clocking = if d.clocked {
        Clocking::Clocked
    } else {
        Clocking::Unclocked
    };
    let mut s = SystemSpec::new(d.name.node.clone(), clocking, initial.as_str());
    let listed = |v: &Option<Vec<Ident>>| -> Option<BTreeSet<String>> {
        v.as_ref()
            .map(|v| v.iter().map(|x| x.node.clone()).collect())
    };
    let (states, inputs, outputs) = (listed(&d.states), listed(&d.inputs), listed(&d.outputs));
    let member = |set: &Option<BTreeSet<String>>, x: &Ident, what: &str, errs: &mut Errors| {
        if set.as_ref().is_some_and(|s| !s.contains(&x.node)) {
            errs.at(x.span, format!("undeclared {what} {}", x.node));
        }
    };
    member(&states, initial, "state", errs);
    if let Some(v) = &states {
        s.states.extend(v.iter().map(|q| StateId::from(q.as_str())));
    }
    if let Some(v) = &inputs {
        s.inputs.extend(v.iter().map(|q| Symbol::from(q.as_str())));
    }
    if let Some(v) = &outputs {
        s.outputs.extend(v.iter().map(|q| Symbol::from(q.as_str())));
    }
    let mut keys = BTreeSet::new();
    for e in &d.entries {
        member(&states, &e.state, "state", errs);
        member(&states, &e.next, "state", errs);
        if let Some(i) = &e.input {
            member(&inputs, i, "input", errs);
        }
        if let Some(o) = &e.output {
            member(&outputs, o, "output", errs);
        }
        if !keys.insert((
            e.state.node.clone(),
            e.input.as_ref().map(|i| i.node.clone()),
        )) {
            errs.at(e.span, format!("f({}, ...) defined twice", e.state.node));
        }
        s.insert(
            e.state.as_str().into(),
            e.input.as_ref().map(|i| Symbol::from(i.as_str())),
            e.next.as_str().into(),
            e.output.as_ref().map(|o| Symbol::from(o.as_str())),
        );
    }
    if errs.0.len() > before {
        return None;
    }
    if let Err(e) = s.validate() {
        errs.at(d.name.span, e.to_string());
        return None;
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use crate::partition::partition_transitions;

    fn model(src: &str) -> Result<Model, Vec<DslError>> {
        Model::from_document(&parse(src).unwrap())
    }

    #[test]
    fn undeclared_port_has_span() {
        let src = "automaton A { initial a; out x: {m};\n  t: a -[eps / out y.m]-> a; }";
        let errs = model(src).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ErrorKind::Resolution);
        assert_eq!((errs[0].span.line, errs[0].span.column), (2, 20));
        assert!(errs[0].message.contains("undeclared output port y"));
    }

    #[test]
    fn duplicate_names_per_kind() {
        let errs =
            model("automaton A { initial a; } automaton A { initial b; } system A { initial q; }")
                .unwrap_err();
        assert_eq!(errs.len(), 1);
    }

    #[test]
    fn systems_must_be_total() {
        let ok = model("system t { initial q0; f(q0, a) = (q1, z); f(q1, a) = (q0, z); }").unwrap();
        assert_eq!(ok.systems["t"].table.len(), 2);
        let errs = model("system t { initial q0; f(q0, a) = (q1, z); }").unwrap_err();
        assert!(errs[0].message.contains("undefined"));
    }

    #[test]
    fn seller_class_expands_to_one_partition_class() {
        let src = "extended automaton Seller {
            modes listening, ordered;
            rest trusted, unknown;
            initial listening rest unknown;
            accept finite {ordered};
            in order: Order[alice, bob];
            out conf: Confirmation;
            cond isTrustworthy on Order holds {(trusted, alice), (trusted, bob), (unknown, alice)};
            confirm: listening -[Order when isTrustworthy / Confirmation]-> ordered;
        }";
        let m = model(src).unwrap();
        let a = &m.automata["Seller"];
        // (trusted, alice), (trusted, bob), (unknown, alice)
        assert_eq!(a.transitions.len(), 3);
        let classes = partition_transitions(a, &m.partitions["Seller"]).unwrap();
        let keys: Vec<String> = classes.keys().map(|k| k.to_string()).collect();
        assert_eq!(
            keys,
            ["listening -[Order when isTrustworthy / Confirmation]-> ordered"]
        );
        assert!(a.is_accepting(&"(ordered|unknown)".into()));
    }

    #[test]
    fn rules_and_processes_resolve() {
        let src = "
            automaton A { initial a0; out x: {m}; s: a0 -[eps / out x.m]-> a1; }
            automaton B { initial b0; in y: {m}; r: b0 -[in y.m / eps]-> b1; }
            channel c: A.x -> B.y;
            protocol P { roles A, B; channels c; }
            rules R for A, B { rule r1 { when A = a1; on B.y.m; forbid B.r; } }
            process p { coordinate R; bind A: P with q; bind B: P with w; }
        ";
        let m = model(src).unwrap();
        assert_eq!(m.rules["R"].rules[0].forbid.iter().next().unwrap(), "B.r");
        assert_eq!(m.processes["p"].bindings.len(), 2);
        let bad = model(&src.replace("forbid B.r", "forbid B.nope")).unwrap_err();
        assert!(bad[0].message.contains("no transition class B.nope"));
        let p = m.protocol("P", ProtocolOptions::default()).unwrap();
        assert_eq!(p.cbr.states.len(), 3);
    }
}
