use serde::Serialize;

use super::{Spanned, FORMAT_VERSION};

pub type Ident = Spanned<String>;

/// A dotted name such as `Payer.pay` or `Buyer.conf.Confirmation`.
pub type Path = Spanned<Vec<String>>;

pub fn joined(p: &Path) -> String {
    p.node.join(".")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Document {
    pub format: u32,
    pub decls: Vec<Spanned<Decl>>,
}

impl Default for Document {
    fn default() -> Self {
        Self {
            format: FORMAT_VERSION,
            decls: Vec::new(),
        }
    }
}

impl Document {
    pub fn count(&self, kind: &str) -> usize {
        self.decls.iter().filter(|d| d.kind() == kind).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Decl {
    Automaton(AutomatonDecl),
    Extended(ExtendedDecl),
    System(SystemDecl),
    Channel(ChannelDecl),
    Protocol(ProtocolDecl),
    Rules(RulesDecl),
    Process(ProcessDecl),
}

impl Decl {
    pub fn kind(&self) -> &'static str {
        match self {
            // Extended automata share the automaton namespace.
            Decl::Automaton(_) | Decl::Extended(_) => "automaton",
            Decl::System(_) => "system",
            Decl::Channel(_) => "channel",
            Decl::Protocol(_) => "protocol",
            Decl::Rules(_) => "rules",
            Decl::Process(_) => "process",
        }
    }

    pub fn name(&self) -> &Ident {
        match self {
            Decl::Automaton(d) => &d.name,
            Decl::Extended(d) => &d.name,
            Decl::System(d) => &d.name,
            Decl::Channel(d) => &d.name,
            Decl::Protocol(d) => &d.name,
            Decl::Rules(d) => &d.name,
            Decl::Process(d) => &d.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AcceptDecl {
    Finite(Vec<Ident>),
    Muller(Vec<Vec<Ident>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortDecl {
    pub name: Ident,
    pub symbols: Vec<Ident>,
}

/// `(port, symbol)`
pub type IoItem = (Ident, Ident);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionDecl {
    pub label: Ident,
    pub from: Ident,
    pub input: Vec<IoItem>,
    pub output: Vec<IoItem>,
    pub to: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomatonDecl {
    pub name: Ident,
    pub states: Option<Vec<Ident>>,
    pub initial: Option<Ident>,
    pub accept: Option<Spanned<AcceptDecl>>,
    pub inputs: Vec<Spanned<PortDecl>>,
    pub outputs: Vec<Spanned<PortDecl>>,
    pub transitions: Vec<Spanned<TransitionDecl>>,
}

impl AutomatonDecl {
    pub fn new(name: Ident) -> Self {
        Self {
            name,
            states: None,
            initial: None,
            accept: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            transitions: Vec::new(),
        }
    }
}

/// A document class on a port, with the parameter values it may carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocClassDecl {
    pub class: Ident,
    pub params: Vec<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocPortDecl {
    pub name: Ident,
    pub classes: Vec<DocClassDecl>,
}

/// `cond NAME on CLASS holds {(rest, param), ...};`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionDecl {
    pub name: Ident,
    pub on: Ident,
    pub holds: Vec<(Ident, Ident)>,
}

/// `label: MODE -[Class when cond / Class']-> MODE';`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassTransitionDecl {
    pub label: Ident,
    pub from: Ident,
    pub input: Option<Ident>,
    /// `(holds, condition)`; `when !c` has `holds = false`.
    pub when: Option<(bool, Ident)>,
    pub output: Option<Ident>,
    pub to: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedDecl {
    pub name: Ident,
    pub modes: Vec<Ident>,
    pub rest: Vec<Ident>,
    pub initial: Option<(Ident, Option<Ident>)>,
    /// Over modes; every rest value of an accepting mode accepts.
    pub accept: Option<Spanned<AcceptDecl>>,
    pub inputs: Vec<Spanned<DocPortDecl>>,
    pub outputs: Vec<Spanned<DocPortDecl>>,
    pub conditions: Vec<Spanned<ConditionDecl>>,
    pub transitions: Vec<Spanned<ClassTransitionDecl>>,
}

impl ExtendedDecl {
    pub fn new(name: Ident) -> Self {
        Self {
            name,
            modes: Vec::new(),
            rest: Vec::new(),
            initial: None,
            accept: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            conditions: Vec::new(),
            transitions: Vec::new(),
        }
    }
}

/// `f(q, i) = (q', o);`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryDecl {
    pub state: Ident,
    pub input: Option<Ident>,
    pub next: Ident,
    pub output: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemDecl {
    pub name: Ident,
    pub clocked: bool,
    pub initial: Option<Ident>,
    pub states: Option<Vec<Ident>>,
    pub inputs: Option<Vec<Ident>>,
    pub outputs: Option<Vec<Ident>>,
    pub entries: Vec<Spanned<EntryDecl>>,
}

impl SystemDecl {
    pub fn new(name: Ident) -> Self {
        Self {
            name,
            clocked: false,
            initial: None,
            states: None,
            inputs: None,
            outputs: None,
            entries: Vec::new(),
        }
    }
}

/// `channel NAME: Role.port -> Role.port;`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChannelDecl {
    pub name: Ident,
    pub from: (Ident, Ident),
    pub to: (Ident, Ident),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtocolDecl {
    pub name: Ident,
    pub roles: Vec<Ident>,
    pub channels: Vec<Ident>,
    pub tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuardDecl {
    pub role: Ident,
    pub negated: bool,
    pub state: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OnDecl {
    Eps,
    /// `Role.port.symbol`
    Symbol(Path),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleDecl {
    pub name: Ident,
    pub when: Vec<GuardDecl>,
    pub on: Option<OnDecl>,
    pub forbid: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RulesDecl {
    pub name: Ident,
    pub roles: Vec<Ident>,
    pub rules: Vec<Spanned<RuleDecl>>,
}

/// `bind Role: protocol with counterparty;`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BindDecl {
    pub role: Ident,
    pub protocol: Ident,
    pub counterparty: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessDecl {
    pub name: Ident,
    pub coordinate: Option<Ident>,
    pub bindings: Vec<Spanned<BindDecl>>,
}
