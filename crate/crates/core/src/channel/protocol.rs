//! Protocols: closed CBR products of role automata.

use serde::Serialize;

use crate::automaton::Nioa;
use crate::product::{weakly_synchronized_product, ProductOptions};

use super::{
    explore, is_linear_executable, CbrAutomaton, CbrOptions, ChannelError, ShannonChannel,
    DEFAULT_CBR_CAP,
};

/// A channel named by role and component, `from_role.from_port -> to_role.to_port`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChannelSpec {
    pub name: String,
    pub from_role: String,
    pub from_port: String,
    pub to_role: String,
    pub to_port: String,
}

impl ChannelSpec {
    pub fn new(name: &str, from: (&str, &str), to: (&str, &str)) -> Self {
        Self {
            name: name.into(),
            from_role: from.0.into(),
            from_port: from.1.into(),
            to_role: to.0.into(),
            to_port: to.1.into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProtocolOptions {
    pub cap: usize,
    pub tree: bool,
    pub product: ProductOptions,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CBR_CAP,
            tree: false,
            product: ProductOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Protocol {
    pub name: String,
    pub roles: Vec<Nioa>,
    pub channels: Vec<ChannelSpec>,
    pub product: Nioa,
    pub cbr: CbrAutomaton,
    pub warnings: Vec<String>,
}

impl Protocol {
    pub fn role(&self, name: &str) -> Option<&Nioa> {
        self.roles.iter().find(|r| r.name == name)
    }
}

/// Build the weakly synchronized product of `roles`, resolve and type-check
/// the channels, demand closedness and explore the CBR automaton. A capped
/// exploration is kept; checkers report it as unknown.
pub fn build_protocol(
    name: &str,
    roles: Vec<Nioa>,
    channels: &[ChannelSpec],
    opts: ProtocolOptions,
) -> Result<Protocol, ChannelError> {
    for c in channels {
        for r in [&c.from_role, &c.to_role] {
            if !roles.iter().any(|x| &x.name == r) {
                return Err(ChannelError::UnknownRole(r.clone()));
            }
        }
    }
    let product = weakly_synchronized_product(&roles, opts.product)?;
    let resolved = channels
        .iter()
        .map(|c| {
            ShannonChannel::between(
                &product,
                &c.name,
                &format!("{}.{}", c.from_role, c.from_port),
                &format!("{}.{}", c.to_role, c.to_port),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (k, port) in product.outputs.iter().enumerate() {
        if !resolved.iter().any(|c| c.from == k) {
            return Err(ChannelError::OpenCoupling(port.name.clone()));
        }
    }
    for (l, port) in product.inputs.iter().enumerate() {
        if !resolved.iter().any(|c| c.to == l) {
            return Err(ChannelError::OpenCoupling(port.name.clone()));
        }
    }
    for r in &roles {
        if !channels
            .iter()
            .any(|c| c.from_role == r.name || c.to_role == r.name)
        {
            return Err(ChannelError::Unconnected(r.name.clone()));
        }
    }
    let mut warnings = Vec::new();
    if roles.len() == 1 {
        warnings.push("degenerate: single-party protocol".to_string());
    }
    if !is_linear_executable(&product) {
        let t = product
            .transitions
            .iter()
            .find(|t| t.input.non_eps_count() > 1 || t.output.non_eps_count() > 1)
            .map(|t| t.label.clone())
            .unwrap_or_default();
        if !opts.tree {
            return Err(ChannelError::NonLinear(format!(
                "transition {t} uses several components"
            )));
        }
        warnings.push(format!(
            "not linear-executable (transition {t}); all interleavings explored"
        ));
    }
    let cbr = explore(
        &product,
        &resolved,
        CbrOptions {
            cap: opts.cap,
            tree: opts.tree,
        },
    )?;
    Ok(Protocol {
        name: name.into(),
        roles,
        channels: channels.to_vec(),
        product,
        cbr,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Port;
    use crate::channel::tests::ping_pong;

    pub fn pp_channels() -> Vec<ChannelSpec> {
        vec![
            ChannelSpec::new("ab", ("A", "tx"), ("B", "rx")),
            ChannelSpec::new("ba", ("B", "tx"), ("A", "rx")),
        ]
    }

    #[test]
    fn closed_protocol_builds() {
        let (a, b) = ping_pong();
        let p =
            build_protocol("pp", vec![a, b], &pp_channels(), ProtocolOptions::default()).unwrap();
        assert!(p.warnings.is_empty());
        assert_eq!(p.cbr.states.len(), 5);
    }

    #[test]
    fn open_coupling_names_component() {
        let (a, b) = ping_pong();
        let err = build_protocol(
            "pp",
            vec![a, b],
            &pp_channels()[..1],
            ProtocolOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, ChannelError::OpenCoupling("B.tx".into()));
    }

    #[test]
    fn self_coupling_is_degenerate() {
        let echo = Nioa::new("E", "e0")
            .with_input(Port::new("rx", ["m"]))
            .with_output(Port::new("tx", ["m"]))
            .with_transition("send", "e0", &[], &[("tx", "m")], "e1")
            .with_transition("recv", "e1", &[("rx", "m")], &[], "e0");
        let p = build_protocol(
            "self",
            vec![echo],
            &[ChannelSpec::new("loop", ("E", "tx"), ("E", "rx"))],
            ProtocolOptions::default(),
        )
        .unwrap();
        assert_eq!(
            p.warnings,
            vec!["degenerate: single-party protocol".to_string()]
        );
    }

    #[test]
    fn unknown_role() {
        let (a, b) = ping_pong();
        let err = build_protocol(
            "pp",
            vec![a, b],
            &[ChannelSpec::new("x", ("C", "tx"), ("A", "rx"))],
            ProtocolOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, ChannelError::UnknownRole("C".into()));
    }
}
