//! Weakly synchronized product of I/O automata.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{Acceptance, IoVector, Nioa, Port, ProductInfo, Transition};
use crate::ids::{tuple_id, StateId};

pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("no factor automata given")]
    Empty,
    #[error("alphabet collision: port `{0}` is declared by more than one factor")]
    AlphabetCollision(String),
    #[error("product exceeds the state cap of {0}")]
    CapExceeded(usize),
}

/// How factor ports are named in the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PortNaming {
    /// `factor.port`; never collides for distinct factor names.
    #[default]
    Qualified,
    /// Keep the factor's port names; clashing names are an error.
    Merged,
}

#[derive(Debug, Clone, Copy)]
pub struct ProductOptions {
    pub naming: PortNaming,
    pub cap: usize,
}

impl Default for ProductOptions {
    fn default() -> Self {
        Self {
            naming: PortNaming::Qualified,
            cap: DEFAULT_PRODUCT_CAP,
        }
    }
}

/// Product ports with the owning factor of each and each factor's offset.
type PortLayout = (Vec<Port>, Vec<usize>, Vec<usize>);

fn ports(
    factors: &[Nioa],
    naming: PortNaming,
    pick: impl Fn(&Nioa) -> &[Port],
) -> Result<PortLayout, ProductError> {
    let mut out = Vec::new();
    let mut owner = Vec::new();
    let mut offset = Vec::new();
    let mut names = BTreeSet::new();
    for (k, f) in factors.iter().enumerate() {
        offset.push(out.len());
        for p in pick(f) {
            let name = match naming {
                PortNaming::Qualified => format!("{}.{}", f.name, p.name),
                PortNaming::Merged => p.name.clone(),
            };
            if !names.insert(name.clone()) {
                return Err(ProductError::AlphabetCollision(name));
            }
            out.push(Port {
                name,
                symbols: p.symbols.clone(),
            });
            owner.push(k);
        }
    }
    Ok((out, owner, offset))
}

/// Build `⊗ A_k` over the reachable state vectors. Each product transition
/// moves exactly one factor, carrying that factor's input and output at the
/// factor's own positions and ε everywhere else.
pub fn weakly_synchronized_product(
    factors: &[Nioa],
    opts: ProductOptions,
) -> Result<Nioa, ProductError> {
    if factors.is_empty() {
        return Err(ProductError::Empty);
    }
    let (inputs, input_owner, in_offset) = ports(factors, opts.naming, |f| &f.inputs)?;
    let (outputs, output_owner, out_offset) = ports(factors, opts.naming, |f| &f.outputs)?;
    let outgoing: Vec<_> = factors.iter().map(Nioa::outgoing).collect();

    let init: Vec<StateId> = factors.iter().map(|f| f.initial.clone()).collect();
    let mut ids: BTreeMap<Vec<StateId>, StateId> = BTreeMap::new();
    ids.insert(init.clone(), tuple_id(&init));
    let mut queue = VecDeque::from([init.clone()]);
    let mut transitions = Vec::new();

    while let Some(vec) = queue.pop_front() {
        let from = ids[&vec].clone();
        for (k, f) in factors.iter().enumerate() {
            let Some(idx) = outgoing[k].get(&vec[k]) else {
                continue;
            };
            for &i in idx {
                let t = &f.transitions[i];
                let mut next = vec.clone();
                next[k] = t.to.clone();
                let to = match ids.get(&next) {
                    Some(id) => id.clone(),
                    None => {
                        if ids.len() >= opts.cap {
                            return Err(ProductError::CapExceeded(opts.cap));
                        }
                        let id = tuple_id(&next);
                        ids.insert(next.clone(), id.clone());
                        queue.push_back(next);
                        id
                    }
                };
                transitions.push(Transition {
                    label: format!("{}.{}", f.name, t.label),
                    from: from.clone(),
                    to,
                    input: lift(&t.input, inputs.len(), in_offset[k]),
                    output: lift(&t.output, outputs.len(), out_offset[k]),
                });
            }
        }
    }

    let parts: BTreeMap<StateId, Vec<StateId>> =
        ids.iter().map(|(v, id)| (id.clone(), v.clone())).collect();
    let parts = Arc::new(parts);
    let names: Vec<&str> = factors.iter().map(|f| f.name.as_str()).collect();
    let mut product = Nioa {
        name: names.join("*"),
        states: parts.keys().cloned().collect(),
        inputs,
        outputs,
        initial: tuple_id(&init),
        acceptance: Acceptance::Conjunction {
            factors: factors.iter().map(|f| f.acceptance.clone()).collect(),
            parts: parts.clone(),
        },
        transitions,
        product: Some(Arc::new(ProductInfo {
            factor_names: factors.iter().map(|f| f.name.clone()).collect(),
            parts,
            input_owner,
            output_owner,
        })),
    };
    // Silent self-loops of different factors share a key; their labels keep
    // them apart so every factor transition survives in the product.
    product.transitions.sort_by(|a, b| {
        (&a.from, &a.input, &a.output, &a.to, &a.label)
            .cmp(&(&b.from, &b.input, &b.output, &b.to, &b.label))
    });
    Ok(product)
}

fn lift(v: &IoVector, width: usize, offset: usize) -> IoVector {
    let mut out = IoVector::eps(width);
    for (j, s) in v.0.iter().enumerate() {
        out.0[offset + j] = s.clone();
    }
    out
}
