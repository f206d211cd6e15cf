use std::fmt::Write as _;

use crate::automaton::Nioa;
use crate::channel::{CbrAutomaton, Protocol};

/// Anything with a state graph worth drawing.
#[derive(Debug, Clone, Copy)]
pub enum DotSource<'a> {
    Automaton(&'a Nioa),
    Cbr(&'a CbrAutomaton),
    Protocol(&'a Protocol),
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A DOT digraph: one node per state in a fixed order, accepting states
/// double-circled, one edge per transition labelled `i/o`.
pub fn export_dot(x: DotSource<'_>) -> String {
    let cbr = match x {
        DotSource::Automaton(a) => return nioa_dot(a),
        DotSource::Cbr(c) => c,
        DotSource::Protocol(p) => &p.cbr,
    };
    let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n", escape(&cbr.base.name));
    for n in 0..cbr.states.len() {
        let shape = if cbr.is_accepting(n) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  n{n} [label=\"{}\", shape={shape}];",
            escape(&cbr.render_state(n))
        );
    }
    for t in &cbr.transitions {
        let b = &cbr.base.transitions[t.base];
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}/{}\"];",
            t.from,
            t.to,
            escape(&cbr.base.render_input(&b.input)),
            escape(&cbr.base.render_output(&b.output))
        );
    }
    out.push_str("}\n");
    out
}

fn nioa_dot(a: &Nioa) -> String {
    let states: Vec<_> = a.states.iter().collect();
    let index = |q| states.iter().position(|s| *s == q).unwrap_or(0);
    let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n", escape(&a.name));
    for (n, q) in states.iter().enumerate() {
        let shape = if a.is_accepting(q) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  n{n} [label=\"{}\", shape={shape}];",
            escape(q.as_str())
        );
    }
    let _ = writeln!(
        out,
        "  init [shape=point];\n  init -> n{};",
        index(&a.initial)
    );
    for t in &a.transitions {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}/{}\"];",
            index(&t.from),
            index(&t.to),
            escape(&a.render_input(&t.input)),
            escape(&a.render_output(&t.output))
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::tests::{ping_pong_cbr, toggle};

    #[test]
    fn toggle_has_two_nodes_and_two_edges() {
        let d = export_dot(DotSource::Automaton(&toggle()));
        assert_eq!(
            d.matches("shape=circle").count() + d.matches("shape=doublecircle").count(),
            2
        );
        assert_eq!(d.matches("-> n").count(), 3);
        assert_eq!(d, export_dot(DotSource::Automaton(&toggle())));
    }

    #[test]
    fn cbr_edges_match_transitions() {
        let c = ping_pong_cbr();
        let d = export_dot(DotSource::Cbr(&c));
        assert_eq!(d.matches(" -> ").count(), c.transitions.len());
        assert!(d.starts_with("digraph"));
    }
}
