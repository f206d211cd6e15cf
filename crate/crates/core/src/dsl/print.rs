use std::fmt::Write as _;

use super::ast::*;
use super::lexer::is_word_char;
use super::FORMAT_VERSION;

/// A name as it must be written: bare when it lexes as one word.
pub(crate) fn quote(s: &str) -> String {
    if !s.is_empty() && s != "eps" && s.chars().all(is_word_char) {
        s.to_string()
    } else {
        let mut out = String::from("\"");
        for c in s.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
        out
    }
}

fn names(v: &[Ident]) -> String {
    v.iter().map(|i| quote(i)).collect::<Vec<_>>().join(", ")
}

fn opt(v: &Option<Ident>) -> String {
    v.as_ref().map_or_else(|| "eps".to_string(), |i| quote(i))
}

fn path(p: &Path) -> String {
    p.node
        .iter()
        .map(|s| quote(s))
        .collect::<Vec<_>>()
        .join(".")
}

fn io(kw: &str, items: &[IoItem]) -> String {
    if items.is_empty() {
        return "eps".into();
    }
    items
        .iter()
        .map(|(p, s)| format!("{kw} {}.{}", quote(p), quote(s)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn accept(out: &mut String, a: &AcceptDecl) {
    match a {
        AcceptDecl::Finite(v) => {
            let _ = writeln!(out, "  accept finite {{{}}};", names(v));
        }
        AcceptDecl::Muller(sets) => {
            let sets: Vec<String> = sets.iter().map(|s| format!("{{{}}}", names(s))).collect();
            let _ = writeln!(out, "  accept muller {{{}}};", sets.join(", "));
        }
    }
}

fn automaton(out: &mut String, d: &AutomatonDecl) {
    let _ = writeln!(out, "automaton {} {{", quote(&d.name));
    if let Some(s) = &d.states {
        let _ = writeln!(out, "  states {};", names(s));
    }
    if let Some(i) = &d.initial {
        let _ = writeln!(out, "  initial {};", quote(i));
    }
    if let Some(a) = &d.accept {
        accept(out, a);
    }
    for (kw, ports) in [("in", &d.inputs), ("out", &d.outputs)] {
        for p in ports {
            let _ = writeln!(out, "  {kw} {}: {{{}}};", quote(&p.name), names(&p.symbols));
        }
    }
    for t in &d.transitions {
        let _ = writeln!(
            out,
            "  {}: {} -[{} / {}]-> {};",
            quote(&t.label),
            quote(&t.from),
            io("in", &t.input),
            io("out", &t.output),
            quote(&t.to)
        );
    }
    out.push_str("}\n");
}

fn extended(out: &mut String, d: &ExtendedDecl) {
    let _ = writeln!(out, "extended automaton {} {{", quote(&d.name));
    if !d.modes.is_empty() {
        let _ = writeln!(out, "  modes {};", names(&d.modes));
    }
    if !d.rest.is_empty() {
        let _ = writeln!(out, "  rest {};", names(&d.rest));
    }
    if let Some((m, r)) = &d.initial {
        match r {
            Some(r) => {
                let _ = writeln!(out, "  initial {} rest {};", quote(m), quote(r));
            }
            None => {
                let _ = writeln!(out, "  initial {};", quote(m));
            }
        }
    }
    if let Some(a) = &d.accept {
        accept(out, a);
    }
    for (kw, ports) in [("in", &d.inputs), ("out", &d.outputs)] {
        for p in ports {
            let classes: Vec<String> = p
                .classes
                .iter()
                .map(|c| {
                    if c.params.is_empty() {
                        quote(&c.class)
                    } else {
                        format!("{}[{}]", quote(&c.class), names(&c.params))
                    }
                })
                .collect();
            let _ = writeln!(out, "  {kw} {}: {};", quote(&p.name), classes.join(", "));
        }
    }
    for c in &d.conditions {
        let holds: Vec<String> = c
            .holds
            .iter()
            .map(|(r, p)| format!("({}, {})", quote(r), quote(p)))
            .collect();
        let _ = writeln!(
            out,
            "  cond {} on {} holds {{{}}};",
            quote(&c.name),
            quote(&c.on),
            holds.join(", ")
        );
    }
    for t in &d.transitions {
        let when = match &t.when {
            Some((true, c)) => format!(" when {}", quote(c)),
            Some((false, c)) => format!(" when !{}", quote(c)),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "  {}: {} -[{}{} / {}]-> {};",
            quote(&t.label),
            quote(&t.from),
            opt(&t.input),
            when,
            opt(&t.output),
            quote(&t.to)
        );
    }
    out.push_str("}\n");
}

fn system(out: &mut String, d: &SystemDecl) {
    let _ = writeln!(out, "system {} {{", quote(&d.name));
    let _ = writeln!(
        out,
        "  {};",
        if d.clocked { "clocked" } else { "unclocked" }
    );
    if let Some(i) = &d.initial {
        let _ = writeln!(out, "  initial {};", quote(i));
    }
    if let Some(s) = &d.states {
        let _ = writeln!(out, "  states {};", names(s));
    }
    if let Some(s) = &d.inputs {
        let _ = writeln!(out, "  in {{{}}};", names(s));
    }
    if let Some(s) = &d.outputs {
        let _ = writeln!(out, "  out {{{}}};", names(s));
    }
    for e in &d.entries {
        let _ = writeln!(
            out,
            "  f({}, {}) = ({}, {});",
            quote(&e.state),
            opt(&e.input),
            quote(&e.next),
            opt(&e.output)
        );
    }
    out.push_str("}\n");
}

fn rules(out: &mut String, d: &RulesDecl) {
    let _ = writeln!(out, "rules {} for {} {{", quote(&d.name), names(&d.roles));
    for r in &d.rules {
        let _ = writeln!(out, "  rule {} {{", quote(&r.name));
        if !r.when.is_empty() {
            let guards: Vec<String> = r
                .when
                .iter()
                .map(|g| {
                    let op = if g.negated { "!=" } else { "=" };
                    format!("{} {op} {}", quote(&g.role), quote(&g.state))
                })
                .collect();
            let _ = writeln!(out, "    when {};", guards.join(", "));
        }
        match &r.on {
            Some(OnDecl::Eps) => out.push_str("    on eps;\n"),
            Some(OnDecl::Symbol(p)) => {
                let _ = writeln!(out, "    on {};", path(p));
            }
            None => {}
        }
        if !r.forbid.is_empty() {
            let f: Vec<String> = r.forbid.iter().map(path).collect();
            let _ = writeln!(out, "    forbid {};", f.join(", "));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}

/// Canonical text. Parsing it gives back a structurally equal document.
pub fn serialize(d: &Document) -> String {
    let mut out = format!("format {FORMAT_VERSION};\n");
    for decl in &d.decls {
        out.push('\n');
        match &decl.node {
            Decl::Automaton(a) => automaton(&mut out, a),
            Decl::Extended(e) => extended(&mut out, e),
            Decl::System(s) => system(&mut out, s),
            Decl::Channel(c) => {
                let _ = writeln!(
                    out,
                    "channel {}: {}.{} -> {}.{};",
                    quote(&c.name),
                    quote(&c.from.0),
                    quote(&c.from.1),
                    quote(&c.to.0),
                    quote(&c.to.1)
                );
            }
            Decl::Protocol(p) => {
                let _ = writeln!(out, "protocol {} {{", quote(&p.name));
                if !p.roles.is_empty() {
                    let _ = writeln!(out, "  roles {};", names(&p.roles));
                }
                if !p.channels.is_empty() {
                    let _ = writeln!(out, "  channels {};", names(&p.channels));
                }
                if p.tree {
                    out.push_str("  tree;\n");
                }
                out.push_str("}\n");
            }
            Decl::Rules(r) => rules(&mut out, r),
            Decl::Process(p) => {
                let _ = writeln!(out, "process {} {{", quote(&p.name));
                if let Some(c) = &p.coordinate {
                    let _ = writeln!(out, "  coordinate {};", quote(c));
                }
                for b in &p.bindings {
                    let _ = writeln!(
                        out,
                        "  bind {}: {} with {};",
                        quote(&b.role),
                        quote(&b.protocol),
                        quote(&b.counterparty)
                    );
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    const ALL: &str = r#"
format 1;
automaton "A b" { states "q 0", q1; initial "q 0"; accept muller {{"q 0"}, {q1, "q 0"}, {}};
  in in: {a, "(0,1)"}; out o: {}; t: "q 0" -[in in.a, in.a / eps]-> q1; }
extended automaton S { modes l, o; rest r1, r2; initial l rest r1; accept finite {o};
  in order: Order[x, y], Ping; out conf: Confirmation; cond ok on Order holds {(r1, x), (r2, y)};
  t: l -[Order when !ok / Confirmation]-> o; u: o -[eps / eps]-> l; }
system s { clocked; initial q; states q; in {a}; out {b}; f(q, eps) = (q, eps); f(q, a) = (q, b); }
channel c: A.x -> B.y;
protocol P { roles A, B; channels c; tree; }
rules R for A, B { rule r { when A = a, B != b; on A.in.a; forbid B.t, A.u; } rule e { on eps; } }
process p { coordinate R; bind A: P with z; }
"#;

    #[test]
    fn every_clause_round_trips() {
        let d = parse(ALL).unwrap();
        let text = serialize(&d);
        let again = parse(&text).unwrap();
        assert_eq!(d, again);
        assert_eq!(serialize(&again), text);
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("abc_1"), "abc_1");
        assert_eq!(quote("eps"), "\"eps\"");
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
        assert_eq!(quote(""), "\"\"");
    }
}
