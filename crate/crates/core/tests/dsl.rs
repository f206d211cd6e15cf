mod common;

use common::*;
use ioa_calculus::automaton::isomorphic;
use ioa_calculus::dsl::{
    automaton_decl, document, parse, render_errors, serialize, system_decl, Decl, Model,
};
use ioa_calculus::system::functionally_equivalent;

#[test]
fn corpus_round_trips() {
    for (name, text) in corpus_files() {
        let d = parse(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        let printed = serialize(&d);
        let again = parse(&printed).unwrap();
        assert_eq!(again, d, "{name}");
        assert_eq!(
            serialize(&again),
            printed,
            "{name}: printing is not idempotent"
        );
    }
}

#[test]
fn every_corpus_file_resolves() {
    for (name, text) in corpus_files() {
        let d = parse(&text).unwrap();
        if let Err(errs) = Model::from_document(&d) {
            panic!("{name}:\n{}", render_errors(&text, &name, &errs));
        }
    }
}

#[test]
fn buyer_seller_contents() {
    let m = model("buyer_seller.ioa");
    assert_eq!(m.automata.len(), 2);
    assert_eq!(m.channels.len(), 2);
    assert_eq!(m.protocols.len(), 1);
    assert_eq!(m.automata["Buyer"].transitions.len(), 3);
    assert_eq!(m.protocols["order_protocol"].roles, ["Buyer", "Seller"]);
}

#[test]
fn name_spans_lie_inside_declarations() {
    for (name, text) in corpus_files() {
        let d = parse(&text).unwrap();
        let mut last = 0;
        for decl in &d.decls {
            let (outer, inner) = (decl.span, decl.node.name().span);
            assert!(
                outer.start <= inner.start && inner.end <= outer.end,
                "{name}"
            );
            assert!(outer.end <= text.len(), "{name}");
            assert!(outer.start >= last, "{name}: declarations overlap");
            last = outer.end;
            assert_eq!(
                &text[inner.start..inner.end].trim_matches('"'),
                &decl.node.name().node
            );
        }
    }
}

#[test]
fn errors_point_into_the_source() {
    let text = "format 1;\nautomaton A {\n  initial a0;\n  a0 -[eps / out nope.x]-> a1;\n}\n";
    let errs = match parse(text) {
        Err(errs) => errs,
        Ok(d) => Model::from_document(&d).expect_err("rejected"),
    };
    for e in &errs {
        assert!(e.span.end <= text.len());
        assert!(e.span.line >= 2 && e.span.line <= 5, "{e:?}");
    }
    let rendered = render_errors(text, "bad.ioa", &errs);
    assert!(rendered.starts_with("bad.ioa:"), "{rendered}");
}

#[test]
fn emitted_declarations_rebuild_the_same_objects() {
    let m = model("network.ioa");
    let decls: Vec<Decl> = m
        .automata
        .values()
        .map(|a| Decl::Automaton(automaton_decl(a).unwrap()))
        .collect();
    let again = Model::from_document(&parse(&serialize(&document(decls))).unwrap()).unwrap();
    for (name, a) in &m.automata {
        assert!(isomorphic(a, &again.automata[name]), "{name}");
    }

    let s = model("systems.ioa");
    let decls: Vec<Decl> = s
        .systems
        .values()
        .map(|x| Decl::System(system_decl(x)))
        .collect();
    let again = Model::from_document(&parse(&serialize(&document(decls))).unwrap()).unwrap();
    for (name, x) in &s.systems {
        assert!(
            functionally_equivalent(x, &again.systems[name], 8)
                .unwrap()
                .is_equivalent(),
            "{name}"
        );
    }
}

#[test]
fn extended_seller_expands() {
    let m = model("seller_extended.ioa");
    let names: Vec<&String> = m.automata.keys().collect();
    assert!(!names.is_empty());
    assert!(!m.partitions.is_empty());
}
