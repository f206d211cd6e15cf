//! Parse a description, print it canonically, report errors with spans and
//! export a DOT graph.

use ioa_calculus::channel::ProtocolOptions;
use ioa_calculus::dsl::{export_dot, parse, render_errors, serialize, DotSource, Model};

fn main() {
    let src = include_str!("../corpus/ping_pong.ioa");
    let doc = parse(src).expect("corpus parses");
    let canonical = serialize(&doc);
    assert_eq!(parse(&canonical).expect("canonical text parses"), doc);
    println!("{canonical}");

    let broken = "automaton A { initial a; t: a -[in x.m / eps]-> a; }";
    let errs = Model::from_document(&parse(broken).expect("syntax is fine")).unwrap_err();
    print!("{}", render_errors(broken, "broken.ioa", &errs));

    let model = Model::from_document(&doc).expect("corpus resolves");
    let p = model
        .protocol("ping_pong", ProtocolOptions::default())
        .expect("protocol");
    print!("{}", export_dot(DotSource::Protocol(&p)));
}
