//! Check the buyer and seller protocol, then break it by deleting a
//! receiving transition and replay the witness the checker returns.

use ioa_calculus::channel::{build_protocol, check_consistent, check_well_formed, ProtocolOptions};
use ioa_calculus::dsl::{parse, Model};

fn main() {
    let doc = parse(include_str!("../corpus/buyer_seller.ioa")).expect("corpus parses");
    let model = Model::from_document(&doc).expect("corpus resolves");
    let p = model
        .protocol("order_protocol", ProtocolOptions::default())
        .expect("protocol");
    print!("{}", check_well_formed(&p).text());
    print!("{}", check_consistent(&p).text());

    let def = &model.protocols["order_protocol"];
    let mut roles: Vec<_> = def
        .roles
        .iter()
        .map(|r| model.automata[r].clone())
        .collect();
    roles[0].transitions.retain(|t| t.label != "rejected");
    let broken = build_protocol("mutant", roles, &def.channels, ProtocolOptions::default())
        .expect("mutant builds");
    let r = check_well_formed(&broken);
    print!("{}", r.text());
    println!(
        "witness replays: {}",
        r.witnesses[0].replays_on(&broken.cbr)
    );
}
