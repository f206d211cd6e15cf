//! Merge the buyer and seller processes of the network over the order
//! protocol. The result keeps the bank and warehouse bindings open.

use ioa_calculus::channel::ProtocolOptions;
use ioa_calculus::coordination::compose_processes;
use ioa_calculus::dsl::{parse, Model};

fn main() {
    let doc = parse(include_str!("../corpus/network.ioa")).expect("corpus parses");
    let model = Model::from_document(&doc).expect("corpus resolves");
    let buyer = model.process("buyer").expect("buyer");
    let seller = model.process("seller").expect("seller");
    let via = model
        .protocol("order_protocol", ProtocolOptions::default())
        .expect("protocol");
    let merged = compose_processes(&buyer, &seller, &via).expect("composition");
    println!("{}: {} states", merged.name, merged.automaton.states.len());
    for (role, b) in &merged.bindings {
        let image = merged.project_role(role).expect("view");
        println!(
            "  {role} talks to {} over {} ({} transitions in view)",
            b.counterparty,
            b.protocol,
            image.transitions.len()
        );
    }
}
