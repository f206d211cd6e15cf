//! An extended automaton written with document classes and a condition on
//! the rest of the state, and the transition classes it falls into.

use ioa_calculus::dsl::{parse, Model};
use ioa_calculus::partition::partition_transitions;

fn main() {
    let doc = parse(include_str!("../corpus/seller_extended.ioa")).expect("corpus parses");
    let model = Model::from_document(&doc).expect("corpus resolves");
    let seller = &model.automata["Seller"];
    println!(
        "{} single transitions over {} states",
        seller.transitions.len(),
        seller.states.len()
    );
    let classes = partition_transitions(seller, &model.partitions["Seller"]).expect("partition");
    for (key, members) in &classes {
        println!("{key}: {} transitions", members.len());
    }
}
