//! Build two role automata, validate them, take their weakly synchronized
//! product and project it back onto each factor.

use ioa_calculus::automaton::{isomorphic, reachable_part, validate};
use ioa_calculus::product::{weakly_synchronized_product, ProductOptions};
use ioa_calculus::projection::{project, ProjectionMap};
use ioa_calculus::{Acceptance, Nioa, Port};

fn main() {
    let sender = Nioa::new("Sender", "idle")
        .with_output(Port::new("tx", ["msg"]))
        .with_input(Port::new("rx", ["ack"]))
        .with_acceptance(Acceptance::finite(["idle"]))
        .with_transition("send", "idle", &[], &[("tx", "msg")], "waiting")
        .with_transition("acked", "waiting", &[("rx", "ack")], &[], "idle");
    let receiver = Nioa::new("Receiver", "r0")
        .with_input(Port::new("rx", ["msg"]))
        .with_output(Port::new("tx", ["ack"]))
        .with_acceptance(Acceptance::finite(["r0"]))
        .with_transition("recv", "r0", &[("rx", "msg")], &[], "r1")
        .with_transition("ack", "r1", &[], &[("tx", "ack")], "r0");
    for a in [&sender, &receiver] {
        println!("{} valid: {}", a.name, validate(a).is_ok());
    }

    let p = weakly_synchronized_product(
        &[sender.clone(), receiver.clone()],
        ProductOptions::default(),
    )
    .expect("product");
    println!(
        "product {}: {} states, {} transitions",
        p.name,
        p.states.len(),
        p.transitions.len()
    );
    for (k, role) in [&sender, &receiver].into_iter().enumerate() {
        let map = ProjectionMap::onto_factor(&p, k).expect("factor");
        let image = reachable_part(&project(&p, &map).expect("projection"));
        println!(
            "projection onto {} isomorphic: {}",
            role.name,
            isomorphic(&image, role)
        );
    }
}
