//! Coordinate the gatekeeper roles with a rule, then let the synthesizer
//! find a rule set of its own.

use ioa_calculus::coordination::{check_coordinated, synthesize_rules, Synthesis};
use ioa_calculus::dsl::{parse, Model};

fn main() {
    let doc = parse(include_str!("../corpus/gatekeeper.ioa")).expect("corpus parses");
    let model = Model::from_document(&doc).expect("corpus resolves");
    let c = model.coordinated("gate").expect("rules apply");
    print!("{}", check_coordinated(&c).text());
    for k in 0..c.roles.len() {
        let image = c.project_role(k).expect("projection");
        println!(
            "role {} keeps {} transitions",
            c.roles[k].name,
            image.transitions.len()
        );
    }

    let (product, roles) = model.rules_product("gate").expect("product");
    match synthesize_rules(&product, &roles, 10_000).expect("synthesis") {
        Synthesis::Found {
            rules, candidates, ..
        } => {
            println!("synthesized after {candidates} candidates:");
            for r in rules {
                println!("  {} forbids {:?}", r.name, r.forbid);
            }
        }
        Synthesis::Exhausted { candidates } => println!("nothing within {candidates} candidates"),
    }
}
