//! Write a stateless system as a combiner after a parallel bank of one-bit
//! parts.

use ioa_calculus::system::{normal_form_search, SystemSpec};

fn main() {
    let target = SystemSpec::stateless("mod3", ["0", "1", "2", "3", "4", "5"], |i| {
        let x: u32 = i.as_str().parse().ok()?;
        Some((x % 3).to_string().into())
    });
    match normal_form_search(&target, 3).expect("search") {
        Some(nf) => {
            println!("{} parts, combiner {}", nf.parts.len(), nf.combiner.name);
            println!("verified equivalent: {}", nf.witness.verified);
        }
        None => println!("no normal form within 3 parts"),
    }
}
