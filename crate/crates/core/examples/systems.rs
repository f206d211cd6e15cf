//! Stateless systems, sequential and parallel composition, functional
//! equivalence and the distribution laws.

use ioa_calculus::system::{
    check_compositionality, compose_parallel, compose_sequential, functionally_equivalent,
    CompositionKind, EquivalenceOutcome, SystemSpec,
};

fn table(name: &str, f: impl Fn(u32) -> u32) -> SystemSpec {
    SystemSpec::stateless(name, ["0", "1", "2", "3"], |i| {
        let x: u32 = i.as_str().parse().ok()?;
        Some(f(x).to_string().into())
    })
}

fn main() {
    let inc = table("inc", |x| (x + 1) % 4);
    let dbl = table("dbl", |x| (2 * x) % 4);
    let neg = table("neg", |x| (4 - x) % 4);

    let seq = compose_sequential(&inc, &dbl).expect("sequential");
    println!(
        "{} on 3 gives {:?}",
        seq.name,
        seq.run(&[Some("3".into())]).expect("run")
    );
    let r = check_compositionality(&CompositionKind::Sequential, &[inc.clone(), dbl.clone()])
        .expect("check");
    println!("sequential composition: {:?} ({})", r.verdict, r.detail);

    // Right distribution: (P1 ∥ P2) ∘ S against (P1 ∘ S) ∥ (P2 ∘ S).
    let left = compose_sequential(&inc, &compose_parallel(&dbl, &neg).unwrap()).unwrap();
    let right = compose_parallel(
        &compose_sequential(&inc, &dbl).unwrap(),
        &compose_sequential(&inc, &neg).unwrap(),
    )
    .unwrap();
    match functionally_equivalent(&left, &right, 8).expect("equivalence") {
        EquivalenceOutcome::Equivalent(w) => println!(
            "right distribution holds: {} state pairs, bijective {}",
            w.state_pairs.len(),
            w.bijective
        ),
        other => println!("right distribution: {other:?}"),
    }
}
