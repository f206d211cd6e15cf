//! Seeded runs of the ping-pong protocol under the three scheduling
//! policies, checked by the independent channel-rule validator.

use ioa_calculus::channel::ProtocolOptions;
use ioa_calculus::dsl::{parse, Model};
use ioa_calculus::exec::{
    check_fairness, run, validate_cbr_trace, FairnessKind, Policy, SchedulerConfig, Target,
};

fn main() {
    let doc = parse(include_str!("../corpus/ping_pong.ioa")).expect("corpus parses");
    let model = Model::from_document(&doc).expect("corpus resolves");
    let p = model
        .protocol("ping_pong", ProtocolOptions::default())
        .expect("protocol");
    for policy in [Policy::Arbitrary, Policy::WeakFair, Policy::StrongFair] {
        let cfg = SchedulerConfig::new(7, policy, 20).expect("config");
        let trace = run(Target::Cbr(&p.cbr), &cfg, None).expect("run");
        let fair =
            check_fairness(&trace, Target::Cbr(&p.cbr), FairnessKind::Weak, 4).expect("fairness");
        println!(
            "{policy}: {} steps, {}, valid {}, weakly fair within 4: {}",
            trace.steps.len(),
            trace.accepted,
            validate_cbr_trace(&trace, &p.cbr).is_ok(),
            fair.fair
        );
    }
    let cfg = SchedulerConfig::new(7, Policy::Arbitrary, 20).expect("config");
    print!(
        "{}",
        run(Target::Cbr(&p.cbr), &cfg, None).expect("run").to_text()
    );
}
