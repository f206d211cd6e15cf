//! Sequential, parallel and U-composition.

use crate::ids::{render_opt, tuple_id, StateId, Symbol};

use super::{pair_symbol, Clocking, SystemError, SystemSpec};

fn clocking(a: &SystemSpec, b: &SystemSpec) -> Clocking {
    if a.clocking == Clocking::Clocked || b.clocking == Clocking::Clocked {
        Clocking::Clocked
    } else {
        Clocking::Unclocked
    }
}

fn with_eps(syms: &std::collections::BTreeSet<Symbol>) -> Vec<Option<Symbol>> {
    std::iter::once(None)
        .chain(syms.iter().cloned().map(Some))
        .collect()
}

/// `s1` then `s2` within one composed step: the output of `s1` is the input
/// of `s2`. The composed state is `(q1|o1|q2)` where `o1` is the last
/// character on the connecting line.
pub fn compose_sequential(s1: &SystemSpec, s2: &SystemSpec) -> Result<SystemSpec, SystemError> {
    if let Some(o) = s1.outputs.iter().find(|o| !s2.inputs.contains(*o)) {
        return Err(SystemError::AlphabetMismatch(format!(
            "output {o} of {} is not an input of {}",
            s1.name, s2.name
        )));
    }
    let initial = tuple_id(&[
        s1.initial.clone(),
        StateId::from(crate::ids::EPS),
        s2.initial.clone(),
    ]);
    let mut out = SystemSpec::new(
        format!("({}>{})", s1.name, s2.name),
        clocking(s1, s2),
        initial,
    );
    out.inputs = s1.inputs.clone();
    out.outputs = s2.outputs.clone();
    let lines = with_eps(&s1.outputs);
    let domain = out.domain_inputs();
    for q1 in &s1.states {
        for line in &lines {
            for q2 in &s2.states {
                let from = tuple_id(&[
                    q1.clone(),
                    StateId::from(render_opt(line.as_ref())),
                    q2.clone(),
                ]);
                for i in &domain {
                    let (r1, o1) = s1.fire(q1, i.as_ref())?;
                    let (r2, o2) = s2.fire(q2, o1.as_ref())?;
                    let to = tuple_id(&[r1, StateId::from(render_opt(o1.as_ref())), r2]);
                    out.insert(from.clone(), i.clone(), to, o2);
                }
            }
        }
    }
    Ok(out)
}

/// Both systems read the same input; the output is the pair of outputs,
/// empty when both are empty.
pub fn compose_parallel(s1: &SystemSpec, s2: &SystemSpec) -> Result<SystemSpec, SystemError> {
    if s1.inputs != s2.inputs {
        return Err(SystemError::AlphabetMismatch(format!(
            "input alphabets of {} and {} differ",
            s1.name, s2.name
        )));
    }
    let initial = tuple_id(&[s1.initial.clone(), s2.initial.clone()]);
    let mut out = SystemSpec::new(
        format!("({}||{})", s1.name, s2.name),
        clocking(s1, s2),
        initial,
    );
    out.inputs = s1.inputs.clone();
    for a in with_eps(&s1.outputs) {
        for b in with_eps(&s2.outputs) {
            if a.is_some() || b.is_some() {
                out.outputs.insert(pair_symbol(a.as_ref(), b.as_ref()));
            }
        }
    }
    let domain = out.domain_inputs();
    for q1 in &s1.states {
        for q2 in &s2.states {
            let from = tuple_id(&[q1.clone(), q2.clone()]);
            for i in &domain {
                let (r1, o1) = s1.fire(q1, i.as_ref())?;
                let (r2, o2) = s2.fire(q2, i.as_ref())?;
                let o =
                    (o1.is_some() || o2.is_some()).then(|| pair_symbol(o1.as_ref(), o2.as_ref()));
                out.insert(from.clone(), i.clone(), tuple_id(&[r1, r2]), o);
            }
        }
    }
    Ok(out)
}

/// A chain `s1 → s2 → s3` whose outer pair is easily mistaken for one
/// recursive system.
#[derive(Debug, Clone)]
pub struct UComposition {
    pub system: SystemSpec,
    pub note: String,
}

pub fn compose_u(
    s1: &SystemSpec,
    s2: &SystemSpec,
    s3: &SystemSpec,
) -> Result<UComposition, SystemError> {
    let system = compose_sequential(&compose_sequential(s1, s2)?, s3)?;
    let note = format!(
        "U-composition: the pair ({}, {}) is not a system; only the chain {} > {} > {} is",
        s1.name, s3.name, s1.name, s2.name, s3.name
    );
    Ok(UComposition { system, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::tests::toggle;
    use crate::system::{functionally_equivalent, num, parse_num, EquivalenceOutcome};

    fn arith(name: &str, dom: std::ops::RangeInclusive<u64>, f: impl Fn(u64) -> u64) -> SystemSpec {
        SystemSpec::stateless(name, dom.map(num), |s| Some(num(f(parse_num(s).unwrap()))))
    }

    #[test]
    fn stateless_sequential_is_function_composition() {
        let f = arith("f", 0..=3, |x| x + 1);
        let g = arith("g", 0..=4, |x| x * 2);
        let c = compose_sequential(&f, &g).unwrap();
        c.validate().unwrap();
        for x in 0..=3 {
            for q in &c.states {
                let (_, o) = c.step(q, Some(&num(x))).unwrap();
                assert_eq!(o, Some(num((x + 1) * 2)));
            }
        }
    }

    #[test]
    fn identity_prefix_is_equivalent() {
        let t = toggle("t");
        let c = compose_sequential(&SystemSpec::identity("id", ["a"]), &t).unwrap();
        assert!(matches!(
            functionally_equivalent(&c, &t, 16).unwrap(),
            EquivalenceOutcome::Equivalent(_)
        ));
    }

    #[test]
    fn toggle_chain_unrolled() {
        // second toggle reads z, which it must accept: rename its input
        let t1 = toggle("t1");
        let t2 = SystemSpec::new("t2", Clocking::Unclocked, "p0")
            .with_entry("p0", Some("z"), "p1", Some("u"))
            .with_entry("p1", Some("z"), "p0", Some("v"));
        let c = compose_sequential(&t1, &t2).unwrap();
        let mut q = c.initial.clone();
        let mut seen = Vec::new();
        for _ in 0..4 {
            let (q2, o) = c.step(&q, Some(&"a".into())).unwrap();
            seen.push((q2.to_string(), o.unwrap().to_string()));
            q = q2;
        }
        // q1' = f1(q1, a), o1 = z, (q2', o2) = f2(q2, o1)
        let expect = [
            ("(q1|z|p1)", "u"),
            ("(q0|z|p0)", "v"),
            ("(q1|z|p1)", "u"),
            ("(q0|z|p0)", "v"),
        ];
        assert_eq!(seen, expect.map(|(a, b)| (a.to_string(), b.to_string())));
    }

    #[test]
    fn sequential_mismatch() {
        let err = compose_sequential(&toggle("t"), &toggle("u")).unwrap_err();
        assert!(err.to_string().contains("output z of t"));
    }

    #[test]
    fn parallel_and_xor() {
        let bits = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"];
        let and = SystemSpec::stateless("and", bits, |s| {
            Some(if s.as_str() == "(1,1)" { "1" } else { "0" }.into())
        });
        let xor = SystemSpec::stateless("xor", bits, |s| {
            Some(
                if matches!(s.as_str(), "(0,1)" | "(1,0)") {
                    "1"
                } else {
                    "0"
                }
                .into(),
            )
        });
        let p = compose_parallel(&and, &xor).unwrap();
        p.validate().unwrap();
        assert_eq!(p.states.len(), 1);
        assert_eq!(
            p.step(&p.initial, Some(&"(1,1)".into())).unwrap().1,
            Some("(1,0)".into())
        );
        let dup = compose_parallel(&and, &and).unwrap();
        assert_eq!(
            dup.step(&dup.initial, Some(&"(1,1)".into())).unwrap().1,
            Some("(1,1)".into())
        );
    }

    #[test]
    fn parallel_needs_shared_input() {
        let a = SystemSpec::identity("a", ["x"]);
        let b = SystemSpec::identity("b", ["y"]);
        assert!(matches!(
            compose_parallel(&a, &b),
            Err(SystemError::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn u_chain_arithmetic() {
        let s1 = arith("double", 0..=4, |x| 2 * x);
        let s2 = arith("inc", 0..=8, |x| x + 1);
        let s3 = arith("square", 0..=9, |x| x * x);
        let u = compose_u(&s1, &s2, &s3).unwrap();
        assert_eq!(u.system.run(&[Some(num(2))]).unwrap(), vec![Some(num(25))]);
        assert!(u.note.contains("(double, square) is not a system"));
        let ids = compose_u(
            &SystemSpec::identity("a", ["x"]),
            &SystemSpec::identity("b", ["x"]),
            &SystemSpec::identity("c", ["x"]),
        )
        .unwrap();
        assert_eq!(
            ids.system.run(&[Some("x".into())]).unwrap(),
            vec![Some("x".into())]
        );
    }
}
