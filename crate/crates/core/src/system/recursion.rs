//! Loop and While composition, with Kleene's counter, primitive recursion
//! body and zero finder as small table systems over decimal naturals.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::ids::{tuple_id, StateId, Symbol};

use super::{num, pair_symbol, parse_num, Clocking, SystemError, SystemSpec};

const MAX_VALUE: u64 = i64::MAX as u64;

fn checked(v: Option<u64>) -> Result<u64, SystemError> {
    v.filter(|&x| x <= MAX_VALUE).ok_or(SystemError::Overflow)
}

/// The iteration system: on every clock tick `(q, out) ← (q + 1, q)`,
/// silent once `limit` is reached.
pub fn counter_system(limit: u64) -> SystemSpec {
    let mut s = SystemSpec::new("counter", Clocking::Clocked, "0");
    for q in 0..limit {
        s.insert(
            num(q).as_str().into(),
            None,
            num(q + 1).as_str().into(),
            Some(num(q)),
        );
    }
    let last = StateId::from(num(limit).as_str());
    s.insert(last.clone(), None, last, None);
    s
}

/// Stateless body reading `(b,c)` and emitting `h(a, b, c)`, tabulated for
/// `b < counter_max` and `c ≤ value_max`.
pub fn primrec_body(
    a: u64,
    h: impl Fn(u64, u64, u64) -> Option<u64>,
    counter_max: u64,
    value_max: u64,
) -> Result<SystemSpec, SystemError> {
    let mut s = SystemSpec::new(format!("h[a={a}]"), Clocking::Unclocked, "q");
    for b in 0..counter_max {
        for c in 0..=value_max {
            let out = checked(h(a, b, c))?;
            s.insert(
                "q".into(),
                Some(pair_symbol(Some(&num(b)), Some(&num(c)))),
                "q".into(),
                Some(num(out)),
            );
        }
    }
    Ok(s)
}

/// Stateless system reading `b` and emitting `g(a, b)` for `b ≤ max_b`.
pub fn zero_finder(
    a: u64,
    g: impl Fn(u64, u64) -> Option<u64>,
    max_b: u64,
) -> Result<SystemSpec, SystemError> {
    let mut s = SystemSpec::new(format!("g[a={a}]"), Clocking::Unclocked, "q");
    for b in 0..=max_b {
        let out = checked(g(a, b))?;
        s.insert("q".into(), Some(num(b)), "q".into(), Some(num(out)));
    }
    Ok(s)
}

/// Counter and body wired in a loop. The feedback line initially carries
/// the preloaded value `g(a)`.
#[derive(Debug, Clone)]
pub struct LoopComposition {
    pub system: SystemSpec,
    pub n: u64,
    pub preload: Symbol,
}

/// Compose `iter` and `body` as a for-loop run `n` times. The composed
/// state is `(counter|body|feedback)`; it is clocked with no external input.
pub fn compose_loop(
    iter: &SystemSpec,
    body: &SystemSpec,
    preload: Symbol,
    n: u64,
) -> Result<LoopComposition, SystemError> {
    if iter.clocking != Clocking::Clocked {
        return Err(SystemError::Invalid {
            system: iter.name.clone(),
            reason: "the iteration system must be clocked".into(),
        });
    }
    let id = |c: &StateId, qb: &StateId, v: &Symbol| {
        tuple_id(&[c.clone(), qb.clone(), StateId::from(v.as_str())])
    };
    let start = (iter.initial.clone(), body.initial.clone(), preload.clone());
    let mut system = SystemSpec::new(
        format!("loop({},{})", iter.name, body.name),
        Clocking::Clocked,
        id(&start.0, &start.1, &start.2),
    );
    let mut seen: BTreeMap<StateId, (StateId, StateId, Symbol)> =
        BTreeMap::from([(system.initial.clone(), start.clone())]);
    let mut queue = VecDeque::from([start]);
    while let Some((c, qb, v)) = queue.pop_front() {
        let from = id(&c, &qb, &v);
        let (c2, b) = iter.fire(&c, None)?;
        let (qb2, o) = match &b {
            None => (qb.clone(), None),
            Some(b) => body.fire(&qb, Some(&pair_symbol(Some(b), Some(&v))))?,
        };
        let v2 = o.clone().unwrap_or_else(|| v.clone());
        let to = id(&c2, &qb2, &v2);
        if !seen.contains_key(&to) {
            seen.insert(to.clone(), (c2.clone(), qb2.clone(), v2.clone()));
            queue.push_back((c2, qb2, v2));
        }
        system.insert(from, None, to, o);
    }
    Ok(LoopComposition { system, n, preload })
}

impl LoopComposition {
    /// The loop's result after exactly `n` ticks: the last value on the
    /// feedback line, which is the preload when `n = 0`.
    pub fn evaluate(&self) -> Result<u64, SystemError> {
        self.evaluate_within(usize::try_from(self.n).unwrap_or(usize::MAX))
    }

    pub fn evaluate_within(&self, budget: usize) -> Result<u64, SystemError> {
        if (budget as u64) < self.n {
            return Err(SystemError::BudgetExhausted(budget));
        }
        let mut q = self.system.initial.clone();
        let mut value = self.preload.clone();
        for _ in 0..self.n {
            let (q2, o) = self.system.step(&q, None)?;
            if let Some(o) = o {
                value = o;
            }
            q = q2;
        }
        parse_num(&value).ok_or(SystemError::Invalid {
            system: self.system.name.clone(),
            reason: format!("non-numeric value {value}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WhileOutcome {
    Found { delta: u64, steps: usize },
    BudgetExhausted { budget: usize },
}

/// Run counter and zero finder until the finder emits `0`. The number of
/// ticks needed is only known by running, so a budget is mandatory.
pub fn compose_while(
    iter: &SystemSpec,
    zero_finder: &SystemSpec,
    budget: usize,
) -> Result<WhileOutcome, SystemError> {
    let mut c = iter.initial.clone();
    let mut qz = zero_finder.initial.clone();
    for t in 0..budget {
        let (c2, b) = iter.fire(&c, None)?;
        let Some(b) = b else { break };
        let (qz2, o) = zero_finder.fire(&qz, Some(&b))?;
        if o.as_ref().is_some_and(|o| o.as_str() == "0") {
            let delta = parse_num(&b).ok_or(SystemError::Invalid {
                system: iter.name.clone(),
                reason: format!("non-numeric count {b}"),
            })?;
            return Ok(WhileOutcome::Found {
                delta,
                steps: t + 1,
            });
        }
        c = c2;
        qz = qz2;
    }
    Ok(WhileOutcome::BudgetExhausted { budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangular(n: u64) -> u64 {
        let body = primrec_body(0, |_, b, c| c.checked_add(b)?.checked_add(1), n, 64).unwrap();
        compose_loop(&counter_system(n), &body, num(0), n)
            .unwrap()
            .evaluate()
            .unwrap()
    }

    #[test]
    fn triangular_numbers() {
        assert_eq!(
            (0..=3).map(triangular).collect::<Vec<_>>(),
            vec![0, 1, 3, 6]
        );
    }

    #[test]
    fn first_rows_of_the_recursion() {
        // f(a,0) = g(a), f(a,1) = h(a, 0, g(a)) with g(a) = a + 2, h = a + b + 3c
        let h = |a: u64, b: u64, c: u64| Some(a + b + 3 * c);
        let a = 4;
        for (n, expect) in [(0, a + 2), (1, h(a, 0, a + 2).unwrap())] {
            let body = primrec_body(a, h, n.max(1), 40).unwrap();
            let l = compose_loop(&counter_system(n), &body, num(a + 2), n).unwrap();
            assert_eq!(l.evaluate().unwrap(), expect);
        }
    }

    #[test]
    fn loop_terminates_silently() {
        let body = primrec_body(0, |_, b, c| Some(b + c), 2, 4).unwrap();
        let l = compose_loop(&counter_system(2), &body, num(0), 2).unwrap();
        let outs = l.system.run(&[None, None, None, None]).unwrap();
        assert_eq!(outs, vec![Some(num(0)), Some(num(1)), None, None]);
        assert_eq!(
            l.evaluate_within(1).unwrap_err(),
            SystemError::BudgetExhausted(1)
        );
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(
            primrec_body(0, |_, _, c| c.checked_mul(u64::MAX), 1, 2).unwrap_err(),
            SystemError::Overflow
        );
        assert_eq!(
            zero_finder(0, |_, _| Some(u64::MAX), 1).unwrap_err(),
            SystemError::Overflow
        );
    }

    #[test]
    fn while_finds_minimal_zero() {
        let g = zero_finder(9, |_, b| Some(b.abs_diff(3)), 10).unwrap();
        assert_eq!(
            compose_while(&counter_system(10), &g, 10).unwrap(),
            WhileOutcome::Found { delta: 3, steps: 4 }
        );
        let z = zero_finder(0, |_, _| Some(0), 10).unwrap();
        assert_eq!(
            compose_while(&counter_system(10), &z, 10).unwrap(),
            WhileOutcome::Found { delta: 0, steps: 1 }
        );
        let never = zero_finder(0, |_, _| Some(1), 10).unwrap();
        assert_eq!(
            compose_while(&counter_system(10), &never, 10).unwrap(),
            WhileOutcome::BudgetExhausted { budget: 10 }
        );
    }
}
