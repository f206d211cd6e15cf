//! The loop and while compositions: primitive recursion by a counter
//! feeding a body, and minimization by a counter feeding a zero finder.

use ioa_calculus::system::{
    compose_loop, compose_while, counter_system, num, primrec_body, zero_finder, WhileOutcome,
};

fn main() {
    // f(a, 0) = a, f(a, n + 1) = f(a, n) + n + 1
    let a = 2;
    for n in 0..6 {
        let body = primrec_body(a, |_, b, c| Some(c + b + 1), n, 64).expect("body");
        let lc = compose_loop(&counter_system(n), &body, num(a), n).expect("loop");
        println!("f({a}, {n}) = {}", lc.evaluate().expect("value"));
    }

    // The smallest b with g(b) = 0 where g(b) = |b - 7|.
    let g = zero_finder(0, |_, b| Some(b.abs_diff(7)), 20).expect("g");
    match compose_while(&counter_system(20), &g, 20).expect("while") {
        WhileOutcome::Found { delta, steps } => println!("δ = {delta} after {steps} ticks"),
        WhileOutcome::BudgetExhausted { budget } => println!("no zero within {budget} ticks"),
    }
}
