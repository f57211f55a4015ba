//! Run the reference-checked suites: fidelity gaps against brute force,
//! the LIME surrogate against explicit normal equations, and backprop
//! against finite differences.
//!
//! cargo run --release --example oracle_checks

use xdaudit::oracles::{gradient_suite, metric_suite, surrogate_suite};

fn main() {
    for s in [metric_suite(100, 0), surrogate_suite(100, 0), gradient_suite(5, 0)] {
        println!(
            "{:<20} passed={} checks={} max_error={:.2e} tol={:.0e} {:.2?} {}",
            s.name,
            s.passed(),
            s.checks,
            s.max_error,
            s.tolerance,
            s.elapsed,
            s.notes
        );
    }
}
