//! Prints the full validation report for the null-coupling limit and an
//! order-one spec.
//!
//! ```text
//! cargo run --release -p kpgm-core --example validation_report
//! ```

use kpgm::validation::{validate, ValidationOptions};
use kpgm::Molecule;

fn main() {
    for spec in [Molecule::null_coupling(1.0), Molecule::natural("generic", 1.0, 1.5, 0.5, 1.2, 0.4)] {
        let start = std::time::Instant::now();
        let rep = validate(&spec, &ValidationOptions::default()).expect("validation runs");
        println!("== {} ({:.2?}) hard checks passed: {}", rep.spec, start.elapsed(), rep.passed());
        for c in &rep.checks {
            println!(
                "{:<5} {:<4} {:<62} {:>10.3e} / {:<6.0e} {}",
                c.passed,
                format!("{:?}", c.severity).to_lowercase(),
                c.name,
                c.measured,
                c.tolerance,
                c.detail
            );
        }
        for f in &rep.findings {
            println!("  * {f}");
        }
    }
}
