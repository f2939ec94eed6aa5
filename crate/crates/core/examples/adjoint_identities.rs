// The adjoint identities between independently computed elements.
//
// Each identity equates two integrals of different dimension; agreement
// within three combined error bars checks kernels and quadrature together.

use fiber_ground::elements::{inventory, verify_adjoint_identities, ElementCache, ElementTable};
use fiber_ground::model::CutoffProfile;
use fiber_ground::quadrature::Budgets;

pub fn run(budget: u64) -> fiber_ground::Result<()> {
    let budgets = Budgets {
        low: (budget / 10).max(16),
        mid: budget,
        high: budget,
    };
    let cache = ElementCache::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/example-cache"));
    let table = ElementTable::compute(&CutoffProfile::default(), &budgets, 42, &inventory(), Some(&cache))?;
    let report = verify_adjoint_identities(&table)?;
    for c in &report.checks {
        println!(
            "{:<22} {:+.6e} {:+.6e}  tol {:.1e}  {}",
            c.name,
            c.lhs.value,
            c.rhs.value,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!("all pass: {}", report.all_pass());
    Ok(())
}

fn main() -> fiber_ground::Result<()> {
    let budget = std::env::args()
        .nth(1)
        .map_or(200_000, |s| s.parse().expect("budget must be an integer"));
    run(budget)
}
