// d⁽⁰⁾, d⁽¹⁾, d⁽²⁾ and β for a cutoff profile.
//
//     cargo run --release --example coefficients -- [budget]
//
// `budget` sets the point count of the 6- to 12-dimensional elements
// (default 200000); the 3-dimensional ones use a tenth of it.

use fiber_ground::elements::{assemble_coefficients, ElementCache, ElementTable};
use fiber_ground::model::CutoffProfile;
use fiber_ground::quadrature::Budgets;

pub fn run(budget: u64) -> fiber_ground::Result<()> {
    let budgets = Budgets {
        low: (budget / 10).max(16),
        mid: budget,
        high: budget,
    };
    let cache = ElementCache::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/example-cache"));
    for profile in [CutoffProfile::smooth(2.0), CutoffProfile::sharp(1.0)] {
        let table = ElementTable::compute_all(&profile, &budgets, 42, Some(&cache))?;
        let c = assemble_coefficients(&table)?;
        println!("{} cutoff, Λ = {}", profile.taper.as_str(), profile.lambda);
        for (name, e) in [("d0", c.d0), ("d1", c.d1), ("d2", c.d2), ("beta", c.beta)] {
            println!("  {name:<5} {:+.8e} ± {:.1e}", e.value, e.error);
        }
    }
    Ok(())
}

fn main() -> fiber_ground::Result<()> {
    let budget = std::env::args()
        .nth(1)
        .map_or(200_000, |s| s.parse().expect("budget must be an integer"));
    run(budget)
}
