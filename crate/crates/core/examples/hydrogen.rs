// Coulomb-side coefficients: radial hydrogen ground state, e⁽¹⁾, e⁽²⁾,
// e⁽³⁾, a₀, and the binding-corrected self-energy Σ(α).

use std::f64::consts::PI;

use fiber_ground::elements::{assemble_coefficients, hydrogen_inventory, inventory, ElementCache, ElementTable};
use fiber_ground::hydrogen::{self, HydrogenCoefficients, RadialGrid};
use fiber_ground::model::CutoffProfile;
use fiber_ground::quadrature::Budgets;

pub fn run(budget: u64, grid: RadialGrid) -> fiber_ground::Result<()> {
    let u = hydrogen::ground_u1(&grid)?;
    println!("hydrogen E = {:+.12} ± {:.1e}", u.energy.value, u.energy.error);
    let e3 = hydrogen::e3(&grid)?;
    println!(
        "e3 = {:+.10} ± {:.1e}  commutator {:+.10}  exact {:+.10}",
        e3.value,
        e3.error,
        hydrogen::e3_commutator(&grid)?,
        -1.0 / (12.0 * PI)
    );
    for l in [1.0, 2.0] {
        println!(
            "sharp Λ = {l}: e1 = {:.12}  (2/π)ln(1+Λ) = {:.12}",
            hydrogen::e1(&CutoffProfile::sharp(l)).value,
            2.0 / PI * (1.0 + l).ln()
        );
    }

    let profile = CutoffProfile::default();
    let budgets = Budgets {
        low: (budget / 10).max(16),
        mid: budget,
        high: budget,
    };
    let names: Vec<String> = inventory().into_iter().chain(hydrogen_inventory()).collect();
    let table = ElementTable::compute(
        &profile,
        &budgets,
        42,
        &names,
        Some(&ElementCache::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../target/example-cache"
        ))),
    )?;
    let d = assemble_coefficients(&table)?;
    let e2 = hydrogen::e2_from_table(&table, &profile, &grid)?;
    let h = HydrogenCoefficients::new(&d, hydrogen::e1(&profile), e2, e3, hydrogen::a0(&profile));
    println!(
        "e2 = {:+.8e} ± {:.1e}, a0 = {:+.10}",
        h.e2.total.value, h.e2.total.error, h.a0.value
    );
    for p in hydrogen::assemble_sigma(&d, &h, &[1e-3, 1e-2, 1e-1]) {
        println!("α {:.0e}: Σ = {:+.10e} ± {:.1e}", p.alpha, p.sigma.value, p.sigma.error);
    }
    Ok(())
}

fn main() -> fiber_ground::Result<()> {
    let budget = std::env::args()
        .nth(1)
        .map_or(200_000, |s| s.parse().expect("budget must be an integer"));
    run(budget, RadialGrid::default())
}
