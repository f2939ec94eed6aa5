// Rayleigh-Ritz energy over the six-vector basis against the fixed trial
// state, and the α², α³, α⁴ coefficients recovered by fitting the curve.

use fiber_ground::elements::{assemble_coefficients, inventory, ElementCache, ElementTable, Estimate};
use fiber_ground::model::CutoffProfile;
use fiber_ground::quadrature::Budgets;
use fiber_ground::ritz::{self, BasisMatrices};

pub fn run(budget: u64) -> fiber_ground::Result<()> {
    let budgets = Budgets {
        low: (budget / 10).max(16),
        mid: budget,
        high: budget,
    };
    let cache = ElementCache::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/example-cache"));
    let table = ElementTable::compute(&CutoffProfile::default(), &budgets, 42, &inventory(), Some(&cache))?;
    let d = assemble_coefficients(&table)?;
    let m = BasisMatrices::from_table(&table)?;
    println!("{:>10} {:>16} {:>16} {:>12}", "alpha", "E_RR", "E_trial", "rem/a^5");
    let mut curve = Vec::new();
    for a in ritz::default_alpha_grid() {
        let s = ritz::solve(&m, a)?;
        let t = ritz::trial_quotient(&m, a)?;
        let poly = d.d0.value * a * a + d.d1.value * a.powi(3) + d.d2.value * a.powi(4);
        println!(
            "{a:>10.3e} {:>+16.9e} {t:>+16.9e} {:>+12.4e}",
            s.energy,
            (t - poly) / a.powi(5)
        );
        curve.push((a, Estimate::new(s.energy, s.sensitivity)));
    }
    let f = ritz::fit_expansion(&curve)?;
    for (name, c, e) in [("α²", f.c2, d.d0), ("α³", f.c3, d.d1), ("α⁴", f.c4, d.d2)] {
        println!(
            "{name}: fit {:+.6e} ± {:.1e}   direct {:+.6e} ± {:.1e}",
            c.value, c.error, e.value, e.error
        );
    }
    println!("null directions: {:?}", ritz::solve(&m, 1e-2)?.null);
    Ok(())
}

fn main() -> fiber_ground::Result<()> {
    let budget = std::env::args()
        .nth(1)
        .map_or(200_000, |s| s.parse().expect("budget must be an integer"));
    run(budget)
}
