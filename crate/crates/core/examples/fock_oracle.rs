// Brute-force ground state of a few-mode truncated Fock space.
//
// Shows convergence in the photon cap and the variational chain
// exact ≤ Ritz ≤ trial when the Ritz matrices come from the same modes.

use std::collections::BTreeMap;

use fiber_ground::elements::{definition, inventory, ElementTable};
use fiber_ground::model::CutoffProfile;
use fiber_ground::oracle::{DiscreteModel, LanczosOptions, ModeSpec};
use fiber_ground::quadrature::Method;
use fiber_ground::ritz::{self, BasisMatrices};

pub fn run() -> fiber_ground::Result<()> {
    let profile = CutoffProfile::default();
    let opts = LanczosOptions::default();
    let alpha = 0.05;
    for nmax in 1..=4 {
        let m = DiscreteModel::from_spec(profile, ModeSpec::default(), nmax)?;
        let g = m.ground_state(alpha, opts)?;
        println!(
            "nmax {nmax}: dim {:>5}  E {:+.12e}  residual {:.1e}",
            m.dimension(),
            g.energy,
            g.residual
        );
    }

    let model = DiscreteModel::from_spec(profile, ModeSpec { radial: 1, angular: 4 }, 4)?;
    let values: BTreeMap<String, f64> = inventory()
        .into_iter()
        .map(|n| definition(&n).map(|d| (n, model.pair(&d))))
        .collect::<fiber_ground::Result<_>>()?;
    let m = BasisMatrices::from_table(&ElementTable::from_values(&profile, &values, Method::NodeSum))?;
    println!("{:>8} {:>16} {:>16} {:>16}", "alpha", "exact", "ritz", "trial");
    for a in [1e-3, 1e-2, 1e-1] {
        let exact = model.ground_state(a, opts)?.energy;
        let rr = ritz::solve(&m, a)?.energy;
        let trial = ritz::trial_quotient(&m, a)?;
        println!("{a:>8.0e} {exact:>+16.9e} {rr:>+16.9e} {trial:>+16.9e}");
    }
    println!(
        "photon number diagnostic at α = {alpha}: {:.4e}",
        model.photon_number_diagnostic(alpha, opts)?
    );
    Ok(())
}

fn main() -> fiber_ground::Result<()> {
    run()
}
