// Every matrix element evaluated two ways on the same discrete modes:
// continuum kernels summed over the nodes, and dense linear algebra on
// the truncated Fock space.

use fiber_ground::elements::{compute_element_on_nodes, definition, hydrogen_inventory, inventory};
use fiber_ground::model::CutoffProfile;
use fiber_ground::oracle::{DiscreteModel, ModeSpec};

pub fn run() -> fiber_ground::Result<()> {
    for profile in [CutoffProfile::default(), CutoffProfile::sharp(1.5)] {
        let model = DiscreteModel::from_spec(profile, ModeSpec { radial: 1, angular: 6 }, 4)?;
        let mut worst = (0.0_f64, String::new());
        for name in inventory().into_iter().chain(hydrogen_inventory()) {
            let dense = model.pair(&definition(&name)?);
            let kernel = compute_element_on_nodes(&name, &profile, &model.modes)?;
            let dev = (dense - kernel).abs() / dense.abs().max(1.0);
            if dev >= worst.0 {
                worst = (dev, name);
            }
        }
        println!(
            "{} Λ = {}: {} elements, worst deviation {:.2e} ({})",
            profile.taper.as_str(),
            profile.lambda,
            inventory().len() + hydrogen_inventory().len(),
            worst.0,
            worst.1
        );
    }
    Ok(())
}

fn main() -> fiber_ground::Result<()> {
    run()
}
