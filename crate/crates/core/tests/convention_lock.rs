mod common;

use common::skewed_modes;
use fiber_ground::kernels::{self, InternalRule, PhotonConfig, SectorKernel};
use fiber_ground::model::{CutoffProfile, Momentum};
use fiber_ground::oracle::{DiscreteModel, ModeSpec};

fn check_kernel(model: &DiscreteModel, kernel: &SectorKernel, vector: &[f64]) -> f64 {
    let rule = InternalRule {
        nodes: model.modes.clone(),
    };
    let mut worst: f64 = 0.0;
    for i in 0..model.dimension() {
        if model.sector_of(i) != kernel.sector() {
            assert!(vector[i].abs() < 1e-14, "{}: off-sector component", kernel.label);
            continue;
        }
        let config = PhotonConfig(
            model
                .photons(i)
                .iter()
                .map(|&s| {
                    let (m, lam) = model.single_mode(s);
                    (Momentum(model.modes[m].0), lam)
                })
                .collect(),
        );
        let amp = kernel.amplitude_with(&config, &rule).unwrap();
        let c = amp * model.coefficient_factor(i);
        worst = worst.max((c - vector[i]).abs());
    }
    worst
}

#[test]
fn kernels_reproduce_discrete_states_at_mode_points() {
    for spec in [ModeSpec { radial: 1, angular: 4 }, ModeSpec { radial: 1, angular: 6 }] {
        for profile in [CutoffProfile::default(), CutoffProfile::sharp(1.5)] {
            let model = DiscreteModel::from_spec(profile, spec, 4).unwrap();
            let b = model.basis_states();
            let [r1, r2, r3] = kernels::phi2tilde_raw_part_kernels(profile);
            let (a, bb) = kernels::phi4_part_kernels(profile);
            let cases: Vec<(SectorKernel, &Vec<f64>)> = vec![
                (kernels::phi2_kernel(profile), &b.phi2),
                (kernels::phi3_kernel(profile), &b.phi3),
                (kernels::phi1_integrand(profile), &b.phi1),
                (r1, &b.raw[0]),
                (r2, &b.raw[1]),
                (r3, &b.raw[2]),
                (a, &b.phi4_parts[0]),
                (bb, &b.phi4_parts[1]),
            ];
            for (k, v) in &cases {
                let dev = check_kernel(&model, k, v);
                let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                eprintln!("{} {:?} dev {dev:e} scale {scale:e}", k.label, spec);
                assert!(dev < 1e-12 * scale.max(1.0), "{}: {dev}", k.label);
            }
        }
    }
}

#[test]
fn every_element_matches_dense_linear_algebra_on_oracle_nodes() {
    use fiber_ground::elements::{compute_element_on_nodes, definition, hydrogen_inventory, inventory};
    let names: Vec<String> = inventory().into_iter().chain(hydrogen_inventory()).collect();
    let mut models = Vec::new();
    for profile in [CutoffProfile::default(), CutoffProfile::sharp(1.5)] {
        models.push(DiscreteModel::from_spec(profile, ModeSpec { radial: 1, angular: 4 }, 4).unwrap());
        models.push(DiscreteModel::from_spec(profile, ModeSpec { radial: 1, angular: 6 }, 4).unwrap());
        models.push(DiscreteModel::new(profile, skewed_modes(&profile), 4, [0.0; 3]).unwrap());
    }
    for model in &models {
        let mut phi1_seen = false;
        for name in &names {
            let dense = model.pair(&definition(name).unwrap());
            let kernel = compute_element_on_nodes(name, &model.profile, &model.modes).unwrap();
            let tol = 1e-10 * dense.abs().max(1.0);
            assert!(
                (dense - kernel).abs() <= tol,
                "{name}: dense {dense:e} kernel {kernel:e}"
            );
            if name == "n1s" && dense.abs() > 1e-8 {
                phi1_seen = true;
            }
        }
        if model.modes.len() == 5 {
            assert!(phi1_seen, "skewed nodes should give a nonzero Φ₁");
        }
    }
}

#[test]
fn identities_hold_exactly_on_discrete_tables() {
    use fiber_ground::elements::verify_adjoint_identities;
    for profile in [CutoffProfile::default(), CutoffProfile::sharp(1.5)] {
        let table = common::discrete_table(&common::skewed_model(profile));
        let report = verify_adjoint_identities(&table).unwrap();
        for c in &report.checks {
            eprintln!("{} {:e} {:e}", c.name, c.lhs.value, c.rhs.value);
        }
        assert!(report.all_pass());
    }
}
