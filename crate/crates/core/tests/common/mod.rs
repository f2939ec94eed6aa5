#![allow(dead_code)]

use std::collections::BTreeMap;

use fiber_ground::elements::{definition, inventory, ElementTable};
use fiber_ground::model::CutoffProfile;
use fiber_ground::oracle::DiscreteModel;
use fiber_ground::quadrature::Method;

/// Five off-lattice nodes; symmetric designs make Φ₁ vanish.
pub fn skewed_modes(profile: &CutoffProfile) -> Vec<([f64; 3], f64)> {
    let support = profile.support();
    [
        [0.31, -0.12, 0.55],
        [-0.47, 0.28, 0.09],
        [0.05, 0.61, -0.33],
        [0.22, 0.18, 0.71],
        [-0.15, -0.52, -0.24],
    ]
    .iter()
    .enumerate()
    .map(|(i, k)| ([k[0] * support, k[1] * support, k[2] * support], 0.4 + 0.13 * i as f64))
    .collect()
}

pub fn skewed_model(profile: CutoffProfile) -> DiscreteModel {
    DiscreteModel::new(profile, skewed_modes(&profile), 4, [0.0; 3]).unwrap()
}

/// Every inventory element by dense linear algebra.
pub fn discrete_table(model: &DiscreteModel) -> ElementTable {
    let values: BTreeMap<String, f64> = inventory()
        .into_iter()
        .map(|n| {
            let v = model.pair(&definition(&n).unwrap());
            (n, v)
        })
        .collect();
    ElementTable::from_values(&model.profile, &values, Method::NodeSum)
}
