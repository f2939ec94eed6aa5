//! Every example runs end to end at small budgets.

macro_rules! example {
    ($m:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(coefficients, "coefficients.rs");
example!(adjoint_identities, "adjoint_identities.rs");
example!(ritz_curve, "ritz_curve.rs");
example!(fock_oracle, "fock_oracle.rs");
example!(convention_lock, "convention_lock.rs");
example!(hydrogen, "hydrogen.rs");

const BUDGET: u64 = 3000;

#[test]
fn coefficients_runs() {
    coefficients::run(BUDGET).unwrap();
}

#[test]
fn adjoint_identities_runs() {
    adjoint_identities::run(BUDGET).unwrap();
}

#[test]
fn ritz_curve_runs() {
    ritz_curve::run(BUDGET).unwrap();
}

#[test]
fn fock_oracle_runs() {
    fock_oracle::run().unwrap();
}

#[test]
fn convention_lock_runs() {
    convention_lock::run().unwrap();
}

#[test]
fn hydrogen_runs() {
    hydrogen::run(BUDGET, fiber_ground::hydrogen::RadialGrid::default()).unwrap();
}
