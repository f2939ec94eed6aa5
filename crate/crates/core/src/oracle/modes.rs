//! Discrete momentum-mode sets: Gauss radial nodes times spherical designs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{norm, scale, CutoffProfile, Vec3};
use crate::quadrature::gauss;

/// Radial node count times number of directions of a spherical design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub radial: usize,
    pub angular: usize,
}

impl Default for ModeSpec {
    fn default() -> Self {
        ModeSpec { radial: 1, angular: 6 }
    }
}

impl ModeSpec {
    pub fn count(&self) -> usize {
        self.radial * self.angular
    }
}

const GOLDEN: f64 = 1.618_033_988_749_895;

/// Unit directions of a spherical design with `n` points
/// (4 tetrahedron, 6 octahedron, 8 cube, 12 icosahedron, 20 dodecahedron,
/// 32 icosahedron and dodecahedron together).
pub fn spherical_design(n: usize) -> Result<Vec<Vec3>> {
    let raw: Vec<Vec3> = match n {
        4 => vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
        6 => vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        8 => cube(),
        12 => icosahedron(),
        20 => dodecahedron(),
        32 => {
            let mut v = icosahedron();
            v.extend(dodecahedron());
            v
        }
        _ => {
            return Err(Error::Validation(format!(
                "no spherical design with {n} directions (use 4, 6, 8, 12, 20 or 32)"
            )))
        }
    };
    Ok(raw.iter().map(|v| scale(v, 1.0 / norm(v))).collect())
}

fn cube() -> Vec<Vec3> {
    let mut v = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                v.push([sx, sy, sz]);
            }
        }
    }
    v
}

fn cyclic(a: f64, b: f64) -> Vec<Vec3> {
    let mut v = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            v.push([0.0, sa * a, sb * b]);
            v.push([sa * a, sb * b, 0.0]);
            v.push([sb * b, 0.0, sa * a]);
        }
    }
    v
}

fn icosahedron() -> Vec<Vec3> {
    cyclic(1.0, GOLDEN)
}

fn dodecahedron() -> Vec<Vec3> {
    let mut v = cube();
    v.extend(cyclic(1.0 / GOLDEN, GOLDEN));
    v
}

/// Mode momenta and cell weights: Gauss nodes in u with r = Λu² on the
/// support of κ, times equal-weight design directions.
pub fn mode_set(profile: &CutoffProfile, spec: ModeSpec) -> Result<Vec<(Vec3, f64)>> {
    if spec.radial == 0 {
        return Err(Error::Validation("need at least one radial node".into()));
    }
    let dirs = spherical_design(spec.angular)?;
    let lam = profile.support();
    let (u, wu) = gauss::on_interval(spec.radial, 0.0, 1.0);
    let mut out = Vec::with_capacity(spec.count());
    for (ui, wi) in u.iter().zip(&wu) {
        let r = lam * ui * ui;
        let w = wi * 2.0 * lam * ui * r * r * 4.0 * PI / dirs.len() as f64;
        for d in &dirs {
            out.push((scale(d, r), w));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dot;

    #[test]
    fn designs_integrate_low_moments() {
        // Averages of x_i x_j over the sphere are δ_ij/3; designs with at
        // least 4 points reproduce them.
        for n in [4, 6, 8, 12, 20, 32] {
            let d = spherical_design(n).unwrap();
            assert_eq!(d.len(), n);
            for i in 0..3 {
                for j in 0..3 {
                    let m: f64 = d.iter().map(|v| v[i] * v[j]).sum::<f64>() / n as f64;
                    let e = if i == j { 1.0 / 3.0 } else { 0.0 };
                    assert!((m - e).abs() < 1e-14, "n={n}");
                }
            }
            assert!(d.iter().all(|v| (dot(v, v) - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn weights_integrate_ball_volume() {
        let p = CutoffProfile::sharp(2.0);
        let m = mode_set(&p, ModeSpec { radial: 8, angular: 12 }).unwrap();
        let vol: f64 = m.iter().map(|(_, w)| w).sum();
        assert!((vol - 4.0 * PI / 3.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_design() {
        assert!(spherical_design(7).is_err());
    }
}
