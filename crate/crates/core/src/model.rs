//! Physical conventions: units with ħ = c = 1, electron mass 1/2 and charge √α.
//!
//! Photon modes are labelled by a momentum `k` and a polarization λ ∈ {1, 2}.
//! The coupling of a mode to the field operator at the origin is the form
//! factor `κ(|k|) / (2π |k|^{1/2})` times the polarization vector.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Shape of the ultraviolet cutoff between `Λ-1` and `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taper {
    /// κ = 1 on [0, Λ], 0 beyond.
    Sharp,
    /// κ = 1 on [0, Λ-1], cubic smoothstep down to 0 on [Λ-1, Λ].
    SmoothCubic,
    /// κ ≡ 0. Only useful as a degenerate test profile.
    Vanishing,
}

impl Taper {
    pub fn as_str(&self) -> &'static str {
        match self {
            Taper::Sharp => "sharp",
            Taper::SmoothCubic => "smooth_cubic",
            Taper::Vanishing => "vanishing",
        }
    }
}

impl std::str::FromStr for Taper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "sharp" => Ok(Taper::Sharp),
            "smooth_cubic" | "smoothcubic" | "smooth" => Ok(Taper::SmoothCubic),
            "vanishing" | "zero" => Ok(Taper::Vanishing),
            other => Err(Error::Validation(format!("unknown taper `{other}`"))),
        }
    }
}

impl fmt::Display for Taper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ultraviolet cutoff profile κ with scale Λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub lambda: f64,
    pub taper: Taper,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile {
            lambda: 2.0,
            taper: Taper::SmoothCubic,
        }
    }
}

impl CutoffProfile {
    pub fn new(lambda: f64, taper: Taper) -> Result<Self> {
        if !lambda.is_finite() || lambda < 1.0 {
            return Err(Error::Validation(format!(
                "cutoff scale must be a finite number >= 1, got {lambda}"
            )));
        }
        Ok(CutoffProfile { lambda, taper })
    }

    pub fn sharp(lambda: f64) -> Self {
        CutoffProfile {
            lambda,
            taper: Taper::Sharp,
        }
    }

    pub fn smooth(lambda: f64) -> Self {
        CutoffProfile {
            lambda,
            taper: Taper::SmoothCubic,
        }
    }

    pub fn vanishing() -> Self {
        CutoffProfile {
            lambda: 2.0,
            taper: Taper::Vanishing,
        }
    }

    pub fn is_vanishing(&self) -> bool {
        self.taper == Taper::Vanishing
    }

    /// Radius beyond which κ vanishes.
    pub fn support(&self) -> f64 {
        self.lambda
    }

    /// Interior radius where κ stops being smooth (start of the taper), if any.
    pub fn breakpoint(&self) -> Option<f64> {
        match self.taper {
            Taper::SmoothCubic if self.lambda > 1.0 => Some(self.lambda - 1.0),
            _ => None,
        }
    }

    /// κ(t) without the domain check.
    #[inline]
    pub fn kappa(&self, t: f64) -> f64 {
        match self.taper {
            Taper::Vanishing => 0.0,
            Taper::Sharp => {
                if t <= self.lambda {
                    1.0
                } else {
                    0.0
                }
            }
            Taper::SmoothCubic => {
                let start = self.lambda - 1.0;
                if t <= start {
                    1.0
                } else if t >= self.lambda {
                    0.0
                } else {
                    let s = t - start;
                    1.0 - s * s * (3.0 - 2.0 * s)
                }
            }
        }
    }

    /// Single-photon form factor κ(|k|) / (2π |k|^{1/2}) as a function of |k|.
    #[inline]
    pub fn coupling(&self, r: f64) -> f64 {
        self.kappa(r) / (2.0 * PI * r.sqrt())
    }

    /// Short content hash identifying the profile in caches and reports.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("lambda={:.17e};taper={}", self.lambda, self.taper).as_bytes());
        hex::encode(&h.finalize()[..8])
    }
}

pub fn kappa_eval(profile: &CutoffProfile, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain(format!("κ evaluated at negative radius {t}")));
    }
    Ok(profile.kappa(t))
}

/// Photon momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum(pub Vec3);

impl Momentum {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Momentum([x, y, z])
    }

    pub fn magnitude(&self) -> f64 {
        norm(&self.0)
    }

    fn nonzero(&self) -> Result<f64> {
        let r = self.magnitude();
        if r == 0.0 {
            return Err(Error::Domain("zero photon momentum".into()));
        }
        Ok(r)
    }
}

pub fn form_factor(profile: &CutoffProfile, k: &Momentum) -> Result<f64> {
    let r = k.magnitude();
    if r == 0.0 {
        return Err(Error::SingularPoint("form factor is singular at k = 0".into()));
    }
    Ok(profile.coupling(r))
}

/// Two orthonormal polarization vectors transverse to `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPair {
    pub eps1: Vec3,
    pub eps2: Vec3,
}

impl PolarizationPair {
    pub fn get(&self, lambda: usize) -> &Vec3 {
        match lambda {
            0 => &self.eps1,
            _ => &self.eps2,
        }
    }
}

/// ε₁ = (k₂, -k₁, 0)/√(k₁²+k₂²), ε₂ = k̂ ∧ ε₁, with the fixed pair
/// ((1,0,0), (0,1,0)) on the k₃ axis.
pub fn polarization_basis(k: &Momentum) -> Result<PolarizationPair> {
    let r = k.nonzero()?;
    Ok(polarization_unchecked(&k.0, r))
}

pub(crate) fn polarization_unchecked(k: &Vec3, r: f64) -> PolarizationPair {
    let rho = (k[0] * k[0] + k[1] * k[1]).sqrt();
    if rho == 0.0 {
        return PolarizationPair {
            eps1: [1.0, 0.0, 0.0],
            eps2: [0.0, 1.0, 0.0],
        };
    }
    let eps1 = [k[1] / rho, -k[0] / rho, 0.0];
    let khat = scale(k, 1.0 / r);
    PolarizationPair {
        eps1,
        eps2: cross(&khat, &eps1),
    }
}

/// P(k) = I - k̂k̂ᵀ, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseTensor(pub [[f64; 3]; 3]);

impl TransverseTensor {
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// trace(P(k) P(k')), the polarization sum Σ_{λλ'} (ε_λ(k)·ε_λ'(k'))².
    pub fn trace_product(&self, other: &TransverseTensor) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[j][i];
            }
        }
        s
    }
}

pub fn transverse_projector(k: &Momentum) -> Result<TransverseTensor> {
    let r = k.nonzero()?;
    Ok(projector_unchecked(&k.0, r))
}

#[inline]
pub(crate) fn projector_unchecked(k: &Vec3, r: f64) -> TransverseTensor {
    let h = scale(k, 1.0 / r);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = if i == j { 1.0 } else { 0.0 } - h[i] * h[j];
        }
    }
    TransverseTensor(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kappa_examples() {
        let p = CutoffProfile::smooth(2.0);
        assert_eq!(kappa_eval(&p, 0.5).unwrap(), 1.0);
        assert_eq!(kappa_eval(&p, 3.0).unwrap(), 0.0);
        assert_eq!(kappa_eval(&CutoffProfile::sharp(2.0), 3.0).unwrap(), 0.0);
        // smoothstep 1 - 3s² + 2s³ at s = 1/2
        let s: f64 = 0.5;
        let symbolic = 1.0 - 3.0 * s.powi(2) + 2.0 * s.powi(3);
        assert!(close(kappa_eval(&p, 1.5).unwrap(), symbolic, 1e-15));
        assert!(close(symbolic, 0.5, 1e-15));
        assert!(matches!(kappa_eval(&p, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn smooth_taper_is_c1_at_both_ends() {
        let p = CutoffProfile::smooth(2.0);
        let h = 1e-6;
        for t in [1.0, 2.0] {
            let left = (p.kappa(t) - p.kappa(t - h)) / h;
            let right = (p.kappa(t + h) - p.kappa(t)) / h;
            assert!(left.abs() < 1e-5 && right.abs() < 1e-5, "t={t} {left} {right}");
        }
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = p.kappa(1.0 + i as f64 / 100.0);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn form_factor_examples() {
        let p = CutoffProfile::sharp(2.0);
        let f1 = form_factor(&p, &Momentum::new(0.0, 1.0, 0.0)).unwrap();
        assert!(close(f1, 1.0 / (2.0 * PI), 1e-15));
        assert!(close(f1, 0.159155, 1e-6));
        let f2 = form_factor(&p, &Momentum::new(0.25, 0.0, 0.0)).unwrap();
        assert!(close(f2, 1.0 / PI, 1e-15));
        assert_eq!(form_factor(&p, &Momentum::new(4.0, 0.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(
            form_factor(&p, &Momentum::new(0.0, 0.0, 0.0)),
            Err(Error::SingularPoint(_))
        ));
    }

    #[test]
    fn polarization_examples() {
        let e = polarization_basis(&Momentum::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(e.eps1, [1.0, 0.0, 0.0]);
        assert_eq!(e.eps2, [0.0, 1.0, 0.0]);
        let e = polarization_basis(&Momentum::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(e.eps1, [0.0, -1.0, 0.0]);
        assert_eq!(e.eps2, [0.0, 0.0, -1.0]);
        assert!(polarization_basis(&Momentum::new(0.0, 0.0, 0.0)).is_err());
        assert!(transverse_projector(&Momentum::new(0.0, 0.0, 0.0)).is_err());
        let p = transverse_projector(&Momentum::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p.0, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]);
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-3.0f64..3.0).prop_filter("nonzero", |v| norm(v) > 1e-3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn polarization_triad(k in vec3()) {
            let e = polarization_basis(&Momentum(k)).unwrap();
            let r = norm(&k);
            prop_assert!((dot(&e.eps1, &e.eps1) - 1.0).abs() < 1e-14);
            prop_assert!((dot(&e.eps2, &e.eps2) - 1.0).abs() < 1e-14);
            prop_assert!(dot(&e.eps1, &e.eps2).abs() < 1e-14);
            prop_assert!((dot(&e.eps1, &k) / r).abs() < 1e-14);
            prop_assert!((dot(&e.eps2, &k) / r).abs() < 1e-14);
        }

        #[test]
        fn projector_matches_polarization_sum(k in vec3()) {
            let e = polarization_basis(&Momentum(k)).unwrap();
            let p = transverse_projector(&Momentum(k)).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let s = e.eps1[i] * e.eps1[j] + e.eps2[i] * e.eps2[j];
                    prop_assert!((s - p.0[i][j]).abs() < 1e-14);
                }
            }
            let pk = p.apply(&k);
            prop_assert!(norm(&pk) < 1e-14 * norm(&k));
            prop_assert!((p.trace() - 2.0).abs() < 1e-14);
        }

        #[test]
        fn polarization_sum_identity(k in vec3(), q in vec3()) {
            let ek = polarization_basis(&Momentum(k)).unwrap();
            let eq = polarization_basis(&Momentum(q)).unwrap();
            let mut brute = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    brute += dot(ek.get(a), eq.get(b)).powi(2);
                }
            }
            let c = dot(&k, &q) / (norm(&k) * norm(&q));
            let pk = transverse_projector(&Momentum(k)).unwrap();
            let pq = transverse_projector(&Momentum(q)).unwrap();
            prop_assert!((brute - (1.0 + c * c)).abs() < 1e-13);
            prop_assert!((pk.trace_product(&pq) - (1.0 + c * c)).abs() < 1e-13);
        }
    }
}
