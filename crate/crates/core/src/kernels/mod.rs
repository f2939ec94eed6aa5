//! Basis states of the expansion and pointwise amplitude evaluation.

mod amplitude;

pub use amplitude::{
    Amp, ModeTable, PairIntegrand, PairWeight, Shape, Slots, Tensor, MAX_MOMENTA, MAX_RANK, TENSOR_LEN,
};

use crate::error::{Error, Result};
use crate::model::{polarization_unchecked, CutoffProfile, Momentum, Vec3};

/// Φ₂ = -(H_f + P_f²)^{-1} A⁺·A⁺ Ω
pub fn phi2() -> Amp {
    Amp::vacuum().aplus_aplus().resolvent().scale(-1.0)
}

/// Φ₃ = -(H_f + P_f²)^{-1} P_f·A⁺ Φ₂
pub fn phi3() -> Amp {
    phi2().pf_aplus().resolvent().scale(-1.0)
}

/// Φ₁ = -(H_f + P_f²)^{-1} P_f·A⁻ Φ₂
pub fn phi1() -> Amp {
    phi2().pf_aminus().resolvent().scale(-1.0)
}

/// Parts of Φ̃₂ before the projection off Φ₂:
/// -R P_f·A⁺Φ₁, -R P_f·A⁻Φ₃, -½ R A⁺·A⁻Φ₂.
pub fn phi2tilde_raw_parts() -> [Amp; 3] {
    [
        phi1().pf_aplus().resolvent().scale(-1.0),
        phi3().pf_aminus().resolvent().scale(-1.0),
        phi2().aplus_aminus().resolvent().scale(-0.5),
    ]
}

/// Sum of the three raw parts.
pub fn phi2tilde_unprojected() -> Amp {
    Amp::Sum(phi2tilde_raw_parts().into_iter().map(|a| (1.0, a)).collect())
}

/// Parts of Φ₄: -R P_f·A⁺Φ₃ and -¼ R A⁺·A⁺Φ₂.
pub fn phi4_parts() -> [Amp; 2] {
    [
        phi3().pf_aplus().resolvent().scale(-1.0),
        phi2().aplus_aplus().resolvent().scale(-0.25),
    ]
}

pub fn phi4() -> Amp {
    Amp::Sum(phi4_parts().into_iter().map(|a| (1.0, a)).collect())
}

/// Photon configuration: momenta with polarization indices (0 or 1).
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonConfig(pub Vec<(Momentum, usize)>);

impl PhotonConfig {
    pub fn sector(&self) -> usize {
        self.0.len()
    }
}

/// Tensor-product rule over one momentum ball, used for internal integrals.
#[derive(Clone, Debug)]
pub struct InternalRule {
    pub nodes: Vec<(Vec3, f64)>,
}

impl InternalRule {
    /// Gauss rule in (u, cos θ, φ) with r = Λu², n points per axis
    /// (two radial panels when the profile has a taper).
    pub fn ball(profile: &CutoffProfile, n: usize) -> Self {
        use crate::quadrature::gauss;
        use std::f64::consts::PI;
        let lam = profile.support();
        let (u, wu) = match profile.breakpoint() {
            Some(b) if b > 0.0 => gauss::composite(n, &[0.0, (b / lam).sqrt(), 1.0]),
            _ => gauss::on_interval(n, 0.0, 1.0),
        };
        let (c, wc) = gauss::on_interval(n, -1.0, 1.0);
        let (p, wp) = gauss::on_interval(n, 0.0, 2.0 * PI);
        let mut nodes = Vec::with_capacity(u.len() * n * n);
        for (ui, wui) in u.iter().zip(&wu) {
            let r = lam * ui * ui;
            let wr = wui * 2.0 * lam * ui * r * r;
            for (ci, wci) in c.iter().zip(&wc) {
                let s = (1.0 - ci * ci).sqrt();
                for (pi, wpi) in p.iter().zip(&wp) {
                    nodes.push(([r * s * pi.cos(), r * s * pi.sin(), r * ci], wr * wci * wpi));
                }
            }
        }
        InternalRule { nodes }
    }
}

/// Symmetric n-photon amplitude of a basis state or operator image.
#[derive(Clone, Debug)]
pub struct SectorKernel {
    pub label: String,
    pub amp: Amp,
    pub profile: CutoffProfile,
}

impl SectorKernel {
    pub fn new(label: &str, amp: Amp, profile: CutoffProfile) -> Self {
        assert_eq!(amp.shape().free, 0, "kernels carry no free indices");
        SectorKernel {
            label: label.to_string(),
            amp,
            profile,
        }
    }

    pub fn sector(&self) -> usize {
        self.amp.shape().sector
    }

    pub fn needs_internal_quadrature(&self) -> bool {
        self.amp.shape().internal > 0
    }

    /// Amplitude ψ(k₁λ₁, …, kₙλₙ) for kernels without internal integrals.
    pub fn amplitude(&self, config: &PhotonConfig) -> Result<f64> {
        if self.needs_internal_quadrature() {
            return Err(Error::Validation(format!(
                "kernel `{}` needs an internal quadrature rule",
                self.label
            )));
        }
        self.amplitude_with(config, &InternalRule { nodes: Vec::new() })
    }

    /// Amplitude with each internal momentum integrated by `rule`.
    pub fn amplitude_with(&self, config: &PhotonConfig, rule: &InternalRule) -> Result<f64> {
        let shape = self.amp.shape();
        if config.sector() != shape.sector {
            return Err(Error::Validation(format!(
                "kernel `{}` lives in sector {}, got {} photons",
                self.label,
                shape.sector,
                config.sector()
            )));
        }
        let mut momenta: Vec<Vec3> = Vec::with_capacity(shape.sector + shape.internal);
        let mut eps = Vec::with_capacity(shape.sector);
        for (k, lam) in &config.0 {
            let r = k.magnitude();
            if r == 0.0 {
                return Err(Error::SingularPoint(format!(
                    "kernel `{}` evaluated at zero photon momentum",
                    self.label
                )));
            }
            momenta.push(k.0);
            eps.push(*polarization_unchecked(&k.0, r).get(*lam));
        }
        let n = shape.sector;
        let outer = Slots::range(0, n);
        let internal = Slots::range(n, n + shape.internal);
        let nq = rule.nodes.len();
        let tuples = nq.pow(shape.internal as u32);
        let mut out = [0.0; TENSOR_LEN];
        let mut total = 0.0;
        momenta.resize(n + shape.internal, [0.0; 3]);
        for t in 0..tuples {
            let mut w = 1.0;
            let mut rem = t;
            for j in 0..shape.internal {
                let (q, wq) = rule.nodes[rem % nq];
                rem /= nq;
                momenta[n + j] = q;
                w *= wq;
            }
            let modes = ModeTable::new(&self.profile, &momenta);
            self.amp.eval(&modes, &outer, &internal, &mut out);
            total += w * contract(&out, &eps);
        }
        Ok(total)
    }
}

/// Σ T[i₁…iₙ] ε₁[i₁]…εₙ[iₙ]
fn contract(t: &Tensor, eps: &[Vec3]) -> f64 {
    let n = eps.len();
    let len = 3usize.pow(n as u32);
    let mut s = 0.0;
    for (idx, v) in t[..len].iter().enumerate() {
        let mut w = *v;
        let mut rem = idx;
        for e in eps.iter().rev() {
            w *= e[rem % 3];
            rem /= 3;
        }
        s += w;
    }
    s
}

pub fn phi2_kernel(profile: CutoffProfile) -> SectorKernel {
    SectorKernel::new("phi2", phi2(), profile)
}

pub fn phi3_kernel(profile: CutoffProfile) -> SectorKernel {
    SectorKernel::new("phi3", phi3(), profile)
}

pub fn phi1_integrand(profile: CutoffProfile) -> SectorKernel {
    SectorKernel::new("phi1", phi1(), profile)
}

pub fn phi4_part_kernels(profile: CutoffProfile) -> (SectorKernel, SectorKernel) {
    let [a, b] = phi4_parts();
    (
        SectorKernel::new("phi4.1", a, profile),
        SectorKernel::new("phi4.2", b, profile),
    )
}

pub fn phi2tilde_raw_part_kernels(profile: CutoffProfile) -> [SectorKernel; 3] {
    let [a, b, c] = phi2tilde_raw_parts();
    [
        SectorKernel::new("phi2t.1", a, profile),
        SectorKernel::new("phi2t.2", b, profile),
        SectorKernel::new("phi2t.3", c, profile),
    ]
}

/// H_f + P_f² on a configuration.
pub fn resolvent_weight(config: &PhotonConfig) -> f64 {
    let mut h = 0.0;
    let mut p = [0.0; 3];
    for (k, _) in &config.0 {
        h += k.magnitude();
        p = crate::model::add(&p, &k.0);
    }
    h + crate::model::dot(&p, &p)
}
