//! Finite-mode, photon-number-truncated Fock model of the fiber Hamiltonian.
//!
//! Each momentum mode k_m with cell weight w_m carries two polarizations;
//! the single-photon coupling is g = f(k_m) √w_m ε_λ(k_m). Replacing every
//! momentum integral by Σ_m w_m turns the continuum formulas into exact
//! finite-dimensional linear algebra, which is what the continuum kernels are
//! checked against.

mod amp;
pub mod lanczos;
pub mod modes;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dot, norm, polarization_unchecked, scale, CutoffProfile, Vec3};

pub use lanczos::{LanczosOptions, SpectralResult};
pub use modes::{mode_set, spherical_design, ModeSpec};

/// Default cap on the occupation-basis dimension.
pub const DIMENSION_CAP: usize = 2_000_000;

#[derive(Clone, Debug)]
struct SingleMode {
    k: Vec3,
    r: f64,
    g: Vec3,
}

/// One annihilation matrix entry: a_s |state⟩ = amp |target⟩.
#[derive(Clone, Copy, Debug)]
struct Lowering {
    single: u32,
    target: u32,
    amp: f64,
}

#[derive(Clone, Debug)]
pub struct DiscreteModel {
    pub profile: CutoffProfile,
    pub modes: Vec<(Vec3, f64)>,
    pub nmax: usize,
    pub p: Vec3,
    pub warnings: Vec<String>,
    singles: Vec<SingleMode>,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    sector: Vec<u8>,
    hf: Vec<f64>,
    pf: Vec<Vec3>,
    low_ptr: Vec<usize>,
    low: Vec<Lowering>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All occupation vectors of `slots` modes with `total` photons, in
/// lexicographic order.
fn compositions(slots: usize, total: usize, out: &mut Vec<Vec<u8>>) {
    fn rec(cur: &mut Vec<u8>, slot: usize, left: usize, out: &mut Vec<Vec<u8>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left as u8;
            out.push(cur.clone());
            return;
        }
        for n in (0..=left).rev() {
            cur[slot] = n as u8;
            rec(cur, slot + 1, left - n, out);
        }
        cur[slot] = 0;
    }
    let mut cur = vec![0u8; slots];
    rec(&mut cur, 0, total, out);
}

impl DiscreteModel {
    /// Model on explicit modes with at most `nmax` photons and fiber momentum `p`.
    pub fn new(profile: CutoffProfile, modes: Vec<(Vec3, f64)>, nmax: usize, p: Vec3) -> Result<Self> {
        Self::with_cap(profile, modes, nmax, p, DIMENSION_CAP)
    }

    pub fn from_spec(profile: CutoffProfile, spec: ModeSpec, nmax: usize) -> Result<Self> {
        Self::new(profile, mode_set(&profile, spec)?, nmax, [0.0; 3])
    }

    pub fn with_cap(profile: CutoffProfile, modes: Vec<(Vec3, f64)>, nmax: usize, p: Vec3, cap: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Validation("discrete model needs at least one mode".into()));
        }
        let mut warnings = Vec::new();
        let mut singles = Vec::with_capacity(2 * modes.len());
        for (m, (k, w)) in modes.iter().enumerate() {
            let r = norm(k);
            if r == 0.0 || *w <= 0.0 {
                return Err(Error::Validation(format!(
                    "mode {m} needs nonzero momentum and positive weight"
                )));
            }
            let f = profile.coupling(r);
            if f == 0.0 {
                warnings.push(format!("mode {m} at |k| = {r} lies where κ vanishes"));
            }
            let eps = polarization_unchecked(k, r);
            for lam in 0..2 {
                singles.push(SingleMode {
                    k: *k,
                    r,
                    g: scale(eps.get(lam), f * w.sqrt()),
                });
            }
        }
        let s = singles.len();
        let dim = binomial(s + nmax, nmax);
        if dim > cap as f64 {
            return Err(Error::Size(format!(
                "{s} single modes with at most {nmax} photons give {dim} states (cap {cap})"
            )));
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut sector = Vec::with_capacity(dim as usize);
        for n in 0..=nmax {
            let before = states.len();
            compositions(s, n, &mut states);
            sector.resize(sector.len() + states.len() - before, n as u8);
        }
        let index: HashMap<Vec<u8>, usize> = states.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut hf = Vec::with_capacity(states.len());
        let mut pf = Vec::with_capacity(states.len());
        let mut low_ptr = Vec::with_capacity(states.len() + 1);
        let mut low = Vec::new();
        low_ptr.push(0);
        let mut tmp = vec![0u8; s];
        for occ in &states {
            let mut h = 0.0;
            let mut pt = [0.0; 3];
            for (j, &n) in occ.iter().enumerate() {
                if n > 0 {
                    h += n as f64 * singles[j].r;
                    for c in 0..3 {
                        pt[c] += n as f64 * singles[j].k[c];
                    }
                    tmp.copy_from_slice(occ);
                    tmp[j] -= 1;
                    low.push(Lowering {
                        single: j as u32,
                        target: index[&tmp] as u32,
                        amp: (n as f64).sqrt(),
                    });
                }
            }
            hf.push(h);
            pf.push(pt);
            low_ptr.push(low.len());
        }
        Ok(DiscreteModel {
            profile,
            modes,
            nmax,
            p,
            warnings,
            singles,
            states,
            index,
            sector,
            hf,
            pf,
            low_ptr,
            low,
        })
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn single_modes(&self) -> usize {
        self.singles.len()
    }

    pub fn occupation(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn state_index(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn sector_of(&self, i: usize) -> usize {
        self.sector[i] as usize
    }

    /// Single-mode indices of the photons in basis state i, with multiplicity.
    pub fn photons(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (s, &n) in self.states[i].iter().enumerate() {
            out.extend(std::iter::repeat_n(s, n as usize));
        }
        out
    }

    /// √(n!/∏ n_s!) ∏ √w: factor between a continuum amplitude at the mode
    /// points and the occupation-basis coefficient of state i.
    pub fn coefficient_factor(&self, i: usize) -> f64 {
        let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
        let occ = &self.states[i];
        let n: usize = occ.iter().map(|&v| v as usize).sum();
        let denom: f64 = occ.iter().map(|&v| fact(v as usize)).product();
        let w: f64 = self.photons(i).iter().map(|&s| self.modes[s / 2].1.sqrt()).product();
        (fact(n) / denom).sqrt() * w
    }

    /// (mode, polarization) of single mode s.
    pub fn single_mode(&self, s: usize) -> (usize, usize) {
        (s / 2, s % 2)
    }

    pub fn vacuum(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension()];
        v[0] = 1.0;
        v
    }

    /// Value of H_f + P_f² on each basis state.
    pub fn resolvent_weight(&self, i: usize) -> f64 {
        self.hf[i] + dot(&self.pf[i], &self.pf[i])
    }

    /// j-th component of A⁻.
    pub fn aminus(&self, j: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0.0 {
                continue;
            }
            for l in &self.low[self.low_ptr[i]..self.low_ptr[i + 1]] {
                out[l.target as usize] += self.singles[l.single as usize].g[j] * l.amp * xi;
            }
        }
        out
    }

    /// j-th component of A⁺ (transpose of A⁻).
    pub fn aplus(&self, j: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for l in &self.low[self.low_ptr[i]..self.low_ptr[i + 1]] {
                s += self.singles[l.single as usize].g[j] * l.amp * x[l.target as usize];
            }
            *o = s;
        }
        out
    }

    /// j-th component of P_f.
    pub fn pf(&self, j: usize, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.pf).map(|(v, p)| v * p[j]).collect()
    }

    /// (H_f + P_f²)^{-1}; the vacuum component must vanish.
    pub fn resolvent(&self, x: &[f64]) -> Vec<f64> {
        debug_assert!(x[0].abs() < 1e-300 || x[0] == 0.0, "resolvent on the vacuum");
        let mut out: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 { 0.0 } else { v / self.resolvent_weight(i) })
            .collect();
        out[0] = 0.0;
        out
    }

    fn sum3(&self, f: impl Fn(usize) -> Vec<f64>) -> Vec<f64> {
        let mut acc = f(0);
        for j in 1..3 {
            for (a, b) in acc.iter_mut().zip(f(j)) {
                *a += b;
            }
        }
        acc
    }

    pub fn pf_aplus(&self, x: &[f64]) -> Vec<f64> {
        self.sum3(|j| self.pf(j, &self.aplus(j, x)))
    }

    pub fn aplus_pf(&self, x: &[f64]) -> Vec<f64> {
        self.sum3(|j| self.aplus(j, &self.pf(j, x)))
    }

    pub fn pf_aminus(&self, x: &[f64]) -> Vec<f64> {
        self.sum3(|j| self.pf(j, &self.aminus(j, x)))
    }

    pub fn aplus_aplus(&self, x: &[f64]) -> Vec<f64> {
        self.sum3(|j| self.aplus(j, &self.aplus(j, x)))
    }

    pub fn aminus_aminus(&self, x: &[f64]) -> Vec<f64> {
        self.sum3(|j| self.aminus(j, &self.aminus(j, x)))
    }

    pub fn aplus_aminus(&self, x: &[f64]) -> Vec<f64> {
        self.sum3(|j| self.aplus(j, &self.aminus(j, x)))
    }

    /// ⟨x, (H_f + P_f²) y⟩
    pub fn star(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..x.len()).map(|i| x[i] * self.resolvent_weight(i) * y[i]).sum()
    }

    /// ⟨x, N_f y⟩
    pub fn number(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..x.len()).map(|i| x[i] * self.sector[i] as f64 * y[i]).sum()
    }

    /// T(p)x = [H_f + (p - P_f)² - 2√α (p - P_f)·A + α :A·A:] x
    pub fn apply_t(&self, alpha: f64, x: &[f64], out: &mut [f64]) {
        let n = x.len();
        let shifted: Vec<Vec3> = self
            .pf
            .iter()
            .map(|q| [self.p[0] - q[0], self.p[1] - q[1], self.p[2] - q[2]])
            .collect();
        for i in 0..n {
            out[i] = (self.hf[i] + dot(&shifted[i], &shifted[i])) * x[i];
        }
        if alpha == 0.0 {
            return;
        }
        let e = alpha.sqrt();
        for j in 0..3 {
            let up = self.aplus(j, x);
            let down = self.aminus(j, x);
            let upup = self.aplus(j, &up);
            let downdown = self.aminus(j, &down);
            let updown = self.aplus(j, &down);
            for i in 0..n {
                out[i] +=
                    -2.0 * e * shifted[i][j] * (up[i] + down[i]) + alpha * (upup[i] + downdown[i] + 2.0 * updown[i]);
            }
        }
    }

    /// Operator-norm estimate for convergence tolerances.
    pub fn scale_estimate(&self, alpha: f64) -> f64 {
        let diag = (0..self.dimension())
            .map(|i| {
                let q = [
                    self.p[0] - self.pf[i][0],
                    self.p[1] - self.pf[i][1],
                    self.p[2] - self.pf[i][2],
                ];
                self.hf[i] + dot(&q, &q)
            })
            .fold(0.0, f64::max);
        let g: f64 = self.singles.iter().map(|s| dot(&s.g, &s.g)).sum();
        let nm = self.nmax as f64 + 1.0;
        diag + 2.0 * alpha.sqrt() * diag.sqrt() * (g * nm).sqrt() + 4.0 * alpha * g * nm
    }

    /// Lowest eigenpair of T(p) at coupling α, starting from the vacuum.
    pub fn ground_state(&self, alpha: f64, opts: LanczosOptions) -> Result<SpectralResult> {
        if alpha < 0.0 {
            return Err(Error::Domain(format!("coupling must be >= 0, got {alpha}")));
        }
        let apply = |x: &[f64], y: &mut [f64]| self.apply_t(alpha, x, y);
        let mut r = if self.dimension() <= 600 {
            lanczos::lowest_dense(apply, self.dimension())
        } else {
            lanczos::lowest(apply, &self.vacuum(), self.scale_estimate(alpha), opts)?
        };
        // Fix the sign so the vacuum component is non-negative.
        if r.vector[0] < 0.0 {
            r.vector.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(r)
    }

    /// The basis states built verbatim from their defining formulas.
    pub fn basis_states(&self) -> DiscreteBasis {
        let neg = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| -x).collect() };
        let lin = |terms: &[(f64, &Vec<f64>)]| -> Vec<f64> {
            let mut out = vec![0.0; self.dimension()];
            for (c, v) in terms {
                for (o, x) in out.iter_mut().zip(v.iter()) {
                    *o += c * x;
                }
            }
            out
        };
        let omega = self.vacuum();
        let phi2 = neg(self.resolvent(&self.aplus_aplus(&omega)));
        let phi3 = neg(self.resolvent(&self.pf_aplus(&phi2)));
        let phi1 = neg(self.resolvent(&self.pf_aminus(&phi2)));
        let raw = [
            neg(self.resolvent(&self.pf_aplus(&phi1))),
            neg(self.resolvent(&self.pf_aminus(&phi3))),
            lin(&[(-0.5, &self.resolvent(&self.aplus_aminus(&phi2)))]),
        ];
        let x = lin(&[(1.0, &raw[0]), (1.0, &raw[1]), (1.0, &raw[2])]);
        let n2s = self.star(&phi2, &phi2);
        let cstar = if n2s > 0.0 { self.star(&phi2, &x) / n2s } else { 0.0 };
        let phi2t = lin(&[(1.0, &x), (-cstar, &phi2)]);
        let phi4a = neg(self.resolvent(&self.pf_aplus(&phi3)));
        let phi4b = lin(&[(-0.25, &self.resolvent(&self.aplus_aplus(&phi2)))]);
        let phi4 = lin(&[(1.0, &phi4a), (1.0, &phi4b)]);
        DiscreteBasis {
            omega,
            phi1,
            phi2,
            phi2t,
            phi3,
            phi4,
            raw,
            phi4_parts: [phi4a, phi4b],
            cstar,
        }
    }

    /// ⟨Θ, N_f Θ⟩/α³ for the ground vector Ψ (normalized to ⟨Ω, Ψ⟩ = 1)
    /// minus its plain projection onto span{Ω, Φ₁, Φ₂, Φ₃}.
    pub fn photon_number_diagnostic(&self, alpha: f64, opts: LanczosOptions) -> Result<f64> {
        let gs = self.ground_state(alpha, opts)?;
        let psi: Vec<f64> = gs.vector.iter().map(|v| v / gs.vector[0]).collect();
        let b = self.basis_states();
        let mut theta = psi.clone();
        // Ω, Φ₁, Φ₂, Φ₃ live in different sectors, so they are orthogonal.
        for v in [&b.omega, &b.phi1, &b.phi2, &b.phi3] {
            let vv = dot_vec(v, v);
            if vv > 1e-300 {
                let c = dot_vec(v, &theta) / vv;
                for (t, x) in theta.iter_mut().zip(v.iter()) {
                    *t -= c * x;
                }
            }
        }
        Ok(self.number(&theta, &theta) / alpha.powi(3))
    }
}

pub fn dot_vec(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Discrete Ω, Φ₁, Φ₂, Φ̃₂, Φ₃, Φ₄ with their parts.
#[derive(Clone, Debug)]
pub struct DiscreteBasis {
    pub omega: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub phi2t: Vec<f64>,
    pub phi3: Vec<f64>,
    pub phi4: Vec<f64>,
    /// The three parts of Φ̃₂ before projection.
    pub raw: [Vec<f64>; 3],
    pub phi4_parts: [Vec<f64>; 2],
    /// *-projection coefficient of the raw sum onto Φ₂.
    pub cstar: f64,
}

impl DiscreteBasis {
    /// (Ω, Φ₁, Φ₂, Φ̃₂, Φ₃, Φ₄)
    pub fn vectors(&self) -> [&Vec<f64>; 6] {
        [&self.omega, &self.phi1, &self.phi2, &self.phi2t, &self.phi3, &self.phi4]
    }
}

/// One α of an extrapolated energy curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha: f64,
    pub energy: f64,
    pub band: f64,
    pub levels: Vec<f64>,
}

/// Ground energies over a mode-refinement sequence, extrapolated per α.
///
/// The last three levels give an Aitken Δ² estimate when the differences
/// contract; otherwise the finest level is kept. The band is the difference
/// of the last two levels.
pub fn richardson_energy_curve(
    profile: CutoffProfile,
    levels: &[ModeSpec],
    nmax: usize,
    alphas: &[f64],
    opts: LanczosOptions,
) -> Result<Vec<CurvePoint>> {
    if levels.len() < 3 {
        return Err(Error::Validation("need at least 3 refinement levels".into()));
    }
    if levels.windows(2).any(|w| w[1].count() <= w[0].count()) {
        return Err(Error::Validation(
            "refinement levels must have strictly increasing mode counts".into(),
        ));
    }
    let models = levels
        .iter()
        .map(|s| DiscreteModel::from_spec(profile, *s, nmax))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let es = models
            .iter()
            .map(|m| m.ground_state(alpha, opts).map(|r| r.energy))
            .collect::<Result<Vec<_>>>()?;
        let l = es.len();
        let (a, b, c) = (es[l - 3], es[l - 2], es[l - 1]);
        let (d1, d2) = (b - a, c - b);
        let band = d2.abs();
        let energy = if d1 != 0.0 && (d2 / d1).abs() < 0.9 && d1 != d2 {
            c - d2 * d2 / (d2 - d1)
        } else {
            c
        };
        out.push(CurvePoint {
            alpha,
            energy,
            band,
            levels: es,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DiscreteModel {
        DiscreteModel::from_spec(CutoffProfile::default(), ModeSpec { radial: 1, angular: 4 }, 4).unwrap()
    }

    #[test]
    fn single_mode_free_spectrum() {
        let k = [0.3, 0.4, 0.5];
        let m = DiscreteModel::new(CutoffProfile::sharp(2.0), vec![(k, 0.7)], 1, [0.0; 3]).unwrap();
        assert_eq!(m.dimension(), 3);
        let r = norm(&k);
        let mut y = vec![0.0; 3];
        for i in 0..3 {
            let mut e = vec![0.0; 3];
            e[i] = 1.0;
            m.apply_t(0.0, &e, &mut y);
            let expect = if i == 0 { 0.0 } else { r + r * r };
            assert!((y[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_is_binomial() {
        let m = small();
        assert_eq!(m.dimension(), binomial(8 + 4, 4) as usize);
        assert_eq!(m.state_index(m.occupation(17)), Some(17));
        assert!((1..m.dimension()).all(|i| m.sector_of(i) >= m.sector_of(i - 1)));
    }

    #[test]
    fn size_guard() {
        let p = CutoffProfile::default();
        let modes = mode_set(&p, ModeSpec { radial: 4, angular: 32 }).unwrap();
        assert!(matches!(
            DiscreteModel::with_cap(p, modes, 4, [0.0; 3], 1000),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn operators_are_adjoint_and_transverse() {
        let m = small();
        let n = m.dimension();
        let x: Vec<f64> = (0..n).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.5).collect();
        let y: Vec<f64> = (0..n).map(|i| ((i * 104729) % 97) as f64 / 97.0 - 0.5).collect();
        for j in 0..3 {
            let a = dot_vec(&y, &m.aplus(j, &x));
            let b = dot_vec(&m.aminus(j, &y), &x);
            assert!((a - b).abs() < 1e-13);
        }
        let l = m.pf_aplus(&x);
        let r = m.aplus_pf(&x);
        let dev = l.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-14, "{dev}");
        let down = m.aminus(0, &m.vacuum());
        assert!(down.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn normal_ordered_vacuum_energy_is_zero() {
        let m = small();
        let mut y = vec![0.0; m.dimension()];
        for alpha in [0.0, 0.01, 0.3] {
            m.apply_t(alpha, &m.vacuum(), &mut y);
            assert!(y[0].abs() < 1e-15);
        }
    }

    #[test]
    fn linear_terms_change_photon_number_by_one() {
        let m = small();
        let mut x = vec![0.0; m.dimension()];
        let i2 = (0..m.dimension()).find(|&i| m.sector_of(i) == 2).unwrap();
        x[i2] = 1.0;
        let up = m.aplus(1, &x);
        let down = m.aminus(1, &x);
        assert!(up.iter().enumerate().all(|(i, v)| *v == 0.0 || m.sector_of(i) == 3));
        assert!(down.iter().enumerate().all(|(i, v)| *v == 0.0 || m.sector_of(i) == 1));
    }

    #[test]
    fn ground_state_negative_and_vacuum_at_zero() {
        let m = small();
        let r0 = m.ground_state(0.0, LanczosOptions::default()).unwrap();
        assert_eq!(r0.energy, 0.0);
        assert!((r0.vector[0].abs() - 1.0).abs() < 1e-12);
        let r = m.ground_state(0.01, LanczosOptions::default()).unwrap();
        assert!(r.energy < 0.0);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn lanczos_matches_dense_on_medium_model() {
        let p = CutoffProfile::default();
        let m = DiscreteModel::from_spec(p, ModeSpec { radial: 1, angular: 6 }, 4).unwrap();
        assert!(m.dimension() > 600);
        let apply = |x: &[f64], y: &mut [f64]| m.apply_t(0.05, x, y);
        let dense = lanczos::lowest_dense(apply, m.dimension());
        let lz = m.ground_state(0.05, LanczosOptions::default()).unwrap();
        assert!((dense.energy - lz.energy).abs() < 1e-12);
    }

    #[test]
    fn truncation_is_monotone() {
        let p = CutoffProfile::default();
        let modes = mode_set(&p, ModeSpec { radial: 1, angular: 4 }).unwrap();
        let e: Vec<f64> = [2, 3, 4]
            .iter()
            .map(|&n| {
                DiscreteModel::new(p, modes.clone(), n, [0.0; 3])
                    .unwrap()
                    .ground_state(0.2, LanczosOptions::default())
                    .unwrap()
                    .energy
            })
            .collect();
        assert!(e[2] <= e[1] + 1e-14 && e[1] <= e[0] + 1e-14, "{e:?}");
    }

    #[test]
    fn discrete_phi2tilde_is_star_orthogonal_to_phi2() {
        let m = small();
        let b = m.basis_states();
        let s = m.star(&b.phi2, &b.phi2t);
        assert!(s.abs() < 1e-12 * m.star(&b.phi2, &b.phi2).max(1.0));
    }

    #[test]
    fn richardson_validates_levels() {
        let p = CutoffProfile::default();
        let l = [ModeSpec { radial: 1, angular: 4 }, ModeSpec { radial: 1, angular: 4 }];
        assert!(richardson_energy_curve(p, &l, 2, &[0.0], LanczosOptions::default()).is_err());
    }
}
