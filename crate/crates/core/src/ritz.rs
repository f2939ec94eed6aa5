//! Rayleigh–Ritz over span{Ω, Φ₁, Φ₂, Φ̃₂, Φ₃, Φ₄}, the fixed trial
//! state and the small-α polynomial fit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::elements::{Derived, ElementTable, Estimate};
use crate::error::{Error, Result};

pub const BASIS: [&str; 6] = ["omega", "phi1", "phi2", "phi2t", "phi3", "phi4"];
pub const SECTORS: [usize; 6] = [0, 1, 2, 2, 3, 4];

const OMEGA: usize = 0;
const PHI1: usize = 1;
const PHI2: usize = 2;
const PHI2T: usize = 3;
const PHI3: usize = 4;
const PHI4: usize = 5;

pub type Block = [[Estimate; 6]; 6];

/// ⟨bᵢ, T(0)bⱼ⟩ = H0 + α^{1/2} H1 + α H2, plus the plain Gram matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisMatrices {
    pub g: Block,
    pub h0: Block,
    pub h1: Block,
    pub h2: Block,
    pub beta: Estimate,
}

fn set(m: &mut Block, i: usize, j: usize, v: Estimate) {
    m[i][j] = v;
    m[j][i] = v;
}

impl BasisMatrices {
    /// Entries from the element table. Every coupling is written with the
    /// operator applied to the left state so it reduces to *-products.
    pub fn from_table(t: &ElementTable) -> Result<Self> {
        let d = Derived::new(t);
        let n2s = t.get("n2s")?;
        if n2s.value <= 0.0 {
            return Err(Error::DegenerateProfile("‖Φ₂‖∗² vanishes".into()));
        }
        let c = d.cstar()?;
        let z = [[Estimate::ZERO; 6]; 6];
        let (mut g, mut h0, mut h1, mut h2) = (z, z, z, z);

        set(&mut g, OMEGA, OMEGA, Estimate::exact(1.0));
        set(&mut g, PHI1, PHI1, t.get("l1")?);
        set(&mut g, PHI2, PHI2, t.get("l2")?);
        set(&mut g, PHI2, PHI2T, d.phi2_tilde("p")?);
        set(&mut g, PHI2T, PHI2T, d.tilde_tilde("p")?);
        set(&mut g, PHI3, PHI3, t.get("l3")?);
        set(&mut g, PHI4, PHI4, d.phi4_phi4("p")?);

        // Φ₂ ⊥∗ Φ̃₂ by construction of c⋆.
        set(&mut h0, PHI1, PHI1, t.get("n1s")?);
        set(&mut h0, PHI2, PHI2, n2s);
        set(&mut h0, PHI2T, PHI2T, d.n2ts()?);
        set(&mut h0, PHI3, PHI3, t.get("n3s")?);
        set(&mut h0, PHI4, PHI4, d.n4s()?);

        // P_f vanishes on Ω, so (Ω, Φ₁) is a structural zero.
        set(&mut h1, PHI2, PHI1, -t.get("n1s")?.scale(2.0));
        set(&mut h1, PHI2T, PHI1, -d.raw_tilde("s", "r1")?.scale(2.0));
        set(&mut h1, PHI3, PHI2, -t.get("n3s")?.scale(2.0));
        set(&mut h1, PHI3, PHI2T, -d.raw_tilde("s", "r2")?.scale(2.0));
        set(&mut h1, PHI4, PHI3, -d.part_phi4_star("4a")?.scale(2.0));

        set(&mut h2, PHI1, PHI1, t.get("am1")?.scale(2.0));
        set(&mut h2, PHI2, PHI2, t.get("am2")?.scale(2.0));
        set(&mut h2, PHI2, PHI2T, -d.raw_tilde("s", "r3")?.scale(4.0));
        set(&mut h2, PHI2T, PHI2T, d.tilde_tilde("m")?.scale(2.0));
        set(&mut h2, PHI3, PHI3, t.get("am3")?.scale(2.0));
        set(&mut h2, PHI4, PHI4, d.phi4_phi4("m")?.scale(2.0));
        set(&mut h2, PHI2, OMEGA, -n2s);
        set(&mut h2, PHI3, PHI1, t.get("x13")?);
        let p4b = d.part_phi4_star("4b")?;
        set(&mut h2, PHI4, PHI2, -p4b.scale(4.0));
        let mut y = Vec::new();
        for r in ["r1", "r2", "r3"] {
            y.push(t.get(&format!("y_{r}_4a"))?);
            y.push(t.get(&format!("y_{r}_4b"))?);
        }
        set(&mut h2, PHI4, PHI2T, Estimate::sum(y) + (c * p4b).scale(4.0));

        let d1 = t.get("am2")?.scale(2.0) - t.get("n3s")?.scale(4.0) - t.get("n1s")?.scale(4.0);
        Ok(BasisMatrices {
            g,
            h0,
            h1,
            h2,
            beta: d1 / n2s,
        })
    }

    /// H(α) values and half-widths.
    pub fn hamiltonian(&self, alpha: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let s = alpha.sqrt();
        let v = DMatrix::from_fn(6, 6, |i, j| {
            self.h0[i][j].value + s * self.h1[i][j].value + alpha * self.h2[i][j].value
        });
        let e = DMatrix::from_fn(6, 6, |i, j| {
            let (a, b, c) = (
                self.h0[i][j].error,
                s * self.h1[i][j].error,
                alpha * self.h2[i][j].error,
            );
            (a * a + b * b + c * c).sqrt()
        });
        (v, e)
    }

    pub fn gram(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (
            DMatrix::from_fn(6, 6, |i, j| self.g[i][j].value),
            DMatrix::from_fn(6, 6, |i, j| self.g[i][j].error),
        )
    }

    /// Indices whose plain norm is indistinguishable from zero.
    pub fn null_directions(&self) -> Vec<usize> {
        let scale = (1..6).map(|i| self.g[i][i].value.abs()).fold(0.0, f64::max);
        (1..6)
            .filter(|&i| {
                let e = self.g[i][i];
                e.value <= (NULL_RELATIVE * scale).max(3.0 * e.error)
            })
            .collect()
    }
}

/// Relative plain-norm threshold below which a basis vector counts as null.
pub const NULL_RELATIVE: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RitzSolution {
    pub alpha: f64,
    pub energy: f64,
    /// Root-sum-square first-order response to the entry half-widths.
    pub sensitivity: f64,
    /// Coefficients over BASIS with the Ω component 1; null directions are 0.
    pub vector: [f64; 6],
    pub null: Vec<String>,
    pub residual: f64,
}

/// Lowest Ritz value over all basis vectors that are not null.
pub fn solve(m: &BasisMatrices, alpha: f64) -> Result<RitzSolution> {
    let keep: Vec<usize> = (0..6).filter(|i| !m.null_directions().contains(i)).collect();
    solve_on(m, alpha, &keep)
}

/// Lowest Ritz value over the given sub-basis (must contain Ω).
pub fn solve_on(m: &BasisMatrices, alpha: f64, keep: &[usize]) -> Result<RitzSolution> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    if keep.first() != Some(&OMEGA) {
        return Err(Error::Domain("sub-basis must start with Ω".into()));
    }
    let (hf, he) = m.hamiltonian(alpha);
    let (gf, ge) = m.gram();
    let n = keep.len();
    let h = DMatrix::from_fn(n, n, |i, j| hf[(keep[i], keep[j])]);
    let g = DMatrix::from_fn(n, n, |i, j| gf[(keep[i], keep[j])]);

    let chol = g.clone().cholesky().ok_or_else(|| {
        Error::Conditioning("Gram matrix is not positive definite after dropping null vectors".into())
    })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("singular Cholesky factor".into()))?;
    let a = &linv * &h * linv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let (k, mut energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let mut v: DVector<f64> = linv.transpose() * eig.eigenvectors.column(k);

    // Feshbach refinement on the Ω row: E = -hᵀ(H_r - E G_r)⁻¹h, with
    // H_ΩΩ = 0 and G_Ωj = δ_Ωj. Recovers full relative accuracy when E is
    // far below the scale of H.
    if n > 1 {
        let hr = h.view((1, 1), (n - 1, n - 1)).into_owned();
        let gr = g.view((1, 1), (n - 1, n - 1)).into_owned();
        let hv = h.view((1, 0), (n - 1, 1)).into_owned();
        for _ in 0..60 {
            let Some(c) = (&hr - &gr * energy).cholesky() else {
                break;
            };
            let x = c.solve(&hv);
            let next = -(hv.transpose() * &x)[(0, 0)];
            let done = (next - energy).abs() <= 1e-15 * next.abs().max(1e-300);
            energy = next;
            v = DVector::from_iterator(n, std::iter::once(1.0).chain(x.iter().map(|t| -t)));
            if done {
                break;
            }
        }
    }
    if v[0].abs() < 1e-300 {
        return Err(Error::Conditioning("Ritz vector has no Ω component".into()));
    }
    let v0 = v[0];
    v /= v0;
    let residual = (&h * &v - &g * &v * energy).amax();
    let hnorm = h.amax().max(1e-300);
    if residual > 1e-10 * hnorm * v.amax() {
        return Err(Error::Convergence {
            iterations: 60,
            residual,
        });
    }

    let norm = (v.transpose() * &g * &v)[(0, 0)];
    let mut sens = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let w = if i == j { 1.0 } else { 2.0 } * v[i] * v[j] / norm;
            let dh = w * he[(keep[i], keep[j])];
            let dg = w * energy * ge[(keep[i], keep[j])];
            sens += dh * dh + dg * dg;
        }
    }
    let mut vector = [0.0; 6];
    for (i, &b) in keep.iter().enumerate() {
        vector[b] = v[i];
    }
    Ok(RitzSolution {
        alpha,
        energy,
        sensitivity: sens.sqrt(),
        vector,
        null: (0..6)
            .filter(|b| !keep.contains(b))
            .map(|b| BASIS[b].to_string())
            .collect(),
        residual,
    })
}

/// Coefficients of the fixed trial state.
pub fn trial_vector(beta: f64, alpha: f64) -> [f64; 6] {
    let a32 = alpha.powf(1.5);
    let a2 = alpha * alpha;
    [
        1.0,
        2.0 * a32,
        alpha * (1.0 - beta * alpha),
        4.0 * a2,
        2.0 * a32,
        4.0 * a2,
    ]
}

/// ⟨Ψᵗ, T(0)Ψᵗ⟩ / ‖Ψᵗ‖² for the fixed trial state.
pub fn trial_quotient(m: &BasisMatrices, alpha: f64) -> Result<f64> {
    trial_parts(m, alpha).map(|(n, d)| n / d)
}

/// Trial quotient with the first-order response to the entry half-widths.
pub fn trial_estimate(m: &BasisMatrices, alpha: f64) -> Result<Estimate> {
    let (num, den) = trial_parts(m, alpha)?;
    let q = num / den;
    let t = trial_vector(m.beta.value, alpha);
    let (_, he) = m.hamiltonian(alpha);
    let (_, ge) = m.gram();
    let mut s = 0.0;
    for i in 0..6 {
        for j in 0..=i {
            let w = if i == j { 1.0 } else { 2.0 } * t[i] * t[j] / den;
            s += (w * he[(i, j)]).powi(2) + (w * q * ge[(i, j)]).powi(2);
        }
    }
    Ok(Estimate::new(q, s.sqrt()))
}

/// Numerator and ‖Ψᵗ‖² of the trial quotient.
pub fn trial_parts(m: &BasisMatrices, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    let t = DVector::from_row_slice(&trial_vector(m.beta.value, alpha));
    let (h, _) = m.hamiltonian(alpha);
    let (g, _) = m.gram();
    let num = (t.transpose() * h * &t)[(0, 0)];
    let den = (t.transpose() * g * &t)[(0, 0)];
    Ok((num, den))
}

/// Default α grid: 12 logarithmic points in [1e-4, 1e-1].
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-4, 1e-1, 12)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n && n > 1 {
                return hi;
            }
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub c2: Estimate,
    pub c3: Estimate,
    pub c4: Estimate,
    /// Largest |E/α² - fit| over the input.
    pub residual: f64,
}

/// Least squares of E/α² against (1, α, α²). Half-widths combine the
/// propagated input errors (linearly, they are correlated across α) with
/// the standard errors of the fit.
pub fn fit_expansion(curve: &[(f64, Estimate)]) -> Result<ExpansionFit> {
    if curve.len() < 6 {
        return Err(Error::Fit(format!("need at least 6 points, got {}", curve.len())));
    }
    if let Some((a, _)) = curve.iter().find(|(a, _)| !(*a > 0.0 && *a <= 0.1)) {
        return Err(Error::Fit(format!("alpha {a} outside (0, 0.1]")));
    }
    let n = curve.len();
    // Columns scaled to unit magnitude for conditioning.
    let amax = curve.iter().map(|(a, _)| *a).fold(0.0, f64::max);
    let x = DMatrix::from_fn(n, 3, |i, j| (curve[i].0 / amax).powi(j as i32));
    let y = DVector::from_iterator(n, curve.iter().map(|(a, e)| e.value / (a * a)));
    let sigma = DVector::from_iterator(n, curve.iter().map(|(a, e)| e.error / (a * a)));
    let xtx = x.transpose() * &x;
    let eig = SymmetricEigen::new(xtx.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    if !(lo > 1e-14 * hi) {
        return Err(Error::Fit("alpha points too clustered for a three-term fit".into()));
    }
    let inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    let map = &inv * x.transpose();
    let c = &map * &y;
    let resid = &y - &x * &c;
    let rss: f64 = resid.iter().map(|r| r * r).sum();
    let s2 = if n > 3 { rss / (n - 3) as f64 } else { 0.0 };
    let coef = |k: usize| {
        let scale = amax.powi(k as i32);
        let propagated: f64 = (0..n).map(|i| map[(k, i)].abs() * sigma[i]).sum();
        let stat = (s2 * inv[(k, k)]).sqrt();
        Estimate::new(c[k] / scale, (propagated + stat) / scale)
    };
    Ok(ExpansionFit {
        c2: coef(0),
        c3: coef(1),
        c4: coef(2),
        residual: resid.amax(),
    })
}
