//! Coulomb-side coefficients: e⁽¹⁾, a₀, e⁽³⁾, the pieces of e⁽²⁾ and the
//! assembled Σ(α) = Σ₀(α) − binding(α).
//!
//! Radial problems use reduced functions χ = r·ψ on a three-point scheme
//! (lumped linear elements; plain central differences on a uniform grid),
//! Dirichlet at 0 and r_max. Every grid quantity is computed on the grid and
//! two successive bisections and Richardson-extrapolated.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elements::{CoefficientSet, ElementCache, ElementTable, Estimate};
use crate::error::{Error, Result};
use crate::model::CutoffProfile;
use crate::quadrature::{integrate_1d, Budgets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Logarithmic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    /// Interior points.
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for RadialGrid {
    fn default() -> Self {
        RadialGrid {
            r_max: 60.0,
            points: 8000,
            spacing: Spacing::Uniform,
        }
    }
}

/// Inner scale of the logarithmic map r = c(e^{st} - 1).
const LOG_SCALE: f64 = 0.5;

impl RadialGrid {
    pub fn logarithmic(r_max: f64, points: usize) -> Self {
        RadialGrid {
            r_max,
            points,
            spacing: Spacing::Logarithmic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max >= 40.0) {
            return Err(Error::Validation(format!(
                "r_max must be at least 40, got {}",
                self.r_max
            )));
        }
        if self.points < 1000 {
            return Err(Error::Validation(format!(
                "need at least 1000 radial points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Same map with every interval halved.
    pub fn bisected(&self) -> Self {
        RadialGrid {
            points: 2 * self.points + 1,
            ..*self
        }
    }

    /// Nodes r_0 = 0, ..., r_{N+1} = r_max.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.points + 1;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                if i == n {
                    return self.r_max;
                }
                match self.spacing {
                    Spacing::Uniform => t * self.r_max,
                    Spacing::Logarithmic => LOG_SCALE * ((t * (1.0 + self.r_max / LOG_SCALE).ln()).exp() - 1.0),
                }
            })
            .collect()
    }
}

/// Radial operator -d²/dr² + l(l+1)/r² - 1/r in symmetric form
/// S = M^{-1/2}(A + MV)M^{-1/2} on the interior nodes.
struct Radial {
    r: Vec<f64>,
    /// Lumped mass.
    m: Vec<f64>,
    diag: Vec<f64>,
    /// off[i] couples i and i+1.
    off: Vec<f64>,
    /// Stiffness only, for derivatives.
    a_diag: Vec<f64>,
    a_off: Vec<f64>,
}

impl Radial {
    fn new(grid: &RadialGrid, l: usize) -> Self {
        let nodes = grid.nodes();
        let n = grid.points;
        let h: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let r: Vec<f64> = nodes[1..=n].to_vec();
        let m: Vec<f64> = (0..n).map(|i| 0.5 * (h[i] + h[i + 1])).collect();
        let a_diag: Vec<f64> = (0..n).map(|i| 1.0 / h[i] + 1.0 / h[i + 1]).collect();
        let a_off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| -1.0 / h[i + 1]).collect();
        let ll = (l * (l + 1)) as f64;
        let diag = (0..n)
            .map(|i| a_diag[i] / m[i] + ll / (r[i] * r[i]) - 1.0 / r[i])
            .collect();
        let off = (0..n.saturating_sub(1))
            .map(|i| a_off[i] / (m[i] * m[i + 1]).sqrt())
            .collect();
        Radial {
            r,
            m,
            diag,
            off,
            a_diag,
            a_off,
        }
    }

    fn len(&self) -> usize {
        self.r.len()
    }

    fn apply(&self, x: &[f64], shift: f64) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut s = (self.diag[i] - shift) * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// (S - shift) x = b by the Thomas algorithm; shift below the spectrum.
    fn solve_shifted(&self, b: &[f64], shift: f64) -> Vec<f64> {
        let n = b.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = b[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    /// Symmetric-form vector y = M^{1/2}χ back to χ.
    fn unscale(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.m).map(|(v, m)| v / m.sqrt()).collect()
    }

    fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.m).map(|(v, m)| v * m.sqrt()).collect()
    }

    /// χ'' = -M⁻¹Aχ with Dirichlet ends.
    fn second_derivative(&self, chi: &[f64]) -> Vec<f64> {
        let n = chi.len();
        (0..n)
            .map(|i| {
                let mut s = self.a_diag[i] * chi[i];
                if i > 0 {
                    s += self.a_off[i - 1] * chi[i - 1];
                }
                if i + 1 < n {
                    s += self.a_off[i] * chi[i + 1];
                }
                -s / self.m[i]
            })
            .collect()
    }

    /// Three-point first derivative.
    fn derivative(&self, chi: &[f64]) -> Vec<f64> {
        let n = chi.len();
        let at = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { chi[i as usize] };
        let r_at = |i: isize| {
            if i < 0 {
                0.0
            } else if i as usize >= n {
                self.r[n - 1] + (self.r[n - 1] - self.r[n - 2])
            } else {
                self.r[i as usize]
            }
        };
        (0..n as isize)
            .map(|i| {
                let (hm, hp) = (r_at(i) - r_at(i - 1), r_at(i + 1) - r_at(i));
                (hm * hm * at(i + 1) - hp * hp * at(i - 1) + (hp * hp - hm * hm) * at(i)) / (hm * hp * (hm + hp))
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest s-wave state on one grid: (energy, y = M^{1/2}χ normalized).
fn ground_on(op: &Radial) -> (f64, Vec<f64>) {
    let mut y: Vec<f64> = op.scale(&op.r.iter().map(|r| r * (-r).exp()).collect::<Vec<_>>());
    let mut energy = 0.0;
    for _ in 0..60 {
        let next = op.solve_shifted(&y, -0.3);
        let norm = dot(&next, &next).sqrt();
        y = next.into_iter().map(|v| v / norm).collect();
        let e = dot(&y, &op.apply(&y, 0.0));
        let done = (e - energy).abs() < 1e-15;
        energy = e;
        if done {
            break;
        }
    }
    if y.iter().sum::<f64>() < 0.0 {
        y.iter_mut().for_each(|v| *v = -*v);
    }
    (energy, y)
}

/// Extrapolated value from three bisection levels; the half-width is the
/// change between the two extrapolations.
fn richardson(q: [f64; 3]) -> Estimate {
    let lo = (4.0 * q[1] - q[0]) / 3.0;
    let hi = (4.0 * q[2] - q[1]) / 3.0;
    Estimate::new(hi, (hi - lo).abs())
}

fn levels(grid: &RadialGrid) -> [RadialGrid; 3] {
    let g1 = grid.bisected();
    let g2 = g1.bisected();
    [*grid, g1, g2]
}

fn three<T>(grid: &RadialGrid, f: impl Fn(&RadialGrid) -> Result<T>) -> Result<[T; 3]> {
    let [a, b, c] = levels(grid);
    Ok([f(&a)?, f(&b)?, f(&c)?])
}

/// Ground state u₁ as a reduced radial function χ = r·√(4π)·u₁.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialState {
    pub r: Vec<f64>,
    pub chi: Vec<f64>,
    /// Rayleigh quotient of −Δ − 1/|x|.
    pub energy: Estimate,
}

impl RadialState {
    /// u₁ at the node (no angular factor).
    pub fn u1(&self, i: usize) -> f64 {
        self.chi[i] / (self.r[i] * (4.0 * PI).sqrt())
    }

    /// u₁(0) from the quadratic through the origin and the first two nodes.
    pub fn u1_at_origin(&self) -> f64 {
        let (r1, r2, c1, c2) = (self.r[0], self.r[1], self.chi[0], self.chi[1]);
        let slope = (c1 * r2 * r2 - c2 * r1 * r1) / (r1 * r2 * (r2 - r1));
        slope / (4.0 * PI).sqrt()
    }
}

/// Normalized ground state of −Δ − 1/|x| on the grid.
pub fn ground_u1(grid: &RadialGrid) -> Result<RadialState> {
    grid.validate()?;
    let [g0, g1, g2] = levels(grid);
    let ops = [Radial::new(&g0, 0), Radial::new(&g1, 0), Radial::new(&g2, 0)];
    let sols: Vec<(f64, Vec<f64>)> = ops
        .iter()
        .map(|op| {
            let (e, y) = ground_on(op);
            (e, op.unscale(&y))
        })
        .collect();
    // Interior node i of one level is node 2i + 1 of the next.
    let at = |level: usize, i: usize| sols[level].1[(i + 1) * (1 << level) - 1];
    let mut chi: Vec<f64> = (0..ops[0].len())
        .map(|i| {
            let (a, b, c) = (at(0, i), at(1, i), at(2, i));
            let lo = (4.0 * b - a) / 3.0;
            let hi = (4.0 * c - b) / 3.0;
            (16.0 * hi - lo) / 15.0
        })
        .collect();
    let c = &ops[0];
    let norm = dot(&chi.iter().zip(&c.m).map(|(x, m)| x * m).collect::<Vec<_>>(), &chi).sqrt();
    chi.iter_mut().for_each(|v| *v /= norm);
    let energy = richardson([sols[0].0, sols[1].0, sols[2].0]);
    if energy.error > 1e-8 {
        return Err(Error::Accuracy(format!(
            "radial grid too coarse: energy uncertainty {:.2e}",
            energy.error
        )));
    }
    Ok(RadialState {
        r: c.r.clone(),
        chi,
        energy,
    })
}

/// ⟨∇u₁, (−Δ − 1/|x| + 1/4)∇u₁⟩ on one grid.
fn gradient_form_on(grid: &RadialGrid) -> f64 {
    let s = Radial::new(grid, 0);
    let p = Radial::new(grid, 1);
    let (_, y) = ground_on(&s);
    let chi = s.unscale(&y);
    let d = s.derivative(&chi);
    // Reduced p-wave function of ∇u₁ summed over components: χ' − χ/r.
    let phi: Vec<f64> = (0..chi.len()).map(|i| d[i] - chi[i] / s.r[i]).collect();
    let yp = p.scale(&phi);
    // Lumped mass drops the r = 0 end of the first interval, where the
    // centrifugal integrand 2φ²/r² tends to 2φ'(0)².
    let edge = 0.5 * p.r[0] * 2.0 * (phi[0] / p.r[0]).powi(2);
    dot(&yp, &p.apply(&yp, -0.25)) + edge
}

/// e⁽³⁾ = −(1/3π)‖(−Δ − 1/|x| + 1/4)^{1/2}∇u₁‖²
pub fn e3(grid: &RadialGrid) -> Result<Estimate> {
    grid.validate()?;
    let q = richardson(three(grid, |g| Ok(gradient_form_on(g)))?);
    if !(q.value > 0.0) {
        return Err(Error::Accuracy("gradient form is not positive".into()));
    }
    Ok(q.scale(-1.0 / (3.0 * PI)))
}

/// Same coefficient through the commutator reduction 2π·u₁(0)².
pub fn e3_commutator(grid: &RadialGrid) -> Result<f64> {
    let u = ground_u1(grid)?;
    let u0 = u.u1_at_origin();
    Ok(2.0 * PI * u0 * u0 * (-1.0 / (3.0 * PI)))
}

const SOLVE_TOL: f64 = 1e-10;

/// ⟨v, B⁻¹v⟩ with v = Q₁⊥Δu₁ and B = −Δ − 1/|x| + 1/4 on the complement of
/// u₁, on one grid. B is taken as S − E_h so u₁ is an exact null vector.
fn resolvent_form_on(grid: &RadialGrid) -> Result<f64> {
    let op = Radial::new(grid, 0);
    let (eh, y0) = ground_on(&op);
    let chi = op.unscale(&y0);
    let lap = op.second_derivative(&chi);
    let mut b = op.scale(&lap);
    let c = dot(&b, &y0);
    b.iter_mut().zip(&y0).for_each(|(v, u)| *v -= c * u);
    let project = |x: &mut Vec<f64>| {
        let c = dot(x, &y0);
        x.iter_mut().zip(&y0).for_each(|(v, u)| *v -= c * u);
    };
    // S - E_h is singular along u₁ only; its leading block is not. Solve
    // with the last unknown pinned to 0, then move along u₁ to w ⊥ u₁.
    let n = b.len();
    let pinned = |rhs: &[f64]| {
        let mut x = op.solve_shifted(&rhs[..n - 1], eh);
        x.push(0.0);
        project(&mut x);
        x
    };
    let residual = |x: &[f64]| {
        let mut r = op.apply(x, eh);
        project(&mut r);
        r.iter().zip(&b).map(|(a, c)| c - a).collect::<Vec<f64>>()
    };
    let bnorm = dot(&b, &b).sqrt();
    // Normwise backward error; ‖S‖ ≈ 4/h² puts plain relative residuals
    // near 1e-9 from rounding alone.
    let snorm =
        op.diag.iter().map(|d| d.abs()).fold(0.0, f64::max) + 2.0 * op.off.iter().map(|o| o.abs()).fold(0.0, f64::max);
    let mut x = pinned(&b);
    let mut rel = f64::INFINITY;
    for _ in 0..4 {
        let r = residual(&x);
        rel = dot(&r, &r).sqrt() / (snorm * dot(&x, &x).sqrt() + bnorm);
        if rel <= SOLVE_TOL {
            break;
        }
        let dx = pinned(&r);
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
    }
    if rel > SOLVE_TOL {
        return Err(Error::Convergence {
            iterations: 1,
            residual: rel,
        });
    }
    Ok(dot(&b, &x))
}

/// ‖Q₁⊥ B^{-1/2} Δu₁‖² as ⟨Q₁⊥Δu₁, B⁻¹ Q₁⊥Δu₁⟩.
pub fn resolvent_form(grid: &RadialGrid) -> Result<Estimate> {
    grid.validate()?;
    Ok(richardson(three(grid, resolvent_form_on)?))
}

const QUAD_NODES: usize = 40;

fn radial_breaks(profile: &CutoffProfile) -> Vec<f64> {
    // κ is smooth on each piece; the substitution t = s² handles nothing
    // singular here, plain panels suffice.
    let mut b = vec![0.0];
    if let Some(x) = profile.breakpoint() {
        if x > 0.0 {
            b.push(x);
        }
    }
    b.push(profile.support());
    b
}

/// e⁽¹⁾ = (2/π)∫κ²(t)/(1+t) dt
pub fn e1(profile: &CutoffProfile) -> Estimate {
    if profile.is_vanishing() {
        return Estimate::ZERO;
    }
    let r = integrate_1d(
        |t| {
            let k = profile.kappa(t);
            k * k / (1.0 + t)
        },
        &radial_breaks(profile),
        QUAD_NODES,
    );
    Estimate::new(r.value, r.error_estimate).scale(2.0 / PI)
}

/// a₀ = ∫ (k₁²+k₂²)/(4π²|k|³) · 2/(|k|²+|k|) · κ(|k|) d³k = (4/3π)∫κ(r)/(1+r) dr
pub fn a0(profile: &CutoffProfile) -> Estimate {
    if profile.is_vanishing() {
        return Estimate::ZERO;
    }
    let r = integrate_1d(|t| profile.kappa(t) / (1.0 + t), &radial_breaks(profile), QUAD_NODES);
    Estimate::new(r.value, r.error_estimate).scale(4.0 / (3.0 * PI))
}

/// The four terms of e⁽²⁾ with their prefactors applied.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct E2Pieces {
    pub pair: Estimate,
    pub current: Estimate,
    pub minus: Estimate,
    pub coulomb: Estimate,
    pub total: Estimate,
}

/// e⁽²⁾ from the Fock-space elements and the radial resolvent form.
pub fn e2_from_table(t: &ElementTable, profile: &CutoffProfile, grid: &RadialGrid) -> Result<E2Pieces> {
    let pair = t.get("e2_i")?.scale(2.0 / 3.0);
    let current = t.get("e2_ii")?.scale(1.0 / 3.0);
    let minus = t.get("e2_iii")?.scale(-2.0 / 3.0);
    let a = a0(profile);
    let coulomb = if a.value == 0.0 {
        Estimate::ZERO
    } else {
        (a.square() * resolvent_form(grid)?).scale(4.0)
    };
    Ok(E2Pieces {
        pair,
        current,
        minus,
        coulomb,
        total: pair + current + minus + coulomb,
    })
}

pub fn e2(
    profile: &CutoffProfile,
    budgets: &Budgets,
    seed: u64,
    cache: Option<&ElementCache>,
    grid: &RadialGrid,
) -> Result<E2Pieces> {
    let names = crate::elements::hydrogen_inventory();
    let t = ElementTable::compute(profile, budgets, seed, &names, cache)?;
    e2_from_table(&t, profile, grid)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HydrogenCoefficients {
    pub e1: Estimate,
    pub e2: E2Pieces,
    pub e3: Estimate,
    pub a0: Estimate,
    pub dt0: Estimate,
    pub dt1: Estimate,
    pub dt2: Estimate,
    pub dt3: Estimate,
}

impl HydrogenCoefficients {
    pub fn new(d: &CoefficientSet, e1: Estimate, e2: E2Pieces, e3: Estimate, a0: Estimate) -> Self {
        HydrogenCoefficients {
            dt0: d.d0 - Estimate::exact(0.25),
            dt1: d.d1 - e1,
            dt2: d.d2 - e2.total,
            dt3: -e3,
            e1,
            e2,
            e3,
            a0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub alpha: f64,
    pub sigma0: Estimate,
    pub binding: Estimate,
    pub sigma: Estimate,
}

/// Σ₀ polynomial, binding energy and Σ = Σ₀ − binding on the grid.
pub fn assemble_sigma(d: &CoefficientSet, h: &HydrogenCoefficients, alphas: &[f64]) -> Vec<SigmaPoint> {
    alphas
        .iter()
        .map(|&a| {
            let log = if a > 0.0 { a.powi(5) * (1.0 / a).ln() } else { 0.0 };
            let sigma0 = d.d0.scale(a * a) + d.d1.scale(a.powi(3)) + d.d2.scale(a.powi(4));
            let binding =
                Estimate::exact(a * a / 4.0) + h.e1.scale(a.powi(3)) + h.e2.total.scale(a.powi(4)) + h.e3.scale(log);
            SigmaPoint {
                alpha: a,
                sigma0,
                binding,
                sigma: sigma0 - binding,
            }
        })
        .collect()
}
