//! Momentum-space integration with explicit error estimates.
//!
//! Integrands are functions of m photon momenta. Rotationally invariant
//! integrands are reduced by putting the first momentum on the polar axis and
//! the second in the xz half-plane, leaving 3m-3 variables (one for m = 1).
//! Radial variables use r = Λu², which absorbs the r² dr measure and the
//! |k|^{-1/2} form-factor singularity into a smooth integrand in u.

pub mod gauss;
pub mod sobol;
pub mod sum;

use std::f64::consts::PI;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernels::MAX_MOMENTA;
use crate::model::{CutoffProfile, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    TensorGauss,
    LowDiscrepancy,
    PlainMonteCarlo,
    NodeSum,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::TensorGauss => "tensor-gauss",
            Method::LowDiscrepancy => "low-discrepancy",
            Method::PlainMonteCarlo => "plain-monte-carlo",
            Method::NodeSum => "node-sum",
        }
    }

    /// Default method for a reduced dimension.
    pub fn for_dimension(dim: usize) -> Method {
        if dim <= 5 {
            Method::TensorGauss
        } else {
            Method::LowDiscrepancy
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Node budgets per dimension class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    /// Up to 5 reduced dimensions.
    pub low: u64,
    /// 6 to 8 reduced dimensions.
    pub mid: u64,
    /// 9 and more.
    pub high: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            low: 100_000,
            mid: 1_000_000,
            high: 1_000_000,
        }
    }
}

impl Budgets {
    pub fn uniform(n: u64) -> Self {
        Budgets {
            low: n,
            mid: n,
            high: n,
        }
    }

    pub fn for_dimension(&self, dim: usize) -> u64 {
        match dim {
            0..=5 => self.low,
            6..=8 => self.mid,
            _ => self.high,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let s = |n: u64| ((n as f64 * factor).round() as u64).max(16);
        Budgets {
            low: s(self.low),
            mid: s(self.mid),
            high: s(self.high),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Rotational,
    Unreduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    Radial,
    Cos,
    Phi,
}

type Integrand<'a> = dyn Fn(&[Vec3]) -> f64 + Send + Sync + 'a;

/// An integral over m photon momenta, each restricted to the support of κ.
pub struct IntegralTask<'a> {
    momenta: usize,
    profile: CutoffProfile,
    reduction: Reduction,
    integrand: Box<Integrand<'a>>,
}

/// Reduced task for a rotationally invariant integrand.
pub fn reduce_by_rotation<'a>(
    momenta: usize,
    profile: CutoffProfile,
    integrand: impl Fn(&[Vec3]) -> f64 + Send + Sync + 'a,
) -> IntegralTask<'a> {
    IntegralTask::new(momenta, profile, Reduction::Rotational, integrand)
}

/// Task over all 3m variables (the cross-check path).
pub fn unreduced<'a>(
    momenta: usize,
    profile: CutoffProfile,
    integrand: impl Fn(&[Vec3]) -> f64 + Send + Sync + 'a,
) -> IntegralTask<'a> {
    IntegralTask::new(momenta, profile, Reduction::Unreduced, integrand)
}

impl<'a> IntegralTask<'a> {
    pub fn new(
        momenta: usize,
        profile: CutoffProfile,
        reduction: Reduction,
        integrand: impl Fn(&[Vec3]) -> f64 + Send + Sync + 'a,
    ) -> Self {
        assert!(momenta <= MAX_MOMENTA);
        IntegralTask {
            momenta,
            profile,
            reduction,
            integrand: Box::new(integrand),
        }
    }

    pub fn momenta(&self) -> usize {
        self.momenta
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    pub fn dimension(&self) -> usize {
        match (self.reduction, self.momenta) {
            (_, 0) => 0,
            (Reduction::Rotational, 1) => 1,
            (Reduction::Rotational, m) => 3 * m - 3,
            (Reduction::Unreduced, m) => 3 * m,
        }
    }

    fn axes(&self) -> Vec<Axis> {
        let m = self.momenta;
        match self.reduction {
            Reduction::Rotational => {
                let mut a = Vec::new();
                if m >= 1 {
                    a.push(Axis::Radial);
                }
                if m >= 2 {
                    a.extend([Axis::Radial, Axis::Cos]);
                }
                for _ in 2..m {
                    a.extend([Axis::Radial, Axis::Cos, Axis::Phi]);
                }
                a
            }
            Reduction::Unreduced => (0..m).flat_map(|_| [Axis::Radial, Axis::Cos, Axis::Phi]).collect(),
        }
    }

    fn angular_factor(&self) -> f64 {
        match (self.reduction, self.momenta) {
            (Reduction::Rotational, 1) => 4.0 * PI,
            (Reduction::Rotational, m) if m >= 2 => 8.0 * PI * PI,
            _ => 1.0,
        }
    }

    /// Maps a point of the unit cube to momenta; returns the Jacobian
    /// (including the angular volume factor), or 0 at a degenerate node.
    fn map(&self, x: &[f64], k: &mut [Vec3; MAX_MOMENTA]) -> f64 {
        let lam = self.profile.support();
        let mut jac = self.angular_factor();
        let radial = |u: f64, jac: &mut f64| {
            let r = lam * u * u;
            *jac *= 2.0 * lam * u * r * r;
            r
        };
        match self.reduction {
            Reduction::Rotational => {
                let m = self.momenta;
                if m >= 1 {
                    let r = radial(x[0], &mut jac);
                    k[0] = [0.0, 0.0, r];
                }
                if m >= 2 {
                    let r = radial(x[1], &mut jac);
                    let c = 2.0 * x[2] - 1.0;
                    jac *= 2.0;
                    let s = (1.0 - c * c).max(0.0).sqrt();
                    k[1] = [r * s, 0.0, r * c];
                }
                for j in 2..m {
                    let o = 3 * j - 3;
                    k[j] = spherical(radial(x[o], &mut jac), x[o + 1], x[o + 2], &mut jac);
                }
            }
            Reduction::Unreduced => {
                for j in 0..self.momenta {
                    let o = 3 * j;
                    k[j] = spherical(radial(x[o], &mut jac), x[o + 1], x[o + 2], &mut jac);
                }
            }
        }
        jac
    }

    fn sample(&self, x: &[f64], k: &mut [Vec3; MAX_MOMENTA]) -> Result<f64> {
        let jac = self.map(x, k);
        if jac == 0.0 {
            return Ok(0.0);
        }
        let v = (self.integrand)(&k[..self.momenta]) * jac;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::PoisonedSample { point: x.to_vec() })
        }
    }

    /// Evaluates the raw integrand at explicit momenta.
    pub fn eval_at(&self, k: &[Vec3]) -> f64 {
        (self.integrand)(k)
    }
}

fn spherical(r: f64, tc: f64, tp: f64, jac: &mut f64) -> Vec3 {
    let c = 2.0 * tc - 1.0;
    let phi = 2.0 * PI * tp;
    *jac *= 4.0 * PI;
    let s = (1.0 - c * c).max(0.0).sqrt();
    [r * s * phi.cos(), r * s * phi.sin(), r * c]
}

/// Value with the half-width reported by the method's own estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
    pub nodes_used: u64,
    pub seed: u64,
}

/// Integrates `task` with roughly `budget` integrand evaluations.
pub fn integrate(task: &IntegralTask<'_>, budget: u64, method: Method, seed: u64) -> Result<QuadratureResult> {
    if task.dimension() == 0 {
        let v = task.eval_at(&[]);
        return Ok(QuadratureResult {
            value: v,
            error_estimate: 0.0,
            method,
            nodes_used: 1,
            seed,
        });
    }
    match method {
        Method::TensorGauss => tensor_gauss(task, budget, seed),
        Method::LowDiscrepancy => shifted_sobol(task, budget, seed),
        Method::PlainMonteCarlo => monte_carlo(task, budget, seed),
        Method::NodeSum => Err(Error::Validation(
            "node sums need an explicit node set; use integrate_on_nodes".into(),
        )),
    }
}

/// Integrates with the default method and budget for the task's dimension.
pub fn integrate_auto(task: &IntegralTask<'_>, budgets: &Budgets, seed: u64) -> Result<QuadratureResult> {
    let dim = task.dimension();
    integrate(task, budgets.for_dimension(dim), Method::for_dimension(dim), seed)
}

fn tensor_rule(task: &IntegralTask<'_>, n: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let lam = task.profile.support();
    let ub = task.profile.breakpoint().map(|b| (b / lam).sqrt());
    task.axes()
        .into_iter()
        .map(|a| match (a, ub) {
            (Axis::Radial, Some(ub)) if ub > 0.0 => gauss::composite(n, &[0.0, ub, 1.0]),
            _ => gauss::on_interval(n, 0.0, 1.0),
        })
        .collect()
}

fn tensor_sum(task: &IntegralTask<'_>, rules: &[(Vec<f64>, Vec<f64>)]) -> Result<(f64, u64)> {
    let dim = rules.len();
    let sizes: Vec<usize> = rules.iter().map(|r| r.0.len()).collect();
    let total: u64 = sizes.iter().map(|&s| s as u64).product();
    let v = sum::chunked_sum::<Error, _>(total, |i| {
        let mut x = [0.0; 3 * MAX_MOMENTA];
        let mut w = 1.0;
        let mut rem = i as usize;
        for d in (0..dim).rev() {
            let j = rem % sizes[d];
            rem /= sizes[d];
            x[d] = rules[d].0[j];
            w *= rules[d].1[j];
        }
        let mut k = [[0.0; 3]; MAX_MOMENTA];
        Ok(w * task.sample(&x[..dim], &mut k)?)
    })?;
    Ok((v, total))
}

fn tensor_gauss(task: &IntegralTask<'_>, budget: u64, seed: u64) -> Result<QuadratureResult> {
    let dim = task.dimension();
    let panels: usize = if task.profile.breakpoint().is_some() {
        task.axes().iter().filter(|a| **a == Axis::Radial).count()
    } else {
        0
    };
    let per_axis = (budget as f64 / (1u64 << panels) as f64).powf(1.0 / dim as f64);
    let n = (per_axis.floor() as usize).max(3);
    let coarse = (2 * n).div_ceil(3);
    let (fine, nf) = tensor_sum(task, &tensor_rule(task, n))?;
    let (rough, nc) = tensor_sum(task, &tensor_rule(task, coarse))?;
    Ok(QuadratureResult {
        value: fine,
        error_estimate: (fine - rough).abs(),
        method: Method::TensorGauss,
        nodes_used: nf + nc,
        seed,
    })
}

const BATCHES: usize = 16;

fn batch_stats(values: &[f64]) -> (f64, f64) {
    let b = values.len() as f64;
    let mean = values.iter().sum::<f64>() / b;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (mean, 3.0 * (var / b).sqrt())
}

fn shifted_sobol(task: &IntegralTask<'_>, budget: u64, seed: u64) -> Result<QuadratureResult> {
    let dim = task.dimension();
    let per_batch = (budget as f64 / BATCHES as f64).max(16.0);
    let n = 1u64 << (per_batch.log2().round() as u32);
    let seq = sobol::Sobol::new(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(BATCHES);
    for _ in 0..BATCHES {
        let shift: Vec<u32> = (0..dim).map(|_| rng.next_u32()).collect();
        let s = sum::chunked_sum_ranges::<Error, _>(n, |start, count, acc| {
            let mut x = [0.0; 3 * MAX_MOMENTA];
            let mut k = [[0.0; 3]; MAX_MOMENTA];
            let mut err = None;
            seq.for_each_raw(start, count, |_, bits| {
                if err.is_some() {
                    return;
                }
                for d in 0..dim {
                    x[d] = sobol::to_unit(bits[d], shift[d]);
                }
                match task.sample(&x[..dim], &mut k) {
                    Ok(v) => acc.add(v),
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(()), Err)
        })?;
        values.push(s / n as f64);
    }
    let (value, error_estimate) = batch_stats(&values);
    Ok(QuadratureResult {
        value,
        error_estimate,
        method: Method::LowDiscrepancy,
        nodes_used: n * BATCHES as u64,
        seed,
    })
}

fn monte_carlo(task: &IntegralTask<'_>, budget: u64, seed: u64) -> Result<QuadratureResult> {
    let dim = task.dimension();
    let n = (budget / BATCHES as u64).max(16);
    let mut values = Vec::with_capacity(BATCHES);
    for b in 0..BATCHES {
        let s = sum::chunked_sum_ranges(n, |start, count, acc| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            rng.set_word_pos(start as u128 * dim as u128 * 2);
            let mut x = [0.0; 3 * MAX_MOMENTA];
            let mut k = [[0.0; 3]; MAX_MOMENTA];
            for _ in 0..count {
                for xd in x.iter_mut().take(dim) {
                    *xd = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                }
                acc.add(task.sample(&x[..dim], &mut k)?);
            }
            Ok::<(), Error>(())
        })?;
        values.push(s / n as f64);
    }
    let (value, error_estimate) = batch_stats(&values);
    Ok(QuadratureResult {
        value,
        error_estimate,
        method: Method::PlainMonteCarlo,
        nodes_used: n * BATCHES as u64,
        seed,
    })
}

/// Σ over all m-tuples of nodes of integrand × product of node weights.
///
/// This is the continuum integral with every momentum measure replaced by
/// the same discrete measure Σ_j w_j δ(k - k_j).
pub fn integrate_on_nodes(task: &IntegralTask<'_>, nodes: &[(Vec3, f64)]) -> Result<QuadratureResult> {
    let m = task.momenta;
    let nn = nodes.len() as u64;
    let total = nn.pow(m as u32);
    let value = sum::chunked_sum::<Error, _>(total, |i| {
        let mut k = [[0.0; 3]; MAX_MOMENTA];
        let mut w = 1.0;
        let mut rem = i;
        for kj in k.iter_mut().take(m).rev() {
            let (p, wt) = nodes[(rem % nn) as usize];
            rem /= nn;
            *kj = p;
            w *= wt;
        }
        let v = task.eval_at(&k[..m]) * w;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::PoisonedSample {
                point: k[..m].iter().flatten().copied().collect(),
            })
        }
    })?;
    Ok(QuadratureResult {
        value,
        error_estimate: 0.0,
        method: Method::NodeSum,
        nodes_used: total,
        seed: 0,
    })
}

/// One-dimensional Gauss rule on panels; error from a rule with 2/3 the nodes.
pub fn integrate_1d(f: impl Fn(f64) -> f64, breaks: &[f64], n: usize) -> QuadratureResult {
    let q = |n: usize| {
        let (x, w) = gauss::composite(n, breaks);
        let mut acc = sum::Neumaier::default();
        for (x, w) in x.iter().zip(&w) {
            acc.add(w * f(*x));
        }
        acc.total()
    };
    let fine = q(n);
    let rough = q((2 * n).div_ceil(3));
    QuadratureResult {
        value: fine,
        error_estimate: (fine - rough).abs(),
        method: Method::TensorGauss,
        nodes_used: (n + (2 * n).div_ceil(3)) as u64 * (breaks.len() as u64 - 1),
        seed: 0,
    }
}

/// Seed for a named sub-computation, derived from the run seed.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dot, norm};

    fn ball() -> CutoffProfile {
        CutoffProfile::sharp(1.0)
    }

    #[test]
    fn dimensions_follow_reduction() {
        let p = ball();
        assert_eq!(reduce_by_rotation(1, p, |_| 1.0).dimension(), 1);
        assert_eq!(reduce_by_rotation(2, p, |_| 1.0).dimension(), 3);
        assert_eq!(reduce_by_rotation(4, p, |_| 1.0).dimension(), 9);
        assert_eq!(unreduced(2, p, |_| 1.0).dimension(), 6);
    }

    #[test]
    fn unit_ball_volume_every_method() {
        let exact = 4.0 * PI / 3.0;
        for reduction in [Reduction::Rotational, Reduction::Unreduced] {
            let t = IntegralTask::new(1, ball(), reduction, |_| 1.0);
            for m in [Method::TensorGauss, Method::LowDiscrepancy, Method::PlainMonteCarlo] {
                let r = integrate(&t, 20_000, m, 7).unwrap();
                assert!(
                    (r.value - exact).abs() <= r.error_estimate.max(1e-12) + 1e-12,
                    "{m} {reduction:?}: {} ± {}",
                    r.value,
                    r.error_estimate
                );
            }
        }
    }

    #[test]
    fn log_integral_closed_form() {
        let r = integrate_1d(|t| 1.0 / (1.0 + t), &[0.0, 1.0], 30);
        assert!((r.value - 2f64.ln()).abs() < 1e-10);
        assert!(r.error_estimate < 1e-10);
    }

    // ∫∫ e^{-|k|-|q|} (k̂·q̂)² over |k|,|q| ≤ L, closed form from
    // (4π)²/3 · (∫₀^L r² e^{-r} dr)².
    fn two_momentum_task(l: f64) -> (CutoffProfile, f64) {
        let radial = 2.0 - (-l).exp() * (l * l + 2.0 * l + 2.0);
        (CutoffProfile::sharp(l), 16.0 * PI * PI / 3.0 * radial * radial)
    }

    fn two_momentum_integrand(k: &[Vec3]) -> f64 {
        let (a, b) = (norm(&k[0]), norm(&k[1]));
        let c = dot(&k[0], &k[1]) / (a * b);
        (-a - b).exp() * c * c
    }

    #[test]
    fn reduced_gauss_matches_closed_form_and_unreduced_monte_carlo() {
        let (p, exact) = two_momentum_task(6.0);
        let red = reduce_by_rotation(2, p, two_momentum_integrand);
        let g = integrate(&red, 30_000, Method::TensorGauss, 0).unwrap();
        assert!((g.value - exact).abs() < 1e-7 * exact, "{} vs {exact}", g.value);
        let full = unreduced(2, p, two_momentum_integrand);
        let mc = integrate(&full, 400_000, Method::PlainMonteCarlo, 1).unwrap();
        assert!(
            (mc.value - g.value).abs() <= mc.error_estimate + g.error_estimate,
            "{} ± {} vs {}",
            mc.value,
            mc.error_estimate,
            g.value
        );
        let qmc = integrate(&full, 400_000, Method::LowDiscrepancy, 3).unwrap();
        assert!((qmc.value - g.value).abs() <= qmc.error_estimate + g.error_estimate);
    }

    #[test]
    fn doubling_gauss_budget_stays_within_error() {
        let (p, _) = two_momentum_task(2.0);
        let t = reduce_by_rotation(2, p, two_momentum_integrand);
        let a = integrate(&t, 4_000, Method::TensorGauss, 0).unwrap();
        let b = integrate(&t, 8_000, Method::TensorGauss, 0).unwrap();
        assert!((a.value - b.value).abs() <= a.error_estimate);
    }

    #[test]
    fn sobol_seeds_agree_within_errors() {
        let (p, _) = two_momentum_task(3.0);
        let t = unreduced(2, p, two_momentum_integrand);
        let a = integrate(&t, 100_000, Method::LowDiscrepancy, 1).unwrap();
        let b = integrate(&t, 100_000, Method::LowDiscrepancy, 2).unwrap();
        assert_ne!(a.value, b.value);
        assert!((a.value - b.value).abs() <= a.error_estimate + b.error_estimate);
    }

    #[test]
    fn poisoned_sample_names_point() {
        let t = reduce_by_rotation(1, ball(), |k| if k[0][2] > 0.5 { f64::NAN } else { 1.0 });
        match integrate(&t, 100, Method::TensorGauss, 0) {
            Err(Error::PoisonedSample { point }) => assert_eq!(point.len(), 1),
            other => panic!("expected poisoned sample, got {other:?}"),
        }
    }

    #[test]
    fn node_sum_is_product_measure() {
        let nodes = [([0.0, 0.0, 1.0], 0.5), ([1.0, 0.0, 0.0], 2.0)];
        let t = unreduced(2, ball(), |k| dot(&k[0], &k[1]));
        let r = integrate_on_nodes(&t, &nodes).unwrap();
        assert_eq!(r.value, 0.25 + 4.0);
        assert_eq!(r.nodes_used, 4);
    }

    #[test]
    fn derived_seeds_differ_by_label() {
        assert_ne!(derive_seed(42, "n2s"), derive_seed(42, "l2"));
        assert_eq!(derive_seed(42, "n2s"), derive_seed(42, "n2s"));
    }
}
