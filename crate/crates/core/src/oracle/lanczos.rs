//! Lowest eigenpair of a symmetric operator by Lanczos with full
//! reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralResult {
    pub energy: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Residual target relative to the operator scale.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_iter: 400,
            tol: 1e-12,
            seed: 42,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            axpy(w, -c, v);
        }
    }
}

/// Lowest eigenpair of the n×n symmetric operator `apply`, starting from
/// `start`. `scale` is an estimate of the operator norm.
pub fn lowest(
    apply: impl Fn(&[f64], &mut [f64]),
    start: &[f64],
    scale: f64,
    opts: LanczosOptions,
) -> Result<SpectralResult> {
    let n = start.len();
    let scale = scale.max(1.0);
    let target = opts.tol * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v0 = start.to_vec();
    let nv = dot(&v0, &v0).sqrt();
    if nv == 0.0 {
        return Err(Error::Validation("Lanczos start vector is zero".into()));
    }
    v0.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let limit = opts.max_iter.min(n);
    loop {
        let k = basis.len();
        apply(&basis[k - 1], &mut w);
        let a = dot(&w, &basis[k - 1]);
        alphas.push(a);
        orthogonalize(&mut w, &basis);
        let mut b = dot(&w, &w).sqrt();
        let full = k >= n;
        let (theta, s) = tridiagonal_lowest(&alphas, &betas);
        let ritz_residual = (b * s[k - 1]).abs();
        let breakdown = b <= 1e-13 * scale;
        // A converged Ritz pair right at a breakdown may belong to an
        // invariant subspace that misses the lowest state; keep going then.
        let done = full || (ritz_residual <= target && !breakdown) || k >= limit;
        if done {
            let mut x = vec![0.0; n];
            for (c, v) in s.iter().zip(&basis) {
                axpy(&mut x, *c, v);
            }
            let nx = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|t| *t /= nx);
            let mut y = vec![0.0; n];
            apply(&x, &mut y);
            axpy(&mut y, -theta, &x);
            let residual = dot(&y, &y).sqrt();
            if residual <= target * 10.0 || full {
                return Ok(SpectralResult {
                    energy: theta,
                    vector: x,
                    residual,
                    iterations: k,
                });
            }
            if k >= limit {
                return Err(Error::Convergence {
                    iterations: k,
                    residual,
                });
            }
        }
        if breakdown {
            // Invariant subspace found: continue with a fresh direction.
            b = 0.0;
            let mut fresh = 0.0;
            for _ in 0..8 {
                w.iter_mut().for_each(|t| *t = rng.gen::<f64>() - 0.5);
                orthogonalize(&mut w, &basis);
                fresh = dot(&w, &w).sqrt();
                if fresh > 1e-8 {
                    break;
                }
            }
            w.iter_mut().for_each(|t| *t /= fresh);
        } else {
            w.iter_mut().for_each(|t| *t /= b);
        }
        betas.push(b);
        basis.push(w.clone());
    }
}

/// Lowest eigenpair of the tridiagonal matrix (alphas, betas).
fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let e = SymmetricEigen::new(t);
    let (imin, _) = e
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    (
        e.eigenvalues[imin],
        e.eigenvectors.column(imin).iter().copied().collect(),
    )
}

/// Lowest eigenpair by dense diagonalization (small operators).
pub fn lowest_dense(apply: impl Fn(&[f64], &mut [f64]), n: usize) -> SpectralResult {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let energy = eig.eigenvalues[imin];
    let x: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let mut y = vec![0.0; n];
    apply(&x, &mut y);
    axpy(&mut y, -energy, &x);
    SpectralResult {
        energy,
        residual: dot(&y, &y).sqrt(),
        vector: x,
        iterations: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(x: &[f64], y: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let l = if i > 0 { x[i - 1] } else { 0.0 };
            let r = if i + 1 < n { x[i + 1] } else { 0.0 };
            y[i] = 2.0 * x[i] - l - r;
        }
    }

    #[test]
    fn path_laplacian_lowest_mode() {
        let n = 60;
        let start = vec![1.0; n];
        let r = lowest(laplacian, &start, 4.0, LanczosOptions::default()).unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((r.energy - exact).abs() < 1e-12);
        assert!(r.residual < 1e-10);
        let d = lowest_dense(laplacian, n);
        assert!((d.energy - exact).abs() < 1e-12);
    }

    #[test]
    fn breakdown_on_eigenvector_start() {
        // Start on an eigenvector that is not the lowest one.
        let diag = [3.0, 1.0, 2.0, -1.0];
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..4 {
                y[i] = diag[i] * x[i];
            }
        };
        let r = lowest(apply, &[1.0, 0.0, 0.0, 0.0], 3.0, LanczosOptions::default()).unwrap();
        assert_eq!(r.energy, -1.0);
    }
}
