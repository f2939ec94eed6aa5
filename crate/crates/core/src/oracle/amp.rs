//! Discrete evaluation of amplitude trees and pair integrands.

use super::{dot_vec, DiscreteModel};
use crate::kernels::{Amp, PairIntegrand, PairWeight};

impl DiscreteModel {
    /// Fock vectors of an amplitude, one per free-index assignment
    /// (row-major, most recently appended index last).
    pub fn apply_amp(&self, amp: &Amp) -> Vec<Vec<f64>> {
        use Amp::*;
        let each = |x: &Amp, f: &dyn Fn(&[f64]) -> Vec<f64>| -> Vec<Vec<f64>> {
            self.apply_amp(x).iter().map(|v| f(v)).collect()
        };
        let component = |x: &Amp, f: &dyn Fn(usize, &[f64]) -> Vec<f64>| -> Vec<Vec<f64>> {
            self.apply_amp(x)
                .iter()
                .flat_map(|v| (0..3).map(move |j| (j, v)))
                .map(|(j, v)| f(j, v))
                .collect()
        };
        match amp {
            Vacuum => vec![self.vacuum()],
            Scale(c, x) => each(x, &|v| v.iter().map(|a| c * a).collect()),
            Resolvent(x) => each(x, &|v| self.resolvent(v)),
            PfAplus(x) => each(x, &|v| self.pf_aplus(v)),
            AplusAplus(x) => each(x, &|v| self.aplus_aplus(v)),
            PfAminus(x) => each(x, &|v| self.pf_aminus(v)),
            AminusAminus(x) => each(x, &|v| self.aminus_aminus(v)),
            AplusAminus(x) => each(x, &|v| self.aplus_aminus(v)),
            Aminus(x) => component(x, &|j, v| self.aminus(j, v)),
            AplusComponent(x) => component(x, &|j, v| self.aplus(j, v)),
            PfComponent(x) => component(x, &|j, v| self.pf(j, v)),
            Sum(terms) => {
                let mut acc: Option<Vec<Vec<f64>>> = None;
                for (c, t) in terms {
                    let vs = self.apply_amp(t);
                    match acc.as_mut() {
                        None => acc = Some(vs.into_iter().map(|v| v.iter().map(|a| c * a).collect()).collect()),
                        Some(a) => {
                            for (av, tv) in a.iter_mut().zip(&vs) {
                                for (x, y) in av.iter_mut().zip(tv) {
                                    *x += c * y;
                                }
                            }
                        }
                    }
                }
                acc.unwrap_or_else(|| vec![vec![0.0; self.dimension()]])
            }
        }
    }

    /// ⟨left, W right⟩ by dense linear algebra.
    pub fn pair(&self, p: &PairIntegrand) -> f64 {
        let (l, r) = (self.apply_amp(&p.left), self.apply_amp(&p.right));
        l.iter()
            .zip(&r)
            .map(|(a, b)| match p.weight {
                PairWeight::Plain => dot_vec(a, b),
                PairWeight::Star => self.star(a, b),
                PairWeight::InverseStar => (1..a.len()).map(|i| a[i] * b[i] / self.resolvent_weight(i)).sum(),
            })
            .sum()
    }
}
