//! Fock-space amplitudes as transverse Cartesian tensors.
//!
//! An n-photon amplitude ψ(k₁λ₁, …, kₙλₙ) is stored as a tensor
//! T(k₁ i₁, …, kₙ iₙ) with one Cartesian index per photon, transverse in every
//! slot (P(kₛ) acting on slot s leaves it unchanged). The polarization
//! amplitude is recovered as ψ = Σ T ∏ ε_{λₛ}(kₛ)_{iₛ}, and the polarization
//! sum in an inner product becomes a plain contraction of Cartesian indices.
//!
//! Operators that integrate over a photon (anything with A⁻) do not perform
//! the integral. They consume an *internal* momentum instead, so an amplitude
//! is a function of its outer momenta and its internal momenta, and the true
//! amplitude is the integral over the internal ones. Matrix elements fold all
//! internal integrals into one outer integral.
//!
//! Vector operators (component-indexed A^±, P_f, or the vector A⁻ before a
//! dot product is taken) append a *free* Cartesian index after the photon
//! slots.
//!
//! Fock convention: sector-n amplitudes are symmetric functions with
//! ‖ψ‖² = Σ_λ ∫ |ψ|² dk₁…dkₙ, creation acts as (a†(g)ψ)ₙ₊₁ = (n+1)^{-1/2} Σₛ g(xₛ) ψ(…x̂ₛ…)
//! and annihilation as (a(g)ψ)ₙ₋₁ = n^{1/2} ∫ ḡ(x) ψ(x, …) dx.

use crate::model::{add, dot, norm, projector_unchecked, CutoffProfile, Vec3};

/// Largest tensor rank (photon slots plus free indices) an amplitude may have.
pub const MAX_RANK: usize = 5;
pub const TENSOR_LEN: usize = 243;
/// Largest number of momenta (outer plus internal) in one evaluation.
pub const MAX_MOMENTA: usize = 8;

const POW3: [usize; 7] = [1, 3, 9, 27, 81, 243, 729];

pub type Tensor = [f64; TENSOR_LEN];

/// Per-point momentum data shared by every node of an amplitude evaluation.
#[derive(Clone)]
pub struct ModeTable {
    pub k: [Vec3; MAX_MOMENTA],
    pub r: [f64; MAX_MOMENTA],
    pub f: [f64; MAX_MOMENTA],
    pub p: [[[f64; 3]; 3]; MAX_MOMENTA],
    pub len: usize,
}

impl ModeTable {
    pub fn new(profile: &CutoffProfile, momenta: &[Vec3]) -> Self {
        assert!(momenta.len() <= MAX_MOMENTA, "too many momenta");
        let mut t = ModeTable {
            k: [[0.0; 3]; MAX_MOMENTA],
            r: [0.0; MAX_MOMENTA],
            f: [0.0; MAX_MOMENTA],
            p: [[[0.0; 3]; 3]; MAX_MOMENTA],
            len: momenta.len(),
        };
        for (i, k) in momenta.iter().enumerate() {
            let r = norm(k);
            t.k[i] = *k;
            t.r[i] = r;
            t.f[i] = profile.coupling(r);
            t.p[i] = projector_unchecked(k, r).0;
        }
        t
    }

    /// H_f + P_f² on the listed photons.
    #[inline]
    pub fn resolvent_weight(&self, slots: &Slots) -> f64 {
        let mut h = 0.0;
        let mut p = [0.0; 3];
        for &i in slots.as_slice() {
            h += self.r[i as usize];
            p = add(&p, &self.k[i as usize]);
        }
        h + dot(&p, &p)
    }

    #[inline]
    pub fn total_momentum(&self, slots: &Slots) -> Vec3 {
        let mut p = [0.0; 3];
        for &i in slots.as_slice() {
            p = add(&p, &self.k[i as usize]);
        }
        p
    }
}

/// Small ordered list of indices into a [`ModeTable`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Slots {
    buf: [u8; MAX_MOMENTA],
    len: u8,
}

impl Slots {
    pub fn range(start: usize, end: usize) -> Self {
        let mut s = Slots::default();
        for i in start..end {
            s.push(i as u8);
        }
        s
    }

    #[inline]
    pub fn push(&mut self, v: u8) {
        self.buf[self.len as usize] = v;
        self.len += 1;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.buf[..self.len as usize]
    }

    #[inline]
    fn without(&self, skip: usize) -> Slots {
        let mut s = Slots::default();
        for (i, &v) in self.as_slice().iter().enumerate() {
            if i != skip {
                s.push(v);
            }
        }
        s
    }

    #[inline]
    fn without_two(&self, a: usize, b: usize) -> Slots {
        let mut s = Slots::default();
        for (i, &v) in self.as_slice().iter().enumerate() {
            if i != a && i != b {
                s.push(v);
            }
        }
        s
    }

    #[inline]
    fn prepend(&self, head: u8) -> Slots {
        let mut s = Slots::default();
        s.push(head);
        for &v in self.as_slice() {
            s.push(v);
        }
        s
    }

    #[inline]
    fn prepend_two(&self, a: u8, b: u8) -> Slots {
        let mut s = Slots::default();
        s.push(a);
        s.push(b);
        for &v in self.as_slice() {
            s.push(v);
        }
        s
    }

    #[inline]
    fn tail(&self, from: usize) -> Slots {
        let mut s = Slots::default();
        for &v in &self.as_slice()[from..] {
            s.push(v);
        }
        s
    }
}

/// Expression tree for a Fock-space amplitude built from the vacuum.
#[derive(Clone, Debug)]
pub enum Amp {
    Vacuum,
    Scale(f64, Box<Amp>),
    /// (H_f + P_f²)^{-1}
    Resolvent(Box<Amp>),
    /// P_f · A⁺
    PfAplus(Box<Amp>),
    /// A⁺ · A⁺
    AplusAplus(Box<Amp>),
    /// P_f · A⁻ (one internal momentum)
    PfAminus(Box<Amp>),
    /// A⁻ · A⁻ (two internal momenta)
    AminusAminus(Box<Amp>),
    /// A⁺ · A⁻ (one internal momentum)
    AplusAminus(Box<Amp>),
    /// Vector A⁻; appends a free index (one internal momentum).
    Aminus(Box<Amp>),
    /// Component-indexed A⁺; appends a free index.
    AplusComponent(Box<Amp>),
    /// Component-indexed P_f; appends a free index.
    PfComponent(Box<Amp>),
    /// Linear combination of amplitudes of identical shape.
    Sum(Vec<(f64, Amp)>),
}

/// Sector, free-index count and internal-momentum count of an amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub sector: usize,
    pub free: usize,
    pub internal: usize,
}

impl Shape {
    pub fn rank(&self) -> usize {
        self.sector + self.free
    }
}

impl Amp {
    pub fn vacuum() -> Amp {
        Amp::Vacuum
    }

    pub fn scale(self, c: f64) -> Amp {
        Amp::Scale(c, Box::new(self))
    }

    pub fn resolvent(self) -> Amp {
        Amp::Resolvent(Box::new(self))
    }

    pub fn pf_aplus(self) -> Amp {
        Amp::PfAplus(Box::new(self))
    }

    pub fn aplus_aplus(self) -> Amp {
        Amp::AplusAplus(Box::new(self))
    }

    pub fn pf_aminus(self) -> Amp {
        Amp::PfAminus(Box::new(self))
    }

    pub fn aminus_aminus(self) -> Amp {
        Amp::AminusAminus(Box::new(self))
    }

    pub fn aplus_aminus(self) -> Amp {
        Amp::AplusAminus(Box::new(self))
    }

    pub fn aminus(self) -> Amp {
        Amp::Aminus(Box::new(self))
    }

    pub fn aplus_component(self) -> Amp {
        Amp::AplusComponent(Box::new(self))
    }

    pub fn pf_component(self) -> Amp {
        Amp::PfComponent(Box::new(self))
    }

    pub fn shape(&self) -> Shape {
        use Amp::*;
        match self {
            Vacuum => Shape {
                sector: 0,
                free: 0,
                internal: 0,
            },
            Scale(_, x) | Resolvent(x) => x.shape(),
            PfAplus(x) => {
                let s = x.shape();
                Shape {
                    sector: s.sector + 1,
                    ..s
                }
            }
            AplusAplus(x) => {
                let s = x.shape();
                Shape {
                    sector: s.sector + 2,
                    ..s
                }
            }
            PfAminus(x) => {
                let s = x.shape();
                assert!(s.sector >= 1, "P_f·A⁻ applied to the vacuum sector");
                Shape {
                    sector: s.sector - 1,
                    free: s.free,
                    internal: s.internal + 1,
                }
            }
            AminusAminus(x) => {
                let s = x.shape();
                assert!(s.sector >= 2, "A⁻·A⁻ applied below sector 2");
                Shape {
                    sector: s.sector - 2,
                    free: s.free,
                    internal: s.internal + 2,
                }
            }
            AplusAminus(x) => {
                let s = x.shape();
                Shape {
                    internal: s.internal + 1,
                    ..s
                }
            }
            Aminus(x) => {
                let s = x.shape();
                assert!(s.sector >= 1, "A⁻ applied to the vacuum sector");
                Shape {
                    sector: s.sector - 1,
                    free: s.free + 1,
                    internal: s.internal + 1,
                }
            }
            AplusComponent(x) => {
                let s = x.shape();
                Shape {
                    sector: s.sector + 1,
                    free: s.free + 1,
                    internal: s.internal,
                }
            }
            PfComponent(x) => {
                let s = x.shape();
                Shape { free: s.free + 1, ..s }
            }
            Sum(terms) => {
                let s = terms.first().expect("empty sum").1.shape();
                for (_, t) in terms {
                    assert_eq!(t.shape(), s, "sum of amplitudes with different shapes");
                }
                s
            }
        }
    }

    /// Evaluates the integrand tensor at the given outer and internal momenta.
    ///
    /// `out[..3^rank]` is overwritten. Resolvents are never applied to the
    /// vacuum sector, where H_f + P_f² vanishes.
    pub fn eval(&self, modes: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
        use Amp::*;
        match self {
            Vacuum => out[0] = 1.0,
            Scale(c, x) => {
                x.eval(modes, outer, internal, out);
                let n = POW3[x.shape().rank()];
                for v in &mut out[..n] {
                    *v *= c;
                }
            }
            Resolvent(x) => {
                x.eval(modes, outer, internal, out);
                let d = modes.resolvent_weight(outer);
                debug_assert!(d > 0.0, "resolvent applied on the vacuum sector");
                let inv = 1.0 / d;
                let n = POW3[x.shape().rank()];
                for v in &mut out[..n] {
                    *v *= inv;
                }
            }
            PfAplus(x) => eval_pf_aplus(x, modes, outer, internal, out),
            AplusAplus(x) => eval_aplus_aplus(x, modes, outer, internal, out),
            PfAminus(x) => eval_pf_aminus(x, modes, outer, internal, out),
            AminusAminus(x) => eval_aminus_aminus(x, modes, outer, internal, out),
            AplusAminus(x) => eval_aplus_aminus(x, modes, outer, internal, out),
            Aminus(x) => eval_aminus(x, modes, outer, internal, out),
            AplusComponent(x) => eval_aplus_component(x, modes, outer, internal, out),
            PfComponent(x) => {
                let s = x.shape();
                let mut buf = [0.0; TENSOR_LEN];
                x.eval(modes, outer, internal, &mut buf);
                let p = modes.total_momentum(outer);
                let n = POW3[s.rank()];
                for r in 0..n {
                    for j in 0..3 {
                        out[r * 3 + j] = p[j] * buf[r];
                    }
                }
            }
            Sum(terms) => {
                let n = POW3[self.shape().rank()];
                out[..n].fill(0.0);
                let mut buf = [0.0; TENSOR_LEN];
                for (c, t) in terms {
                    t.eval(modes, outer, internal, &mut buf);
                    for i in 0..n {
                        out[i] += c * buf[i];
                    }
                }
            }
        }
    }
}

fn eval_pf_aplus(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let n = xs.sector + 1;
    let rank = n + xs.free;
    out[..POW3[rank]].fill(0.0);
    let total = m.total_momentum(outer);
    let norm = 1.0 / (n as f64).sqrt();
    let mut buf = [0.0; TENSOR_LEN];
    for s in 0..n {
        let ks = outer.as_slice()[s] as usize;
        let p = &m.p[ks];
        let fs = m.f[ks] * norm;
        if fs == 0.0 {
            continue;
        }
        let v = [
            fs * dot(&p[0], &total),
            fs * dot(&p[1], &total),
            fs * dot(&p[2], &total),
        ];
        x.eval(m, &outer.without(s), internal, &mut buf);
        let len_b = POW3[rank - s - 1];
        for a in 0..POW3[s] {
            for (i, vi) in v.iter().enumerate() {
                let base = (a * 3 + i) * len_b;
                let xbase = a * len_b;
                for b in 0..len_b {
                    out[base + b] += vi * buf[xbase + b];
                }
            }
        }
    }
}

fn eval_aplus_aplus(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let n = xs.sector + 2;
    let rank = n + xs.free;
    out[..POW3[rank]].fill(0.0);
    // Both orderings of the pair (s, t) give the same term.
    let norm = 2.0 / ((n * (n - 1)) as f64).sqrt();
    let mut buf = [0.0; TENSOR_LEN];
    for s in 0..n {
        for t in (s + 1)..n {
            let ks = outer.as_slice()[s] as usize;
            let kt = outer.as_slice()[t] as usize;
            let c = m.f[ks] * m.f[kt] * norm;
            if c == 0.0 {
                continue;
            }
            let (ps, pt) = (&m.p[ks], &m.p[kt]);
            let mut pp = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    pp[i][j] = c * (ps[i][0] * pt[0][j] + ps[i][1] * pt[1][j] + ps[i][2] * pt[2][j]);
                }
            }
            x.eval(m, &outer.without_two(s, t), internal, &mut buf);
            let len_c = POW3[rank - t - 1];
            let len_b = POW3[t - s - 1];
            for a in 0..POW3[s] {
                for (i, row) in pp.iter().enumerate() {
                    for b in 0..len_b {
                        for (j, pij) in row.iter().enumerate() {
                            let base = (((a * 3 + i) * len_b + b) * 3 + j) * len_c;
                            let xbase = (a * len_b + b) * len_c;
                            for cc in 0..len_c {
                                out[base + cc] += pij * buf[xbase + cc];
                            }
                        }
                    }
                }
            }
        }
    }
}

fn eval_pf_aminus(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let rank = xs.rank() - 1;
    let q = internal.as_slice()[0];
    let c = (xs.sector as f64).sqrt() * m.f[q as usize];
    let len = POW3[rank];
    if c == 0.0 {
        out[..len].fill(0.0);
        return;
    }
    let total = m.total_momentum(outer);
    let mut buf = [0.0; TENSOR_LEN];
    x.eval(m, &outer.prepend(q), &internal.tail(1), &mut buf);
    for r in 0..len {
        out[r] = c * (total[0] * buf[r] + total[1] * buf[len + r] + total[2] * buf[2 * len + r]);
    }
}

fn eval_aminus_aminus(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let rank = xs.rank() - 2;
    let (q1, q2) = (internal.as_slice()[0], internal.as_slice()[1]);
    let n = xs.sector as f64;
    let c = (n * (n - 1.0)).sqrt() * m.f[q1 as usize] * m.f[q2 as usize];
    let len = POW3[rank];
    if c == 0.0 {
        out[..len].fill(0.0);
        return;
    }
    let mut buf = [0.0; TENSOR_LEN];
    x.eval(m, &outer.prepend_two(q1, q2), &internal.tail(2), &mut buf);
    for r in 0..len {
        out[r] = c * (buf[r] + buf[4 * len + r] + buf[8 * len + r]);
    }
}

fn eval_aplus_aminus(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let n = xs.sector;
    let rank = xs.rank();
    out[..POW3[rank]].fill(0.0);
    let q = internal.as_slice()[0];
    let fq = m.f[q as usize];
    if fq == 0.0 {
        return;
    }
    let rest = internal.tail(1);
    let mut buf = [0.0; TENSOR_LEN];
    for s in 0..n {
        let ks = outer.as_slice()[s] as usize;
        let c = m.f[ks] * fq;
        if c == 0.0 {
            continue;
        }
        let p = &m.p[ks];
        // X(q j, outer without s): index [j][A][B], result index [A][i][B].
        x.eval(m, &outer.without(s).prepend(q), &rest, &mut buf);
        let len_x = POW3[rank - 1];
        let len_b = POW3[rank - s - 1];
        for a in 0..POW3[s] {
            for (i, prow) in p.iter().enumerate() {
                let base = (a * 3 + i) * len_b;
                for b in 0..len_b {
                    let xi = a * len_b + b;
                    out[base + b] +=
                        c * (prow[0] * buf[xi] + prow[1] * buf[len_x + xi] + prow[2] * buf[2 * len_x + xi]);
                }
            }
        }
    }
}

fn eval_aminus(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let len = POW3[xs.rank() - 1];
    let q = internal.as_slice()[0];
    let c = (xs.sector as f64).sqrt() * m.f[q as usize];
    if c == 0.0 {
        out[..len * 3].fill(0.0);
        return;
    }
    let mut buf = [0.0; TENSOR_LEN];
    x.eval(m, &outer.prepend(q), &internal.tail(1), &mut buf);
    for r in 0..len {
        for j in 0..3 {
            out[r * 3 + j] = c * buf[j * len + r];
        }
    }
}

fn eval_aplus_component(x: &Amp, m: &ModeTable, outer: &Slots, internal: &Slots, out: &mut Tensor) {
    let xs = x.shape();
    let n = xs.sector + 1;
    let rank = n + xs.free + 1;
    out[..POW3[rank]].fill(0.0);
    let norm = 1.0 / (n as f64).sqrt();
    let mut buf = [0.0; TENSOR_LEN];
    for s in 0..n {
        let ks = outer.as_slice()[s] as usize;
        let c = m.f[ks] * norm;
        if c == 0.0 {
            continue;
        }
        let p = &m.p[ks];
        x.eval(m, &outer.without(s), internal, &mut buf);
        // result [A][i][B][j], X [A][B]
        let len_b = POW3[rank - s - 2];
        for a in 0..POW3[s] {
            for (i, prow) in p.iter().enumerate() {
                for b in 0..len_b {
                    let xv = c * buf[a * len_b + b];
                    let base = ((a * 3 + i) * len_b + b) * 3;
                    for j in 0..3 {
                        out[base + j] += prow[j] * xv;
                    }
                }
            }
        }
    }
}

/// Weight inserted between the two sides of an inner product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairWeight {
    /// ⟨v, w⟩
    Plain,
    /// ⟨v, (H_f + P_f²) w⟩
    Star,
    /// ⟨v, (H_f + P_f²)^{-1} w⟩
    InverseStar,
}

/// Folded integrand of ⟨left, W right⟩ over all outer and internal momenta.
///
/// Momentum layout: outer photons first, then the internal momenta of the
/// left side, then those of the right side.
#[derive(Clone, Debug)]
pub struct PairIntegrand {
    pub left: Amp,
    pub right: Amp,
    pub weight: PairWeight,
    outer: Slots,
    left_internal: Slots,
    right_internal: Slots,
    rank: usize,
    momenta: usize,
}

impl PairIntegrand {
    pub fn new(left: Amp, right: Amp, weight: PairWeight) -> Self {
        let (ls, rs) = (left.shape(), right.shape());
        assert_eq!(ls.sector, rs.sector, "inner product across different sectors");
        assert_eq!(ls.free, rs.free, "inner product with mismatched free indices");
        assert!(ls.rank() <= MAX_RANK);
        let n = ls.sector;
        let momenta = n + ls.internal + rs.internal;
        assert!(momenta <= MAX_MOMENTA);
        if weight != PairWeight::Plain {
            assert!(n > 0, "resolvent weight on the vacuum sector");
        }
        PairIntegrand {
            outer: Slots::range(0, n),
            left_internal: Slots::range(n, n + ls.internal),
            right_internal: Slots::range(n + ls.internal, momenta),
            rank: ls.rank(),
            momenta,
            left,
            right,
            weight,
        }
    }

    /// Number of momentum variables of the folded integrand.
    pub fn momenta(&self) -> usize {
        self.momenta
    }

    pub fn eval(&self, modes: &ModeTable) -> f64 {
        let mut a = [0.0; TENSOR_LEN];
        let mut b = [0.0; TENSOR_LEN];
        self.left.eval(modes, &self.outer, &self.left_internal, &mut a);
        self.right.eval(modes, &self.outer, &self.right_internal, &mut b);
        let n = POW3[self.rank];
        let s: f64 = a[..n].iter().zip(&b[..n]).map(|(x, y)| x * y).sum();
        match self.weight {
            PairWeight::Plain => s,
            PairWeight::Star => s * modes.resolvent_weight(&self.outer),
            PairWeight::InverseStar => s / modes.resolvent_weight(&self.outer),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_follow_operator_bookkeeping() {
        let phi2 = Amp::vacuum().aplus_aplus().resolvent().scale(-1.0);
        assert_eq!(
            phi2.shape(),
            Shape {
                sector: 2,
                free: 0,
                internal: 0
            }
        );
        let phi1 = phi2.clone().pf_aminus().resolvent().scale(-1.0);
        assert_eq!(phi1.shape().sector, 1);
        assert_eq!(phi1.shape().internal, 1);
        let am = phi2.clone().aminus();
        assert_eq!(
            am.shape(),
            Shape {
                sector: 1,
                free: 1,
                internal: 1
            }
        );
        let comp = Amp::vacuum().aplus_component().resolvent().aminus();
        assert_eq!(comp.shape().free, 2);
        assert_eq!(comp.shape().sector, 0);
    }

    #[test]
    fn aplus_aplus_on_vacuum_is_root_two_times_projector_product() {
        let p = CutoffProfile::sharp(2.0);
        let ks = [[0.3, -0.2, 0.5], [-0.1, 0.7, 0.2]];
        let m = ModeTable::new(&p, &ks);
        let mut out = [0.0; TENSOR_LEN];
        Amp::vacuum()
            .aplus_aplus()
            .eval(&m, &Slots::range(0, 2), &Slots::default(), &mut out);
        for i in 0..3 {
            for j in 0..3 {
                let pp: f64 = (0..3).map(|l| m.p[0][i][l] * m.p[1][l][j]).sum();
                let expect = 2f64.sqrt() * m.f[0] * m.f[1] * pp;
                assert!((out[i * 3 + j] - expect).abs() < 1e-15);
            }
        }
    }
}
