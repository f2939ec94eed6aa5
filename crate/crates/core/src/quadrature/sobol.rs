//! Sobol' sequence (Joe-Kuo direction numbers) in Gray-code order with
//! optional random digital shifts.

const BITS: usize = 32;

/// (primitive polynomial, initial direction numbers) per dimension.
const DIRECTIONS: [(u32, &[u32]); 24] = [
    (1, &[1]),
    (3, &[1]),
    (7, &[1, 3]),
    (11, &[1, 3, 1]),
    (13, &[1, 1, 1]),
    (19, &[1, 1, 3, 3]),
    (25, &[1, 3, 5, 13]),
    (37, &[1, 1, 5, 5, 17]),
    (41, &[1, 1, 5, 5, 5]),
    (47, &[1, 1, 7, 11, 19]),
    (55, &[1, 1, 5, 1, 1]),
    (59, &[1, 1, 1, 3, 11]),
    (61, &[1, 3, 5, 5, 31]),
    (67, &[1, 3, 3, 9, 7, 49]),
    (91, &[1, 1, 1, 15, 21, 21]),
    (97, &[1, 3, 1, 13, 27, 49]),
    (103, &[1, 1, 1, 15, 7, 5]),
    (109, &[1, 3, 1, 15, 13, 25]),
    (115, &[1, 1, 5, 5, 19, 61]),
    (131, &[1, 3, 7, 11, 23, 15, 103]),
    (137, &[1, 3, 7, 13, 13, 15, 69]),
    (143, &[1, 1, 3, 13, 7, 35, 63]),
    (145, &[1, 3, 5, 9, 1, 25, 53]),
    (157, &[1, 3, 1, 13, 9, 35, 107]),
];

pub const MAX_DIM: usize = DIRECTIONS.len();

#[derive(Clone, Debug)]
pub struct Sobol {
    dim: usize,
    v: Vec<[u32; BITS]>,
}

impl Sobol {
    pub fn new(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "Sobol dimension {dim} outside 1..={MAX_DIM}"
        );
        let mut v = Vec::with_capacity(dim);
        for (d, (poly, init)) in DIRECTIONS.iter().take(dim).enumerate() {
            let mut dv = [0u32; BITS];
            if d == 0 {
                for (b, x) in dv.iter_mut().enumerate() {
                    *x = 1 << (BITS - 1 - b);
                }
            } else {
                let s = (32 - poly.leading_zeros() - 1) as usize;
                let a = (poly >> 1) & ((1 << (s - 1)) - 1);
                for b in 0..s {
                    dv[b] = init[b] << (BITS - 1 - b);
                }
                for b in s..BITS {
                    let mut x = dv[b - s] ^ (dv[b - s] >> s);
                    for j in 1..s {
                        if (a >> (s - 1 - j)) & 1 == 1 {
                            x ^= dv[b - j];
                        }
                    }
                    dv[b] = x;
                }
            }
            v.push(dv);
        }
        Sobol { dim, v }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Integer coordinates of points `start..start+count` (Gray-code order),
    /// passed to `f` one at a time.
    pub fn for_each_raw(&self, start: u64, count: u64, mut f: impl FnMut(u64, &[u32])) {
        let mut x = self.raw(start);
        for i in start..start + count {
            f(i, &x);
            let c = (!i).trailing_zeros() as usize;
            if c < BITS {
                for (xd, vd) in x.iter_mut().zip(&self.v) {
                    *xd ^= vd[c];
                }
            }
        }
    }

    /// Integer coordinates of the point with Gray-code index `i`.
    pub fn raw(&self, i: u64) -> Vec<u32> {
        let g = i ^ (i >> 1);
        let mut x = vec![0u32; self.dim];
        for b in 0..BITS {
            if (g >> b) & 1 == 1 {
                for (xd, vd) in x.iter_mut().zip(&self.v) {
                    *xd ^= vd[b];
                }
            }
        }
        x
    }
}

/// Maps shifted integer coordinates to the cell midpoint in (0, 1).
#[inline]
pub fn to_unit(bits: u32, shift: u32) -> f64 {
    ((bits ^ shift) as f64 + 0.5) / 4294967296.0
}
