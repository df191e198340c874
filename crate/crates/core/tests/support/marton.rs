use wiretap_core::channel::BceChannel;
use wiretap_core::inner_bound::{InnerBoundDecomposition, InnerBounds};

/// Full tensor over `(u, v1, v2, x, y1, y2, z)` with conditionally
/// independent outputs, and entropies of its marginals computed from scratch.
pub struct Tensor {
    dims: [usize; 7],
    p: Vec<f64>,
}

impl Tensor {
    pub fn build(bce: &BceChannel, d: &InnerBoundDecomposition) -> Self {
        let (nu, a, b, nx) = (d.u_size(), d.v1_size, d.v2_size, d.x_size());
        let (k1, k2, k3) = (bce.y1().output_size(), bce.y2().output_size(), bce.z().output_size());
        let dims = [nu, a, b, nx, k1, k2, k3];
        let mut p = Vec::with_capacity(dims.iter().product());
        for u in 0..nu {
            for i in 0..a {
                for j in 0..b {
                    for x in 0..nx {
                        let base = d.p_u.probs()[u]
                            * d.p_v1v2_given_u.prob(u, i * b + j)
                            * d.p_x_given_v1v2.prob(i * b + j, x);
                        for y1 in 0..k1 {
                            for y2 in 0..k2 {
                                for z in 0..k3 {
                                    p.push(base * bce.y1().prob(x, y1) * bce.y2().prob(x, y2) * bce.z().prob(x, z));
                                }
                            }
                        }
                    }
                }
            }
        }
        Tensor { dims, p }
    }

    pub fn h(&self, keep: &[usize]) -> f64 {
        let mut m = std::collections::HashMap::<Vec<usize>, f64>::new();
        let mut idx = [0usize; 7];
        for &v in &self.p {
            let key: Vec<usize> = keep.iter().map(|&k| idx[k]).collect();
            *m.entry(key).or_default() += v;
            for k in (0..7).rev() {
                idx[k] += 1;
                if idx[k] < self.dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        m.values().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
    }

    pub fn cmi(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let cat = |x: &[usize], y: &[usize]| [x, y].concat();
        self.h(&cat(a, c)) + self.h(&cat(b, c)) - self.h(&cat(&cat(a, b), c)) - self.h(c)
    }
}

pub const U: usize = 0;
pub const V1: usize = 1;
pub const V2: usize = 2;
pub const Y1: usize = 4;
pub const Y2: usize = 5;
pub const Z: usize = 6;

pub fn oracle_bounds(t: &Tensor, with_tap: bool) -> InnerBounds {
    let tap = |v: f64| if with_tap { v } else { 0.0 };
    let m = t.cmi(&[U], &[Y1], &[]).min(t.cmi(&[U], &[Y2], &[])) - tap(t.cmi(&[U], &[Z], &[]));
    let a = t.cmi(&[V1], &[Y1], &[U]);
    let b = t.cmi(&[V2], &[Y2], &[U]);
    let raw = InnerBounds {
        b0: m,
        b1: a - tap(t.cmi(&[V1], &[Z], &[U])) + m,
        b2: b - tap(t.cmi(&[V2], &[Z], &[U])) + m,
        b12: a + b - tap(t.cmi(&[V1, V2], &[Z], &[U])) - t.cmi(&[V1], &[V2], &[U]) + m,
    };
    InnerBounds {
        b0: raw.b0.max(0.0),
        b1: raw.b1.max(0.0),
        b2: raw.b2.max(0.0),
        b12: raw.b12.max(0.0),
    }
}
