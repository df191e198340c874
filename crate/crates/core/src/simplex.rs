//! Probability-simplex helpers shared by the region searches and the
//! fading optimiser.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// All points of the `dim`-simplex whose coordinates are multiples of
/// `1/resolution`, in lexicographic order of the integer compositions.
pub fn simplex_grid(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    let mut counts = vec![0usize; dim];
    fn rec(
        i: usize,
        left: usize,
        counts: &mut Vec<usize>,
        res: usize,
        out: &mut Vec<Vec<f64>>,
    ) {
        if i + 1 == counts.len() {
            counts[i] = left;
            out.push(counts.iter().map(|&c| c as f64 / res as f64).collect());
            return;
        }
        for c in (0..=left).rev() {
            counts[i] = c;
            rec(i + 1, left - c, counts, res, out);
        }
    }
    rec(0, resolution, &mut counts, resolution, &mut out);
    out
}

/// Number of points [`simplex_grid`] would produce, saturating on overflow.
pub fn simplex_grid_len(dim: usize, resolution: usize) -> usize {
    if dim == 0 {
        return 0;
    }
    // C(resolution + dim - 1, dim - 1)
    let (n, k) = (resolution + dim - 1, dim - 1);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// One draw from the flat Dirichlet distribution on the `dim`-simplex.
pub fn dirichlet_flat<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Euclidean projection onto `{x >= 0, sum x = total}`.
pub fn project_to_simplex(v: &mut [f64], total: f64) {
    if v.is_empty() {
        return;
    }
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - total) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}
