use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DiscreteChannel;
use crate::{Error, Result};

/// Residual Frobenius norm below which a degrading kernel counts as exact.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Weight of the row-sum equations appended to the least-squares system.
const ROW_SUM_WEIGHT: f64 = 10.0;

/// Outcome of a stochastic-degradedness check `weak = strong * D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradednessVerdict {
    pub feasible: bool,
    /// Best row-stochastic `D` found. When infeasible this is the minimiser
    /// that certifies the residual below.
    pub kernel: DiscreteChannel,
    /// `|| strong * D - weak ||_F`.
    pub residual: f64,
}

/// Non-negative least squares `min ||A x - b||, x >= 0` by the Lawson-Hanson
/// active-set method.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "nnls: right-hand side has the wrong length");
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let norm = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let tol = 10.0 * f64::EPSILON * norm * (m.max(n) as f64);
    let max_outer = 3 * n + 10;

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let mut s = DVector::zeros(n);
        if cols.is_empty() {
            return s;
        }
        let sub = DMatrix::from_fn(m, cols.len(), |i, k| a[(i, cols[k])]);
        let sol = sub
            .svd(true, true)
            .solve(b, 1e-14)
            .expect("svd with both factors computed always solves");
        for (k, &j) in cols.iter().enumerate() {
            s[j] = sol[k];
        }
        s
    };

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let t = match candidate {
            Some(t) if w[t] > tol => t,
            _ => break,
        };
        passive[t] = true;

        let mut inner = 0;
        loop {
            inner += 1;
            let s = solve_passive(&passive);
            let blocked: Vec<usize> = (0..n).filter(|&j| passive[j] && s[j] <= tol).collect();
            if blocked.is_empty() || inner > 3 * n + 10 {
                x = s;
                break;
            }
            let alpha = blocked
                .iter()
                .map(|&j| x[j] / (x[j] - s[j]))
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0);
            x = &x + (&s - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= tol {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    x.map(|v| v.max(0.0))
}

/// Looks for a row-stochastic `D` with `weak = strong * D`.
///
/// The row-sum equalities are appended as weighted rows and the whole system
/// is solved by [`nnls`]. The returned kernel is row-normalised and the
/// residual is recomputed from it, so `residual` is always attained by
/// `kernel`.
pub fn check_stochastically_degraded(
    strong: &DiscreteChannel,
    weak: &DiscreteChannel,
) -> Result<DegradednessVerdict> {
    if strong.input_size() != weak.input_size() {
        return Err(Error::dims(format!(
            "channels have {} and {} inputs",
            strong.input_size(),
            weak.input_size()
        )));
    }
    let r = strong.input_size();
    let m = strong.output_size();
    let k = weak.output_size();
    let rows = r * k + m;
    let cols = m * k;
    let mut a = DMatrix::zeros(rows, cols);
    let mut b = DVector::zeros(rows);
    // strong[x, :] . D[:, j] = weak[x, j]
    for x in 0..r {
        for j in 0..k {
            let row = x * k + j;
            for i in 0..m {
                a[(row, i * k + j)] = strong.prob(x, i);
            }
            b[row] = weak.prob(x, j);
        }
    }
    for i in 0..m {
        let row = r * k + i;
        for j in 0..k {
            a[(row, i * k + j)] = ROW_SUM_WEIGHT;
        }
        b[row] = ROW_SUM_WEIGHT;
    }

    let d = nnls(&a, &b);
    let mut kernel = Vec::with_capacity(cols);
    for i in 0..m {
        let row = &d.as_slice()[i * k..(i + 1) * k];
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            kernel.extend(row.iter().map(|v| v / s));
        } else {
            kernel.extend(std::iter::repeat_n(1.0 / k as f64, k));
        }
    }
    let kernel = DiscreteChannel::from_flat_unchecked(m, k, kernel);
    let residual = residual(strong, &kernel, weak);
    Ok(DegradednessVerdict {
        feasible: residual <= FEASIBILITY_TOL,
        kernel,
        residual,
    })
}

fn residual(strong: &DiscreteChannel, d: &DiscreteChannel, weak: &DiscreteChannel) -> f64 {
    let mut acc = 0.0;
    for x in 0..strong.input_size() {
        for j in 0..weak.output_size() {
            let v: f64 = (0..strong.output_size())
                .map(|i| strong.prob(x, i) * d.prob(i, j))
                .sum();
            acc += (v - weak.prob(x, j)).powi(2);
        }
    }
    acc.sqrt()
}
