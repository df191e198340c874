//! Rate points and two-user rate regions.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub const ORIGIN: RatePoint = RatePoint { r1: 0.0, r2: 0.0 };

    pub fn new(r1: f64, r2: f64) -> Self {
        RatePoint { r1, r2 }
    }

    /// True when `self` is at least as large as `other` in both coordinates.
    pub fn dominates(&self, other: &RatePoint) -> bool {
        self.r1 >= other.r1 && self.r2 >= other.r2
    }

    pub fn weighted(&self, mu: f64) -> f64 {
        self.r1 + mu * self.r2
    }
}

/// A boundary point together with whatever produced it (a power split, a
/// certificate index, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint<T> {
    pub rate: RatePoint,
    pub source: T,
}

/// Upper-right boundary of a down-closed rate region, sorted by increasing
/// `r2` (so `r1` is non-increasing).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRegion<T> {
    pub points: Vec<FrontierPoint<T>>,
}

impl<T: Clone> RateRegion<T> {
    /// Keeps the Pareto-optimal points of `candidates`. Exact duplicates keep
    /// the first occurrence.
    pub fn pareto(candidates: impl IntoIterator<Item = (RatePoint, T)>) -> Self {
        let mut pts: Vec<(usize, RatePoint, T)> = candidates
            .into_iter()
            .filter(|(p, _)| p.r1.is_finite() && p.r2.is_finite())
            .enumerate()
            .map(|(i, (p, t))| (i, p, t))
            .collect();
        pts.sort_by(|a, b| {
            b.1.r1
                .total_cmp(&a.1.r1)
                .then(b.1.r2.total_cmp(&a.1.r2))
                .then(a.0.cmp(&b.0))
        });
        let mut out: Vec<FrontierPoint<T>> = Vec::new();
        let mut best_r2 = f64::NEG_INFINITY;
        for (_, p, t) in pts {
            if p.r2 > best_r2 {
                best_r2 = p.r2;
                out.push(FrontierPoint { rate: p, source: t });
            }
        }
        RateRegion { points: out }
    }

    /// Vertices of the upper-right convex hull of `candidates`: the boundary
    /// of the down-closed convex hull, from the largest-`r2` vertex to the
    /// largest-`r1` vertex. Collinear interior points are dropped.
    pub fn convex_hull(candidates: impl IntoIterator<Item = (RatePoint, T)>) -> Self {
        let pareto = RateRegion::pareto(candidates);
        // Pareto points sorted by r1 ascending (r2 descending).
        let mut pts = pareto.points;
        pts.reverse();
        let mut hull: Vec<FrontierPoint<T>> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 {
                let o = hull[hull.len() - 2].rate;
                let a = hull[hull.len() - 1].rate;
                let b = p.rate;
                let cross = (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.reverse();
        RateRegion { points: hull }
    }
}

impl<T> RateRegion<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_r1(&self) -> f64 {
        self.points.iter().map(|p| p.rate.r1).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.points.iter().map(|p| p.rate.r2).fold(0.0, f64::max)
    }

    /// Largest `r1 + mu r2` over the boundary.
    pub fn support(&self, mu: f64) -> f64 {
        self.points
            .iter()
            .map(|p| p.rate.weighted(mu))
            .fold(0.0, f64::max)
    }

    pub fn rates(&self) -> Vec<RatePoint> {
        self.points.iter().map(|p| p.rate).collect()
    }

    /// Membership in the down-closed convex hull of the boundary, with
    /// additive slack `tol` on `r2`.
    pub fn hull_contains(&self, p: RatePoint, tol: f64) -> bool {
        if p.r1 < -tol || p.r2 < -tol {
            return false;
        }
        if self.points.is_empty() {
            return p.r1 <= tol && p.r2 <= tol;
        }
        // walk in increasing r1
        let verts: Vec<RatePoint> = self.points.iter().rev().map(|f| f.rate).collect();
        if p.r1 > verts.last().unwrap().r1 + tol {
            return false;
        }
        if p.r1 <= verts[0].r1 {
            return p.r2 <= verts[0].r2 + tol;
        }
        for w in verts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if p.r1 <= b.r1 {
                let t = if b.r1 > a.r1 {
                    (p.r1 - a.r1) / (b.r1 - a.r1)
                } else {
                    1.0
                };
                return p.r2 <= a.r2 + t * (b.r2 - a.r2) + tol;
            }
        }
        // within tol beyond the last vertex
        p.r2 <= verts.last().unwrap().r2 + tol
    }

    /// Checks the frontier ordering: `r2` increasing, `r1` non-increasing.
    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].rate.r2 >= w[0].rate.r2 && w[1].rate.r1 <= w[0].rate.r1)
    }

    /// Discrete concavity: slopes `dr2/dr1` along increasing `r1` never
    /// increase by more than `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        let v: Vec<RatePoint> = self.points.iter().rev().map(|f| f.rate).collect();
        let slopes: Vec<f64> = v
            .windows(2)
            .filter(|w| w[1].r1 > w[0].r1)
            .map(|w| (w[1].r2 - w[0].r2) / (w[1].r1 - w[0].r1))
            .collect();
        slopes.windows(2).all(|s| s[1] <= s[0] + tol)
    }
}
