//! Secrecy capacity region of the degraded discrete memoryless broadcast
//! channel with an eavesdropper.
//!
//! For an auxiliary `U -> X` the achievable pair is
//! `R1 = I(X;Y1|U) - I(X;Z|U)`, `R2 = I(U;Y2) - I(U;Z)`, each clipped at zero.
//! The region is the convex hull of these pairs over all `P(u) P(x|u)`; it is
//! approximated here by evaluating a simplex grid and random samples, then
//! refining the best candidate for each trade-off weight.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{BceChannel, DegradednessVerdict, DiscreteChannel, JointDistribution, Pmf};
use crate::region::{RatePoint, RateRegion};
use crate::simplex::{dirichlet_flat, simplex_grid, simplex_grid_len};
use crate::{Error, Result};

/// Rate differences at or below this are reported as exactly zero. Both
/// bracket terms are sums of logarithms, so two mathematically equal terms
/// can differ by a few ulps.
pub const RATE_FLOOR: f64 = 1e-12;

pub(crate) fn clip_rate(v: f64) -> f64 {
    if v > RATE_FLOOR {
        v
    } else {
        0.0
    }
}

/// `P(u) P(x|u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryDecomposition {
    pub p_u: Pmf,
    pub p_x_given_u: DiscreteChannel,
}

impl AuxiliaryDecomposition {
    pub fn new(p_u: Pmf, p_x_given_u: DiscreteChannel) -> Result<Self> {
        if p_u.len() != p_x_given_u.input_size() {
            return Err(Error::dims(format!(
                "P(u) has {} symbols but P(x|u) has {} rows",
                p_u.len(),
                p_x_given_u.input_size()
            )));
        }
        Ok(AuxiliaryDecomposition { p_u, p_x_given_u })
    }

    /// Constant auxiliary with input distribution `px`.
    pub fn constant(px: &Pmf) -> Self {
        AuxiliaryDecomposition {
            p_u: Pmf::from_unchecked(vec![1.0]),
            p_x_given_u: DiscreteChannel::constant(1, px),
        }
    }

    /// `U = X` with input distribution `px`.
    pub fn copy(px: &Pmf) -> Self {
        AuxiliaryDecomposition {
            p_u: px.clone(),
            p_x_given_u: DiscreteChannel::identity(px.len()),
        }
    }

    pub fn u_size(&self) -> usize {
        self.p_u.len()
    }

    pub fn x_size(&self) -> usize {
        self.p_x_given_u.output_size()
    }

    /// Flat parameter vector: `P(u)` followed by the rows of `P(x|u)`.
    pub fn params(&self) -> Vec<f64> {
        let mut v = self.p_u.probs().to_vec();
        v.extend_from_slice(self.p_x_given_u.as_flat());
        v
    }

    fn from_params_unchecked(u: usize, x: usize, v: &[f64]) -> Self {
        AuxiliaryDecomposition {
            p_u: Pmf::from_unchecked(v[..u].to_vec()),
            p_x_given_u: DiscreteChannel::from_flat_unchecked(u, x, v[u..].to_vec()),
        }
    }

    /// Induced input distribution `P(x)`.
    pub fn input_distribution(&self) -> Pmf {
        self.p_x_given_u
            .output_distribution(&self.p_u)
            .expect("dimensions checked at construction")
    }
}

/// The two bracket terms before clipping.
pub fn degraded_brackets(bce: &BceChannel, aux: &AuxiliaryDecomposition) -> Result<(f64, f64)> {
    if aux.x_size() != bce.input_size() {
        return Err(Error::dims(format!(
            "auxiliary produces {} input symbols, channel takes {}",
            aux.x_size(),
            bce.input_size()
        )));
    }
    let ux = JointDistribution::from_input_and_channel("u", &aux.p_u, "x", &aux.p_x_given_u)?;
    let with = |c: &DiscreteChannel| ux.extend(1, "y", c);
    let uxy1 = with(bce.y1())?;
    let uxy2 = with(bce.y2())?;
    let uxz = with(bce.z())?;
    let r1 = uxy1.conditional_mutual_information(&[1], &[2], &[0])?
        - uxz.conditional_mutual_information(&[1], &[2], &[0])?;
    let r2 = uxy2.mutual_information(&[0], &[2])? - uxz.mutual_information(&[0], &[2])?;
    Ok((r1, r2))
}

/// Achievable secrecy pair for one auxiliary decomposition. Reads only the
/// three marginal kernels of `bce`.
pub fn evaluate_degraded_pair(bce: &BceChannel, aux: &AuxiliaryDecomposition) -> Result<RatePoint> {
    let (r1, r2) = degraded_brackets(bce, aux)?;
    Ok(RatePoint::new(clip_rate(r1), clip_rate(r2)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Simplex grid step is `1 / grid_resolution`.
    pub grid_resolution: usize,
    pub random_samples: usize,
    pub refine_iters: usize,
    /// Trade-off weights `mu >= 1` for the `R1 + mu R2` refinements.
    pub mu_grid: Vec<f64>,
    pub seed: u64,
    /// Auxiliary alphabet size; `None` means `|X| + 1`.
    pub u_cardinality: Option<usize>,
    /// Refuse grids with more candidate decompositions than this.
    pub max_grid_points: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_resolution: 16,
            random_samples: 2000,
            refine_iters: 50,
            mu_grid: vec![1.0, 1.5, 2.0, 4.0, 8.0],
            seed: 0,
            u_cardinality: None,
            max_grid_points: 2_000_000,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution == 0 {
            return Err(Error::validation("grid resolution must be positive"));
        }
        if let Some(mu) = self.mu_grid.iter().find(|&&m| !(m >= 1.0 && m.is_finite())) {
            return Err(Error::validation(format!("trade-off weights must be >= 1, got {mu}")));
        }
        if self.u_cardinality == Some(0) {
            return Err(Error::validation("auxiliary alphabet must be non-empty"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub id: usize,
    pub rate: RatePoint,
    pub decomposition: AuxiliaryDecomposition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuOptimum {
    pub mu: f64,
    pub value: f64,
    pub certificate_id: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradednessReport {
    pub y1_to_y2: DegradednessVerdict,
    pub y2_to_z: DegradednessVerdict,
    pub degraded: bool,
    /// Set when the channel is not degraded; the region is then only a
    /// heuristic inner bound.
    pub warning: Option<String>,
}

impl DegradednessReport {
    pub fn for_channel(bce: &BceChannel) -> Result<Self> {
        let (a, b) = bce.degradedness()?;
        let degraded = a.feasible && b.feasible;
        let warning = (!degraded).then(|| {
            format!(
                "channel is not stochastically degraded (Y1->Y2 residual {:.3e}, Y2->Z residual {:.3e}); \
                 the region is a heuristic inner bound",
                a.residual, b.residual
            )
        });
        Ok(DegradednessReport {
            y1_to_y2: a,
            y2_to_z: b,
            degraded,
            warning,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradedRegion {
    /// Upper-right convex frontier; each point's source is a certificate id.
    pub frontier: RateRegion<usize>,
    pub certificates: Vec<Certificate>,
    pub mu_optima: Vec<MuOptimum>,
    pub degradedness: DegradednessReport,
    pub u_cardinality: usize,
    /// The auxiliary alphabet size is a search setting, not a proven bound.
    pub cardinality_note: String,
    pub evaluated: usize,
}

impl DegradedRegion {
    pub fn certificate(&self, id: usize) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.id == id)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Multisets of `k` indices from `0..n` in lexicographic order.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(pos: usize, start: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur[pos] = i;
            rec(pos + 1, i, n, cur, out);
        }
    }
    rec(0, 0, n, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

struct Evaluator<'a> {
    bce: &'a BceChannel,
    u: usize,
    x: usize,
}

impl Evaluator<'_> {
    fn point(&self, params: &[f64]) -> RatePoint {
        let aux = AuxiliaryDecomposition::from_params_unchecked(self.u, self.x, params);
        evaluate_degraded_pair(self.bce, &aux).expect("dimensions fixed by the search")
    }

    /// Pairwise mass transfers within each simplex block, step halving.
    fn refine(&self, start: &[f64], mu: f64, init_step: f64, iters: usize) -> Vec<f64> {
        let blocks: Vec<(usize, usize)> = std::iter::once((0, self.u))
            .chain((0..self.u).map(|r| (self.u + r * self.x, self.x)))
            .collect();
        let mut cur = start.to_vec();
        let mut best = self.point(&cur).weighted(mu);
        let mut step = init_step;
        for _ in 0..iters {
            let mut best_move: Option<(Vec<f64>, f64)> = None;
            for &(off, len) in &blocks {
                for i in 0..len {
                    if cur[off + i] <= 0.0 {
                        continue;
                    }
                    for j in 0..len {
                        if i == j {
                            continue;
                        }
                        let d = step.min(cur[off + i]);
                        let mut cand = cur.clone();
                        cand[off + i] -= d;
                        cand[off + j] += d;
                        let v = self.point(&cand).weighted(mu);
                        let better = match &best_move {
                            None => true,
                            Some((bc, bv)) => v > *bv || (v == *bv && lex_cmp(&cand, bc).is_lt()),
                        };
                        if better {
                            best_move = Some((cand, v));
                        }
                    }
                }
            }
            match best_move {
                Some((cand, v)) if v - best >= 1e-10 => {
                    cur = cand;
                    best = v;
                }
                _ => {
                    step *= 0.5;
                    if step < 1e-12 {
                        break;
                    }
                }
            }
        }
        cur
    }
}

/// Searches auxiliary decompositions and returns the convex frontier of all
/// evaluated pairs, each vertex backed by a stored decomposition.
///
/// Reads only the marginal kernels of `bce`. A channel that fails the
/// degradedness check still gets a region, with a warning attached.
pub fn search_degraded_region(bce: &BceChannel, config: &SearchConfig) -> Result<DegradedRegion> {
    config.validate()?;
    let x = bce.input_size();
    let u = config.u_cardinality.unwrap_or(x + 1);
    let degradedness = DegradednessReport::for_channel(bce)?;

    let res = config.grid_resolution;
    let pu_count = simplex_grid_len(u, res);
    let row_count = simplex_grid_len(x, res);
    let grid_count = pu_count.saturating_mul(binomial(row_count + u - 1, u));
    if grid_count > config.max_grid_points {
        return Err(Error::Budget(format!(
            "simplex grid has {grid_count} decompositions, limit is {}",
            config.max_grid_points
        )));
    }

    let mut pool: Vec<Vec<f64>> = Vec::with_capacity(grid_count + config.random_samples);
    let pu_grid = simplex_grid(u, res);
    let row_grid = simplex_grid(x, res);
    let row_sets = multisets(row_grid.len(), u);
    for pu in &pu_grid {
        for set in &row_sets {
            let mut v = pu.clone();
            for &r in set {
                v.extend_from_slice(&row_grid[r]);
            }
            pool.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_samples {
        let mut v = dirichlet_flat(&mut rng, u);
        for _ in 0..u {
            v.extend(dirichlet_flat(&mut rng, x));
        }
        pool.push(v);
    }

    let eval = Evaluator { bce, u, x };
    let mut points: Vec<RatePoint> = pool.par_iter().map(|p| eval.point(p)).collect();

    let argmax = |points: &[RatePoint], pool: &[Vec<f64>], mu: f64| -> usize {
        let mut best = 0;
        for i in 1..points.len() {
            let (v, b) = (points[i].weighted(mu), points[best].weighted(mu));
            if v > b || (v == b && lex_cmp(&pool[i], &pool[best]).is_lt()) {
                best = i;
            }
        }
        best
    };

    if !pool.is_empty() {
        let starts: Vec<usize> = config
            .mu_grid
            .iter()
            .map(|&mu| argmax(&points, &pool, mu))
            .collect();
        let refined: Vec<Vec<f64>> = config
            .mu_grid
            .par_iter()
            .zip(&starts)
            .map(|(&mu, &s)| eval.refine(&pool[s], mu, 1.0 / res as f64, config.refine_iters))
            .collect();
        for r in refined {
            points.push(eval.point(&r));
            pool.push(r);
        }
    }
    let evaluated = points.len();

    let hull = RateRegion::convex_hull(points.iter().copied().zip(0..));
    let mut certificates = Vec::with_capacity(hull.len());
    let mut frontier_points = Vec::with_capacity(hull.len());
    for (id, fp) in hull.points.iter().enumerate() {
        // lexicographically smallest decomposition among exact ties
        let mut pick = fp.source;
        for (i, p) in points.iter().enumerate() {
            if *p == fp.rate && lex_cmp(&pool[i], &pool[pick]).is_lt() {
                pick = i;
            }
        }
        certificates.push(Certificate {
            id,
            rate: fp.rate,
            decomposition: AuxiliaryDecomposition::from_params_unchecked(u, x, &pool[pick]),
        });
        frontier_points.push(crate::region::FrontierPoint {
            rate: fp.rate,
            source: id,
        });
    }
    let frontier = RateRegion {
        points: frontier_points,
    };
    let mu_optima = config
        .mu_grid
        .iter()
        .map(|&mu| {
            let (id, value) = frontier
                .points
                .iter()
                .map(|p| (p.source, p.rate.weighted(mu)))
                .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
            MuOptimum {
                mu,
                value,
                certificate_id: id,
            }
        })
        .collect();

    Ok(DegradedRegion {
        frontier,
        certificates,
        mu_optima,
        degradedness,
        u_cardinality: u,
        cardinality_note: format!(
            "auxiliary alphabet capped at |U| = {u}; no cardinality bound is proven for this region"
        ),
        evaluated,
    })
}
