//! Superposition / double-binning inner bound for the general broadcast
//! channel with an eavesdropper and a common message.
//!
//! With `m = min{I(U;Y1), I(U;Y2)} - I(U;Z)` the four bounds are
//!
//! ```text
//! R0           <= m
//! R0 + R1      <= I(V1;Y1|U) - I(V1;Z|U) + m
//! R0 + R2      <= I(V2;Y2|U) - I(V2;Z|U) + m
//! R0 + R1 + R2 <= I(V1;Y1|U) + I(V2;Y2|U) - I(V1,V2;Z|U) - I(V1;V2|U) + m
//! ```
//!
//! over `P(u) P(v1,v2|u) P(x|v1,v2)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Axis, BceChannel, DiscreteChannel, JointDistribution, Pmf};
use crate::simplex::dirichlet_flat;
use crate::{Error, Result};

/// Largest `|U| |V1| |V2|` accepted by the sampler.
pub const MAX_AUX_PRODUCT: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerBoundDecomposition {
    pub p_u: Pmf,
    /// Kernel from `U` to the pair `(V1, V2)`, pair index `v1 * |V2| + v2`.
    pub p_v1v2_given_u: DiscreteChannel,
    /// Kernel from the pair `(V1, V2)` (same indexing) to `X`.
    pub p_x_given_v1v2: DiscreteChannel,
    pub v1_size: usize,
    pub v2_size: usize,
}

impl InnerBoundDecomposition {
    pub fn new(
        p_u: Pmf,
        p_v1v2_given_u: DiscreteChannel,
        p_x_given_v1v2: DiscreteChannel,
        v1_size: usize,
        v2_size: usize,
    ) -> Result<Self> {
        if v1_size == 0 || v2_size == 0 {
            return Err(Error::validation("auxiliary alphabets must be non-empty"));
        }
        if p_v1v2_given_u.input_size() != p_u.len() {
            return Err(Error::dims(format!(
                "P(u) has {} symbols, P(v1,v2|u) has {} rows",
                p_u.len(),
                p_v1v2_given_u.input_size()
            )));
        }
        let pairs = v1_size * v2_size;
        if p_v1v2_given_u.output_size() != pairs || p_x_given_v1v2.input_size() != pairs {
            return Err(Error::dims(format!(
                "(V1,V2) has {pairs} pairs but the kernels use {} and {}",
                p_v1v2_given_u.output_size(),
                p_x_given_v1v2.input_size()
            )));
        }
        Ok(InnerBoundDecomposition {
            p_u,
            p_v1v2_given_u,
            p_x_given_v1v2,
            v1_size,
            v2_size,
        })
    }

    /// All auxiliaries constant, `X ~ px`.
    pub fn trivial(px: &Pmf) -> Self {
        InnerBoundDecomposition {
            p_u: Pmf::from_unchecked(vec![1.0]),
            p_v1v2_given_u: DiscreteChannel::identity(1),
            p_x_given_v1v2: DiscreteChannel::constant(1, px),
            v1_size: 1,
            v2_size: 1,
        }
    }

    pub fn u_size(&self) -> usize {
        self.p_u.len()
    }

    pub fn x_size(&self) -> usize {
        self.p_x_given_v1v2.output_size()
    }

    /// Joint of `(u, v1, v2, x)`.
    pub fn joint(&self) -> JointDistribution {
        let uv = JointDistribution::from_input_and_channel("u", &self.p_u, "v", &self.p_v1v2_given_u)
            .expect("dimensions checked at construction");
        let uvx = uv
            .extend(1, "x", &self.p_x_given_v1v2)
            .expect("dimensions checked at construction");
        let axes = vec![
            uvx.axes()[0].clone(),
            Axis {
                name: "v1".into(),
                size: self.v1_size,
            },
            Axis {
                name: "v2".into(),
                size: self.v2_size,
            },
            uvx.axes()[2].clone(),
        ];
        JointDistribution::from_unchecked(axes, uvx.probs().to_vec())
    }
}

/// Right-hand sides of the four inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerBounds {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b12: f64,
}

impl InnerBounds {
    fn clipped(self) -> Self {
        InnerBounds {
            b0: self.b0.max(0.0),
            b1: self.b1.max(0.0),
            b2: self.b2.max(0.0),
            b12: self.b12.max(0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerBoundEvaluation {
    pub bounds: InnerBounds,
    /// The same bounds before clipping at zero.
    pub raw: InnerBounds,
}

/// Mutual-information terms entering the bounds, all conditioned as named.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerBoundTerms {
    pub i_u_y1: f64,
    pub i_u_y2: f64,
    pub i_u_z: f64,
    pub i_v1_y1_given_u: f64,
    pub i_v2_y2_given_u: f64,
    pub i_v1_z_given_u: f64,
    pub i_v2_z_given_u: f64,
    pub i_v1v2_z_given_u: f64,
    pub i_v1_v2_given_u: f64,
}

/// Computes every term from the joints `(U,V1,V2,X,Y)` for each receiver.
/// Only the three marginal kernels of `bce` are read.
pub fn inner_bound_terms(bce: &BceChannel, dec: &InnerBoundDecomposition) -> Result<InnerBoundTerms> {
    if dec.x_size() != bce.input_size() {
        return Err(Error::dims(format!(
            "decomposition produces {} input symbols, channel takes {}",
            dec.x_size(),
            bce.input_size()
        )));
    }
    let base = dec.joint();
    let (u, v1, v2, y) = (0usize, 1usize, 2usize, 4usize);
    let j1 = base.extend(3, "y", bce.y1())?;
    let j2 = base.extend(3, "y", bce.y2())?;
    let jz = base.extend(3, "y", bce.z())?;
    Ok(InnerBoundTerms {
        i_u_y1: j1.mutual_information(&[u], &[y])?,
        i_u_y2: j2.mutual_information(&[u], &[y])?,
        i_u_z: jz.mutual_information(&[u], &[y])?,
        i_v1_y1_given_u: j1.conditional_mutual_information(&[v1], &[y], &[u])?,
        i_v2_y2_given_u: j2.conditional_mutual_information(&[v2], &[y], &[u])?,
        i_v1_z_given_u: jz.conditional_mutual_information(&[v1], &[y], &[u])?,
        i_v2_z_given_u: jz.conditional_mutual_information(&[v2], &[y], &[u])?,
        i_v1v2_z_given_u: jz.conditional_mutual_information(&[v1, v2], &[y], &[u])?,
        i_v1_v2_given_u: base.conditional_mutual_information(&[v1], &[v2], &[u])?,
    })
}

pub fn bounds_from_terms(t: &InnerBoundTerms) -> InnerBounds {
    let m = t.i_u_y1.min(t.i_u_y2) - t.i_u_z;
    InnerBounds {
        b0: m,
        b1: t.i_v1_y1_given_u - t.i_v1_z_given_u + m,
        b2: t.i_v2_y2_given_u - t.i_v2_z_given_u + m,
        b12: t.i_v1_y1_given_u + t.i_v2_y2_given_u - t.i_v1v2_z_given_u - t.i_v1_v2_given_u + m,
    }
}

pub fn evaluate_inner_bound(bce: &BceChannel, dec: &InnerBoundDecomposition) -> Result<InnerBoundEvaluation> {
    let raw = bounds_from_terms(&inner_bound_terms(bce, dec)?);
    Ok(InnerBoundEvaluation {
        bounds: raw.clipped(),
        raw,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
}

impl RateTriple {
    pub fn new(r0: f64, r1: f64, r2: f64) -> Result<Self> {
        if [r0, r1, r2].iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::validation(format!(
                "rates must be finite and non-negative, got ({r0}, {r1}, {r2})"
            )));
        }
        Ok(RateTriple { r0, r1, r2 })
    }
}

/// True when `triple` satisfies all four inequalities for the given bounds.
pub fn within_bounds(bounds: &InnerBounds, triple: &RateTriple) -> bool {
    let RateTriple { r0, r1, r2 } = *triple;
    r0 <= bounds.b0 && r0 + r1 <= bounds.b1 && r0 + r2 <= bounds.b2 && r0 + r1 + r2 <= bounds.b12
}

pub fn membership(bce: &BceChannel, dec: &InnerBoundDecomposition, triple: &RateTriple) -> Result<bool> {
    RateTriple::new(triple.r0, triple.r1, triple.r2)?;
    Ok(within_bounds(&evaluate_inner_bound(bce, dec)?.bounds, triple))
}

/// Auxiliary alphabet sizes `(|U|, |V1|, |V2|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxCaps {
    pub u: usize,
    pub v1: usize,
    pub v2: usize,
}

impl Default for AuxCaps {
    fn default() -> Self {
        AuxCaps { u: 2, v1: 2, v2: 2 }
    }
}

impl AuxCaps {
    pub fn validate(&self) -> Result<()> {
        if self.u < 2 || self.v1 < 2 || self.v2 < 2 {
            return Err(Error::validation(format!(
                "auxiliary caps must be at least 2, got {},{},{}",
                self.u, self.v1, self.v2
            )));
        }
        let product = self.u.saturating_mul(self.v1).saturating_mul(self.v2);
        if product > MAX_AUX_PRODUCT {
            return Err(Error::Budget(format!(
                "|U||V1||V2| = {product} exceeds {MAX_AUX_PRODUCT}"
            )));
        }
        Ok(())
    }
}

/// Draws a decomposition with Dirichlet(1) rows.
pub fn random_decomposition<R: rand::Rng + ?Sized>(rng: &mut R, caps: AuxCaps, x_size: usize) -> InnerBoundDecomposition {
    let pairs = caps.v1 * caps.v2;
    let p_u = Pmf::from_unchecked(dirichlet_flat(rng, caps.u));
    let mut vu = Vec::with_capacity(caps.u * pairs);
    for _ in 0..caps.u {
        vu.extend(dirichlet_flat(rng, pairs));
    }
    let mut xv = Vec::with_capacity(pairs * x_size);
    for _ in 0..pairs {
        xv.extend(dirichlet_flat(rng, x_size));
    }
    InnerBoundDecomposition {
        p_u,
        p_v1v2_given_u: DiscreteChannel::from_flat_unchecked(caps.u, pairs, vu),
        p_x_given_v1v2: DiscreteChannel::from_flat_unchecked(pairs, x_size, xv),
        v1_size: caps.v1,
        v2_size: caps.v2,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledTriple {
    pub sample: usize,
    pub triple: RateTriple,
}

/// Corner points of the polytope cut out by `bounds`, at `R0 = 0` and at the
/// largest feasible `R0`, with duplicates removed.
pub fn vertex_triples(bounds: &InnerBounds) -> Vec<RateTriple> {
    let mut out: Vec<RateTriple> = Vec::new();
    let top = bounds.b0.min(bounds.b1).min(bounds.b2).min(bounds.b12);
    for r0 in [0.0, top] {
        let a = (bounds.b1 - r0).max(0.0);
        let b = (bounds.b2 - r0).max(0.0);
        let c = (bounds.b12 - r0).max(0.0);
        for (r1, r2) in [(a.min(c), (c - a).clamp(0.0, b)), ((c - b).clamp(0.0, a), b.min(c))] {
            let t = RateTriple { r0, r1, r2 };
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// Union of vertex triples over `samples` random decompositions. The result
/// depends only on `(bce marginals, caps, samples, seed)`.
pub fn sample_inner_region(bce: &BceChannel, caps: AuxCaps, samples: usize, seed: u64) -> Result<Vec<SampledTriple>> {
    caps.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decs: Vec<InnerBoundDecomposition> = (0..samples)
        .map(|_| random_decomposition(&mut rng, caps, bce.input_size()))
        .collect();
    let per: Vec<Result<Vec<RateTriple>>> = decs
        .par_iter()
        .map(|d| Ok(vertex_triples(&evaluate_inner_bound(bce, d)?.bounds)))
        .collect();
    let mut out = Vec::new();
    for (sample, r) in per.into_iter().enumerate() {
        for triple in r? {
            out.push(SampledTriple { sample, triple });
        }
    }
    Ok(out)
}

/// Re-creates the decomposition behind sample index `sample`.
pub fn sampled_decomposition(bce: &BceChannel, caps: AuxCaps, seed: u64, sample: usize) -> Result<InnerBoundDecomposition> {
    caps.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dec = None;
    for _ in 0..=sample {
        dec = Some(random_decomposition(&mut rng, caps, bce.input_size()));
    }
    Ok(dec.expect("loop runs at least once"))
}
