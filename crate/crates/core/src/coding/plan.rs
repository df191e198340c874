use serde::{Deserialize, Serialize};

use crate::channel::{BceChannel, DiscreteChannel};
use crate::degraded::AuxiliaryDecomposition;
use crate::inner_bound::InnerBoundDecomposition;
use crate::{Error, Result};

/// Per-symbol distributions a code is drawn from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CodingDistribution {
    /// Two-layer code for degraded channels: `V1 = X`, `V2` constant, and the
    /// second receiver's message rides on the cloud.
    Degraded(AuxiliaryDecomposition),
    General(InnerBoundDecomposition),
}

impl CodingDistribution {
    /// The equivalent three-auxiliary decomposition.
    pub fn layers(&self) -> InnerBoundDecomposition {
        match self {
            CodingDistribution::General(d) => d.clone(),
            CodingDistribution::Degraded(a) => InnerBoundDecomposition {
                p_u: a.p_u.clone(),
                p_v1v2_given_u: a.p_x_given_u.clone(),
                p_x_given_v1v2: DiscreteChannel::identity(a.x_size()),
                v1_size: a.x_size(),
                v2_size: 1,
            },
        }
    }
}

/// Target rates of the message parts: `W1 = (W10, W11)`, `W2 = (W20, W22)`,
/// with `W10`, `W20` and the common `W0` carried by the cloud.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateTargets {
    pub r0: f64,
    pub r10: f64,
    pub r11: f64,
    pub r20: f64,
    pub r22: f64,
}

impl RateTargets {
    /// Degraded two-layer targets: `W1` on the satellites, `W2` on the cloud.
    pub fn degraded(r1: f64, r2: f64) -> Self {
        RateTargets {
            r11: r1,
            r20: r2,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.r0, self.r10, self.r11, self.r20, self.r22];
        if all.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::validation(format!("target rates must be non-negative, got {all:?}")));
        }
        Ok(())
    }

    pub fn r1(&self) -> f64 {
        self.r10 + self.r11
    }

    pub fn r2(&self) -> f64 {
        self.r20 + self.r22
    }
}

/// Binning rates of the double-binned superposition code, in bits per use.
///
/// ```text
/// L11 = I(V1;Y1|U) - I(V1;Z,V2|U)   L12 = I(V1;Z|V2,U)
/// L22 = I(V2;Y2|U) - I(V2;Z,V1|U)   L21 = I(V2;Z|V1,U)
/// L3  = I(V1;V2|U)                  L0  = I(U;Z)
/// ```
///
/// `L0` sizes the cloud randomisation that protects the cloud messages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningPlan {
    pub n: usize,
    pub targets: RateTargets,
    pub l0: f64,
    pub l11: f64,
    pub l12: f64,
    pub l21: f64,
    pub l22: f64,
    pub l3: f64,
    /// `I(V1;Y1|U)`, which `L11 + L12 + L3` must reproduce.
    pub layer1_total: f64,
    /// `I(V2;Y2|U)`, which `L22 + L21 + L3` must reproduce.
    pub layer2_total: f64,
    /// `R11 >= L11 >= 0` and `R22 >= L22 >= 0`.
    pub valid: bool,
    pub notes: Vec<String>,
    pub decomposition: InnerBoundDecomposition,
}

pub fn plan_binning(
    bce: &BceChannel,
    dist: &CodingDistribution,
    n: usize,
    targets: RateTargets,
) -> Result<BinningPlan> {
    if n == 0 {
        return Err(Error::validation("block length must be at least 1"));
    }
    targets.validate()?;
    let dec = dist.layers();
    if dec.x_size() != bce.input_size() {
        return Err(Error::dims(format!(
            "distribution produces {} input symbols, channel takes {}",
            dec.x_size(),
            bce.input_size()
        )));
    }
    let base = dec.joint();
    let (u, v1, v2, y) = (0usize, 1usize, 2usize, 4usize);
    let j1 = base.extend(3, "y", bce.y1())?;
    let j2 = base.extend(3, "y", bce.y2())?;
    let jz = base.extend(3, "y", bce.z())?;

    let layer1_total = j1.conditional_mutual_information(&[v1], &[y], &[u])?;
    let layer2_total = j2.conditional_mutual_information(&[v2], &[y], &[u])?;
    let l11 = layer1_total - jz.conditional_mutual_information(&[v1], &[v2, y], &[u])?;
    let l12 = jz.conditional_mutual_information(&[v1], &[y], &[v2, u])?;
    let l21 = jz.conditional_mutual_information(&[v2], &[y], &[v1, u])?;
    let l22 = layer2_total - jz.conditional_mutual_information(&[v2], &[v1, y], &[u])?;
    let l3 = base.conditional_mutual_information(&[v1], &[v2], &[u])?;
    let l0 = jz.mutual_information(&[u], &[y])?;

    let mut notes = Vec::new();
    if matches!(dist, CodingDistribution::Degraded(_)) && targets.r22 > 0.0 {
        return Err(Error::validation(
            "the degraded two-layer code carries the second message on the cloud; set r22 = 0",
        ));
    }
    if l11 < 0.0 || l22 < 0.0 {
        notes.push(format!("negative binning rate (L11 = {l11:.6}, L22 = {l22:.6})"));
    }
    if targets.r11 < l11 || targets.r22 < l22 {
        notes.push(format!(
            "targets below the bin rates (R11 = {:.6} vs L11 = {l11:.6}, R22 = {:.6} vs L22 = {l22:.6}); \
             bins are merged down to the message count",
            targets.r11, targets.r22
        ));
    }
    let valid = l11 >= 0.0 && l22 >= 0.0 && targets.r11 >= l11 && targets.r22 >= l22;
    Ok(BinningPlan {
        n,
        targets,
        l0,
        l11,
        l12,
        l21,
        l22,
        l3,
        layer1_total,
        layer2_total,
        valid,
        notes,
        decomposition: dec,
    })
}
