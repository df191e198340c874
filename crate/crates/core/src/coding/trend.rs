use serde::{Deserialize, Serialize};

use super::codebook::{generate_codebook, uniform_prior};
use super::codebook::{CodeStructure, PairSelection};
use super::exact::{exact_equivocation, exact_error_probability, EquivocationReport, ErrorReport};
use super::plan::{plan_binning, BinningPlan, CodingDistribution, RateTargets};
use crate::channel::BceChannel;
use crate::{Error, Result};

/// One code drawn and analysed exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub codewords: usize,
    pub pair_selection: Option<PairSelection>,
    /// Realised `(R0, R1, R2)`.
    pub rates: (f64, f64, f64),
    pub r_e12: f64,
    /// `H(W1, W2) / n - R_e12`.
    pub gap: f64,
    pub pe: f64,
    pub equivocation: EquivocationReport,
    pub error: ErrorReport,
}

/// Averages over seeds at one block length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub n: usize,
    pub seeds: usize,
    pub mean_gap: f64,
    pub mean_pe: f64,
    pub mean_r_e12: f64,
    pub plan: BinningPlan,
    pub structure: CodeStructure,
    /// Adjustments made when turning the plan's rates into integer sizes.
    pub structure_notes: Vec<String>,
    pub outcomes: Vec<SeedOutcome>,
}

/// Draws one code per seed at each block length and reports the mean secrecy
/// gap and error probability.
pub fn secrecy_trend(
    bce: &BceChannel,
    dist: &CodingDistribution,
    targets: RateTargets,
    n_list: &[usize],
    seeds: &[u64],
) -> Result<Vec<TrendRow>> {
    if seeds.is_empty() {
        return Err(Error::validation("at least one seed is required"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let plan = plan_binning(bce, dist, n, targets)?;
        let (structure, structure_notes) = CodeStructure::from_plan(&plan)?;
        let mut outcomes = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let code = generate_codebook(&plan, seed)?;
            let prior = uniform_prior(&code.messages);
            let eq = exact_equivocation(&code, bce.z(), &prior)?;
            let err = exact_error_probability(&code, bce.y1(), bce.y2(), &prior)?;
            outcomes.push(SeedOutcome {
                seed,
                codewords: code.codewords.len(),
                pair_selection: code.pair_selection,
                rates: code.rates(),
                r_e12: eq.r_e12,
                gap: (eq.h_w12 - eq.r_e12).max(0.0),
                pe: err.pe,
                equivocation: eq,
                error: err,
            });
        }
        let k = outcomes.len() as f64;
        rows.push(TrendRow {
            n,
            seeds: outcomes.len(),
            mean_gap: outcomes.iter().map(|o| o.gap).sum::<f64>() / k,
            mean_pe: outcomes.iter().map(|o| o.pe).sum::<f64>() / k,
            mean_r_e12: outcomes.iter().map(|o| o.r_e12).sum::<f64>() / k,
            plan,
            structure,
            structure_notes,
            outcomes,
        });
    }
    Ok(rows)
}
