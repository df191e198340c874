use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::closed_form::{interference_window, InterferenceLaw};
use super::family::FadingSpec;
use super::profile::{InterferenceProfile, PowerProfile};
use crate::simplex::project_to_simplex;
use crate::{Error, Result};

/// Minimum layer count for a uniform grid.
pub const MIN_UNIFORM_LAYERS: usize = 10;

/// Gains at which the discrete layers sit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerGrid {
    /// `n` equally spaced gains on `[s', s_max]`.
    Uniform { n: usize },
    /// Strictly increasing non-negative gains.
    Explicit(Vec<f64>),
}

impl LayerGrid {
    pub fn gains(&self, spec: &FadingSpec) -> Result<Vec<f64>> {
        match self {
            LayerGrid::Uniform { n } => {
                if *n < MIN_UNIFORM_LAYERS {
                    return Err(Error::validation(format!(
                        "need at least {MIN_UNIFORM_LAYERS} layers, got {n}"
                    )));
                }
                let (a, b) = (spec.s_prime, spec.s_max());
                if b <= a {
                    return Err(Error::validation(format!(
                        "eavesdropper gain {a} is beyond the truncation point {b}"
                    )));
                }
                Ok((0..*n).map(|k| a + (b - a) * k as f64 / (*n - 1) as f64).collect())
            }
            LayerGrid::Explicit(g) => {
                if g.is_empty() {
                    return Err(Error::validation("explicit layer grid is empty"));
                }
                if g.iter().any(|&s| !(s.is_finite() && s >= 0.0)) || g.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::validation("layer gains must be non-negative and strictly increasing"));
                }
                Ok(g.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Stop when the relative objective improvement drops below this.
    pub rel_tol: f64,
    pub armijo: f64,
    /// First trial step of the line search.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 100_000,
            rel_tol: 1e-10,
            armijo: 1e-4,
            initial_step: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayeredSolution {
    pub gains: Vec<f64>,
    pub powers: Vec<f64>,
    /// Average rate in bits.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warning: Option<String>,
}

impl LayeredSolution {
    pub fn profile(&self) -> Result<PowerProfile> {
        PowerProfile::from_layers(&self.gains, &self.powers)
    }
}

/// Average rate in bits of discrete layers: layer `k` carries
/// `1/2 [log((1+s_k T_k)/(1+s_k I_k)) - log((1+s' T_k)/(1+s' I_k))]^+` to every
/// receiver of gain at least `s_k`, where `I_k` is the power of the layers
/// above `k` and `T_k = I_k + p_k`.
pub fn layered_objective(spec: &FadingSpec, gains: &[f64], powers: &[f64]) -> f64 {
    evaluate(spec, gains, powers, None)
}

fn evaluate(spec: &FadingSpec, gains: &[f64], powers: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = gains.len();
    let sp = spec.s_prime;
    let c = 1.0 / (2.0 * LN_2);
    let mut above = 0.0;
    let mut total = 0.0;
    // a[k] = d r_k / d T_k, b[k] = d r_k / d I_k, both weighted
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for k in (0..n).rev() {
        let (s, p, i) = (gains[k], powers[k], above);
        let t = i + p;
        let bracket = (s * p / (1.0 + s * i)).ln_1p() - (sp * p / (1.0 + sp * i)).ln_1p();
        if bracket > 0.0 {
            let w = spec.survival(s) * c;
            total += w * bracket;
            a[k] = w * (s / (1.0 + s * t) - sp / (1.0 + sp * t));
            b[k] = w * (sp / (1.0 + sp * i) - s / (1.0 + s * i));
        }
        above = t;
    }
    if let Some(g) = grad {
        // d/dp_j = sum_{k<=j} a_k + sum_{k<j} b_k
        let mut acc = 0.0;
        for j in 0..n {
            g[j] = acc + a[j];
            acc += a[j] + b[j];
        }
    }
    total
}

fn initial_powers(spec: &FadingSpec, gains: &[f64]) -> Vec<f64> {
    let hi = interference_window(InterferenceLaw::Closed, spec)
        .map(|w| w.hi)
        .unwrap_or(f64::INFINITY);
    let mut mask: Vec<bool> = gains.iter().map(|&s| s >= spec.s_prime && s <= hi).collect();
    if !mask.iter().any(|&m| m) {
        mask = vec![true; gains.len()];
    }
    let count = mask.iter().filter(|&&m| m).count() as f64;
    mask.iter()
        .map(|&m| if m { spec.power / count } else { 0.0 })
        .collect()
}

/// Powers of `profile` lumped onto discrete layers: layer `k` gets the power
/// the profile spends on `[gains[k], gains[k+1])`, the last layer everything
/// above its gain.
pub fn discretize<P: InterferenceProfile + ?Sized>(profile: &P, gains: &[f64]) -> Vec<f64> {
    let i: Vec<f64> = gains.iter().map(|&s| profile.interference(s)).collect();
    (0..gains.len())
        .map(|k| (i[k] - i.get(k + 1).copied().unwrap_or(0.0)).max(0.0))
        .collect()
}

/// Maximises the layered average rate over non-negative layer powers summing
/// to the budget by projected gradient ascent. Each step is halved until the
/// Armijo condition holds; the next trial starts at twice the accepted step.
pub fn optimize_profile_numerical(
    spec: &FadingSpec,
    grid: &LayerGrid,
    config: &OptimizerConfig,
) -> Result<LayeredSolution> {
    spec.validate()?;
    let gains = grid.gains(spec)?;
    let n = gains.len();
    let mut p = initial_powers(spec, &gains);
    let mut g = vec![0.0; n];
    let mut j = evaluate(spec, &gains, &p, Some(&mut g));
    let mut step = config.initial_step;
    let mut g_new = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iters {
        iterations += 1;
        let mut accepted = None;
        let mut t = step;
        while t > 1e-30 {
            let mut q: Vec<f64> = p.iter().zip(&g).map(|(x, d)| x + t * d).collect();
            project_to_simplex(&mut q, spec.power);
            let dir: f64 = q.iter().zip(&p).zip(&g).map(|((a, b), d)| (a - b) * d).sum();
            if dir <= 0.0 {
                break;
            }
            let jq = evaluate(spec, &gains, &q, Some(&mut g_new));
            if jq >= j + config.armijo * dir {
                accepted = Some((q, jq));
                break;
            }
            t *= 0.5;
        }
        let Some((q, jq)) = accepted else {
            // no ascent direction left at this resolution
            converged = true;
            break;
        };
        step = (2.0 * t).min(config.initial_step);
        let rel = (jq - j) / j.abs().max(f64::MIN_POSITIVE);
        p = q;
        j = jq;
        std::mem::swap(&mut g, &mut g_new);
        if rel < config.rel_tol {
            converged = true;
            break;
        }
    }

    let warning = (!converged).then(|| {
        format!(
            "projected ascent stopped at the {}-iteration cap before reaching relative improvement {}",
            config.max_iters, config.rel_tol
        )
    });
    Ok(LayeredSolution {
        gains,
        powers: p,
        objective: j,
        iterations,
        converged,
        warning,
    })
}
