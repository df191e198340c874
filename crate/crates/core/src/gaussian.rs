//! Secrecy rate region of the Gaussian broadcast channel with an eavesdropper.
//!
//! Receivers see `X + N_j` with noise variances `sigma1^2 <= sigma2^2 <= sigma3^2`
//! (receiver 1, receiver 2, eavesdropper). A fraction `alpha` of the power
//! carries the inner (receiver 1) layer; the remainder carries the outer layer,
//! which receiver 1 decodes and cancels first.

use serde::{Deserialize, Serialize};

use crate::region::{RatePoint, RateRegion};
use crate::{Error, Result};

/// `C(x) = 1/2 log2(1 + x)`.
#[inline]
pub fn gaussian_capacity(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBceParams {
    pub power: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub sigma3_sq: f64,
}

impl GaussianBceParams {
    pub fn new(power: f64, sigma1_sq: f64, sigma2_sq: f64, sigma3_sq: f64) -> Result<Self> {
        let p = GaussianBceParams {
            power,
            sigma1_sq,
            sigma2_sq,
            sigma3_sq,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::validation(format!("power must be positive, got {}", self.power)));
        }
        let ordered = self.sigma1_sq > 0.0
            && self.sigma1_sq <= self.sigma2_sq
            && self.sigma2_sq <= self.sigma3_sq;
        if !ordered || !self.sigma3_sq.is_finite() {
            return Err(Error::validation(format!(
                "noise variances must satisfy 0 < {} <= {} <= {}",
                self.sigma1_sq, self.sigma2_sq, self.sigma3_sq
            )));
        }
        Ok(())
    }
}

/// Power fraction given to the receiver-1 layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSplit(f64);

impl GaussianSplit {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::validation(format!("alpha = {alpha} outside [0, 1]")));
        }
        Ok(GaussianSplit(alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }
}

/// Secrecy rates at split `alpha`. Both coordinates are non-negative for
/// ordered variances; `sigma2^2 = sigma3^2` gives `R2 = 0`.
pub fn secret_rate_pair(params: &GaussianBceParams, split: GaussianSplit) -> Result<RatePoint> {
    params.validate()?;
    let a = split.alpha();
    let p = params.power;
    let inner = a * p;
    let outer = (1.0 - a) * p;
    let r1 = gaussian_capacity(inner / params.sigma1_sq) - gaussian_capacity(inner / params.sigma3_sq);
    let r2 = gaussian_capacity(outer / (inner + params.sigma2_sq))
        - gaussian_capacity(outer / (inner + params.sigma3_sq));
    Ok(RatePoint::new(r1.max(0.0), r2.max(0.0)))
}

/// Degraded Gaussian broadcast rates without a secrecy constraint.
pub fn nonsecret_rate_pair(params: &GaussianBceParams, split: GaussianSplit) -> Result<RatePoint> {
    params.validate()?;
    let a = split.alpha();
    let p = params.power;
    Ok(RatePoint::new(
        gaussian_capacity(a * p / params.sigma1_sq),
        gaussian_capacity((1.0 - a) * p / (a * p + params.sigma2_sq)),
    ))
}

/// One row of an `alpha` sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub secret: RatePoint,
    pub nonsecret: RatePoint,
}

fn alphas(n_points: usize) -> Result<impl Iterator<Item = f64>> {
    if n_points < 2 {
        return Err(Error::validation(format!("need at least 2 points, got {n_points}")));
    }
    let last = (n_points - 1) as f64;
    Ok((0..n_points).map(move |i| if i + 1 == n_points { 1.0 } else { i as f64 / last }))
}

/// Secret and non-secret rates at `n_points` values of `alpha` uniform on [0, 1].
pub fn sweep(params: &GaussianBceParams, n_points: usize) -> Result<Vec<SweepRow>> {
    params.validate()?;
    alphas(n_points)?
        .map(|alpha| {
            let split = GaussianSplit(alpha);
            Ok(SweepRow {
                alpha,
                secret: secret_rate_pair(params, split)?,
                nonsecret: nonsecret_rate_pair(params, split)?,
            })
        })
        .collect()
}

/// Pareto boundary of the secrecy region sampled at `n_points` splits; each
/// point carries its `alpha`.
pub fn region_boundary(params: &GaussianBceParams, n_points: usize) -> Result<RateRegion<f64>> {
    let rows = sweep(params, n_points)?;
    Ok(RateRegion::pareto(rows.into_iter().map(|r| (r.secret, r.alpha))))
}

/// Boundary of the non-secret region on the same grid.
pub fn nonsecret_boundary(params: &GaussianBceParams, n_points: usize) -> Result<RateRegion<f64>> {
    let rows = sweep(params, n_points)?;
    Ok(RateRegion::pareto(rows.into_iter().map(|r| (r.nonsecret, r.alpha))))
}
