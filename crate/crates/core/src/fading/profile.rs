use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::closed_form::{interference_in, interference_window, rayleigh_density, InterferenceLaw, Window};
use super::family::FadingSpec;
use super::quadrature::{breakpoints, integrate_pieces, DEFAULT_TOL};
use crate::{Error, Result};

/// A residual-interference profile `I(s)` with layer density `rho = -dI/ds`.
pub trait InterferenceProfile {
    fn interference(&self, s: f64) -> f64;
    fn density(&self, s: f64) -> f64;
    /// Interval outside which `rho` vanishes.
    fn support(&self) -> (f64, f64);
    /// Points inside the support where `I` or `rho` is not smooth.
    fn kinks(&self) -> Vec<f64>;
}

/// Closed-form profile with its window precomputed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormProfile {
    pub law: InterferenceLaw,
    pub spec: FadingSpec,
    pub window: Window,
}

impl ClosedFormProfile {
    pub fn new(law: InterferenceLaw, spec: FadingSpec) -> Result<Self> {
        let window = interference_window(law, &spec)?;
        let p = ClosedFormProfile { law, spec, window };
        if !window.is_empty() {
            // surface a bad denominator now rather than mid-quadrature
            let n = 64;
            for k in 0..=n {
                let x = window.lo + (window.hi - window.lo) * k as f64 / n as f64;
                interference_in(law, &spec, &window, x)?;
            }
        }
        Ok(p)
    }

    pub fn try_interference(&self, s: f64) -> Result<f64> {
        interference_in(self.law, &self.spec, &self.window, s)
    }

    /// Samples `I` on `n` points spanning the window; the tabulated density is
    /// the slope of each cell.
    pub fn tabulate(&self, n: usize) -> Result<PowerProfile> {
        if n < 2 {
            return Err(Error::validation("tabulation needs at least 2 points"));
        }
        let (a, b) = (self.window.lo, self.window.hi);
        let grid: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
        let interference = grid.iter().map(|&s| self.try_interference(s)).collect::<Result<_>>()?;
        PowerProfile::from_interference(grid, interference)
    }
}

impl InterferenceProfile for ClosedFormProfile {
    fn interference(&self, s: f64) -> f64 {
        self.try_interference(s).unwrap_or(f64::NAN)
    }

    fn density(&self, s: f64) -> f64 {
        let w = &self.window;
        if w.is_empty() || s < w.lo || s > w.hi {
            return 0.0;
        }
        if self.spec.family.is_rayleigh() {
            return rayleigh_density(self.law, self.spec.s_prime, s);
        }
        // central difference, one-sided at the window edges
        let h = 1e-5 * s.abs().max(1.0);
        let (a, b) = ((s - h).max(w.lo), (s + h).min(w.hi - 1e-15 * w.hi));
        if b <= a {
            return 0.0;
        }
        (self.interference(a) - self.interference(b)) / (b - a)
    }

    fn support(&self) -> (f64, f64) {
        (self.window.lo, self.window.hi)
    }

    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Tabulated profile: `I` is linear between grid points and `rho` is constant
/// on each cell `[grid[k], grid[k+1])`, stored at the cell's left point.
/// Before the first grid point `I` equals `interference[0]`; after the last it
/// equals `interference[last]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub grid: Vec<f64>,
    pub interference: Vec<f64>,
    pub density: Vec<f64>,
}

impl PowerProfile {
    /// Builds a tabulated profile from decreasing interference samples; the
    /// density is the cell slope.
    pub fn from_interference(grid: Vec<f64>, interference: Vec<f64>) -> Result<Self> {
        if grid.len() != interference.len() || grid.len() < 2 {
            return Err(Error::dims("profile needs matching grid and interference of length >= 2"));
        }
        let mut density: Vec<f64> = grid
            .windows(2)
            .zip(interference.windows(2))
            .map(|(g, i)| (i[0] - i[1]) / (g[1] - g[0]))
            .collect();
        density.push(0.0);
        let p = PowerProfile {
            grid,
            interference,
            density,
        };
        p.check_shape()?;
        Ok(p)
    }

    /// Discrete layers `powers[k]` at gains `gains[k]`; each layer's power is
    /// spread over the cell to its right.
    pub fn from_layers(gains: &[f64], powers: &[f64]) -> Result<Self> {
        if gains.len() != powers.len() || gains.is_empty() {
            return Err(Error::dims("gains and powers must be non-empty and of equal length"));
        }
        let step = if gains.len() > 1 {
            gains[gains.len() - 1] - gains[gains.len() - 2]
        } else {
            1.0
        };
        let mut grid = gains.to_vec();
        grid.push(gains[gains.len() - 1] + step);
        let mut interference = vec![0.0; grid.len()];
        for k in (0..gains.len()).rev() {
            interference[k] = interference[k + 1] + powers[k];
        }
        Self::from_interference(grid, interference)
    }

    fn check_shape(&self) -> Result<()> {
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("profile grid must be strictly increasing"));
        }
        if self.interference.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            return Err(Error::validation("interference must be non-increasing"));
        }
        if self.interference.last().is_some_and(|&v| v < -1e-12) {
            return Err(Error::validation("interference must end non-negative"));
        }
        if self.density.iter().any(|&r| r < -1e-9) {
            return Err(Error::validation("layer density must be non-negative"));
        }
        Ok(())
    }

    /// Checks the shape invariants and the power budget.
    pub fn validate(&self, power: f64) -> Result<()> {
        if self.grid.len() != self.interference.len() || self.grid.len() != self.density.len() {
            return Err(Error::dims("profile columns differ in length"));
        }
        self.check_shape()?;
        if self.interference[0] > power + 1e-9 {
            return Err(Error::validation(format!(
                "profile starts at interference {} above the budget {power}",
                self.interference[0]
            )));
        }
        Ok(())
    }

    fn cell(&self, s: f64) -> Option<usize> {
        let n = self.grid.len();
        if s < self.grid[0] || s >= self.grid[n - 1] {
            return None;
        }
        Some(self.grid.partition_point(|&g| g <= s) - 1)
    }
}

impl InterferenceProfile for PowerProfile {
    fn interference(&self, s: f64) -> f64 {
        let n = self.grid.len();
        if s <= self.grid[0] {
            return self.interference[0];
        }
        match self.cell(s) {
            None => self.interference[n - 1],
            Some(k) => {
                let t = (s - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
                self.interference[k] + t * (self.interference[k + 1] - self.interference[k])
            }
        }
    }

    fn density(&self, s: f64) -> f64 {
        self.cell(s).map_or(0.0, |k| self.density[k])
    }

    fn support(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    fn kinks(&self) -> Vec<f64> {
        self.grid.clone()
    }
}

/// Rate density `rho(u) [u/(1+uI) - s'/(1+s'I)]^+` in nats.
fn rate_density<P: InterferenceProfile + ?Sized>(profile: &P, s_prime: f64, u: f64) -> f64 {
    let rho = profile.density(u);
    if rho <= 0.0 || u <= s_prime {
        return 0.0;
    }
    let i = profile.interference(u);
    rho * (u - s_prime) / ((1.0 + u * i) * (1.0 + s_prime * i))
}

/// Rate in bits collected by a receiver of gain `s`: half the integral of the
/// positive part of `u rho/(1+uI) - s' rho/(1+s'I)` over `[0, s]`.
pub fn layer_rate<P: InterferenceProfile + ?Sized>(s: f64, spec: &FadingSpec, profile: &P) -> Result<f64> {
    let (a, b) = profile.support();
    let lo = a.max(spec.s_prime);
    let hi = s.min(b);
    if hi <= lo {
        return Ok(0.0);
    }
    let breaks = breakpoints(lo, hi, profile.kinks());
    let v = integrate_pieces(|u| rate_density(profile, spec.s_prime, u), &breaks, DEFAULT_TOL * 2.0 * LN_2)?;
    Ok(v / (2.0 * LN_2))
}

/// Average rate in bits, `1/2 int (1 - F(u)) G(u) du`.
pub fn average_rate<P: InterferenceProfile + ?Sized>(spec: &FadingSpec, profile: &P) -> Result<f64> {
    let (a, b) = profile.support();
    let lo = a.max(spec.s_prime);
    if b <= lo {
        return Ok(0.0);
    }
    let breaks = breakpoints(lo, b, profile.kinks());
    let v = integrate_pieces(
        |u| spec.survival(u) * rate_density(profile, spec.s_prime, u),
        &breaks,
        DEFAULT_TOL * 2.0 * LN_2,
    )?;
    Ok(v / (2.0 * LN_2))
}

/// Total power carried by the density over the support.
pub fn integrated_density<P: InterferenceProfile + ?Sized>(profile: &P) -> Result<f64> {
    let (a, b) = profile.support();
    if b <= a {
        return Ok(0.0);
    }
    integrate_pieces(|u| profile.density(u), &breakpoints(a, b, profile.kinks()), DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed() -> (FadingSpec, ClosedFormProfile) {
        let spec = FadingSpec::rayleigh(0.5, 1.0).unwrap();
        (spec, ClosedFormProfile::new(InterferenceLaw::Closed, spec).unwrap())
    }

    #[test]
    fn pinned_rates() {
        let (spec, p) = closed();
        let r = layer_rate(1.4, &spec, &p).unwrap();
        assert!((r - 0.211_072_458_660_526_6).abs() < 1e-8, "{r}");
        let avg = average_rate(&spec, &p).unwrap();
        assert!((avg - 0.079_013_478_462_245_03).abs() < 1e-8, "{avg}");
        let st = ClosedFormProfile::new(InterferenceLaw::Stationary, spec).unwrap();
        let avg = average_rate(&spec, &st).unwrap();
        assert!((avg - 0.084_499_667_643_050_15).abs() < 1e-8, "{avg}");
    }

    #[test]
    fn below_eavesdropper_gain() {
        let (spec, p) = closed();
        assert_eq!(layer_rate(0.5, &spec, &p).unwrap(), 0.0);
        assert_eq!(layer_rate(0.7, &spec, &p).unwrap(), 0.0);
    }

    #[test]
    fn budget() {
        let (_, p) = closed();
        assert!((integrated_density(&p).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_density() {
        let spec = FadingSpec::rayleigh(0.5, 1.0).unwrap();
        let flat = PowerProfile::from_interference(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(layer_rate(2.0, &spec, &flat).unwrap(), 0.0);
        assert_eq!(average_rate(&spec, &flat).unwrap(), 0.0);
        let low = PowerProfile::from_interference(vec![0.0, 0.4], vec![1.0, 0.0]).unwrap();
        assert_eq!(average_rate(&spec, &low).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_matches_closed_form() {
        let (spec, p) = closed();
        let t = p.tabulate(4001).unwrap();
        t.validate(1.0).unwrap();
        let a = average_rate(&spec, &t).unwrap();
        assert!((a - 0.079_013_478_462_245_03).abs() < 1e-6, "{a}");
    }

    #[test]
    fn layers_round_trip() {
        let p = PowerProfile::from_layers(&[1.0, 2.0, 3.0], &[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(p.interference, vec![1.0, 0.5, 0.25, 0.0]);
        assert!((integrated_density(&p).unwrap() - 1.0).abs() < 1e-12);
        assert!(PowerProfile::from_interference(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    }
}
