use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Gamma};

use crate::{Error, Result};

/// Tail mass beyond which the gain axis is truncated.
pub const TAIL_MASS: f64 = 1e-6;

/// Distribution of the main-channel power gain `S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FadingFamily {
    /// Unit-mean exponential power gain.
    Rayleigh,
    /// Unit-mean Gamma(m, 1/m) power gain; `m = 1` is Rayleigh.
    Nakagami { m: f64 },
}

impl FadingFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingFamily::Rayleigh => Ok(()),
            FadingFamily::Nakagami { m } if m.is_finite() && m >= 0.5 => Ok(()),
            FadingFamily::Nakagami { m } => Err(Error::validation(format!(
                "Nakagami shape must be >= 0.5, got {m}"
            ))),
        }
    }

    fn gamma(m: f64) -> Gamma {
        Gamma::new(m, m).expect("shape validated")
    }

    pub fn pdf(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        match *self {
            FadingFamily::Rayleigh => (-s).exp(),
            FadingFamily::Nakagami { m } => Self::gamma(m).pdf(s),
        }
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match *self {
            FadingFamily::Rayleigh => -(-s).exp_m1(),
            FadingFamily::Nakagami { m } => Self::gamma(m).cdf(s),
        }
    }

    /// `1 - F(s)`, computed without cancellation.
    pub fn survival(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        match *self {
            FadingFamily::Rayleigh => (-s).exp(),
            FadingFamily::Nakagami { m } => Self::gamma(m).sf(s),
        }
    }

    /// Smallest `s` with `1 - F(s) <= TAIL_MASS`.
    pub fn s_max(&self) -> f64 {
        match self {
            FadingFamily::Rayleigh => -TAIL_MASS.ln(),
            FadingFamily::Nakagami { .. } => {
                let mut hi = 1.0;
                while self.survival(hi) > TAIL_MASS {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                while hi - lo > 1e-12 * hi {
                    let mid = 0.5 * (lo + hi);
                    if self.survival(mid) > TAIL_MASS {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    pub fn is_rayleigh(&self) -> bool {
        matches!(self, FadingFamily::Rayleigh) || matches!(self, FadingFamily::Nakagami { m } if *m == 1.0)
    }
}

/// Fading law of the main channel, fixed eavesdropper gain and power budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FadingSpec {
    pub family: FadingFamily,
    pub s_prime: f64,
    pub power: f64,
}

impl FadingSpec {
    pub fn new(family: FadingFamily, s_prime: f64, power: f64) -> Result<Self> {
        let spec = FadingSpec {
            family,
            s_prime,
            power,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rayleigh(s_prime: f64, power: f64) -> Result<Self> {
        Self::new(FadingFamily::Rayleigh, s_prime, power)
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.s_prime.is_finite() && self.s_prime >= 0.0) {
            return Err(Error::validation(format!(
                "eavesdropper gain must be >= 0, got {}",
                self.s_prime
            )));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::validation(format!("power must be positive, got {}", self.power)));
        }
        Ok(())
    }

    pub fn pdf(&self, s: f64) -> f64 {
        self.family.pdf(s)
    }

    pub fn cdf(&self, s: f64) -> f64 {
        self.family.cdf(s)
    }

    pub fn survival(&self, s: f64) -> f64 {
        self.family.survival(s)
    }

    pub fn s_max(&self) -> f64 {
        self.family.s_max()
    }
}
