use serde::{Deserialize, Serialize};

use super::family::FadingSpec;
use crate::{Error, Result};

/// Which closed-form interference law to use.
///
/// Both laws share the numerator `1 - F(x) - (x - s') f(x)` and therefore the
/// right window edge `x1`. They differ in the denominator:
///
/// * `Closed`: `s'(1 - F(x)) + x(x - s') f(x)`, the classical published form.
/// * `Stationary`: `x(x - s') f(x) - s'(1 - F(x))`, the exact solution of the
///   stationarity condition `(1 - F)(1 + s' I) = f (x - s')(1 + x I)` of the
///   average-rate functional.
///
/// The two coincide when `s' = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterferenceLaw {
    Closed,
    Stationary,
}

/// Interval `[lo, hi]` on which the closed form is in force. Below `lo` the
/// interference is the full power, above `hi` it is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    /// Root of `I(x0) = P`, when the closed form exceeds the budget near the
    /// left edge.
    pub x0: Option<f64>,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

fn numerator(spec: &FadingSpec, x: f64) -> f64 {
    spec.survival(x) - (x - spec.s_prime) * spec.pdf(x)
}

fn denominator(law: InterferenceLaw, spec: &FadingSpec, x: f64) -> f64 {
    let tail = spec.survival(x);
    let body = x * (x - spec.s_prime) * spec.pdf(x);
    match law {
        InterferenceLaw::Closed => spec.s_prime * tail + body,
        InterferenceLaw::Stationary => body - spec.s_prime * tail,
    }
}

/// Unclipped closed-form value; `None` when the denominator is not positive.
fn formula(law: InterferenceLaw, spec: &FadingSpec, x: f64) -> Option<f64> {
    let d = denominator(law, spec, x);
    (d > 0.0).then(|| numerator(spec, x) / d)
}

fn bisect(mut lo: f64, mut hi: f64, positive_at_lo: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if positive_at_lo(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form Rayleigh endpoints `(s0, s1)` of the classical law: `s0`
/// solves `I(s0) = P` and `s1 = 1 + s'` is where the interference reaches
/// zero.
pub fn rayleigh_endpoints(spec: &FadingSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    if !spec.family.is_rayleigh() {
        return Err(Error::Usage("closed-form endpoints need the Rayleigh family".into()));
    }
    let (p, sp) = (spec.power, spec.s_prime);
    let disc = p * p * sp * sp + 2.0 * p * (1.0 - 2.0 * p) * sp + 4.0 * p + 1.0;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "I(s) = P has no real root for P = {p}, s' = {sp}; the budget exceeds I(s') = 1/s'"
        )));
    }
    let s0 = (-1.0 + p * sp + disc.sqrt()) / (2.0 * p);
    Ok((s0, 1.0 + sp))
}

/// Window of the chosen law.
pub fn interference_window(law: InterferenceLaw, spec: &FadingSpec) -> Result<Window> {
    spec.validate()?;
    let sp = spec.s_prime;
    let rayleigh = spec.family.is_rayleigh();

    let hi = if rayleigh {
        1.0 + sp
    } else {
        let top = spec.s_max().max(sp + 1.0);
        let steps = 4096;
        let h = (top - sp) / steps as f64;
        let mut found = None;
        for k in 1..=steps {
            let x = sp + k as f64 * h;
            if numerator(spec, x) <= 0.0 {
                found = Some(bisect(x - h, x, |t| numerator(spec, t) > 0.0));
                break;
            }
        }
        found.ok_or_else(|| {
            Error::Domain(format!(
                "interference numerator has no zero in [{sp}, {top}]; the closed form does not apply"
            ))
        })?
    };

    // left edge of validity: where the denominator turns positive
    let pole = match law {
        InterferenceLaw::Closed => sp,
        InterferenceLaw::Stationary if sp == 0.0 => 0.0,
        InterferenceLaw::Stationary => {
            if denominator(law, spec, hi) <= 0.0 {
                return Err(Error::Domain(format!(
                    "stationary denominator is not positive at x1 = {hi}"
                )));
            }
            bisect(sp, hi, |t| denominator(law, spec, t) <= 0.0)
        }
    };

    if rayleigh && law == InterferenceLaw::Closed {
        return Ok(match rayleigh_endpoints(spec) {
            Ok((s0, _)) if s0 > sp => Window {
                lo: s0,
                hi,
                x0: Some(s0),
            },
            _ => Window { lo: sp, hi, x0: None },
        });
    }

    let at_pole = formula(law, spec, pole).unwrap_or(f64::INFINITY);
    if at_pole <= spec.power {
        return Ok(Window {
            lo: pole,
            hi,
            x0: None,
        });
    }
    let x0 = bisect(pole, hi, |t| {
        formula(law, spec, t).map_or(true, |v| v > spec.power)
    });
    Ok(Window {
        lo: x0,
        hi,
        x0: Some(x0),
    })
}

/// Value of the law at `x` given its window.
pub(crate) fn interference_in(law: InterferenceLaw, spec: &FadingSpec, w: &Window, x: f64) -> Result<f64> {
    if x < w.lo {
        return Ok(if w.is_empty() { 0.0 } else { spec.power });
    }
    if x >= w.hi {
        return Ok(0.0);
    }
    let d = denominator(law, spec, x);
    if d <= 0.0 {
        return Err(Error::Domain(format!(
            "interference denominator is {d:.3e} at x = {x} inside the window [{}, {}]",
            w.lo, w.hi
        )));
    }
    Ok((numerator(spec, x) / d).clamp(0.0, spec.power))
}

/// Optimal residual interference `I(x)` of the classical closed form. Equals
/// the full power `P` below the window and zero above it.
pub fn optimal_interference(x: f64, spec: &FadingSpec) -> Result<f64> {
    let w = interference_window(InterferenceLaw::Closed, spec)?;
    interference_in(InterferenceLaw::Closed, spec, &w, x)
}

/// Residual interference solving the stationarity condition exactly.
pub fn stationary_interference(x: f64, spec: &FadingSpec) -> Result<f64> {
    let w = interference_window(InterferenceLaw::Stationary, spec)?;
    interference_in(InterferenceLaw::Stationary, spec, &w, x)
}

/// `-dI/ds` for a Rayleigh law inside the window; writes `I = N / D` with
/// `N = 1 + s' - s` and `D = s^2 - s's +/- s'`.
pub(crate) fn rayleigh_density(law: InterferenceLaw, s_prime: f64, s: f64) -> f64 {
    let n = 1.0 + s_prime - s;
    let d = match law {
        InterferenceLaw::Closed => s * s - s_prime * s + s_prime,
        InterferenceLaw::Stationary => s * s - s_prime * s - s_prime,
    };
    (d + n * (2.0 * s - s_prime)) / (d * d)
}

/// Layer power density of the classical Rayleigh solution,
/// `(-s^2 + 2(s'+1)s - s'^2) / (s^2 - s's + s')^2` on `[max{s', s0}, s1]`.
pub fn rayleigh_power_density(s: f64, spec: &FadingSpec) -> Result<f64> {
    let (s0, s1) = rayleigh_endpoints(spec)?;
    let sp = spec.s_prime;
    if s < sp.max(s0) || s > s1 {
        return Ok(0.0);
    }
    Ok((-s * s + 2.0 * (sp + 1.0) * s - sp * sp) / (s * s - sp * s + sp).powi(2))
}
