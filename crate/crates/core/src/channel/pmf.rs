use serde::{Deserialize, Serialize};

use super::{check_prob_vector, plogp};
use crate::Result;

/// A probability mass function over `0..len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates and wraps `probs`. Inputs are never renormalised.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_prob_vector("pmf", &probs)?;
        Ok(Pmf { probs })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Pmf::new(vec![1.0 / size as f64; size])
    }

    /// All mass on `symbol`.
    pub fn point(size: usize, symbol: usize) -> Result<Self> {
        if symbol >= size {
            return Err(crate::Error::validation(format!(
                "point mass at {symbol} outside alphabet of size {size}"
            )));
        }
        let mut probs = vec![0.0; size];
        probs[symbol] = 1.0;
        Ok(Pmf { probs })
    }

    pub(crate) fn from_unchecked(probs: Vec<f64>) -> Self {
        Pmf { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&p| plogp(p)).sum::<f64>().max(0.0)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(Pmf::new(vec![1.0, 0.0]).unwrap().entropy(), 0.0);
        assert_eq!(Pmf::uniform(2).unwrap().entropy(), 1.0);
        // -0.1 log2 0.1 - 0.9 log2 0.9, evaluated with mpmath at 30 digits
        let h = Pmf::new(vec![0.1, 0.9]).unwrap().entropy();
        assert!((h - 0.468_995_593_589_281_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            Pmf::new(vec![-0.1, 1.1]),
            Err(crate::Error::Validation(_))
        ));
        assert!(Pmf::new(vec![0.5, 0.4]).is_err());
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
        // Off by more than the tolerance is rejected, never renormalised.
        assert!(Pmf::new(vec![0.5, 0.5 + 1e-11]).is_err());
        assert!(Pmf::new(vec![0.5, 0.5 + 1e-13]).is_ok());
    }

    #[test]
    fn serde_validates() {
        let p: Pmf = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<Pmf>("[0.25, 0.5]").is_err());
    }
}
