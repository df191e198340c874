use serde::{Deserialize, Serialize};

use super::{check_prob_vector, Pmf, PROB_TOL};
use crate::{Error, Result};

/// Row-stochastic transition kernel `P(out | in)`.
///
/// Stored row-major: `kernel[x * output_size + y] = P(y | x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelFile", into = "ChannelFile")]
pub struct DiscreteChannel {
    input_size: usize,
    output_size: usize,
    kernel: Vec<f64>,
}

/// On-disk channel representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub input_size: usize,
    pub output_size: usize,
    pub rows: Vec<Vec<f64>>,
}

impl DiscreteChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let input_size = rows.len();
        if input_size == 0 {
            return Err(Error::validation("channel has no input symbols"));
        }
        let output_size = rows[0].len();
        if output_size == 0 {
            return Err(Error::validation("channel has no output symbols"));
        }
        let mut kernel = Vec::with_capacity(input_size * output_size);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != output_size {
                return Err(Error::dims(format!(
                    "row {x} has {} entries, expected {output_size}",
                    row.len()
                )));
            }
            check_prob_vector(&format!("channel row {x}"), row)?;
            kernel.extend_from_slice(row);
        }
        Ok(DiscreteChannel {
            input_size,
            output_size,
            kernel,
        })
    }

    /// Builds from a flat row-major buffer, validating every row.
    pub fn from_flat(input_size: usize, output_size: usize, kernel: Vec<f64>) -> Result<Self> {
        if input_size == 0 || output_size == 0 || kernel.len() != input_size * output_size {
            return Err(Error::dims(format!(
                "flat kernel of length {} does not fit {input_size}x{output_size}",
                kernel.len()
            )));
        }
        for x in 0..input_size {
            check_prob_vector(
                &format!("channel row {x}"),
                &kernel[x * output_size..(x + 1) * output_size],
            )?;
        }
        Ok(DiscreteChannel {
            input_size,
            output_size,
            kernel,
        })
    }

    pub(crate) fn from_flat_unchecked(input_size: usize, output_size: usize, kernel: Vec<f64>) -> Self {
        debug_assert_eq!(kernel.len(), input_size * output_size);
        DiscreteChannel {
            input_size,
            output_size,
            kernel,
        }
    }

    pub fn from_pmfs(rows: &[Pmf]) -> Result<Self> {
        DiscreteChannel::new(rows.iter().map(|p| p.probs().to_vec()).collect())
    }

    pub fn identity(size: usize) -> Self {
        let mut kernel = vec![0.0; size * size];
        for i in 0..size {
            kernel[i * size + i] = 1.0;
        }
        DiscreteChannel::from_flat_unchecked(size, size, kernel)
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::validation(format!("crossover {p} outside [0, 1]")));
        }
        Ok(DiscreteChannel::from_flat_unchecked(
            2,
            2,
            vec![1.0 - p, p, p, 1.0 - p],
        ))
    }

    /// Every input produces the same output distribution `out`.
    pub fn constant(input_size: usize, out: &Pmf) -> Self {
        let kernel = (0..input_size).flat_map(|_| out.probs().iter().copied()).collect();
        DiscreteChannel::from_flat_unchecked(input_size, out.len(), kernel)
    }

    /// Output uniform over `output_size` symbols, independent of the input.
    pub fn uniform_noise(input_size: usize, output_size: usize) -> Self {
        let out = Pmf::from_unchecked(vec![1.0 / output_size as f64; output_size]);
        DiscreteChannel::constant(input_size, &out)
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    #[inline]
    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.kernel[input * self.output_size + output]
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.kernel[input * self.output_size..(input + 1) * self.output_size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.kernel.chunks_exact(self.output_size)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.kernel
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Output distribution induced by input distribution `input`.
    pub fn output_distribution(&self, input: &Pmf) -> Result<Pmf> {
        if input.len() != self.input_size {
            return Err(Error::dims(format!(
                "input pmf has {} symbols, channel expects {}",
                input.len(),
                self.input_size
            )));
        }
        let mut out = vec![0.0; self.output_size];
        for (x, &px) in input.probs().iter().enumerate() {
            for (o, &k) in out.iter_mut().zip(self.row(x)) {
                *o += px * k;
            }
        }
        Ok(Pmf::from_unchecked(out))
    }

    /// Largest deviation of any row sum from one.
    pub fn max_row_defect(&self) -> f64 {
        self.rows()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Entrywise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &DiscreteChannel) -> Result<f64> {
        if self.input_size != other.input_size || self.output_size != other.output_size {
            return Err(Error::dims("kernels have different shapes"));
        }
        Ok(self
            .kernel
            .iter()
            .zip(&other.kernel)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.kernel.iter().all(|&p| p >= 0.0) && self.max_row_defect() <= PROB_TOL
    }
}

impl TryFrom<ChannelFile> for DiscreteChannel {
    type Error = Error;

    fn try_from(f: ChannelFile) -> Result<Self> {
        if f.rows.len() != f.input_size {
            return Err(Error::dims(format!(
                "input_size is {} but {} rows were given",
                f.input_size,
                f.rows.len()
            )));
        }
        if f.rows.iter().any(|r| r.len() != f.output_size) {
            return Err(Error::dims(format!(
                "every row must have output_size = {} entries",
                f.output_size
            )));
        }
        DiscreteChannel::new(f.rows)
    }
}

impl From<DiscreteChannel> for ChannelFile {
    fn from(c: DiscreteChannel) -> Self {
        ChannelFile {
            input_size: c.input_size,
            output_size: c.output_size,
            rows: c.to_rows(),
        }
    }
}

/// Cascade `first` then `second`: `P(z|x) = sum_y P(y|x) P(z|y)`.
pub fn compose(first: &DiscreteChannel, second: &DiscreteChannel) -> Result<DiscreteChannel> {
    if first.output_size != second.input_size {
        return Err(Error::dims(format!(
            "cannot cascade a channel with {} outputs into one with {} inputs",
            first.output_size, second.input_size
        )));
    }
    let (n, k) = (first.input_size, second.output_size);
    let mut kernel = vec![0.0; n * k];
    for x in 0..n {
        let out = &mut kernel[x * k..(x + 1) * k];
        for (y, &pyx) in first.row(x).iter().enumerate() {
            if pyx == 0.0 {
                continue;
            }
            for (o, &pzy) in out.iter_mut().zip(second.row(y)) {
                *o += pyx * pzy;
            }
        }
    }
    Ok(DiscreteChannel::from_flat_unchecked(n, k, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_cascade() {
        let c = DiscreteChannel::new(vec![vec![0.7, 0.2, 0.1], vec![0.0, 0.5, 0.5]]).unwrap();
        let out = compose(&c, &DiscreteChannel::identity(3)).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn bsc_cascades() {
        // p*q = p(1-q) + (1-p)q
        let c = compose(
            &DiscreteChannel::bsc(0.1).unwrap(),
            &DiscreteChannel::bsc(0.05).unwrap(),
        )
        .unwrap();
        assert!(c.max_abs_diff(&DiscreteChannel::bsc(0.14).unwrap()).unwrap() < 1e-15);
        let c2 = compose(&c, &DiscreteChannel::bsc(0.1).unwrap()).unwrap();
        assert!(c2.max_abs_diff(&DiscreteChannel::bsc(0.212).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DiscreteChannel::bsc(0.1).unwrap();
        let b = DiscreteChannel::identity(3);
        assert!(matches!(compose(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn file_round_trip() {
        let json = r#"{"input_size":2,"output_size":3,"rows":[[0.5,0.25,0.25],[0,0,1]]}"#;
        let c: DiscreteChannel = serde_json::from_str(json).unwrap();
        assert_eq!(c.prob(0, 1), 0.25);
        let back = serde_json::to_string(&c).unwrap();
        let again: DiscreteChannel = serde_json::from_str(&back).unwrap();
        assert_eq!(c, again);

        let bad = r#"{"input_size":3,"output_size":3,"rows":[[0.5,0.25,0.25],[0,0,1]]}"#;
        assert!(serde_json::from_str::<DiscreteChannel>(bad).is_err());
        let unnormalised = r#"{"input_size":1,"output_size":2,"rows":[[0.5,0.6]]}"#;
        assert!(serde_json::from_str::<DiscreteChannel>(unnormalised).is_err());
    }
}
