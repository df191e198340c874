use serde::{Deserialize, Serialize};

use super::{check_stochastically_degraded, DegradednessVerdict, DiscreteChannel, PROB_TOL};
use crate::{Error, Result};

/// Full kernel `P(y1, y2, z | x)`; each row is flattened with `z` fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointKernel {
    pub y1_size: usize,
    pub y2_size: usize,
    pub z_size: usize,
    pub rows: Vec<Vec<f64>>,
}

impl JointKernel {
    /// Conditionally independent outputs: the product of the three marginals.
    pub fn product(y1: &DiscreteChannel, y2: &DiscreteChannel, z: &DiscreteChannel) -> Self {
        let rows = (0..y1.input_size())
            .map(|x| {
                let mut row = Vec::with_capacity(y1.output_size() * y2.output_size() * z.output_size());
                for &a in y1.row(x) {
                    for &b in y2.row(x) {
                        for &c in z.row(x) {
                            row.push(a * b * c);
                        }
                    }
                }
                row
            })
            .collect();
        JointKernel {
            y1_size: y1.output_size(),
            y2_size: y2.output_size(),
            z_size: z.output_size(),
            rows,
        }
    }

    /// The three conditional marginals.
    pub fn marginals(&self) -> Result<(DiscreteChannel, DiscreteChannel, DiscreteChannel)> {
        let (a, b, c) = (self.y1_size, self.y2_size, self.z_size);
        let mut m1 = Vec::new();
        let mut m2 = Vec::new();
        let mut m3 = Vec::new();
        for (x, row) in self.rows.iter().enumerate() {
            if row.len() != a * b * c {
                return Err(Error::dims(format!(
                    "joint row {x} has {} entries, expected {}",
                    row.len(),
                    a * b * c
                )));
            }
            if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return Err(Error::validation(format!("joint row {x} has a negative entry")));
            }
            let mut r1 = vec![0.0; a];
            let mut r2 = vec![0.0; b];
            let mut r3 = vec![0.0; c];
            for i in 0..a {
                for j in 0..b {
                    for k in 0..c {
                        let p = row[(i * b + j) * c + k];
                        r1[i] += p;
                        r2[j] += p;
                        r3[k] += p;
                    }
                }
            }
            m1.push(r1);
            m2.push(r2);
            m3.push(r3);
        }
        Ok((
            DiscreteChannel::new(m1)?,
            DiscreteChannel::new(m2)?,
            DiscreteChannel::new(m3)?,
        ))
    }
}

/// Broadcast channel with an eavesdropper, described by its conditional
/// marginals `P(y1|x)`, `P(y2|x)`, `P(z|x)` and optionally the full joint.
///
/// Every computation in this crate reads only the marginals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BceFile", into = "BceFile")]
pub struct BceChannel {
    y1: DiscreteChannel,
    y2: DiscreteChannel,
    z: DiscreteChannel,
    joint: Option<JointKernel>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BceFile {
    pub y1: DiscreteChannel,
    pub y2: DiscreteChannel,
    pub z: DiscreteChannel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<JointKernel>,
}

impl BceChannel {
    pub fn new(y1: DiscreteChannel, y2: DiscreteChannel, z: DiscreteChannel) -> Result<Self> {
        let n = y1.input_size();
        if y2.input_size() != n || z.input_size() != n {
            return Err(Error::dims(format!(
                "marginals disagree on the input alphabet: {}, {}, {}",
                n,
                y2.input_size(),
                z.input_size()
            )));
        }
        Ok(BceChannel {
            y1,
            y2,
            z,
            joint: None,
        })
    }

    /// Attaches a full joint kernel after checking it reproduces the marginals.
    pub fn with_joint(mut self, joint: JointKernel) -> Result<Self> {
        if joint.rows.len() != self.input_size()
            || joint.y1_size != self.y1.output_size()
            || joint.y2_size != self.y2.output_size()
            || joint.z_size != self.z.output_size()
        {
            return Err(Error::dims("joint kernel shape does not match the marginals"));
        }
        let (m1, m2, m3) = joint.marginals()?;
        let worst = m1
            .max_abs_diff(&self.y1)?
            .max(m2.max_abs_diff(&self.y2)?)
            .max(m3.max_abs_diff(&self.z)?);
        if worst > PROB_TOL {
            return Err(Error::validation(format!(
                "joint kernel marginals differ from the stored marginals by {worst:e}"
            )));
        }
        self.joint = Some(joint);
        Ok(self)
    }

    /// Builds the marginals from a full joint kernel.
    pub fn from_joint(joint: JointKernel) -> Result<Self> {
        let (a, b, c) = joint.marginals()?;
        BceChannel::new(a, b, c)?.with_joint(joint)
    }

    /// Physically degraded cascade `X -> Y1 -> Y2 -> Z`.
    pub fn cascade(
        main: &DiscreteChannel,
        second: &DiscreteChannel,
        tap: &DiscreteChannel,
    ) -> Result<Self> {
        let y2 = super::compose(main, second)?;
        let z = super::compose(&y2, tap)?;
        BceChannel::new(main.clone(), y2, z)
    }

    pub fn input_size(&self) -> usize {
        self.y1.input_size()
    }

    pub fn y1(&self) -> &DiscreteChannel {
        &self.y1
    }

    pub fn y2(&self) -> &DiscreteChannel {
        &self.y2
    }

    pub fn z(&self) -> &DiscreteChannel {
        &self.z
    }

    pub fn joint(&self) -> Option<&JointKernel> {
        self.joint.as_ref()
    }

    /// Checks `Y1 -> Y2` and `Y2 -> Z` stochastic degradedness.
    pub fn degradedness(&self) -> Result<(DegradednessVerdict, DegradednessVerdict)> {
        Ok((
            check_stochastically_degraded(&self.y1, &self.y2)?,
            check_stochastically_degraded(&self.y2, &self.z)?,
        ))
    }
}

impl TryFrom<BceFile> for BceChannel {
    type Error = Error;

    fn try_from(f: BceFile) -> Result<Self> {
        let c = BceChannel::new(f.y1, f.y2, f.z)?;
        match f.joint {
            Some(j) => c.with_joint(j),
            None => Ok(c),
        }
    }
}

impl From<BceChannel> for BceFile {
    fn from(c: BceChannel) -> Self {
        BceFile {
            y1: c.y1,
            y2: c.y2,
            z: c.z,
            joint: c.joint,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_must_match_marginals() {
        let c = BceChannel::cascade(
            &DiscreteChannel::bsc(0.1).unwrap(),
            &DiscreteChannel::bsc(0.05).unwrap(),
            &DiscreteChannel::bsc(0.1).unwrap(),
        )
        .unwrap();
        let j = JointKernel::product(c.y1(), c.y2(), c.z());
        let c2 = c.clone().with_joint(j).unwrap();
        assert!(c2.joint().is_some());

        let wrong = JointKernel::product(c.y1(), c.y1(), c.z());
        assert!(c.with_joint(wrong).is_err());
    }

    #[test]
    fn file_format() {
        let json = r#"{
            "y1": {"input_size":2,"output_size":2,"rows":[[0.9,0.1],[0.1,0.9]]},
            "y2": {"input_size":2,"output_size":2,"rows":[[0.8,0.2],[0.2,0.8]]},
            "z":  {"input_size":2,"output_size":1,"rows":[[1.0],[1.0]]}
        }"#;
        let c: BceChannel = serde_json::from_str(json).unwrap();
        assert_eq!(c.z().output_size(), 1);
        let s = serde_json::to_string(&c).unwrap();
        assert!(!s.contains("joint"));
        let back: BceChannel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
