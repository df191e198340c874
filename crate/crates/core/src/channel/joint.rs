use serde::{Deserialize, Serialize};

use super::{plogp, DiscreteChannel, Pmf, PROB_TOL};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

/// Dense probability tensor over named finite variables, row-major with the
/// last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new<S: Into<String>>(axes: Vec<(S, usize)>, probs: Vec<f64>) -> Result<Self> {
        let axes: Vec<Axis> = axes
            .into_iter()
            .map(|(name, size)| Axis {
                name: name.into(),
                size,
            })
            .collect();
        if axes.is_empty() {
            return Err(Error::validation("joint distribution needs at least one axis"));
        }
        if axes.iter().any(|a| a.size == 0) {
            return Err(Error::validation("axis sizes must be positive"));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::validation(format!("duplicate axis name {:?}", a.name)));
            }
        }
        let len: usize = axes.iter().map(|a| a.size).product();
        if probs.len() != len {
            return Err(Error::dims(format!(
                "tensor has {} entries, axes require {len}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::validation("joint entries must be non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::validation(format!("joint mass is {total:.17}, not 1")));
        }
        Ok(JointDistribution { axes, probs })
    }

    pub(crate) fn from_unchecked(axes: Vec<Axis>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), axes.iter().map(|a| a.size).product::<usize>());
        JointDistribution { axes, probs }
    }

    /// `P(x, y) = P(x) P(y|x)` with axes `(x_name, y_name)`.
    pub fn from_input_and_channel(
        x_name: &str,
        px: &Pmf,
        y_name: &str,
        channel: &DiscreteChannel,
    ) -> Result<Self> {
        if px.len() != channel.input_size() {
            return Err(Error::dims("input pmf does not match channel input alphabet"));
        }
        let mut probs = Vec::with_capacity(px.len() * channel.output_size());
        for (x, &p) in px.probs().iter().enumerate() {
            probs.extend(channel.row(x).iter().map(|&k| p * k));
        }
        Ok(JointDistribution::from_unchecked(
            vec![
                Axis {
                    name: x_name.into(),
                    size: px.len(),
                },
                Axis {
                    name: y_name.into(),
                    size: channel.output_size(),
                },
            ],
            probs,
        ))
    }

    /// Extends the joint by a new variable that depends on one existing axis:
    /// `P(..., a, ..., y) = P(..., a, ...) P(y | a)`.
    pub fn extend(&self, parent: usize, name: &str, channel: &DiscreteChannel) -> Result<Self> {
        let parent_axis = self
            .axes
            .get(parent)
            .ok_or_else(|| Error::Usage(format!("no axis {parent}")))?;
        if parent_axis.size != channel.input_size() {
            return Err(Error::dims(format!(
                "axis {:?} has {} symbols, channel expects {}",
                parent_axis.name,
                parent_axis.size,
                channel.input_size()
            )));
        }
        if self.axes.iter().any(|a| a.name == name) {
            return Err(Error::validation(format!("duplicate axis name {name:?}")));
        }
        let stride = self.strides()[parent];
        let psize = parent_axis.size;
        let k = channel.output_size();
        let mut probs = Vec::with_capacity(self.probs.len() * k);
        for (i, &p) in self.probs.iter().enumerate() {
            let a = (i / stride) % psize;
            probs.extend(channel.row(a).iter().map(|&c| p * c));
        }
        let mut axes = self.axes.clone();
        axes.push(Axis {
            name: name.into(),
            size: k,
        });
        Ok(JointDistribution::from_unchecked(axes, probs))
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn axis(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    /// Axis indices for a list of names.
    pub fn axes_named(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.axis(n)
                    .ok_or_else(|| Error::Usage(format!("unknown axis {n:?}")))
            })
            .collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1].size;
        }
        strides
    }

    /// Marginal over `keep`, with axes in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDistribution> {
        for (i, &a) in keep.iter().enumerate() {
            if a >= self.axes.len() {
                return Err(Error::Usage(format!("no axis {a}")));
            }
            if keep[..i].contains(&a) {
                return Err(Error::Usage(format!("axis {a} listed twice")));
            }
        }
        let strides = self.strides();
        let out_axes: Vec<Axis> = keep.iter().map(|&a| self.axes[a].clone()).collect();
        let mut out_strides = vec![1usize; keep.len()];
        for i in (0..keep.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * out_axes[i + 1].size;
        }
        let len: usize = out_axes.iter().map(|a| a.size).product();
        let mut out = vec![0.0; len];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut j = 0;
            for (k, &a) in keep.iter().enumerate() {
                j += ((i / strides[a]) % self.axes[a].size) * out_strides[k];
            }
            out[j] += p;
        }
        Ok(JointDistribution::from_unchecked(out_axes, out))
    }

    /// Joint entropy of the listed axes; an empty list gives 0.
    pub fn entropy(&self, axes: &[usize]) -> Result<f64> {
        if axes.is_empty() {
            return Ok(0.0);
        }
        let m = self.marginal(axes)?;
        Ok(m.probs.iter().map(|&p| plogp(p)).sum::<f64>().max(0.0))
    }

    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        mutual_information(self, a, b)
    }

    pub fn conditional_mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64> {
        conditional_mutual_information(self, a, b, c)
    }
}

fn disjoint(sets: &[&[usize]]) -> Result<()> {
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::Usage("axis sets must be non-empty".into()));
        }
        for t in &sets[i + 1..] {
            if s.iter().any(|x| t.contains(x)) {
                return Err(Error::Usage(format!("axis sets {s:?} and {t:?} overlap")));
            }
        }
    }
    Ok(())
}

/// `I(A;B)` in bits, computed as the divergence between `P(a,b)` and
/// `P(a)P(b)` over the support of `P(a,b)`.
pub fn mutual_information(joint: &JointDistribution, a: &[usize], b: &[usize]) -> Result<f64> {
    disjoint(&[a, b])?;
    let keep: Vec<usize> = a.iter().chain(b).copied().collect();
    let m = joint.marginal(&keep)?;
    let na: usize = a.iter().map(|&i| joint.axes[i].size).product();
    let nb = m.probs.len() / na;
    let mut pa = vec![0.0; na];
    let mut pb = vec![0.0; nb];
    for i in 0..na {
        for j in 0..nb {
            let p = m.probs[i * nb + j];
            pa[i] += p;
            pb[j] += p;
        }
    }
    let mut acc = 0.0;
    for i in 0..na {
        for j in 0..nb {
            let p = m.probs[i * nb + j];
            if p > 0.0 {
                acc += p * (p / (pa[i] * pb[j])).log2();
            }
        }
    }
    Ok(acc.max(0.0))
}

/// `I(A;B|C)` in bits, as `sum p(a,b,c) log [p(a,b,c) p(c) / (p(a,c) p(b,c))]`.
pub fn conditional_mutual_information(
    joint: &JointDistribution,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    disjoint(&[a, b, c])?;
    let keep: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let m = joint.marginal(&keep)?;
    let size = |s: &[usize]| s.iter().map(|&i| joint.axes[i].size).product::<usize>();
    let (na, nb, nc) = (size(a), size(b), size(c));
    let mut pac = vec![0.0; na * nc];
    let mut pbc = vec![0.0; nb * nc];
    let mut pc = vec![0.0; nc];
    for i in 0..na {
        for j in 0..nb {
            for k in 0..nc {
                let p = m.probs[(i * nb + j) * nc + k];
                pac[i * nc + k] += p;
                pbc[j * nc + k] += p;
                pc[k] += p;
            }
        }
    }
    let mut acc = 0.0;
    for i in 0..na {
        for j in 0..nb {
            for k in 0..nc {
                let p = m.probs[(i * nb + j) * nc + k];
                if p > 0.0 {
                    acc += p * ((p * pc[k]) / (pac[i * nc + k] * pbc[j * nc + k])).log2();
                }
            }
        }
    }
    Ok(acc.max(0.0))
}
