use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::plan::BinningPlan;
use crate::channel::{DiscreteChannel, Pmf};
use crate::inner_bound::InnerBoundDecomposition;
use crate::{Error, Result};

/// Largest allowed size of any single index set and of the codebook.
pub const MAX_CODEWORDS: usize = 1 << 16;

/// Work cap for pair selection, in symbol evaluations.
const MAX_SELECTION_WORK: usize = 1 << 28;

/// `round(2^(n rate))`, at least 1.
pub fn structure_size(n: usize, rate: f64) -> Result<usize> {
    let bits = n as f64 * rate;
    if bits > 16.0 + 1e-9 {
        return Err(Error::Budget(format!(
            "index set of 2^{bits:.3} entries exceeds the 2^16 limit"
        )));
    }
    Ok((bits.exp2().round() as usize).max(1))
}

/// Message alphabet sizes. Message tuples are flattened as
/// `((((w0 m10 + w10) m20 + w20) m11 + w11) m22 + w22)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageSpace {
    pub m0: usize,
    pub m10: usize,
    pub m11: usize,
    pub m20: usize,
    pub m22: usize,
}

impl MessageSpace {
    /// Two private messages and no common one.
    pub fn pair(m1: usize, m2: usize) -> Self {
        MessageSpace {
            m0: 1,
            m10: 1,
            m11: m1,
            m20: 1,
            m22: m2,
        }
    }

    pub fn total(&self) -> usize {
        self.m0 * self.m10 * self.m20 * self.m11 * self.m22
    }

    pub fn w1_count(&self) -> usize {
        self.m10 * self.m11
    }

    pub fn w2_count(&self) -> usize {
        self.m20 * self.m22
    }

    /// `(w0, w10, w20, w11, w22)` of a flattened message.
    pub fn split(&self, id: usize) -> (usize, usize, usize, usize, usize) {
        let w22 = id % self.m22;
        let r = id / self.m22;
        let w11 = r % self.m11;
        let r = r / self.m11;
        let w20 = r % self.m20;
        let r = r / self.m20;
        (r / self.m10, r % self.m10, w20, w11, w22)
    }

    pub fn join(&self, w0: usize, w10: usize, w20: usize, w11: usize, w22: usize) -> usize {
        (((w0 * self.m10 + w10) * self.m20 + w20) * self.m11 + w11) * self.m22 + w22
    }

    pub fn w0(&self, id: usize) -> usize {
        self.split(id).0
    }

    pub fn w1(&self, id: usize) -> usize {
        let (_, w10, _, w11, _) = self.split(id);
        w10 * self.m11 + w11
    }

    pub fn w2(&self, id: usize) -> usize {
        let (_, _, w20, _, w22) = self.split(id);
        w20 * self.m22 + w22
    }

    /// What the first receiver decodes: `(w0, w1)`.
    pub fn receiver1(&self, id: usize) -> usize {
        self.w0(id) * self.w1_count() + self.w1(id)
    }

    /// What the second receiver decodes: `(w0, w2)`.
    pub fn receiver2(&self, id: usize) -> usize {
        self.w0(id) * self.w2_count() + self.w2(id)
    }
}

/// Integer sizes of every index set of the code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeStructure {
    pub messages: MessageSpace,
    /// Cloud codewords per cloud message.
    pub cloud_random: usize,
    pub bins1: usize,
    pub subbins1: usize,
    pub within1: usize,
    pub bins2: usize,
    pub subbins2: usize,
    pub within2: usize,
}

fn layer_sizes(n: usize, r: f64, l_bin: f64, l_sub: f64, l3: f64, note: &mut Vec<String>) -> Result<(usize, usize, usize, usize)> {
    let m = structure_size(n, r)?;
    let mut bins = structure_size(n, l_bin.max(0.0))?;
    let mut subs = structure_size(n, l_sub.max(0.0))?;
    let within = structure_size(n, l3.max(0.0))?;
    if m < bins {
        // fewer messages than bins: one message per bin, the surplus bin rate
        // moves into the sub-bin randomisation
        let realized = (m as f64).log2() / n as f64;
        bins = m;
        subs = structure_size(n, (l_bin.max(0.0) + l_sub.max(0.0) - realized).max(0.0))?;
        note.push(format!("{m} messages < bins; merged to {bins} bins of {subs} sub-bins"));
    }
    Ok((m, bins, subs, within))
}

impl CodeStructure {
    /// Sizes `round(2^(n rate))` for every rate of the plan.
    pub fn from_plan(plan: &BinningPlan) -> Result<(Self, Vec<String>)> {
        let n = plan.n;
        let t = &plan.targets;
        let mut notes = Vec::new();
        let (m11, bins1, subbins1, within1) = layer_sizes(n, t.r11, plan.l11, plan.l12, plan.l3, &mut notes)?;
        let (m22, bins2, subbins2, within2) = layer_sizes(n, t.r22, plan.l22, plan.l21, plan.l3, &mut notes)?;
        let s = CodeStructure {
            messages: MessageSpace {
                m0: structure_size(n, t.r0)?,
                m10: structure_size(n, t.r10)?,
                m11,
                m20: structure_size(n, t.r20)?,
                m22,
            },
            cloud_random: structure_size(n, plan.l0.max(0.0))?,
            bins1,
            subbins1,
            within1,
            bins2,
            subbins2,
            within2,
        };
        s.validate()?;
        Ok((s, notes))
    }

    pub fn validate(&self) -> Result<()> {
        let sizes = [
            self.messages.m0,
            self.messages.m10,
            self.messages.m11,
            self.messages.m20,
            self.messages.m22,
            self.cloud_random,
            self.bins1,
            self.subbins1,
            self.within1,
            self.bins2,
            self.subbins2,
            self.within2,
        ];
        if sizes.contains(&0) {
            return Err(Error::validation("every index set needs at least one entry"));
        }
        if sizes.iter().any(|&s| s > MAX_CODEWORDS) {
            return Err(Error::Budget("an index set exceeds 2^16 entries".into()));
        }
        if self.messages.total() > MAX_CODEWORDS {
            return Err(Error::Budget(format!(
                "{} message tuples exceed the 2^16 limit",
                self.messages.total()
            )));
        }
        Ok(())
    }

    pub fn cloud_codewords(&self) -> usize {
        self.messages.m0 * self.messages.m10 * self.messages.m20 * self.cloud_random
    }

    pub fn layer1_codewords(&self) -> usize {
        self.bins1 * self.subbins1 * self.within1
    }

    pub fn layer2_codewords(&self) -> usize {
        self.bins2 * self.subbins2 * self.within2
    }

    /// Messages per bin of the first satellite layer.
    pub fn bin_occupancy1(&self) -> Vec<usize> {
        occupancy(self.messages.m11, self.bins1)
    }

    pub fn bin_occupancy2(&self) -> Vec<usize> {
        occupancy(self.messages.m22, self.bins2)
    }
}

fn occupancy(messages: usize, bins: usize) -> Vec<usize> {
    (0..bins).map(|b| (messages + bins - 1 - b) / bins).collect()
}

/// Codeword indices `(bin * subbins + sub) * within + i` usable for each
/// message under the even mapping.
///
/// Messages go to bins round-robin. When a bin holds no more messages than it
/// has sub-bins, its sub-bins are dealt into one cell per message and any
/// codeword in the cell may be sent. Otherwise sub-bins are dealt to the
/// messages and messages sharing a sub-bin split its codewords.
pub fn even_mapping(messages: usize, bins: usize, subbins: usize, within: usize) -> Result<Vec<Vec<usize>>> {
    if bins > messages {
        return Err(Error::Construction(format!(
            "{bins} bins for {messages} messages leaves empty bins"
        )));
    }
    let mut out = Vec::with_capacity(messages);
    for w in 0..messages {
        let bin = w % bins;
        let rank = w / bins;
        let q = (messages + bins - 1 - bin) / bins;
        let mut allowed = Vec::new();
        if q <= subbins {
            for sub in (0..subbins).filter(|s| s % q == rank) {
                for i in 0..within {
                    allowed.push((bin * subbins + sub) * within + i);
                }
            }
        } else {
            let sub = rank % subbins;
            let sharing = (q + subbins - 1 - sub) / subbins;
            let slot = rank / subbins;
            for i in (0..within).filter(|i| i % sharing == slot) {
                allowed.push((bin * subbins + sub) * within + i);
            }
        }
        if allowed.is_empty() {
            return Err(Error::Construction(format!(
                "message {w} has no codeword: {sharing} messages share a sub-bin of {within}",
                sharing = q.div_ceil(subbins)
            )));
        }
        out.push(allowed);
    }
    Ok(out)
}

/// How the encoder pairs the two satellite codewords.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelection {
    /// `V1` and `V2` are conditionally independent given `U`: any allowed
    /// pair, uniformly.
    Unconstrained,
    /// Allowed pairs of largest joint probability under `P(v1,v2|u)`, ties
    /// uniformly.
    MaxJointProbability,
}

/// Explicit stochastic code over super-symbols `s = (u, v1, v2)`, flattened
/// as `(u |V1| + v1) |V2| + v2`. The channel input is drawn per symbol from
/// `input_kernel`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WiretapCodebook {
    pub n: usize,
    pub seed: Option<u64>,
    pub structure: Option<CodeStructure>,
    pub messages: MessageSpace,
    pub pair_selection: Option<PairSelection>,
    pub input_kernel: DiscreteChannel,
    pub codewords: Vec<Vec<u16>>,
    /// Per message, the codewords it may send and their probabilities.
    pub encoder: Vec<Vec<(usize, f64)>>,
}

impl WiretapCodebook {
    /// A code given directly by its codewords and encoder table.
    pub fn from_table(
        n: usize,
        messages: MessageSpace,
        input_kernel: DiscreteChannel,
        codewords: Vec<Vec<u16>>,
        encoder: Vec<Vec<(usize, f64)>>,
    ) -> Result<Self> {
        let code = WiretapCodebook {
            n,
            seed: None,
            structure: None,
            messages,
            pair_selection: None,
            input_kernel,
            codewords,
            encoder,
        };
        code.validate()?;
        Ok(code)
    }

    /// Deterministic single-codeword code over the input alphabet: message
    /// `w` of `(w1, w2)` sends `codewords[w]`.
    pub fn deterministic(n: usize, messages: MessageSpace, x_size: usize, codewords: Vec<Vec<u16>>) -> Result<Self> {
        let encoder = (0..codewords.len()).map(|c| vec![(c, 1.0)]).collect();
        Self::from_table(n, messages, DiscreteChannel::identity(x_size), codewords, encoder)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("block length must be at least 1"));
        }
        if self.encoder.len() != self.messages.total() {
            return Err(Error::dims(format!(
                "encoder has {} rows for {} messages",
                self.encoder.len(),
                self.messages.total()
            )));
        }
        if self.codewords.len() > MAX_CODEWORDS {
            return Err(Error::Budget(format!("{} codewords exceed 2^16", self.codewords.len())));
        }
        let alphabet = self.input_kernel.input_size();
        for c in &self.codewords {
            if c.len() != self.n {
                return Err(Error::dims(format!("codeword of length {} in a length-{} code", c.len(), self.n)));
            }
            if c.iter().any(|&s| s as usize >= alphabet) {
                return Err(Error::validation("codeword symbol outside the input map's alphabet"));
            }
        }
        for (w, row) in self.encoder.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Construction(format!("message {w} has no codeword")));
            }
            if row.iter().any(|&(c, p)| c >= self.codewords.len() || !(p >= 0.0)) {
                return Err(Error::validation(format!("bad encoder entry for message {w}")));
            }
            let total: f64 = row.iter().map(|e| e.1).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::validation(format!("encoder row {w} sums to {total}")));
            }
        }
        Ok(())
    }

    pub fn x_size(&self) -> usize {
        self.input_kernel.output_size()
    }

    /// Realised `(R0, R1, R2)` in bits per use.
    pub fn rates(&self) -> (f64, f64, f64) {
        let n = self.n as f64;
        let m = &self.messages;
        (
            (m.m0 as f64).log2() / n,
            (m.w1_count() as f64).log2() / n,
            (m.w2_count() as f64).log2() / n,
        )
    }

    /// Effective kernel from super-symbols to the outputs of `channel`.
    pub fn effective_kernel(&self, channel: &DiscreteChannel) -> Result<DiscreteChannel> {
        crate::channel::compose(&self.input_kernel, channel)
    }
}

fn draw(rng: &mut ChaCha8Rng, samplers: &[WeightedIndex<f64>], given: &[usize]) -> Vec<usize> {
    given.iter().map(|&g| samplers[g].sample(rng)).collect()
}

fn row_samplers(kernel: &DiscreteChannel) -> Vec<WeightedIndex<f64>> {
    kernel
        .rows()
        .map(|r| WeightedIndex::new(r.iter().copied()).expect("kernel rows are distributions"))
        .collect()
}

fn split_marginals(dec: &InnerBoundDecomposition) -> (DiscreteChannel, DiscreteChannel, bool) {
    let (u, a, b) = (dec.u_size(), dec.v1_size, dec.v2_size);
    let mut m1 = vec![0.0; u * a];
    let mut m2 = vec![0.0; u * b];
    for uu in 0..u {
        let row = dec.p_v1v2_given_u.row(uu);
        for i in 0..a {
            for j in 0..b {
                m1[uu * a + i] += row[i * b + j];
                m2[uu * b + j] += row[i * b + j];
            }
        }
    }
    let mut independent = true;
    for uu in 0..u {
        let row = dec.p_v1v2_given_u.row(uu);
        for i in 0..a {
            for j in 0..b {
                if (row[i * b + j] - m1[uu * a + i] * m2[uu * b + j]).abs() > 1e-12 {
                    independent = false;
                }
            }
        }
    }
    (
        DiscreteChannel::from_flat_unchecked(u, a, m1),
        DiscreteChannel::from_flat_unchecked(u, b, m2),
        independent,
    )
}

/// Draws a code from the plan's distributions with sizes from
/// [`CodeStructure::from_plan`].
pub fn generate_codebook(plan: &BinningPlan, seed: u64) -> Result<WiretapCodebook> {
    let (structure, _) = CodeStructure::from_plan(plan)?;
    generate_with_structure(&structure, &plan.decomposition, plan.n, seed)
}

/// Draws a code with explicit index-set sizes.
///
/// Cloud codewords are i.i.d. `P(u)`; for each cloud codeword the two
/// satellite sets are i.i.d. `P(v1|u)` and `P(v2|u)` symbol by symbol. Index
/// order stands in for random assignment to bins, which is equivalent for
/// i.i.d. codewords.
pub fn generate_with_structure(
    structure: &CodeStructure,
    dec: &InnerBoundDecomposition,
    n: usize,
    seed: u64,
) -> Result<WiretapCodebook> {
    if n == 0 {
        return Err(Error::validation("block length must be at least 1"));
    }
    structure.validate()?;
    let msgs = structure.messages;
    let allowed1 = even_mapping(msgs.m11, structure.bins1, structure.subbins1, structure.within1)?;
    let allowed2 = even_mapping(msgs.m22, structure.bins2, structure.subbins2, structure.within2)?;
    let (p_v1, p_v2, independent) = split_marginals(dec);
    let selection = if independent {
        PairSelection::Unconstrained
    } else {
        PairSelection::MaxJointProbability
    };

    let clouds = structure.cloud_codewords();
    let n1 = structure.layer1_codewords();
    let n2 = structure.layer2_codewords();
    let pairs_per_message = allowed1.iter().map(Vec::len).max().unwrap_or(0) * allowed2.iter().map(Vec::len).max().unwrap_or(0);
    let bound = clouds
        .saturating_mul(n1)
        .saturating_mul(n2)
        .min(msgs.total().saturating_mul(structure.cloud_random).saturating_mul(pairs_per_message));
    if selection == PairSelection::Unconstrained && bound > MAX_CODEWORDS {
        return Err(Error::Budget(format!("code would have up to {bound} codewords, limit is 2^16")));
    }
    let work = msgs
        .total()
        .saturating_mul(structure.cloud_random)
        .saturating_mul(pairs_per_message)
        .saturating_mul(n);
    if work > MAX_SELECTION_WORK {
        return Err(Error::Budget(format!("pair selection needs {work} symbol evaluations")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u_sampler = WeightedIndex::new(dec.p_u.probs().iter().copied()).expect("P(u) is a distribution");
    let s1 = row_samplers(&p_v1);
    let s2 = row_samplers(&p_v2);
    let mut cloud_u = Vec::with_capacity(clouds);
    let mut sat1 = Vec::with_capacity(clouds);
    let mut sat2 = Vec::with_capacity(clouds);
    for _ in 0..clouds {
        let u: Vec<usize> = (0..n).map(|_| u_sampler.sample(&mut rng)).collect();
        let a: Vec<Vec<usize>> = (0..n1).map(|_| draw(&mut rng, &s1, &u)).collect();
        let b: Vec<Vec<usize>> = (0..n2).map(|_| draw(&mut rng, &s2, &u)).collect();
        cloud_u.push(u);
        sat1.push(a);
        sat2.push(b);
    }

    let (a_size, b_size) = (dec.v1_size, dec.v2_size);
    let log_joint: Vec<f64> = dec.p_v1v2_given_u.as_flat().iter().map(|p| p.ln()).collect();
    let pairs = a_size * b_size;
    let mut index: HashMap<Vec<u16>, usize> = HashMap::new();
    let mut codewords: Vec<Vec<u16>> = Vec::new();
    let mut encoder = Vec::with_capacity(msgs.total());
    for id in 0..msgs.total() {
        let (w0, w10, w20, w11, w22) = msgs.split(id);
        let cloud_msg = (w0 * msgs.m10 + w10) * msgs.m20 + w20;
        let mut row: Vec<(usize, f64)> = Vec::new();
        for r in 0..structure.cloud_random {
            let k = cloud_msg * structure.cloud_random + r;
            let u = &cloud_u[k];
            let mut chosen: Vec<(usize, usize)> = Vec::new();
            let mut best = f64::NEG_INFINITY;
            for &j1 in &allowed1[w11] {
                for &j2 in &allowed2[w22] {
                    if selection == PairSelection::MaxJointProbability {
                        let score: f64 = (0..n)
                            .map(|i| log_joint[u[i] * pairs + sat1[k][j1][i] * b_size + sat2[k][j2][i]])
                            .sum();
                        if score > best {
                            best = score;
                            chosen.clear();
                        }
                        if score < best {
                            continue;
                        }
                    }
                    chosen.push((j1, j2));
                }
            }
            let weight = 1.0 / (structure.cloud_random as f64 * chosen.len() as f64);
            for (j1, j2) in chosen {
                let word: Vec<u16> = (0..n)
                    .map(|i| ((u[i] * a_size + sat1[k][j1][i]) * b_size + sat2[k][j2][i]) as u16)
                    .collect();
                let next = codewords.len();
                let c = *index.entry(word.clone()).or_insert(next);
                if c == next {
                    if codewords.len() >= MAX_CODEWORDS {
                        return Err(Error::Budget("code exceeds 2^16 distinct codewords".into()));
                    }
                    codewords.push(word);
                }
                match row.iter_mut().find(|e| e.0 == c) {
                    Some(e) => e.1 += weight,
                    None => row.push((c, weight)),
                }
            }
        }
        encoder.push(row);
    }

    // super-symbol -> X
    let mut input = Vec::with_capacity(dec.u_size() * pairs * dec.x_size());
    for _u in 0..dec.u_size() {
        for v in 0..pairs {
            input.extend_from_slice(dec.p_x_given_v1v2.row(v));
        }
    }
    Ok(WiretapCodebook {
        n,
        seed: Some(seed),
        structure: Some(*structure),
        messages: msgs,
        pair_selection: Some(selection),
        input_kernel: DiscreteChannel::from_flat_unchecked(dec.u_size() * pairs, dec.x_size(), input),
        codewords,
        encoder,
    })
}

/// Uniform prior over all message tuples.
pub fn uniform_prior(messages: &MessageSpace) -> Pmf {
    Pmf::uniform(messages.total()).expect("message space is non-empty")
}


#[cfg(test)]
mod generation_tests {
    use super::*;
    use crate::channel::BceChannel;
    use crate::coding::{plan_binning, CodingDistribution, RateTargets};
    use crate::degraded::AuxiliaryDecomposition;

    fn plan(n: usize, r1: f64) -> BinningPlan {
        let bce = BceChannel::cascade(
            &DiscreteChannel::bsc(0.1).unwrap(),
            &DiscreteChannel::bsc(0.05).unwrap(),
            &DiscreteChannel::bsc(0.1).unwrap(),
        )
        .unwrap();
        let dist = CodingDistribution::Degraded(AuxiliaryDecomposition::constant(&Pmf::uniform(2).unwrap()));
        plan_binning(&bce, &dist, n, RateTargets::degraded(r1, 0.0)).unwrap()
    }

    #[test]
    fn seeded_codes_repeat() {
        let p = plan(6, 0.2);
        assert_eq!(generate_codebook(&p, 7).unwrap(), generate_codebook(&p, 7).unwrap());
        assert_ne!(generate_codebook(&p, 7).unwrap().codewords, generate_codebook(&p, 8).unwrap().codewords);
    }

    #[test]
    fn single_message_single_codeword() {
        let mut p = plan(4, 0.0);
        p.l11 = 0.0;
        p.l12 = 0.0;
        let code = generate_codebook(&p, 1).unwrap();
        assert_eq!(code.codewords.len(), 1);
        assert_eq!(code.encoder, vec![vec![(0, 1.0)]]);
    }

    #[test]
    fn occupancy_of_two_bins() {
        let mut s = CodeStructure::from_plan(&plan(6, 1.0 / 3.0)).unwrap().0;
        s.bins1 = 2;
        s.subbins1 = 2;
        s.within1 = 1;
        assert_eq!(s.messages.m11, 4);
        assert_eq!(s.bin_occupancy1(), vec![2, 2]);
        let p = plan(6, 1.0 / 3.0);
        let code = generate_with_structure(&s, &p.decomposition, 6, 0).unwrap();
        assert_eq!(code.encoder.len(), 4);
        assert!(code.encoder.iter().all(|r| (r.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn encoder_rows_are_distributions() {
        let code = generate_codebook(&plan(8, 0.2), 3).unwrap();
        assert_eq!(code.pair_selection, Some(PairSelection::Unconstrained));
        code.validate().unwrap();
    }
}
