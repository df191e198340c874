use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::WiretapCodebook;
use crate::channel::{DiscreteChannel, Pmf};
use crate::{Error, Result};

/// Largest `n log2 |out|` that is enumerated.
pub const MAX_OUTPUT_BITS: f64 = 24.0;

/// Cap on `|out|^n (codewords + encoder entries + messages)`.
pub const MAX_ENUMERATION_WORK: f64 = (1u64 << 31) as f64;

/// Target number of independent output-prefix chunks.
const CHUNK_TARGET: usize = 256;

/// Kahan–Babuska (Neumaier) sum.
#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Size of the output enumeration for `code` over `channel`, or a budget
/// error.
pub fn enumeration_size(code: &WiretapCodebook, channel: &DiscreteChannel) -> Result<u64> {
    let out = channel.output_size();
    let bits = code.n as f64 * (out as f64).log2();
    if bits > MAX_OUTPUT_BITS + 1e-9 {
        return Err(Error::Budget(format!(
            "enumerating {out}^{} outputs ({bits:.1} bits) exceeds the 2^24 limit",
            code.n
        )));
    }
    let outputs = (out as f64).powi(code.n as i32);
    let entries: usize = code.encoder.iter().map(Vec::len).sum();
    let work = outputs * (code.codewords.len() + entries + code.messages.total()) as f64;
    if work > MAX_ENUMERATION_WORK {
        return Err(Error::Budget(format!(
            "exact enumeration needs about {work:.3e} operations, limit is {MAX_ENUMERATION_WORK:.3e}"
        )));
    }
    Ok(outputs as u64)
}

fn check_inputs(code: &WiretapCodebook, channel: &DiscreteChannel, prior: &Pmf) -> Result<DiscreteChannel> {
    code.validate()?;
    if prior.len() != code.messages.total() {
        return Err(Error::dims(format!(
            "prior over {} messages for a code with {}",
            prior.len(),
            code.messages.total()
        )));
    }
    if channel.input_size() != code.x_size() {
        return Err(Error::dims(format!(
            "channel takes {} inputs, code produces {}",
            channel.input_size(),
            code.x_size()
        )));
    }
    enumeration_size(code, channel)?;
    code.effective_kernel(channel)
}

/// Calls `visit(chunk, q)` for every output sequence with `q[c] = P(y^n | c)`
/// for each codeword. Sequences are split by a fixed-length prefix into
/// chunks that run in parallel; each chunk folds into its own accumulator and
/// the accumulators come back in chunk order.
fn enumerate<A, F>(code: &WiretapCodebook, kernel: &DiscreteChannel, init: impl Fn() -> A + Sync, visit: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut A, &[f64]) + Sync,
{
    let n = code.n;
    let out = kernel.output_size();
    let mut depth = 0;
    let mut chunks = 1usize;
    while depth < n && chunks < CHUNK_TARGET {
        depth += 1;
        chunks *= out;
    }
    let words = &code.codewords;
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = init();
            let mut levels = vec![vec![1.0; words.len()]; n - depth + 1];
            let mut rest = chunk;
            let mut prefix = vec![0usize; depth];
            for p in prefix.iter_mut().rev() {
                *p = rest % out;
                rest /= out;
            }
            for (c, w) in words.iter().enumerate() {
                levels[0][c] = prefix
                    .iter()
                    .enumerate()
                    .map(|(i, &y)| kernel.prob(w[i] as usize, y))
                    .product();
            }
            descend(words, kernel, depth, 0, &mut levels, &mut acc, &visit);
            acc
        })
        .collect()
}

fn descend<A, F>(
    words: &[Vec<u16>],
    kernel: &DiscreteChannel,
    pos: usize,
    level: usize,
    levels: &mut [Vec<f64>],
    acc: &mut A,
    visit: &F,
) where
    F: Fn(&mut A, &[f64]),
{
    if level + 1 == levels.len() {
        visit(acc, &levels[level]);
        return;
    }
    if levels[level].iter().all(|&q| q == 0.0) {
        return;
    }
    for y in 0..kernel.output_size() {
        let (head, tail) = levels.split_at_mut(level + 1);
        let (cur, next) = (&head[level], &mut tail[0]);
        for (c, w) in words.iter().enumerate() {
            next[c] = cur[c] * kernel.prob(w[pos] as usize, y);
        }
        descend(words, kernel, pos + 1, level + 1, levels, acc, visit);
    }
}

/// Equivocation of the message parts at the eavesdropper, computed by summing
/// over every output sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivocationReport {
    pub n: usize,
    /// `H(W1 | Z^n) / n`.
    pub r_e1: f64,
    /// `H(W2 | Z^n) / n`.
    pub r_e2: f64,
    /// `H(W1, W2 | Z^n) / n`.
    pub r_e12: f64,
    /// `H(W0, W1, W2 | Z^n) / n`, including the common message.
    pub r_e_all: f64,
    /// `H(W2 | W1, Z^n) / n`, computed from its own posterior.
    pub r_e2_given_1: f64,
    /// `H(W1) / n`, `H(W2) / n`, `H(W1, W2) / n` and `H(W0, W1, W2) / n`.
    pub h_w1: f64,
    pub h_w2: f64,
    pub h_w12: f64,
    pub h_all: f64,
    /// Largest `|sum_w P(w | z^n) - 1|` over outputs with `P(z^n) > 0`.
    pub max_posterior_error: f64,
    pub outputs: u64,
}

impl EquivocationReport {
    /// `|H(W1,W2|Z) - H(W1|Z) - H(W2|W1,Z)|` per symbol.
    pub fn chain_defect(&self) -> f64 {
        (self.r_e12 - self.r_e1 - self.r_e2_given_1).abs()
    }
}

#[derive(Default)]
struct EquivocationAcc {
    all: Neumaier,
    pair: Neumaier,
    w1: Neumaier,
    w2: Neumaier,
    w2_given_1: Neumaier,
    max_posterior_error: f64,
}

/// Exact per-symbol equivocation rates of `code` when the eavesdropper sees
/// the output of `z`, under `prior` over flattened message tuples.
pub fn exact_equivocation(code: &WiretapCodebook, z: &DiscreteChannel, prior: &Pmf) -> Result<EquivocationReport> {
    let kernel = check_inputs(code, z, prior)?;
    let outputs = enumeration_size(code, z)?;
    let ms = code.messages;
    let prior = prior.probs();
    let (c1, c2) = (ms.w1_count(), ms.w2_count());
    let w1_of: Vec<usize> = (0..ms.total()).map(|w| ms.w1(w)).collect();
    let w2_of: Vec<usize> = (0..ms.total()).map(|w| ms.w2(w)).collect();
    let mut codeword_mass = vec![0.0; code.codewords.len()];
    for (w, row) in code.encoder.iter().enumerate() {
        for &(c, p) in row {
            codeword_mass[c] += prior[w] * p;
        }
    }

    let parts = enumerate(code, &kernel, EquivocationAcc::default, |acc, q| {
        let pz: f64 = codeword_mass.iter().zip(q).map(|(m, q)| m * q).sum();
        if pz <= 0.0 {
            return;
        }
        let mut joint = vec![0.0; ms.total()];
        let mut p12 = vec![0.0; c1 * c2];
        let mut p1 = vec![0.0; c1];
        let mut p2 = vec![0.0; c2];
        for (w, row) in code.encoder.iter().enumerate() {
            if prior[w] == 0.0 {
                continue;
            }
            let v = prior[w] * row.iter().map(|&(c, p)| p * q[c]).sum::<f64>();
            joint[w] = v;
            p12[w1_of[w] * c2 + w2_of[w]] += v;
            p1[w1_of[w]] += v;
            p2[w2_of[w]] += v;
        }
        let total: f64 = joint.iter().sum();
        acc.max_posterior_error = acc.max_posterior_error.max((total / pz - 1.0).abs());
        let zlog = xlog2x(total);
        acc.all.add(zlog - joint.iter().map(|&p| xlog2x(p)).sum::<f64>());
        acc.pair.add(zlog - p12.iter().map(|&p| xlog2x(p)).sum::<f64>());
        acc.w1.add(zlog - p1.iter().map(|&p| xlog2x(p)).sum::<f64>());
        acc.w2.add(zlog - p2.iter().map(|&p| xlog2x(p)).sum::<f64>());
        let mut cond = 0.0;
        for (a, &pa) in p1.iter().enumerate() {
            for &pab in &p12[a * c2..(a + 1) * c2] {
                if pab > 0.0 {
                    cond += pab * (pa / pab).log2();
                }
            }
        }
        acc.w2_given_1.add(cond);
    });

    let mut total = EquivocationAcc::default();
    for p in &parts {
        total.all.merge(&p.all);
        total.pair.merge(&p.pair);
        total.w1.merge(&p.w1);
        total.w2.merge(&p.w2);
        total.w2_given_1.merge(&p.w2_given_1);
        total.max_posterior_error = total.max_posterior_error.max(p.max_posterior_error);
    }

    let mut m12 = vec![0.0; c1 * c2];
    let mut m1 = vec![0.0; c1];
    let mut m2 = vec![0.0; c2];
    for w in 0..ms.total() {
        m12[w1_of[w] * c2 + w2_of[w]] += prior[w];
        m1[w1_of[w]] += prior[w];
        m2[w2_of[w]] += prior[w];
    }
    let h = |v: &[f64]| -v.iter().map(|&p| xlog2x(p)).sum::<f64>();
    let n = code.n as f64;
    Ok(EquivocationReport {
        n: code.n,
        r_e1: total.w1.value() / n,
        r_e2: total.w2.value() / n,
        r_e12: total.pair.value() / n,
        r_e_all: total.all.value() / n,
        r_e2_given_1: total.w2_given_1.value() / n,
        h_w1: h(&m1) / n,
        h_w2: h(&m2) / n,
        h_w12: h(&m12) / n,
        h_all: h(prior) / n,
        max_posterior_error: total.max_posterior_error,
        outputs,
    })
}

/// Exact error probabilities under MAP decoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Probability that the first receiver misdecodes `(W0, W1)`.
    pub pe1: f64,
    /// Probability that the second receiver misdecodes `(W0, W2)`.
    pub pe2: f64,
    /// Probability that either receiver errs, with the two receivers'
    /// outputs conditionally independent given the transmitted codeword.
    pub pe: f64,
    pub outputs: u64,
}

/// Per-encoder-entry probability that a MAP decoder of `target(w)` errs.
fn entry_errors(
    code: &WiretapCodebook,
    channel: &DiscreteChannel,
    prior: &[f64],
    target: &[usize],
    targets: usize,
) -> Result<Vec<Vec<f64>>> {
    let kernel = code.effective_kernel(channel)?;
    let parts = enumerate(
        code,
        &kernel,
        || code.encoder.iter().map(|r| vec![Neumaier::default(); r.len()]).collect::<Vec<_>>(),
        |acc, q| {
            let mut score = vec![0.0; targets];
            for (w, row) in code.encoder.iter().enumerate() {
                if prior[w] == 0.0 {
                    continue;
                }
                score[target[w]] += prior[w] * row.iter().map(|&(c, p)| p * q[c]).sum::<f64>();
            }
            let mut best = 0;
            for (t, &s) in score.iter().enumerate() {
                if s > score[best] {
                    best = t;
                }
            }
            for (w, row) in code.encoder.iter().enumerate() {
                if target[w] != best {
                    for (k, &(c, _)) in row.iter().enumerate() {
                        if q[c] > 0.0 {
                            acc[w][k].add(q[c]);
                        }
                    }
                }
            }
        },
    );
    let mut total: Vec<Vec<Neumaier>> = code.encoder.iter().map(|r| vec![Neumaier::default(); r.len()]).collect();
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            for (a, b) in t.iter_mut().zip(p) {
                a.merge(b);
            }
        }
    }
    Ok(total
        .iter()
        .map(|r| r.iter().map(|e| e.value().clamp(0.0, 1.0)).collect())
        .collect())
}

/// Exact average error probability of `code` with MAP decoders at both
/// legitimate receivers. Ties go to the lowest message index.
pub fn exact_error_probability(
    code: &WiretapCodebook,
    y1: &DiscreteChannel,
    y2: &DiscreteChannel,
    prior: &Pmf,
) -> Result<ErrorReport> {
    check_inputs(code, y1, prior)?;
    check_inputs(code, y2, prior)?;
    let outputs = enumeration_size(code, y1)?.max(enumeration_size(code, y2)?);
    let ms = code.messages;
    let t1: Vec<usize> = (0..ms.total()).map(|w| ms.receiver1(w)).collect();
    let t2: Vec<usize> = (0..ms.total()).map(|w| ms.receiver2(w)).collect();
    let p = prior.probs();
    let e1 = entry_errors(code, y1, p, &t1, ms.m0 * ms.w1_count())?;
    let e2 = entry_errors(code, y2, p, &t2, ms.m0 * ms.w2_count())?;
    let (mut pe1, mut pe2, mut pe) = (Neumaier::default(), Neumaier::default(), Neumaier::default());
    for (w, row) in code.encoder.iter().enumerate() {
        for (k, &(_, weight)) in row.iter().enumerate() {
            let mass = p[w] * weight;
            let (a, b) = (e1[w][k], e2[w][k]);
            pe1.add(mass * a);
            pe2.add(mass * b);
            pe.add(mass * (a + b - a * b));
        }
    }
    Ok(ErrorReport {
        pe1: pe1.value().clamp(0.0, 1.0),
        pe2: pe2.value().clamp(0.0, 1.0),
        pe: pe.value().clamp(0.0, 1.0),
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::MessageSpace;

    fn repetition(n: usize) -> WiretapCodebook {
        WiretapCodebook::deterministic(n, MessageSpace::pair(2, 1), 2, vec![vec![0; n], vec![1; n]]).unwrap()
    }

    #[test]
    fn pure_noise_keeps_everything_secret() {
        let code = repetition(3);
        let z = DiscreteChannel::uniform_noise(2, 2);
        let r = exact_equivocation(&code, &z, &Pmf::uniform(2).unwrap()).unwrap();
        assert_eq!(r.r_e12, r.h_w12);
        assert_eq!(r.r_e1, 1.0 / 3.0);
        assert!(r.max_posterior_error <= 1e-12);
    }

    #[test]
    fn noiseless_tap_leaks_everything() {
        let code = repetition(3);
        let r = exact_equivocation(&code, &DiscreteChannel::identity(2), &Pmf::uniform(2).unwrap()).unwrap();
        assert_eq!(r.r_e12, 0.0);
        assert_eq!(r.r_e_all, 0.0);
    }

    #[test]
    fn repetition_over_bsc() {
        // majority decoding of a 3-fold repetition: 3p^2(1-p) + p^3
        let code = repetition(3);
        let bsc = DiscreteChannel::bsc(0.1).unwrap();
        let e = exact_error_probability(&code, &bsc, &DiscreteChannel::identity(2), &Pmf::uniform(2).unwrap()).unwrap();
        assert!((e.pe1 - 0.028).abs() < 1e-15);
        assert_eq!(e.pe2, 0.0);
        assert!((e.pe - 0.028).abs() < 1e-15);
        // H(W|Z) = H(W) - I(W;Z) with Z^3 through the BSC
        let r = exact_equivocation(&code, &bsc, &Pmf::uniform(2).unwrap()).unwrap();
        assert!(r.r_e1 > 0.0 && r.r_e1 < 1.0 / 3.0);
        assert!(r.chain_defect() < 1e-12);
    }

    #[test]
    fn identical_codewords_tie_to_lowest_index() {
        let code =
            WiretapCodebook::deterministic(2, MessageSpace::pair(2, 1), 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let id = DiscreteChannel::identity(2);
        let e = exact_error_probability(&code, &id, &id, &Pmf::uniform(2).unwrap()).unwrap();
        assert_eq!(e.pe1, 0.5);
        assert_eq!(e.pe, 0.5);
    }

    #[test]
    fn output_budget() {
        let code = repetition(25);
        let err = exact_equivocation(&code, &DiscreteChannel::identity(2), &Pmf::uniform(2).unwrap()).unwrap_err();
        assert!(err.is_budget());
    }
}
