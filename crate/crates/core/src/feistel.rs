//! A 4-line generalised Feistel cipher whose round ends with a binary 4×4
//! matrix acting word-wise, and exact analysis of its differential sets.
//!
//! Blocks are written `(x3, x2, x1, x0)`. One round is
//! `A · (x3, x2 ⊕ b(x3 ⊕ k1), x1, x0 ⊕ b(x1 ⊕ k0))`.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

pub type Block = [u8; 4];
pub type RoundKey = (u8, u8);

/// Above this many `log2` units of work the full trace refuses to run.
pub const FULL_TRACE_LIMIT_LOG2: u32 = 26;
/// Exact probabilities use `u128` numerators over `2^(2mℓ)`.
pub const EXACT_LIMIT_LOG2: u32 = 120;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeistelError {
    #[error("word width must be 1..=8, got {0}")]
    BadWidth(u32),
    #[error("S-box table must have {expected} entries below {expected}")]
    BadSbox { expected: usize },
    #[error("matrix entries must be 0 or 1")]
    BadMatrix,
    #[error("expected {expected} round keys, got {got}")]
    BadKeyCount { expected: usize, got: usize },
    #[error("word {0} does not fit the block width")]
    BadWord(u32),
    #[error("exhaustive work 2^{0} exceeds the configured bound")]
    TooLarge(u32),
    #[error("rounds must be at least 1")]
    NoRounds,
}

/// Rows act on `(x3, x2, x1, x0)`; a 1 selects that word into the XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryMatrix(pub [[u8; 4]; 4]);

impl BinaryMatrix {
    /// Output words `(x3⊕x2⊕x0, x3⊕x1⊕x0, x2⊕x1⊕x0, x3⊕x2⊕x1)`.
    pub const A1: BinaryMatrix = BinaryMatrix([[1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 1], [1, 1, 1, 0]]);
    /// Output words `(x3⊕x2⊕x1, x3⊕x2⊕x0, x3⊕x1⊕x0, x2⊕x1⊕x0)`.
    pub const A2: BinaryMatrix = BinaryMatrix([[1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 1]]);
    /// The second matrix as typeset in the original problem statement. Its
    /// rows disagree with the row action used for the `(0, δ, δ, θ)` set.
    pub const A2_TYPESET: BinaryMatrix = BinaryMatrix([[0, 1, 1, 1], [1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1]]);
    pub const IDENTITY: BinaryMatrix = BinaryMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);

    pub fn new(rows: [[u8; 4]; 4]) -> Result<Self, FeistelError> {
        if rows.iter().flatten().any(|&e| e > 1) {
            return Err(FeistelError::BadMatrix);
        }
        Ok(Self(rows))
    }

    pub fn apply(&self, x: Block) -> Block {
        let mut out = [0u8; 4];
        for (o, row) in out.iter_mut().zip(&self.0) {
            for (&sel, &w) in row.iter().zip(&x) {
                if sel == 1 {
                    *o ^= w;
                }
            }
        }
        out
    }

    fn row_mask(&self, r: usize) -> u8 {
        self.0[r].iter().fold(0, |acc, &e| acc << 1 | e)
    }

    /// `min over nonzero x ∈ GF(2)⁴ of wt(x) + wt(Ax)`.
    pub fn branch_number(&self) -> u32 {
        (1u8..16)
            .map(|x| {
                let ax: u32 = (0..4).map(|r| (self.row_mask(r) & x).count_ones() & 1).sum();
                x.count_ones() + ax
            })
            .min()
            .expect("nonempty")
    }

    pub fn is_invertible(&self) -> bool {
        let mut seen = [false; 16];
        for x in 0u8..16 {
            let y = (0..4).fold(0u8, |acc, r| acc << 1 | ((self.row_mask(r) & x).count_ones() & 1) as u8);
            if std::mem::replace(&mut seen[y as usize], true) {
                return false;
            }
        }
        true
    }
}

/// Largest branch number over all 2¹⁶ binary 4×4 matrices.
pub fn max_binary_branch_number() -> u32 {
    (0u32..1 << 16)
        .map(|bits| {
            let rows = std::array::from_fn(|r| std::array::from_fn(|c| ((bits >> (4 * r + c)) & 1) as u8));
            BinaryMatrix(rows).branch_number()
        })
        .max()
        .expect("nonempty")
}

/// A lookup table on m-bit words. Any function is accepted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SBox {
    m: u32,
    table: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SBoxFlags {
    pub bijective: bool,
    pub affine: bool,
}

impl SBox {
    pub fn new(m: u32, table: Vec<u8>) -> Result<Self, FeistelError> {
        check_width(m)?;
        let size = 1usize << m;
        if table.len() != size || table.iter().any(|&v| v as usize >= size) {
            return Err(FeistelError::BadSbox { expected: size });
        }
        Ok(Self { m, table })
    }

    pub fn identity(m: u32) -> Result<Self, FeistelError> {
        Self::new(m, (0..1u16 << m).map(|v| v as u8).collect())
    }

    pub fn random_permutation<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<Self, FeistelError> {
        use rand::seq::SliceRandom;
        let mut t: Vec<u8> = (0..1u16 << m).map(|v| v as u8).collect();
        t.shuffle(rng);
        Self::new(m, t)
    }

    pub fn random_function<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<Self, FeistelError> {
        let size = 1u16 << m;
        Self::new(m, (0..size).map(|_| rng.gen_range(0..size) as u8).collect())
    }

    pub fn width(&self) -> u32 {
        self.m
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn get(&self, x: u8) -> u8 {
        self.table[x as usize]
    }

    pub fn flags(&self) -> SBoxFlags {
        let mut sorted = self.table.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let b0 = self.table[0];
        let n = self.table.len();
        let affine = (0..n).all(|x| (0..n).all(|y| self.table[x ^ y] ^ b0 == self.table[x] ^ self.table[y]));
        SBoxFlags {
            bijective: sorted.len() == n,
            affine,
        }
    }
}

fn check_width(m: u32) -> Result<(), FeistelError> {
    if (1..=8).contains(&m) {
        Ok(())
    } else {
        Err(FeistelError::BadWidth(m))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeistelParams {
    pub m: u32,
    pub matrix: BinaryMatrix,
    pub sbox: SBox,
    pub rounds: usize,
}

impl FeistelParams {
    pub fn new(matrix: BinaryMatrix, sbox: SBox, rounds: usize) -> Result<Self, FeistelError> {
        if rounds == 0 {
            return Err(FeistelError::NoRounds);
        }
        Ok(Self {
            m: sbox.width(),
            matrix,
            sbox,
            rounds,
        })
    }

    fn mask(&self) -> u8 {
        ((1u16 << self.m) - 1) as u8
    }

    pub fn block_count(&self) -> usize {
        1 << (4 * self.m)
    }

    pub fn pack(&self, b: Block) -> usize {
        b.iter().fold(0usize, |acc, &w| acc << self.m | w as usize)
    }

    pub fn unpack(&self, v: usize) -> Block {
        let mask = self.mask() as usize;
        let m = self.m;
        [
            (v >> (3 * m) & mask) as u8,
            (v >> (2 * m) & mask) as u8,
            (v >> m & mask) as u8,
            (v & mask) as u8,
        ]
    }

    pub fn check_block(&self, b: Block) -> Result<(), FeistelError> {
        match b.iter().find(|&&w| w > self.mask()) {
            Some(&w) => Err(FeistelError::BadWord(w as u32)),
            None => Ok(()),
        }
    }
}

pub fn round(block: Block, key: RoundKey, params: &FeistelParams) -> Block {
    let [x3, x2, x1, x0] = block;
    let (k1, k0) = key;
    let b = &params.sbox;
    params.matrix.apply([x3, x2 ^ b.get(x3 ^ k1), x1, x0 ^ b.get(x1 ^ k0)])
}

/// Applies the rounds left to right, round 1 first.
pub fn encrypt(block: Block, keys: &[RoundKey], params: &FeistelParams) -> Result<Block, FeistelError> {
    if keys.len() != params.rounds {
        return Err(FeistelError::BadKeyCount {
            expected: params.rounds,
            got: keys.len(),
        });
    }
    params.check_block(block)?;
    for &(k1, k0) in keys {
        if k1 > params.mask() || k0 > params.mask() {
            return Err(FeistelError::BadWord(k1.max(k0) as u32));
        }
    }
    Ok(keys.iter().fold(block, |b, &k| round(b, k, params)))
}

fn xor(a: Block, b: Block) -> Block {
    [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2], a[3] ^ b[3]]
}

/// Differences, each reachable from `delta` in one round, with the number of
/// round keys producing it from the pair `(0, delta)`. The key is XORed in
/// before the S-box, so the same counts hold for every first element.
fn one_round_transitions(delta: Block, params: &FeistelParams) -> Vec<(Block, u64, RoundKey)> {
    let size = 1u16 << params.m;
    let mut counts: HashMap<Block, (u64, RoundKey)> = HashMap::new();
    for k1 in 0..size {
        for k0 in 0..size {
            let k = (k1 as u8, k0 as u8);
            let out = xor(round([0; 4], k, params), round(delta, k, params));
            counts.entry(out).or_insert((0, k)).0 += 1;
        }
    }
    let mut v: Vec<_> = counts.into_iter().map(|(d, (c, k))| (d, c, k)).collect();
    v.sort_unstable();
    v
}

/// A set of nonzero block differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffSet {
    /// Differences with `α3 ⊕ α1 = ε`.
    XorOuter(u8),
    /// Differences `(0, δ, δ, θ)`.
    ZeroEqualPair,
    Custom(Vec<Block>),
}

impl DiffSet {
    pub fn contains(&self, d: Block) -> bool {
        if d == [0; 4] {
            return false;
        }
        match self {
            DiffSet::XorOuter(eps) => d[0] ^ d[2] == *eps,
            DiffSet::ZeroEqualPair => d[0] == 0 && d[1] == d[2],
            DiffSet::Custom(v) => v.contains(&d),
        }
    }

    pub fn elements(&self, params: &FeistelParams) -> Vec<Block> {
        match self {
            DiffSet::Custom(v) => v.iter().copied().filter(|&d| self.contains(d)).collect(),
            _ => (1..params.block_count())
                .map(|v| params.unpack(v))
                .filter(|&d| self.contains(d))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyMode {
    /// Exact average over every input and every round-key tuple.
    Exhaustive,
    /// Like `Exhaustive`, but computed by tracing every pair and key tuple.
    FullTrace,
    Sampled {
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffProbability {
    Exact(Ratio<u128>),
    Estimate { hits: u64, samples: u64 },
}

impl DiffProbability {
    pub fn as_f64(&self) -> f64 {
        match self {
            DiffProbability::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            DiffProbability::Estimate { hits, samples } => *hits as f64 / *samples as f64,
        }
    }
}

/// Exact output-difference distribution after all rounds, as counts over
/// `2^(2mℓ)` key tuples.
pub fn difference_distribution(delta: Block, params: &FeistelParams) -> Result<HashMap<Block, u128>, FeistelError> {
    let log2 = 2 * params.m * params.rounds as u32;
    if log2 > EXACT_LIMIT_LOG2 {
        return Err(FeistelError::TooLarge(log2));
    }
    params.check_block(delta)?;
    let mut cache: HashMap<Block, Vec<(Block, u64, RoundKey)>> = HashMap::new();
    let mut dist: HashMap<Block, u128> = HashMap::from([(delta, 1u128)]);
    for _ in 0..params.rounds {
        let mut next: HashMap<Block, u128> = HashMap::new();
        for (&d, &c) in &dist {
            let trans = cache.entry(d).or_insert_with(|| one_round_transitions(d, params));
            for &(e, n, _) in trans.iter() {
                *next.entry(e).or_insert(0) += c * n as u128;
            }
        }
        dist = next;
    }
    Ok(dist)
}

fn full_trace_log2(params: &FeistelParams, deltas: usize) -> u32 {
    let per = 4 * params.m + 2 * params.m * params.rounds as u32;
    per + (deltas.max(1) as f64).log2().ceil() as u32 + (params.rounds as f64).log2().ceil() as u32
}

fn all_key_tuples(params: &FeistelParams) -> impl Iterator<Item = Vec<RoundKey>> + '_ {
    let bits = 2 * params.m;
    let total: u64 = 1 << (bits * params.rounds as u32);
    let mask = (1u64 << params.m) - 1;
    (0..total).map(move |t| {
        (0..params.rounds)
            .map(|r| {
                let k = t >> (bits * r as u32);
                ((k >> params.m & mask) as u8, (k & mask) as u8)
            })
            .collect()
    })
}

/// `p(δ → ε)` averaged over inputs and round keys.
pub fn diff_probability(
    delta: Block,
    eps: Block,
    params: &FeistelParams,
    mode: KeyMode,
) -> Result<DiffProbability, FeistelError> {
    params.check_block(delta)?;
    params.check_block(eps)?;
    match mode {
        KeyMode::Exhaustive => {
            let dist = difference_distribution(delta, params)?;
            let denom = 1u128 << (2 * params.m * params.rounds as u32);
            Ok(DiffProbability::Exact(Ratio::new(
                dist.get(&eps).copied().unwrap_or(0),
                denom,
            )))
        }
        KeyMode::FullTrace => {
            let log2 = full_trace_log2(params, 1);
            if log2 > FULL_TRACE_LIMIT_LOG2 {
                return Err(FeistelError::TooLarge(log2));
            }
            let hits: u128 = (0..params.block_count())
                .into_par_iter()
                .map(|xv| {
                    let x = params.unpack(xv);
                    all_key_tuples(params)
                        .filter(|keys| {
                            let a = keys.iter().fold(x, |b, &k| round(b, k, params));
                            let b = keys.iter().fold(xor(x, delta), |b, &k| round(b, k, params));
                            xor(a, b) == eps
                        })
                        .count() as u128
                })
                .sum();
            let denom = (params.block_count() as u128) << (2 * params.m * params.rounds as u32);
            Ok(DiffProbability::Exact(Ratio::new(hits, denom)))
        }
        KeyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = params.mask();
            let mut hits = 0;
            for _ in 0..samples {
                let x: Block = std::array::from_fn(|_| rng.gen::<u8>() & mask);
                let keys: Vec<RoundKey> = (0..params.rounds)
                    .map(|_| (rng.gen::<u8>() & mask, rng.gen::<u8>() & mask))
                    .collect();
                let a = keys.iter().fold(x, |b, &k| round(b, k, params));
                let b = keys.iter().fold(xor(x, delta), |b, &k| round(b, k, params));
                if xor(a, b) == eps {
                    hits += 1;
                }
            }
            Ok(DiffProbability::Estimate { hits, samples })
        }
    }
}

/// An input pair and key tuple whose output difference leaves the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub input: Block,
    pub input_difference: Block,
    pub keys: Vec<RoundKey>,
    pub output_difference: Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Propagate the reachable set of differences round by round.
    Propagation,
    FullTrace,
    Sampled {
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub holds: bool,
    /// False for sampled runs, whose `holds` only means no violation was seen.
    pub exhaustive: bool,
    pub set_size: usize,
    /// Pairs examined (sampled mode) or differences reached (propagation).
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
    pub sbox_flags: SBoxFlags,
}

/// Checks that every difference in `set` stays in `set` after all rounds,
/// for every input and round-key tuple.
pub fn verify_invariant(
    set: &DiffSet,
    params: &FeistelParams,
    mode: VerifyMode,
) -> Result<InvarianceReport, FeistelError> {
    let start = set.elements(params);
    let sbox_flags = params.sbox.flags();
    match mode {
        VerifyMode::Propagation => {
            let mut cache: HashMap<Block, Vec<(Block, u64, RoundKey)>> = HashMap::new();
            // parents[r][d] = (previous difference, key used from the zero element)
            let mut parents: Vec<HashMap<Block, Option<(Block, RoundKey)>>> =
                vec![start.iter().map(|&d| (d, None)).collect()];
            for _ in 0..params.rounds {
                let mut next = HashMap::new();
                for &d in parents.last().expect("nonempty").keys() {
                    let trans = cache.entry(d).or_insert_with(|| one_round_transitions(d, params));
                    for &(e, _, k) in trans.iter() {
                        next.entry(e).or_insert(Some((d, k)));
                    }
                }
                parents.push(next);
            }
            let last = parents.last().expect("nonempty");
            let checked = parents.iter().map(|p| p.len() as u64).sum();
            let mut escaped: Vec<Block> = last.keys().copied().filter(|&d| !set.contains(d)).collect();
            escaped.sort_unstable();
            let counterexample = escaped
                .first()
                .map(|&bad| rebuild_counterexample(bad, &parents, params));
            Ok(InvarianceReport {
                holds: counterexample.is_none(),
                exhaustive: true,
                set_size: start.len(),
                checked,
                counterexample,
                sbox_flags,
            })
        }
        VerifyMode::FullTrace => {
            let log2 = full_trace_log2(params, start.len());
            if log2 > FULL_TRACE_LIMIT_LOG2 {
                return Err(FeistelError::TooLarge(log2));
            }
            let counterexample = (0..params.block_count()).into_par_iter().find_map_first(|xv| {
                let x = params.unpack(xv);
                for keys in all_key_tuples(params) {
                    let a = keys.iter().fold(x, |b, &k| round(b, k, params));
                    for &d in &start {
                        let b = keys.iter().fold(xor(x, d), |b, &k| round(b, k, params));
                        if !set.contains(xor(a, b)) {
                            return Some(Counterexample {
                                input: x,
                                input_difference: d,
                                keys,
                                output_difference: xor(a, b),
                            });
                        }
                    }
                }
                None
            });
            let checked = (params.block_count() as u64) << (2 * params.m * params.rounds as u32);
            Ok(InvarianceReport {
                holds: counterexample.is_none(),
                exhaustive: true,
                set_size: start.len(),
                checked: checked * start.len() as u64,
                counterexample,
                sbox_flags,
            })
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mask = params.mask();
            let mut counterexample = None;
            for _ in 0..samples {
                let x: Block = std::array::from_fn(|_| rng.gen::<u8>() & mask);
                let d = start[rng.gen_range(0..start.len())];
                let keys: Vec<RoundKey> = (0..params.rounds)
                    .map(|_| (rng.gen::<u8>() & mask, rng.gen::<u8>() & mask))
                    .collect();
                let a = keys.iter().fold(x, |b, &k| round(b, k, params));
                let b = keys.iter().fold(xor(x, d), |b, &k| round(b, k, params));
                if !set.contains(xor(a, b)) {
                    counterexample = Some(Counterexample {
                        input: x,
                        input_difference: d,
                        keys,
                        output_difference: xor(a, b),
                    });
                    break;
                }
            }
            Ok(InvarianceReport {
                holds: counterexample.is_none(),
                exhaustive: false,
                set_size: start.len(),
                checked: samples,
                counterexample,
                sbox_flags,
            })
        }
    }
}

/// Walks parent links back to an input difference, then replays the path
/// from input 0, shifting each round key by the current first element so the
/// pair follows the recorded transitions.
fn rebuild_counterexample(
    bad: Block,
    parents: &[HashMap<Block, Option<(Block, RoundKey)>>],
    params: &FeistelParams,
) -> Counterexample {
    let mut path = Vec::with_capacity(params.rounds);
    let mut d = bad;
    for layer in parents.iter().skip(1).rev() {
        let (prev, k) = layer[&d].expect("non-initial layer has parents");
        path.push(k);
        d = prev;
    }
    path.reverse();
    let input_difference = d;
    let mut x = [0u8; 4];
    let mut keys = Vec::with_capacity(path.len());
    for &(k1, k0) in &path {
        let k = (k1 ^ x[0], k0 ^ x[2]);
        keys.push(k);
        x = round(x, k, params);
    }
    let a = encrypt([0; 4], &keys, params).expect("valid keys");
    let b = encrypt(input_difference, &keys, params).expect("valid keys");
    let output_difference = xor(a, b);
    debug_assert_eq!(output_difference, bad);
    Counterexample {
        input: [0; 4],
        input_difference,
        keys,
        output_difference,
    }
}

/// Invariance of `{α : α3 ⊕ α1 = ε}` (expected to hold for [`BinaryMatrix::A1`]).
pub fn verify_theorem1(params: &FeistelParams, eps: u8, mode: VerifyMode) -> Result<InvarianceReport, FeistelError> {
    verify_invariant(&DiffSet::XorOuter(eps), params, mode)
}

/// Invariance of `{(0, δ, δ, θ)}` (expected to hold for [`BinaryMatrix::A2`]).
pub fn verify_theorem2(params: &FeistelParams, mode: VerifyMode) -> Result<InvarianceReport, FeistelError> {
    verify_invariant(&DiffSet::ZeroEqualPair, params, mode)
}
