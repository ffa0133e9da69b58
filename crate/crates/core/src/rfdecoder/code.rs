//! The GF(337) linear code and its pooled Gauss decoder.

use super::{DataPoint, DEGREE, LARGE_PRIME};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const P: u32 = LARGE_PRIME as u32;
const DIM: usize = 2 * DEGREE;
const BATCH: u64 = 1 << 12;

/// Generator columns `(−1, −x, …, −x¹⁵, y, y·x, …, y·x¹⁵)` and target
/// `v = y·x¹⁶ − x¹⁶`, all mod 337.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCodeInstance {
    /// Positions of the retained points in the caller's slice.
    pub positions: Vec<usize>,
    pub columns: Vec<[u32; DIM]>,
    pub target: Vec<u32>,
}

impl LinearCodeInstance {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Number of coordinates where `s×G` differs from `−v`.
    pub fn distance(&self, s: &[u32; DIM]) -> usize {
        (0..self.len()).filter(|&i| !self.agrees(s, i)).count()
    }

    fn agrees(&self, s: &[u32; DIM], i: usize) -> bool {
        let col = &self.columns[i];
        let dot: u32 = s.iter().zip(col).map(|(a, b)| a * b % P).sum();
        (dot + self.target[i]) % P == 0
    }
}

pub fn build_code(points: &[DataPoint], positions: &[usize]) -> LinearCodeInstance {
    let p = LARGE_PRIME;
    let mut columns = Vec::with_capacity(positions.len());
    let mut target = Vec::with_capacity(positions.len());
    for &pos in positions {
        let x = points[pos].x % p;
        let y = points[pos].y % p;
        let mut col = [0u32; DIM];
        let mut xp = 1u64;
        for j in 0..DEGREE {
            col[j] = ((p - xp) % p) as u32;
            col[DEGREE + j] = (y * xp % p) as u32;
            xp = xp * x % p;
        }
        // xp is now x¹⁶
        target.push(((y * xp + p - xp) % p) as u32);
        columns.push(col);
    }
    LinearCodeInstance {
        positions: positions.to_vec(),
        columns,
        target,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsdOutcome {
    /// `(α₀..α₁₅, β₀..β₁₅)` mod 337.
    pub solution: Option<[u32; DIM]>,
    /// Iterations consumed: the winning index plus one, or the whole budget.
    pub iterations: u64,
}

/// How each sampled information set is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsdVariant {
    /// Assume all 32 sampled coordinates are error-free.
    PooledGauss,
    /// Also allow one error among the sampled coordinates (Lee–Brickell, p = 1).
    #[default]
    LeeBrickell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsdOptions {
    pub variant: IsdVariant,
    /// Merge identical coordinates and, on even iterations, force the
    /// repeated ones into the sample. Two correct points sharing `x mod 337`
    /// give identical columns, which would otherwise make most samples
    /// singular; a repeated coordinate is also very unlikely to be an error.
    pub pin_repeated: bool,
}

impl Default for IsdOptions {
    fn default() -> Self {
        Self {
            variant: IsdVariant::LeeBrickell,
            pin_repeated: true,
        }
    }
}

impl IsdOptions {
    /// Uniform samples, no merging: the plain method.
    pub const PLAIN: IsdOptions = IsdOptions {
        variant: IsdVariant::PooledGauss,
        pin_repeated: false,
    };
}

/// The coordinates the decoder samples from, each standing for `weight`
/// identical coordinates of the code.
struct View {
    reps: Vec<usize>,
    weight: Vec<usize>,
    /// Indices into `reps` with weight ≥ 2.
    repeated: Vec<usize>,
}

impl View {
    fn new(code: &LinearCodeInstance, merge: bool) -> Self {
        let mut reps: Vec<usize> = Vec::new();
        let mut weight: Vec<usize> = Vec::new();
        if merge {
            let mut seen: std::collections::HashMap<([u32; DIM], u32), usize> = std::collections::HashMap::new();
            for i in 0..code.len() {
                match seen.entry((code.columns[i], code.target[i])) {
                    std::collections::hash_map::Entry::Occupied(e) => weight[*e.get()] += 1,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(reps.len());
                        reps.push(i);
                        weight.push(1);
                    }
                }
            }
        } else {
            reps = (0..code.len()).collect();
            weight = vec![1; code.len()];
        }
        let repeated = (0..reps.len()).filter(|&k| weight[k] > 1).collect();
        Self { reps, weight, repeated }
    }

    /// Sampled coordinate indices (into the code) for one iteration.
    fn sample(&self, seed: u64, iteration: u64, pin: bool) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(iteration);
        let n = self.reps.len();
        if !pin || iteration % 2 == 1 || self.repeated.is_empty() {
            return rand::seq::index::sample(&mut rng, n, DIM)
                .into_iter()
                .map(|k| self.reps[k])
                .collect();
        }
        let mut chosen: Vec<usize> = if self.repeated.len() >= DIM {
            rand::seq::index::sample(&mut rng, self.repeated.len(), DIM)
                .into_iter()
                .map(|k| self.repeated[k])
                .collect()
        } else {
            self.repeated.clone()
        };
        let singles: Vec<usize> = (0..n).filter(|&k| self.weight[k] == 1).collect();
        let need = DIM - chosen.len();
        chosen.extend(
            rand::seq::index::sample(&mut rng, singles.len(), need)
                .into_iter()
                .map(|k| singles[k]),
        );
        chosen.into_iter().map(|k| self.reps[k]).collect()
    }
}

fn inverse_table() -> [u32; LARGE_PRIME as usize] {
    let mut t = [0u32; LARGE_PRIME as usize];
    for a in 1..P {
        t[a as usize] = crate::numtheory::pow_mod(a as u64, LARGE_PRIME - 2, LARGE_PRIME) as u32;
    }
    t
}

/// Gauss–Jordan on the sampled system `Σ_j s_j·col_r[j] = −v_r`, optionally
/// carrying the inverse so that moving sampled coordinate `r` by `e` moves
/// `s` by `e·w_r`. `None` if the sample is singular.
fn solve_sample(
    code: &LinearCodeInstance,
    sample: &[usize],
    inv: &[u32],
    with_inverse: bool,
) -> Option<([u32; DIM], Vec<[u32; DIM]>)> {
    const W: usize = 2 * DIM + 1;
    let width = if with_inverse { W } else { DIM + 1 };
    let mut m = vec![[0u32; W]; DIM];
    for (r, (row, &c)) in m.iter_mut().zip(sample).enumerate() {
        row[..DIM].copy_from_slice(&code.columns[c]);
        row[DIM] = (P - code.target[c]) % P;
        row[DIM + 1 + r] = 1;
    }
    for col in 0..DIM {
        let pivot = (col..DIM).find(|&r| m[r][col] != 0)?;
        m.swap(col, pivot);
        let scale = inv[m[col][col] as usize];
        for v in m[col][col..width].iter_mut() {
            *v = *v * scale % P;
        }
        let pivot_row = m[col];
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col] == 0 {
                continue;
            }
            let f = P - row[col];
            for (v, &pv) in row[col..width].iter_mut().zip(&pivot_row[col..width]) {
                *v = (*v + f * pv) % P;
            }
        }
    }
    let s = std::array::from_fn(|j| m[j][DIM]);
    let w = if with_inverse {
        (0..DIM).map(|r| std::array::from_fn(|j| m[j][DIM + 1 + r])).collect()
    } else {
        Vec::new()
    };
    Some((s, w))
}

fn dot(a: &[u32; DIM], b: &[u32; DIM]) -> u32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<u32>() % P
}

fn attempt(
    code: &LinearCodeInstance,
    view: &View,
    max_errors: usize,
    seed: u64,
    iteration: u64,
    opts: IsdOptions,
    inv: &[u32],
) -> Option<[u32; DIM]> {
    let sample = view.sample(seed, iteration, opts.pin_repeated);
    let lee_brickell = opts.variant == IsdVariant::LeeBrickell;
    let (s, w) = solve_sample(code, &sample, inv, lee_brickell)?;

    if !lee_brickell {
        let mut errors = 0;
        for (&i, &wt) in view.reps.iter().zip(&view.weight) {
            if !code.agrees(&s, i) {
                errors += wt;
                if errors > max_errors {
                    return None;
                }
            }
        }
        return Some(s);
    }

    let mut in_sample = vec![false; code.len()];
    for &c in &sample {
        in_sample[c] = true;
    }
    // free coordinates with their weight and the residual needed to agree with −v
    let mut free = Vec::with_capacity(view.reps.len());
    let mut free_weight = 0;
    let mut disagreements = 0;
    for (&j, &wt) in view.reps.iter().zip(&view.weight) {
        if in_sample[j] {
            continue;
        }
        let d = (2 * P - code.target[j] - dot(&s, &code.columns[j])) % P;
        disagreements += if d != 0 { wt } else { 0 };
        free_weight += wt;
        free.push((j, wt, d));
    }
    if disagreements <= max_errors {
        return Some(s);
    }
    let sample_weight = |c: usize| view.weight[view.reps.iter().position(|&r| r == c).expect("sampled rep")];
    let mut counts = [0usize; LARGE_PRIME as usize];
    for (wr, &c) in w.iter().zip(&sample) {
        counts.fill(0);
        let mut always = 0;
        for &(j, wt, d) in &free {
            let shift = dot(wr, &code.columns[j]);
            if shift == 0 {
                always += if d == 0 { wt } else { 0 };
            } else {
                counts[(d * inv[shift as usize] % P) as usize] += wt;
            }
        }
        let (e, best) = counts
            .iter()
            .enumerate()
            .skip(1)
            .max_by_key(|&(e, &c)| (c, std::cmp::Reverse(e)))
            .expect("nonempty");
        // the shifted sampled coordinate itself becomes an error
        let errors = free_weight - always - best + sample_weight(c);
        if errors <= max_errors {
            let e = e as u32;
            return Some(std::array::from_fn(|k| (s[k] + e * wr[k]) % P));
        }
    }
    None
}

/// Pooled Gauss: sample 32 coordinates uniformly, assume them error-free,
/// solve, and accept when the codeword is within `max_errors` of `−v`.
/// Iteration `i` draws from its own ChaCha stream, and the lowest successful
/// index wins, so the result does not depend on the thread count.
pub fn isd_decode(code: &LinearCodeInstance, max_errors: usize, budget: u64, seed: u64) -> IsdOutcome {
    isd_decode_with(code, max_errors, budget, seed, IsdOptions::PLAIN)
}

/// [`isd_decode`] with a choice of sampling and per-sample search. One
/// iteration is always one sampled information set.
pub fn isd_decode_with(
    code: &LinearCodeInstance,
    max_errors: usize,
    budget: u64,
    seed: u64,
    opts: IsdOptions,
) -> IsdOutcome {
    let view = View::new(code, opts.pin_repeated);
    if view.reps.len() < DIM {
        return IsdOutcome {
            solution: None,
            iterations: 0,
        };
    }
    let inv = inverse_table();
    let mut start = 0;
    while start < budget {
        let end = (start + BATCH).min(budget);
        let hit = (start..end)
            .into_par_iter()
            .find_map_first(|i| attempt(code, &view, max_errors, seed, i, opts, &inv).map(|s| (i, s)));
        if let Some((i, s)) = hit {
            return IsdOutcome {
                solution: Some(s),
                iterations: i + 1,
            };
        }
        start = end;
    }
    IsdOutcome {
        solution: None,
        iterations: budget,
    }
}

fn binom(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Varshamov bound for linear `[n, k]` codes over GF(q): the largest `d`
/// with `Σ_{i=0}^{d−2} C(n−1, i)(q−1)^i < q^{n−k}`.
pub fn gv_min_distance(n: u64, k: u64, q: u64) -> u64 {
    let limit = BigUint::from(q).pow((n - k) as u32);
    let mut sum = BigUint::from(0u32);
    let mut d = 1;
    for i in 0..n {
        sum += binom(n - 1, i) * BigUint::from(q - 1).pow(i as u32);
        if sum >= limit {
            break;
        }
        d = i + 2;
    }
    d.min(n)
}

/// Gilbert form: the largest `d` with `Σ_{i=0}^{d−1} C(n, i)(q−1)^i ≤ q^{n−k}`.
pub fn gv_min_distance_gilbert(n: u64, k: u64, q: u64) -> u64 {
    let limit = BigUint::from(q).pow((n - k) as u32);
    let mut sum = BigUint::from(0u32);
    let mut d = 0;
    for i in 0..=n {
        sum += binom(n, i) * BigUint::from(q - 1).pow(i as u32);
        if sum > limit {
            break;
        }
        d = i + 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::super::synth_instance;
    use super::*;

    fn planted(key: &super::super::RationalFnKey) -> [u32; DIM] {
        let k = key.reduce(LARGE_PRIME);
        let mut s = [0u32; DIM];
        for j in 0..DEGREE {
            s[j] = k.alpha[j] as u32;
            s[DEGREE + j] = k.beta[j] as u32;
        }
        s
    }

    #[test]
    fn gv_values() {
        let d = gv_min_distance(125, 32, 337);
        assert!((81..=83).contains(&d), "{d}");
        assert_eq!(d, 81);
        assert_eq!(gv_min_distance_gilbert(125, 32, 337), 80);
        // [7,4] binary: Varshamov gives 3 (the Hamming code meets it)
        assert_eq!(gv_min_distance(7, 4, 2), 3);
    }

    #[test]
    fn zero_error_instance() {
        let (pts, key) = synth_instance(11, 60, 60);
        let all: Vec<usize> = (0..pts.len()).collect();
        let code = build_code(&pts, &all);
        let s = planted(&key);
        assert_eq!(code.distance(&s), 0);
        let out = isd_decode(&code, 0, 5, 1);
        assert_eq!(out.solution, Some(s));
    }

    #[test]
    fn planted_error_distance() {
        let (pts, key) = synth_instance(12, 125, 90);
        let all: Vec<usize> = (0..pts.len()).collect();
        let code = build_code(&pts, &all);
        // garbage points agree modulo 337 only by accident
        let accidental = pts
            .iter()
            .filter(|p| !key.satisfies(p))
            .filter(|p| {
                let m = LARGE_PRIME;
                p.y * key.denominator(p.x, m) % m == key.numerator(p.x, m)
            })
            .count();
        assert_eq!(code.distance(&planted(&key)), 35 - accidental);
    }

    #[test]
    fn small_decoding_is_deterministic() {
        let (pts, key) = synth_instance(5, 60, 50);
        let all: Vec<usize> = (0..pts.len()).collect();
        let code = build_code(&pts, &all);
        let a = isd_decode(&code, 10, 100_000, 9);
        let b = isd_decode(&code, 10, 100_000, 9);
        assert_eq!(a, b);
        assert_eq!(a.solution, Some(planted(&key)));
        assert_eq!(isd_decode(&code, 10, 0, 9).solution, None);
    }

    #[test]
    fn lee_brickell_agrees_and_needs_fewer_iterations() {
        let (pts, key) = synth_instance(6, 80, 65);
        let all: Vec<usize> = (0..pts.len()).collect();
        let code = build_code(&pts, &all);
        let pg = isd_decode_with(&code, 15, 1_000_000, 3, IsdOptions::PLAIN);
        let lb = isd_decode_with(
            &code,
            15,
            1_000_000,
            3,
            IsdOptions {
                variant: IsdVariant::LeeBrickell,
                pin_repeated: false,
            },
        );
        let pinned = isd_decode_with(&code, 15, 1_000_000, 3, IsdOptions::default());
        assert_eq!(pg.solution, Some(planted(&key)));
        assert_eq!(lb.solution, Some(planted(&key)));
        assert_eq!(pinned.solution, Some(planted(&key)));
        assert!(lb.iterations <= pg.iterations);
    }
}
