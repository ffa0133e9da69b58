//! Super-dependent S-boxes: permutations of 𝔽₂ⁿ whose every coordinate
//! function essentially depends on all n variables.
//!
//! Variable `x_j` is input bit `j − 1`; coordinate `f_k` is output bit `k − 1`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Truth tables are stored in a `u64`, so at most 6 variables.
pub const MAX_VARS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SboxError {
    #[error("{0} variables is outside the supported range")]
    BadArity(u32),
    #[error("variable index {0} is out of range")]
    BadVariable(u32),
    #[error("exhaustive count for n = {0} is out of reach")]
    TooLarge(u32),
    #[error("table has {got} entries, expected {expected}")]
    BadTable { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BooleanFn {
    n: u32,
    /// Bit `x` holds `f(x)`.
    table: u64,
}

fn full_mask(n: u32) -> u64 {
    if n == MAX_VARS {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

impl BooleanFn {
    pub fn new(n: u32, table: u64) -> Result<Self, SboxError> {
        if n > MAX_VARS {
            return Err(SboxError::BadArity(n));
        }
        Ok(Self {
            n,
            table: table & full_mask(n),
        })
    }

    pub fn from_fn(n: u32, f: impl Fn(u32) -> bool) -> Result<Self, SboxError> {
        let table = (0..1u32 << n).filter(|&x| f(x)).fold(0u64, |t, x| t | 1 << x);
        Self::new(n, table)
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> u64 {
        self.table
    }

    pub fn eval(&self, x: u32) -> bool {
        self.table >> x & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.table.count_ones()
    }

    pub fn is_balanced(&self) -> bool {
        self.n > 0 && self.weight() == 1 << (self.n - 1)
    }

    /// Algebraic normal form: bit `u` is the coefficient of `∏_{j ∈ u} x_j`.
    pub fn anf(&self) -> u64 {
        let mut t = self.table;
        for j in 0..self.n {
            let step = 1u32 << j;
            for x in 0..1u32 << self.n {
                if x & step != 0 {
                    t ^= (t >> (x ^ step) & 1) << x;
                }
            }
        }
        t
    }

    fn depends_on_bit(&self, bit: u32) -> bool {
        (0..1u32 << self.n).any(|x| self.eval(x) != self.eval(x ^ (1 << bit)))
    }

    pub fn depends_on_all(&self) -> bool {
        (0..self.n).all(|b| self.depends_on_bit(b))
    }
}

/// Whether flipping `x_j` (1-based) changes `f` for some assignment.
pub fn essentially_depends(f: &BooleanFn, j: u32) -> Result<bool, SboxError> {
    if j == 0 || j > f.n {
        return Err(SboxError::BadVariable(j));
    }
    Ok(f.depends_on_bit(j - 1))
}

/// A map 𝔽₂ⁿ → 𝔽₂ⁿ stored as its value table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorBooleanFn {
    n: u32,
    outputs: Vec<u8>,
}

impl VectorBooleanFn {
    pub fn new(n: u32, outputs: Vec<u8>) -> Result<Self, SboxError> {
        if n == 0 || n > MAX_VARS {
            return Err(SboxError::BadArity(n));
        }
        let size = 1usize << n;
        if outputs.len() != size || outputs.iter().any(|&y| y as usize >= size) {
            return Err(SboxError::BadTable {
                expected: size,
                got: outputs.len(),
            });
        }
        Ok(Self { n, outputs })
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    pub fn outputs(&self) -> &[u8] {
        &self.outputs
    }

    /// Coordinate `f_k`, 1-based.
    pub fn coordinate(&self, k: u32) -> BooleanFn {
        let table = self
            .outputs
            .iter()
            .enumerate()
            .filter(|&(_, &y)| y >> (k - 1) & 1 == 1)
            .fold(0u64, |t, (x, _)| t | 1 << x);
        BooleanFn { n: self.n, table }
    }

    /// Component `c · F` for a nonzero mask `c`.
    pub fn component(&self, c: u8) -> BooleanFn {
        let table = self
            .outputs
            .iter()
            .enumerate()
            .filter(|&(_, &y)| (y & c).count_ones() & 1 == 1)
            .fold(0u64, |t, (x, _)| t | 1 << x);
        BooleanFn { n: self.n, table }
    }
}

pub fn is_permutation(f: &VectorBooleanFn) -> bool {
    let mut seen = [false; 1 << MAX_VARS];
    f.outputs
        .iter()
        .all(|&y| !std::mem::replace(&mut seen[y as usize], true))
}

/// A map is a permutation iff every nonzero component is balanced.
pub fn all_components_balanced(f: &VectorBooleanFn) -> bool {
    (1..1u16 << f.n).all(|c| f.component(c as u8).is_balanced())
}

pub fn is_super_dependent(f: &VectorBooleanFn) -> bool {
    is_permutation(f) && (1..=f.n).all(|k| f.coordinate(k).depends_on_all())
}

/// Advances to the next permutation in lexicographic order.
fn next_permutation(p: &mut [u8]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exhaustive count over all `(2ⁿ)!` permutations, in lexicographic order.
pub fn count_super_dependent_exact(n: u32) -> Result<u64, SboxError> {
    match n {
        0 => Err(SboxError::BadArity(0)),
        1..=3 => {
            let mut p: Vec<u8> = (0..1u16 << n).map(|v| v as u8).collect();
            let mut count = 0;
            loop {
                let f = VectorBooleanFn { n, outputs: p.clone() };
                if (1..=n).all(|k| f.coordinate(k).depends_on_all()) {
                    count += 1;
                }
                if !next_permutation(&mut p) {
                    break;
                }
            }
            Ok(count)
        }
        _ => Err(SboxError::TooLarge(n)),
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Balanced functions of `k` variables that depend on all of them, by
/// `|H(k)| = C(2^k, 2^(k−1)) − Σ_{i<k} C(k, i)|H(i)|` with `|H(0)| = 0`.
pub fn h_count(k: u32) -> Result<BigUint, SboxError> {
    if k > 20 {
        return Err(SboxError::BadArity(k));
    }
    let mut h: Vec<BigUint> = vec![BigUint::zero()];
    for n in 1..=k {
        let size = 1u64 << n;
        let total = binomial(size, size / 2);
        let lower: BigUint = (0..n).map(|i| binomial(n as u64, i as u64) * &h[i as usize]).sum();
        h.push(total - lower);
    }
    Ok(h.swap_remove(k as usize))
}

/// Direct enumeration of all `2^(2^k)` functions, `k ≤ 4`.
pub fn h_count_bruteforce(k: u32) -> Result<u64, SboxError> {
    if k > 4 {
        return Err(SboxError::TooLarge(k));
    }
    let count = (0..1u64 << (1u32 << k))
        .into_par_iter()
        .filter(|&t| {
            let f = BooleanFn { n: k, table: t };
            f.is_balanced() && f.depends_on_all()
        })
        .count();
    Ok(count as u64)
}

/// Permutations whose first coordinate fails to depend on every variable:
/// `(2ⁿ)! · (C − |H(n)|) / C` with `C = C(2ⁿ, 2ⁿ⁻¹)`.
pub fn a1_size(n: u32) -> Result<BigUint, SboxError> {
    if n == 0 || n > 8 {
        return Err(SboxError::BadArity(n));
    }
    let size = 1u64 << n;
    let c = binomial(size, size / 2);
    let h = h_count(n)?;
    Ok(factorial(size) * (&c - h) / c)
}

/// `((2ⁿ)! − n|A₁|, (2ⁿ)! − |A₁|)`. The lower end saturates at zero.
pub fn s_bounds(n: u32) -> Result<(BigUint, BigUint), SboxError> {
    let a1 = a1_size(n)?;
    let total = factorial(1u64 << n);
    let na1 = &a1 * n;
    let lower = if na1 > total { BigUint::zero() } else { &total - na1 };
    Ok((lower, total - a1))
}

/// Trivial lower bound `C(2^(n−1), 2^(n−2))` on the tuple count used in the
/// exact intersection formula, which is not itself computed.
pub fn d_trivial_lower_bound(n: u32) -> Result<BigUint, SboxError> {
    if !(2..=20).contains(&n) {
        return Err(SboxError::BadArity(n));
    }
    Ok(binomial(1 << (n - 1), 1 << (n - 2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub hits: u64,
    pub samples: u64,
    pub fraction: f64,
    /// Normal-approximation 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

const MC_CHUNK: u64 = 4096;

/// Fraction of uniformly random permutations that are super-dependent.
/// Chunk `i` of the samples draws from ChaCha stream `i`.
pub fn s_estimate_monte_carlo(n: u32, samples: u64, seed: u64) -> Result<McEstimate, SboxError> {
    if n == 0 || n > MAX_VARS {
        return Err(SboxError::BadArity(n));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut p: Vec<u8> = (0..1u16 << n).map(|v| v as u8).collect();
            (0..count)
                .filter(|_| {
                    p.shuffle(&mut rng);
                    let f = VectorBooleanFn { n, outputs: p.clone() };
                    (1..=n).all(|k| f.coordinate(k).depends_on_all())
                })
                .count() as u64
        })
        .sum();
    let fraction = if samples == 0 {
        0.0
    } else {
        hits as f64 / samples as f64
    };
    let half = 1.96 * (fraction * (1.0 - fraction) / samples.max(1) as f64).sqrt();
    Ok(McEstimate {
        hits,
        samples,
        fraction,
        ci_low: fraction - half,
        ci_high: fraction + half,
    })
}

/// Ratio of an exact count to `(2ⁿ)!` as a float.
pub fn ratio_to_total(count: &BigUint, n: u32) -> f64 {
    let total = factorial(1u64 << n);
    // scale to keep 15 significant digits
    let scaled = count * BigUint::from(10u64).pow(15) / total;
    scaled.to_f64().unwrap_or(f64::NAN) / 1e15
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn dependence_examples() {
        let f = BooleanFn::from_fn(3, |x| (x & 1 == 1 && x & 2 == 2) ^ (x & 4 == 4)).unwrap();
        assert!((1..=3).all(|j| essentially_depends(&f, j).unwrap()));
        let g = BooleanFn::from_fn(3, |x| (x & 1 == 1 && x & 2 == 2) ^ (x & 2 == 2) ^ true).unwrap();
        assert_eq!(
            (1..=3).map(|j| essentially_depends(&g, j).unwrap()).collect::<Vec<_>>(),
            vec![true, true, false]
        );
        let zero = BooleanFn::new(3, 0).unwrap();
        assert!((1..=3).all(|j| !essentially_depends(&zero, j).unwrap()));
        assert_eq!(essentially_depends(&zero, 4), Err(SboxError::BadVariable(4)));
    }

    #[test]
    fn dependence_matches_anf() {
        for n in 1..=4u32 {
            for t in 0..1u64 << (1u32 << n) {
                let f = BooleanFn::new(n, t).unwrap();
                let anf = f.anf();
                for j in 1..=n {
                    let in_anf = (0..1u64 << n).any(|u| anf >> u & 1 == 1 && u >> (j - 1) & 1 == 1);
                    assert_eq!(essentially_depends(&f, j).unwrap(), in_anf);
                }
            }
        }
    }

    #[test]
    fn permutation_checks() {
        let id = VectorBooleanFn::new(3, (0..8).collect()).unwrap();
        assert!(is_permutation(&id));
        assert!(!is_permutation(&VectorBooleanFn::new(3, vec![5; 8]).unwrap()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let mut p: Vec<u8> = (0..16).collect();
            p.shuffle(&mut rng);
            assert!(is_permutation(&VectorBooleanFn::new(4, p).unwrap()));
        }
    }

    #[test]
    fn permutation_iff_components_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3u32, 4] {
            let size = 1u8 << n;
            let mut perms = 0;
            for i in 0..10_000 {
                let out: Vec<u8> = if i % 2 == 0 {
                    let mut p: Vec<u8> = (0..size).collect();
                    p.shuffle(&mut rng);
                    // perturb some of them so both outcomes occur
                    if i % 4 == 0 {
                        p[0] = p[1];
                    }
                    p
                } else {
                    (0..size).map(|_| rng.gen_range(0..size)).collect()
                };
                let f = VectorBooleanFn::new(n, out).unwrap();
                assert_eq!(is_permutation(&f), all_components_balanced(&f));
                perms += is_permutation(&f) as u32;
            }
            assert!(perms > 1000);
        }
    }

    #[test]
    fn exact_small_counts() {
        assert_eq!(count_super_dependent_exact(1).unwrap(), 2);
        assert_eq!(count_super_dependent_exact(2).unwrap(), 0);
        let s3 = count_super_dependent_exact(3).unwrap();
        assert_eq!(s3, 24576);
        assert_eq!(s3 % 8, 0);
        assert_eq!(s3 % 48, 0);
        assert_eq!(count_super_dependent_exact(4), Err(SboxError::TooLarge(4)));
    }

    #[test]
    fn h_recurrence() {
        let expect = [0u64, 2, 2, 58, 12618];
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(h_count(k as u32).unwrap(), BigUint::from(e));
        }
        for k in 0..=4 {
            assert_eq!(BigUint::from(h_count_bruteforce(k).unwrap()), h_count(k).unwrap());
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(a1_size(3).unwrap(), BigUint::from(6912u32));
        assert_eq!(s_bounds(3).unwrap(), (BigUint::from(19584u32), BigUint::from(33408u32)));
        let (lo, hi) = s_bounds(4).unwrap();
        let s4 = BigUint::from(19_344_102_217_728u64);
        assert!(lo <= s4 && s4 <= hi);
        let (lo, hi) = s_bounds(1).unwrap();
        assert!(lo <= BigUint::from(2u32) && BigUint::from(2u32) <= hi);
        assert_eq!(d_trivial_lower_bound(3).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn monte_carlo_n3() {
        let est = s_estimate_monte_carlo(3, 100_000, 5).unwrap();
        let target = 24576.0 / 40320.0;
        assert!((est.fraction - target).abs() < 0.01, "{est:?}");
        assert_eq!(est, s_estimate_monte_carlo(3, 100_000, 5).unwrap());
    }

    fn transform(f: &VectorBooleanFn, perm: &[u32], c: u8) -> VectorBooleanFn {
        let outputs = (0..f.outputs.len())
            .map(|x| {
                let y = f.outputs[x ^ c as usize];
                perm.iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &src)| acc | ((y >> src) & 1) << i)
            })
            .collect();
        VectorBooleanFn { n: f.n, outputs }
    }

    #[test]
    fn symmetry_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3u32, 4] {
            let mut found = 0;
            while found < 20 {
                let mut p: Vec<u8> = (0..1u8 << n).collect();
                p.shuffle(&mut rng);
                let f = VectorBooleanFn::new(n, p).unwrap();
                if !is_super_dependent(&f) {
                    continue;
                }
                found += 1;
                let mut perm: Vec<u32> = (0..n).collect();
                perm.shuffle(&mut rng);
                let c = rng.gen_range(0..1u8 << n);
                assert!(is_super_dependent(&transform(&f, &perm, c)));
            }
        }
    }
}
