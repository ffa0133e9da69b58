use super::ClassicalError;
use crate::numtheory::{integer_cubic_roots, is_prime};
use std::collections::HashMap;

/// Number of splits `n` such that `total − n = target·(n + 1)`, if any.
/// Each split destroys one coin as commission and adds one wallet.
pub fn wallet_feasible(total: u64, target: u64) -> Option<u64> {
    assert!(total >= 1 && target >= 1);
    if total < target {
        return None;
    }
    let rest = total - target;
    (rest % (target + 1) == 0).then_some(rest / (target + 1))
}

/// Replays `splits` splits greedily, each time carving a `target`-coin
/// wallet off the largest one. Returns the final wallet contents, or
/// `None` when some split would need a wallet that is too small.
pub fn simulate_wallet_splits(total: u64, target: u64, splits: u64) -> Option<Vec<u64>> {
    let mut wallets = vec![total];
    for _ in 0..splits {
        let (idx, &largest) = wallets.iter().enumerate().max_by_key(|&(_, w)| *w)?;
        // one coin of commission, one new wallet of `target`
        if largest < target + 1 {
            return None;
        }
        wallets[idx] = largest - target - 1;
        wallets.push(target);
    }
    wallets.sort_unstable();
    Some(wallets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HiddenPrimes {
    pub primes: [i64; 3],
    pub quotient: i64,
}

/// The three primes hidden in `x³ − 342x² + 1691x − 2022`.
pub fn hidden_primes() -> Result<HiddenPrimes, ClassicalError> {
    hidden_primes_from(-342, 1691, -2022)
}

/// Roots of `x³ + a2·x² + a1·x + a0` that are three distinct primes whose
/// (smallest + largest) / middle is again a prime.
pub fn hidden_primes_from(a2: i64, a1: i64, a0: i64) -> Result<HiddenPrimes, ClassicalError> {
    let roots = integer_cubic_roots(a2, a1, a0);
    let [lo, mid, hi] = <[i64; 3]>::try_from(roots.as_slice())
        .map_err(|_| ClassicalError::CheckFailed(format!("expected three distinct integer roots, got {roots:?}")))?;
    for r in [lo, mid, hi] {
        if r < 2 || !is_prime(r as u64) {
            return Err(ClassicalError::CheckFailed(format!("root {r} is not prime")));
        }
    }
    if (lo + hi) % mid != 0 {
        return Err(ClassicalError::CheckFailed(format!(
            "{mid} does not divide {lo} + {hi}"
        )));
    }
    let quotient = (lo + hi) / mid;
    if !is_prime(quotient as u64) {
        return Err(ClassicalError::CheckFailed(format!("quotient {quotient} is not prime")));
    }
    Ok(HiddenPrimes {
        primes: [lo, mid, hi],
        quotient,
    })
}

fn digits(code: u32) -> Vec<u32> {
    code.to_string().chars().map(|c| c.to_digit(10).unwrap()).collect()
}

fn digit_sum(code: u32) -> u32 {
    digits(code).iter().sum()
}

fn product_digit_sum(code: u32) -> u32 {
    digit_sum(digits(code).iter().product())
}

/// Four distinct digits from 1..=9, strictly increasing, all of one parity.
pub fn pin_candidates() -> Vec<u32> {
    let mut out = Vec::new();
    for a in 1..=9u32 {
        for b in a + 1..=9 {
            for c in b + 1..=9 {
                for d in c + 1..=9 {
                    let p = a % 2;
                    if b % 2 == p && c % 2 == p && d % 2 == p {
                        out.push(a * 1000 + b * 100 + c * 10 + d);
                    }
                }
            }
        }
    }
    out
}

/// Codes whose hint value is shared with at least one other code in `pool`.
fn ambiguous_under(pool: &[u32], hint: impl Fn(u32) -> u32) -> Vec<u32> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &c in pool {
        *counts.entry(hint(c)).or_default() += 1;
    }
    pool.iter().copied().filter(|&c| counts[&hint(c)] >= 2).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinTrace {
    pub candidates: Vec<u32>,
    /// Codes Bob could not pin down from the digit sum.
    pub digit_sum_ambiguous: Vec<u32>,
    /// Codes Charlie could not pin down from the digit sum of the product.
    pub product_sum_ambiguous: Vec<u32>,
    pub survivors: Vec<u32>,
}

/// Both hints are given face to face, so each listener's ambiguity is
/// judged over the full candidate set; the eavesdropper intersects them.
pub fn pin_solve_trace() -> PinTrace {
    let candidates = pin_candidates();
    let digit_sum_ambiguous = ambiguous_under(&candidates, digit_sum);
    let product_sum_ambiguous = ambiguous_under(&candidates, product_digit_sum);
    let survivors = digit_sum_ambiguous
        .iter()
        .copied()
        .filter(|c| product_sum_ambiguous.contains(c))
        .collect();
    PinTrace {
        candidates,
        digit_sum_ambiguous,
        product_sum_ambiguous,
        survivors,
    }
}

pub fn pin_solve() -> Result<u32, ClassicalError> {
    let trace = pin_solve_trace();
    match trace.survivors.as_slice() {
        [pin] => Ok(*pin),
        other => Err(ClassicalError::AmbiguousPin(other.len())),
    }
}
