//! Exact integer and modular arithmetic shared by the solver modules.
//!
//! Word-sized values are reduced through `u128` intermediates, so no
//! product overflows before reduction. Large-modulus work (the e-coin
//! schemes) goes through [`num_bigint::BigUint`].

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u64, u64),
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("product of moduli overflows 64 bits")]
    Overflow,
    #[error("residues have different moduli {0} and {1}")]
    ModulusMismatch(u64, u64),
}

/// An integer modulo `modulus`, always kept in `0..modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueInt {
    value: u64,
    modulus: u64,
}

impl ResidueInt {
    pub fn new(value: u64, modulus: u64) -> Result<Self, NumError> {
        if modulus < 2 {
            return Err(NumError::BadModulus(modulus));
        }
        Ok(Self {
            value: value % modulus,
            modulus,
        })
    }

    /// Reduces a signed integer into `0..modulus`.
    pub fn from_i128(value: i128, modulus: u64) -> Result<Self, NumError> {
        if modulus < 2 {
            return Err(NumError::BadModulus(modulus));
        }
        let v = value.rem_euclid(modulus as i128) as u64;
        Ok(Self { value: v, modulus })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    fn same(self, other: Self) -> Result<(), NumError> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(NumError::ModulusMismatch(self.modulus, other.modulus))
        }
    }

    pub fn add(self, other: Self) -> Result<Self, NumError> {
        self.same(other)?;
        Ok(Self {
            value: ((self.value as u128 + other.value as u128) % self.modulus as u128) as u64,
            modulus: self.modulus,
        })
    }

    pub fn sub(self, other: Self) -> Result<Self, NumError> {
        self.same(other)?;
        Ok(Self {
            value: ((self.value as u128 + self.modulus as u128 - other.value as u128) % self.modulus as u128) as u64,
            modulus: self.modulus,
        })
    }

    pub fn mul(self, other: Self) -> Result<Self, NumError> {
        self.same(other)?;
        Ok(Self {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn neg(self) -> Self {
        Self {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }

    pub fn pow(self, exp: u64) -> Self {
        Self {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inverse(self) -> Result<Self, NumError> {
        mod_inverse(self)
    }
}

impl fmt::Display for ResidueInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Extended Euclid on signed 128-bit values: returns `(g, x, y)` with `a*x + b*y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Möbius function by trial factorisation.
pub fn moebius(n: u64) -> i8 {
    assert!(n >= 1, "moebius is defined on positive integers");
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// A set of congruences `x ≡ r_i (mod m_i)` with pairwise-coprime moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtSystem {
    residues: Vec<(u64, u64)>,
}

impl CrtSystem {
    pub fn new(residues: Vec<(u64, u64)>) -> Result<Self, NumError> {
        if residues.is_empty() {
            return Err(NumError::BadModulus(1));
        }
        for &(_, m) in &residues {
            if m < 2 {
                return Err(NumError::BadModulus(m));
            }
        }
        for (i, &(_, a)) in residues.iter().enumerate() {
            for &(_, b) in &residues[i + 1..] {
                if gcd(a, b) != 1 {
                    return Err(NumError::NonCoprimeModuli(a, b));
                }
            }
        }
        Ok(Self { residues })
    }

    pub fn residues(&self) -> &[(u64, u64)] {
        &self.residues
    }
}

/// Solves the system by incremental Garner-style combination.
pub fn crt_solve(sys: &CrtSystem) -> Result<ResidueInt, NumError> {
    let mut value: u64 = 0;
    let mut modulus: u64 = 1;
    for &(r, m) in sys.residues() {
        let r = r % m;
        // value + modulus * t ≡ r (mod m)
        let inv = mod_inverse(ResidueInt::new(modulus % m, m)?)?.value();
        let diff = (r as i128 - value as i128).rem_euclid(m as i128) as u64;
        let t = mul_mod(diff, inv, m);
        let new_modulus = modulus.checked_mul(m).ok_or(NumError::Overflow)?;
        value = ((value as u128 + modulus as u128 * t as u128) % new_modulus as u128) as u64;
        modulus = new_modulus;
    }
    ResidueInt::new(value, modulus)
}

pub fn mod_inverse(a: ResidueInt) -> Result<ResidueInt, NumError> {
    let (g, x, _) = ext_gcd(a.value as i128, a.modulus as i128);
    if g != 1 {
        return Err(NumError::NotInvertible {
            value: a.value,
            modulus: a.modulus,
        });
    }
    ResidueInt::from_i128(x, a.modulus)
}

/// Below this bound square roots are found by scanning the whole field.
const SQRT_SCAN_LIMIT: u64 = 1000;

/// All `x` with `x² ≡ a (mod p)`, ascending.
pub fn sqrt_mod_prime(a: ResidueInt, p: u64) -> Result<Vec<ResidueInt>, NumError> {
    if !is_prime(p) {
        return Err(NumError::NotPrime(p));
    }
    if a.modulus() != p {
        return Err(NumError::ModulusMismatch(a.modulus(), p));
    }
    let a_val = a.value();
    let roots: Vec<u64> = if p < SQRT_SCAN_LIMIT {
        (0..p).filter(|&x| mul_mod(x, x, p) == a_val).collect()
    } else {
        match tonelli_shanks(a_val, p) {
            None => Vec::new(),
            Some(0) => vec![0],
            Some(r) => {
                let mut v = vec![r, p - r];
                v.sort_unstable();
                v
            }
        }
    };
    roots.into_iter().map(|r| ResidueInt::new(r, p)).collect()
}

fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for every `u64`: trial division below 2³²,
/// Miller–Rabin with the first twelve prime bases above.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < (1u64 << 32) {
        if n < 4 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let mut d = 3u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Probabilistic Miller–Rabin for big integers with `rounds` random bases.
/// A composite passes with probability at most 4^(−rounds).
pub fn is_probable_prime<R: Rng + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'round: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'round;
            }
        }
        return false;
    }
    true
}

/// Modular inverse for big integers, `None` when not coprime.
pub fn big_mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a % m);
    let m_i = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_i);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&m_i).to_biguint()
}

/// Integer roots of the monic cubic `x³ + a2·x² + a1·x + a0`, ascending and
/// without repetition. Uses rational-root search over the divisors of the
/// lowest nonzero coefficient after factoring out powers of `x`.
pub fn integer_cubic_roots(a2: i64, a1: i64, a0: i64) -> Vec<i64> {
    let eval = |x: i64| -> BigInt {
        let x = BigInt::from(x);
        &x * &x * &x + BigInt::from(a2) * &x * &x + BigInt::from(a1) * &x + BigInt::from(a0)
    };
    let mut roots = Vec::new();
    // coefficients in ascending order of the deflated polynomial
    let coeffs = [a0, a1, a2, 1];
    let lowest = coeffs.iter().position(|&c| c != 0).unwrap_or(3);
    if lowest > 0 {
        roots.push(0);
    }
    let c = coeffs[lowest].unsigned_abs();
    if lowest < 3 {
        for d in divisors(c) {
            let d = d as i64;
            for cand in [d, -d] {
                if eval(cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(v: u64, m: u64) -> ResidueInt {
        ResidueInt::new(v, m).unwrap()
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(337), -1);
    }

    #[test]
    fn moebius_divisor_sums_vanish() {
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n).into_iter().map(|d| moebius(d) as i64).sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn crt_examples() {
        let sys = CrtSystem::new(vec![(0, 2), (0, 3), (0, 337)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), r(0, 2022));
        let sys = CrtSystem::new(vec![(1, 2), (1, 3), (1, 337)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), r(1, 2022));

        // oracle: scan the whole range
        let expected = (0..2022u64).find(|v| v % 2 == 1 && v % 3 == 2 && v % 337 == 5).unwrap();
        let sys = CrtSystem::new(vec![(1, 2), (2, 3), (5, 337)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap().value(), expected);
    }

    #[test]
    fn crt_rejects_shared_factor() {
        assert_eq!(
            CrtSystem::new(vec![(1, 4), (1, 6)]),
            Err(NumError::NonCoprimeModuli(4, 6))
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(r(1, 37)).unwrap(), r(1, 37));
        assert_eq!(mod_inverse(r(5, 22)).unwrap(), r(9, 22));
        assert_eq!(
            mod_inverse(r(4, 30)),
            Err(NumError::NotInvertible { value: 4, modulus: 30 })
        );
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_mod_prime(r(0, 37), 37).unwrap(), vec![r(0, 37)]);
        assert_eq!(sqrt_mod_prime(r(1, 37), 37).unwrap(), vec![r(1, 37), r(36, 37)]);
        let oracle: Vec<u64> = (0..37).filter(|x| x * x % 37 == 21).collect();
        let got: Vec<u64> = sqrt_mod_prime(r(21, 37), 37)
            .unwrap()
            .into_iter()
            .map(|x| x.value())
            .collect();
        assert_eq!(got, oracle);
        assert!(matches!(sqrt_mod_prime(r(1, 21), 21), Err(NumError::NotPrime(21))));
    }

    #[test]
    fn sqrt_agrees_with_squaring_below_200() {
        for p in (2..200).filter(|&p| is_prime(p)) {
            for a in 0..p {
                let oracle: Vec<u64> = (0..p).filter(|x| x * x % p == a).collect();
                let got: Vec<u64> = sqrt_mod_prime(r(a, p), p)
                    .unwrap()
                    .into_iter()
                    .map(|x| x.value())
                    .collect();
                assert_eq!(got, oracle, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn tonelli_shanks_large_prime() {
        let p = 1_000_000_007u64;
        for a in [2u64, 5, 12345, 999_999_999] {
            let roots = sqrt_mod_prime(r(a, p), p).unwrap();
            for x in &roots {
                assert_eq!(mul_mod(x.value(), x.value(), p), a);
            }
            let is_qr = pow_mod(a, (p - 1) / 2, p) == 1;
            assert_eq!(roots.len(), if is_qr { 2 } else { 0 });
        }
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(113));
        assert!(is_prime(337));
        assert!(!is_prime(1));
        assert!(!is_prime(2022));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(18_446_744_073_709_551_615));
    }

    #[test]
    fn primality_matches_sieve() {
        let limit = 5000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                for j in (i * i..limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (n, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(n as u64), p, "{n}");
        }
    }

    #[test]
    fn big_probable_prime() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        // 2^127 - 1 is a Mersenne prime
        let m127 = (BigUint::one() << 127u32) - BigUint::one();
        assert!(is_probable_prime(&m127, 40, &mut rng));
        let composite = &m127 * BigUint::from(3u32);
        assert!(!is_probable_prime(&composite, 40, &mut rng));
    }

    #[test]
    fn cubic_examples() {
        assert_eq!(integer_cubic_roots(-342, 1691, -2022), vec![2, 3, 337]);
        assert_eq!(integer_cubic_roots(0, 0, 0), vec![0]);
        assert_eq!(integer_cubic_roots(-6, 11, -6), vec![1, 2, 3]);
        assert_eq!(integer_cubic_roots(0, 0, 1), vec![-1]);
        assert_eq!(integer_cubic_roots(0, 1, 0), vec![0]);
    }

    proptest! {
        #[test]
        fn crt_round_trip(v in 0u64..(64 * 3 * 337 * 101)) {
            let moduli = [64u64, 3, 337, 101];
            let sys = CrtSystem::new(moduli.iter().map(|&m| (v % m, m)).collect()).unwrap();
            prop_assert_eq!(crt_solve(&sys).unwrap().value(), v);
        }

        #[test]
        fn inverse_multiplies_to_one(a in 0u64..10_000, m in 2u64..10_000) {
            if let Ok(inv) = mod_inverse(r(a, m)) {
                prop_assert_eq!(inv.mul(r(a, m)).unwrap().value(), 1 % m);
            } else {
                prop_assert!(gcd(a % m, m) != 1);
            }
        }

        #[test]
        fn cubic_roots_are_exact(r1 in -500i64..500, r2 in -500i64..500, r3 in -500i64..500) {
            // (x - r1)(x - r2)(x - r3)
            let a2 = -(r1 + r2 + r3);
            let a1 = r1 * r2 + r1 * r3 + r2 * r3;
            let a0 = -(r1 * r2 * r3);
            let roots = integer_cubic_roots(a2, a1, a0);
            for &x in &roots {
                let x = BigInt::from(x);
                let v = &x * &x * &x + BigInt::from(a2) * &x * &x + BigInt::from(a1) * &x + BigInt::from(a0);
                prop_assert!(v.is_zero());
            }
            let mut expected = vec![r1, r2, r3];
            expected.sort_unstable();
            expected.dedup();
            prop_assert_eq!(roots, expected);
        }
    }
}
