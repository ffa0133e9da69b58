//! Three-pass message transfer: Shamir's exponentiation version, the
//! generic version over caller-supplied ciphers, and the eavesdropper's
//! attack on translation ciphers.

use crate::numtheory::{gcd, is_prime, pow_mod, ResidueInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreePassError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("message {m} outside 2..={} for p = {p}", p.saturating_sub(2))]
    BadMessageRange { m: u64, p: u64 },
    #[error("exponent {c} is not invertible modulo {}", p - 1)]
    BadExponent { c: u64, p: u64 },
}

/// One side of Shamir's protocol: a pair of exponents inverse mod `p − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShamirParty {
    pub p: u64,
    pub encrypt_exp: u64,
    pub decrypt_exp: u64,
}

impl ShamirParty {
    pub fn new(p: u64, encrypt_exp: u64) -> Result<Self, ThreePassError> {
        if !is_prime(p) {
            return Err(ThreePassError::NotPrime(p));
        }
        let order = p - 1;
        let c = encrypt_exp % order;
        let bad = ThreePassError::BadExponent { c: encrypt_exp, p };
        if order < 2 || gcd(c, order) != 1 {
            return Err(bad);
        }
        let d = crate::numtheory::mod_inverse(ResidueInt::new(c, order).map_err(|_| bad.clone())?)
            .map_err(|_| bad)?
            .value();
        Ok(Self {
            p,
            encrypt_exp: c,
            decrypt_exp: d,
        })
    }

    /// Uniform exponent among the units of `Z_{p−1}` other than 1.
    pub fn random<R: Rng + ?Sized>(p: u64, rng: &mut R) -> Result<Self, ThreePassError> {
        if !is_prime(p) {
            return Err(ThreePassError::NotPrime(p));
        }
        if p < 5 {
            return Err(ThreePassError::BadExponent { c: 1, p });
        }
        loop {
            let c = rng.gen_range(2..p - 1);
            if gcd(c, p - 1) == 1 {
                return Self::new(p, c);
            }
        }
    }

    pub fn encrypt(&self, x: u64) -> u64 {
        pow_mod(x, self.encrypt_exp, self.p)
    }

    pub fn decrypt(&self, x: u64) -> u64 {
        pow_mod(x, self.decrypt_exp, self.p)
    }
}

/// The three values that cross the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transcript<T> {
    /// Alice → Bob: `Enc_A(m)`.
    pub x1: T,
    /// Bob → Alice: `Enc_B(x1)`.
    pub x2: T,
    /// Alice → Bob: `Dec_A(x2)`.
    pub x3: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShamirRun {
    pub alice: ShamirParty,
    pub bob: ShamirParty,
    pub transcript: Transcript<u64>,
    pub recovered: u64,
}

pub fn shamir_run(alice: ShamirParty, bob: ShamirParty, m: u64) -> Result<ShamirRun, ThreePassError> {
    let p = alice.p;
    if bob.p != p || m < 2 || m + 2 > p {
        return Err(ThreePassError::BadMessageRange { m, p });
    }
    let x1 = alice.encrypt(m);
    let x2 = bob.encrypt(x1);
    let x3 = alice.decrypt(x2);
    Ok(ShamirRun {
        alice,
        bob,
        transcript: Transcript { x1, x2, x3 },
        recovered: bob.decrypt(x3),
    })
}

/// Shamir's protocol with both parties' exponents drawn from `seed`.
pub fn shamir_roundtrip(p: u64, m: u64, seed: u64) -> Result<ShamirRun, ThreePassError> {
    if !is_prime(p) {
        return Err(ThreePassError::NotPrime(p));
    }
    if m < 2 || m + 2 > p {
        return Err(ThreePassError::BadMessageRange { m, p });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alice = ShamirParty::random(p, &mut rng)?;
    let bob = ShamirParty::random(p, &mut rng)?;
    shamir_run(alice, bob, m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericRun<T> {
    pub transcript: Transcript<T>,
    pub recovered: T,
    /// Whether Bob ended up with the original message. Ciphers that do not
    /// commute usually make this false.
    pub success: bool,
}

/// Runs the three passes with arbitrary keyed ciphers.
pub fn threepass_generic<T, EA, DA, EB, DB>(enc_a: EA, dec_a: DA, enc_b: EB, dec_b: DB, m: T) -> GenericRun<T>
where
    T: Clone + PartialEq,
    EA: Fn(&T) -> T,
    DA: Fn(&T) -> T,
    EB: Fn(&T) -> T,
    DB: Fn(&T) -> T,
{
    let x1 = enc_a(&m);
    let x2 = enc_b(&x1);
    let x3 = dec_a(&x2);
    let recovered = dec_b(&x3);
    GenericRun {
        success: recovered == m,
        transcript: Transcript { x1, x2, x3 },
        recovered,
    }
}

/// `x1 ∘ x3 ∘ x2⁻¹` for a group operation `op` with inverse `inv`. When both
/// parties encrypt by translation in that group, this is the message.
pub fn translation_attack<T>(t: &Transcript<T>, op: impl Fn(&T, &T) -> T, inv: impl Fn(&T) -> T) -> T {
    op(&op(&t.x1, &t.x3), &inv(&t.x2))
}

/// [`translation_attack`] for XOR, where every element is its own inverse.
pub fn xor_eavesdrop_attack(t: &Transcript<u64>) -> u64 {
    t.x1 ^ t.x3 ^ t.x2
}

/// [`translation_attack`] for addition modulo 2³².
pub fn add_eavesdrop_attack(t: &Transcript<u32>) -> u32 {
    translation_attack(t, |a, b| a.wrapping_add(*b), |a| a.wrapping_neg())
}

/// The same formula with multiplication mod `p` applied to a Shamir
/// transcript. Exponentiation is not a translation, so this generally
/// returns garbage.
pub fn multiplicative_attack(t: &Transcript<u64>, p: u64) -> u64 {
    translation_attack(
        t,
        |a, b| crate::numtheory::mul_mod(*a, *b, p),
        |a| pow_mod(*a, p - 2, p),
    )
}

/// A fixed random byte permutation and its inverse: a stand-in block cipher
/// with an 8-bit block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteTable {
    forward: [u8; 256],
    inverse: [u8; 256],
}

impl ByteTable {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut forward: [u8; 256] = std::array::from_fn(|i| i as u8);
        forward.shuffle(rng);
        let mut inverse = [0u8; 256];
        for (i, &f) in forward.iter().enumerate() {
            inverse[f as usize] = i as u8;
        }
        Self { forward, inverse }
    }

    pub fn encrypt(&self, x: u8) -> u8 {
        self.forward[x as usize]
    }

    pub fn decrypt(&self, x: u8) -> u8 {
        self.inverse[x as usize]
    }

    /// True if the table commutes with XOR by `key` on every byte.
    pub fn commutes_with_xor(&self, key: u8) -> bool {
        (0..=255u8).all(|x| self.encrypt(x ^ key) == self.encrypt(x) ^ key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, proptest};

    #[test]
    fn textbook_instance() {
        let alice = ShamirParty::new(23, 5).unwrap();
        let bob = ShamirParty::new(23, 7).unwrap();
        assert_eq!(alice.decrypt_exp, 9);
        assert_eq!(bob.decrypt_exp, 19);
        let run = shamir_run(alice, bob, 4).unwrap();
        // 4^5 ≡ 12, 12^7 ≡ 16, 16^9 ≡ 8, 8^19 ≡ 4 (mod 23)
        assert_eq!(run.transcript, Transcript { x1: 12, x2: 16, x3: 8 });
        assert_eq!(run.recovered, 4);
    }

    #[test]
    fn boundaries_and_errors() {
        assert_eq!(shamir_roundtrip(5, 2, 0).unwrap().recovered, 2);
        assert_eq!(shamir_roundtrip(5, 3, 0).unwrap().recovered, 3);
        assert_eq!(shamir_roundtrip(21, 4, 0), Err(ThreePassError::NotPrime(21)));
        assert_eq!(
            shamir_roundtrip(23, 1, 0),
            Err(ThreePassError::BadMessageRange { m: 1, p: 23 })
        );
        assert_eq!(
            shamir_roundtrip(23, 22, 0),
            Err(ThreePassError::BadMessageRange { m: 22, p: 23 })
        );
        assert!(matches!(
            ShamirParty::new(23, 11),
            Err(ThreePassError::BadExponent { .. })
        ));
    }

    #[test]
    fn exhaustive_small_primes() {
        for p in (5..=101u64).filter(|&p| is_prime(p)) {
            for m in 2..=p - 2 {
                assert_eq!(shamir_roundtrip(p, m, p * 1000 + m).unwrap().recovered, m);
            }
        }
    }

    #[test]
    fn random_large_instances() {
        let primes = [1_000_003u64, 998_244_353, 4_294_967_291, 18_446_744_073_709_551_557];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..1000u64 {
            let p = primes[i as usize % primes.len()];
            let m = rng.gen_range(2..p - 1);
            assert_eq!(shamir_roundtrip(p, m, i).unwrap().recovered, m);
        }
    }

    #[test]
    fn generic_protocol() {
        let a = ShamirParty::new(101, 3).unwrap();
        let b = ShamirParty::new(101, 7).unwrap();
        let run = threepass_generic(
            |x| a.encrypt(*x),
            |x| a.decrypt(*x),
            |x| b.encrypt(*x),
            |x| b.decrypt(*x),
            42u64,
        );
        assert!(run.success);
        assert_eq!(run.transcript, shamir_run(a, b, 42).unwrap().transcript);

        let (ka, kb) = (0x5au8, 0xc3u8);
        let run = threepass_generic(|x| x ^ ka, |x| x ^ ka, |x| x ^ kb, |x| x ^ kb, 0x17u8);
        assert!(run.success);

        let table = ByteTable::random(&mut ChaCha8Rng::seed_from_u64(3));
        assert!(!table.commutes_with_xor(kb));
        let failures = (0..=255u8)
            .filter(|&m| {
                !threepass_generic(|x| table.encrypt(*x), |x| table.decrypt(*x), |x| x ^ kb, |x| x ^ kb, m).success
            })
            .count();
        assert!(failures > 0);
    }

    #[test]
    fn attacks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let (ka, kb, m): (u64, u64, u64) = (rng.gen(), rng.gen(), rng.gen());
            let run = threepass_generic(|x| x ^ ka, |x| x ^ ka, |x| x ^ kb, |x| x ^ kb, m);
            assert_eq!(xor_eavesdrop_attack(&run.transcript), m);

            let (ka, kb, m): (u32, u32, u32) = (rng.gen(), rng.gen(), rng.gen());
            let run = threepass_generic(
                |x| x.wrapping_add(ka),
                |x| x.wrapping_sub(ka),
                |x| x.wrapping_add(kb),
                |x| x.wrapping_sub(kb),
                m,
            );
            assert_eq!(add_eavesdrop_attack(&run.transcript), m);
        }
        let p = 1_000_003;
        let misses = (0..200u64)
            .filter(|&i| {
                let m = 2 + i * 4999;
                let run = shamir_roundtrip(p, m, i).unwrap();
                multiplicative_attack(&run.transcript, p) != m
            })
            .count();
        assert_eq!(misses, 200);
    }

    proptest! {
        #[test]
        fn shamir_always_recovers(idx in 0usize..4, m_frac in 0.0f64..1.0, seed in any::<u64>()) {
            let p = [101u64, 65_537, 1_000_003, 4_294_967_291][idx];
            let m = 2 + ((p - 4) as f64 * m_frac) as u64;
            prop_assert_eq!(shamir_roundtrip(p, m, seed).unwrap().recovered, m);
        }
    }
}
