//! Substitution by a quadratic polynomial over Z₃₇ constrained by the
//! functional equation `f(x−y) − 2f(x)f(y) + f(1+xy) ≡ 1`.

use super::{Alphabet, ClassicalError};
use crate::numtheory::{mod_inverse, sqrt_mod_prime, ResidueInt};

pub const QUAD_MODULUS: u64 = 37;

/// Coefficients of `f(x) = a·x² + b·x + c (mod 37)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadCipherKey {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl QuadCipherKey {
    /// Accepts only keys satisfying the functional equation for every pair.
    pub fn new(a: u64, b: u64, c: u64) -> Result<Self, ClassicalError> {
        let key = Self {
            a: a % QUAD_MODULUS,
            b: b % QUAD_MODULUS,
            c: c % QUAD_MODULUS,
        };
        if key.satisfies_equation() {
            Ok(key)
        } else {
            Err(ClassicalError::NoSolution)
        }
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = QUAD_MODULUS;
        let x = x % p;
        (self.a * x % p * x + self.b * x + self.c) % p
    }

    pub fn is_constant(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn satisfies_equation(&self) -> bool {
        let p = QUAD_MODULUS;
        (0..p).all(|x| {
            (0..p).all(|y| {
                let lhs =
                    self.eval((x + p - y) % p) + 2 * (p - 1) * self.eval(x) % p * self.eval(y) + self.eval(1 + x * y);
                lhs % p == 1
            })
        })
    }

    /// Every `x` with `f(x) = y`.
    pub fn preimages(&self, y: u64) -> Result<Vec<u64>, ClassicalError> {
        let p = QUAD_MODULUS;
        let y = y % p;
        if self.a == 0 {
            if self.b == 0 {
                return Ok(if self.c == y { (0..p).collect() } else { Vec::new() });
            }
            let inv_b = mod_inverse(ResidueInt::new(self.b, p)?)?.value();
            return Ok(vec![(y + p - self.c) % p * inv_b % p]);
        }
        // a·x² + b·x + (c − y) = 0  ⇒  x = (−b ± √disc) / 2a
        let disc = (self.b * self.b + 4 * self.a % p * ((y + p - self.c) % p)) % p;
        let inv_2a = mod_inverse(ResidueInt::new(2 * self.a, p)?)?.value();
        let mut roots: Vec<u64> = sqrt_mod_prime(ResidueInt::new(disc, p)?, p)?
            .into_iter()
            .map(|r| (r.value() + p - self.b) % p * inv_2a % p)
            .collect();
        roots.sort_unstable();
        roots.dedup();
        Ok(roots)
    }
}

/// Searches all 37³ coefficient triples; exactly one non-constant key must
/// satisfy the functional equation.
pub fn quad_key_recover() -> Result<QuadCipherKey, ClassicalError> {
    let p = QUAD_MODULUS;
    let mut found = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let key = QuadCipherKey { a, b, c };
                if !key.is_constant() && key.satisfies_equation() {
                    found.push(key);
                }
            }
        }
    }
    match found.len() {
        0 => Err(ClassicalError::NoSolution),
        1 => Ok(found[0]),
        n => Err(ClassicalError::AmbiguousSolution(n)),
    }
}

pub fn quad_encrypt(plain: &str, key: &QuadCipherKey, alphabet: &Alphabet) -> Result<String, ClassicalError> {
    let codes = alphabet.encode(plain)?;
    let out: Vec<usize> = codes.into_iter().map(|x| key.eval(x as u64) as usize).collect();
    Ok(alphabet.decode(&out))
}

/// Per-position plaintext options for each ciphertext symbol.
pub fn quad_decrypt_options(
    cipher: &str,
    key: &QuadCipherKey,
    alphabet: &Alphabet,
) -> Result<Vec<Vec<char>>, ClassicalError> {
    cipher
        .chars()
        .map(|ch| {
            let y = alphabet.code(ch)? as u64;
            let pre = key.preimages(y)?;
            let opts: Vec<char> = pre
                .into_iter()
                .filter(|&x| (x as usize) < alphabet.len())
                .map(|x| alphabet.symbol(x as usize))
                .collect();
            if opts.is_empty() {
                Err(ClassicalError::NonResidue(ch))
            } else {
                Ok(opts)
            }
        })
        .collect()
}

/// All candidate plaintexts (the cartesian product of per-symbol options),
/// optionally sorted by descending score.
pub fn quad_decrypt(
    cipher: &str,
    key: &QuadCipherKey,
    alphabet: &Alphabet,
    scorer: Option<&dyn Fn(&str) -> i64>,
) -> Result<Vec<String>, ClassicalError> {
    let options = quad_decrypt_options(cipher, key, alphabet)?;
    let mut out = vec![String::new()];
    for opts in &options {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&c| {
                    let mut s = prefix.clone();
                    s.push(c);
                    s
                })
            })
            .collect();
    }
    if let Some(score) = scorer {
        out.sort_by_cached_key(|s| std::cmp::Reverse(score(s)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn puzzle_key() -> QuadCipherKey {
        QuadCipherKey::new(19, 0, 19).unwrap()
    }

    #[test]
    fn key_recovery() {
        let key = quad_key_recover().unwrap();
        assert_eq!(key, QuadCipherKey { a: 19, b: 0, c: 19 });
        assert_eq!(key.eval(0), 19);
        assert_eq!(key.eval(1), 1);
        assert!(key.satisfies_equation());
    }

    #[test]
    fn rejects_non_solutions() {
        assert_eq!(QuadCipherKey::new(1, 0, 0), Err(ClassicalError::NoSolution));
    }

    #[test]
    fn decrypt_examples() {
        let ab = Alphabet::latin37();
        let key = puzzle_key();
        let all = quad_decrypt("L78V8LC7GBEYEE", &key, &ab, None).unwrap();
        assert!(all.contains(&"NSUCRYPTO 2022".to_string()));
        assert_eq!(quad_encrypt("A", &key, &ab).unwrap(), "T");
        assert!(quad_decrypt("T", &key, &ab, None).unwrap().contains(&"A".to_string()));
        assert_eq!(quad_decrypt("", &key, &ab, None).unwrap(), vec![String::new()]);
        assert!(matches!(
            quad_decrypt("a", &key, &ab, None),
            Err(ClassicalError::InvalidSymbol('a'))
        ));
    }

    #[test]
    fn non_residue_symbol_is_reported() {
        let ab = Alphabet::latin37();
        let key = puzzle_key();
        let image: Vec<u64> = (0..37).map(|x| key.eval(x)).collect();
        let missing = (0..37u64).find(|y| !image.contains(y)).unwrap();
        let ch = ab.symbol(missing as usize);
        assert_eq!(
            quad_decrypt(&ch.to_string(), &key, &ab, None),
            Err(ClassicalError::NonResidue(ch))
        );
    }

    #[test]
    fn scorer_orders_candidates() {
        let ab = Alphabet::latin37();
        let key = puzzle_key();
        let score = |s: &str| s.chars().filter(|c| c.is_ascii_alphabetic() || *c == ' ').count() as i64;
        let ranked = quad_decrypt("L78V8LC7GBEYEE", &key, &ab, Some(&score)).unwrap();
        let first = score(&ranked[0]);
        assert!(ranked.iter().all(|s| score(s) <= first));
    }

    proptest! {
        #[test]
        fn decrypt_contains_plaintext(codes in proptest::collection::vec(0usize..37, 0..10)) {
            let ab = Alphabet::latin37();
            let key = puzzle_key();
            let plain = ab.decode(&codes);
            let cipher = quad_encrypt(&plain, &key, &ab).unwrap();
            let options = quad_decrypt_options(&cipher, &key, &ab).unwrap();
            for (c, opts) in plain.chars().zip(&options) {
                prop_assert!(opts.contains(&c));
            }
            if codes.len() <= 6 {
                prop_assert!(quad_decrypt(&cipher, &key, &ab, None).unwrap().contains(&plain));
            }
        }
    }
}
