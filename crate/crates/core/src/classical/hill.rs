//! 2×2 Hill cipher over Z₃₀ and known-plaintext recovery through the mod-15
//! reduction when the known ciphertext block is singular mod 30.

use super::{Alphabet, ClassicalError};
use crate::numtheory::{gcd, mod_inverse, ResidueInt};

pub const HILL_MODULUS: u64 = 30;
const HALF_MODULUS: u64 = 15;

/// A 2×2 matrix with entries reduced modulo whatever the caller works in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2(pub [[u64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn reduce(&self, m: u64) -> Mat2 {
        let a = self.0;
        Mat2([[a[0][0] % m, a[0][1] % m], [a[1][0] % m, a[1][1] % m]])
    }

    pub fn mul_mod(&self, other: &Mat2, m: u64) -> Mat2 {
        let (a, b) = (self.0, other.0);
        let mut out = [[0u64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % m;
            }
        }
        Mat2(out)
    }

    pub fn add_mod(&self, other: &Mat2, m: u64) -> Mat2 {
        let (a, b) = (self.0, other.0);
        Mat2([
            [(a[0][0] + b[0][0]) % m, (a[0][1] + b[0][1]) % m],
            [(a[1][0] + b[1][0]) % m, (a[1][1] + b[1][1]) % m],
        ])
    }

    pub fn scale_mod(&self, k: u64, m: u64) -> Mat2 {
        let a = self.0;
        Mat2([[a[0][0] * k % m, a[0][1] * k % m], [a[1][0] * k % m, a[1][1] * k % m]])
    }

    pub fn det_mod(&self, m: u64) -> u64 {
        let a = self.reduce(m).0;
        (a[0][0] * a[1][1] + m * m - a[0][1] * a[1][0] % m) % m
    }

    pub fn is_invertible_mod(&self, m: u64) -> bool {
        gcd(self.det_mod(m), m) == 1
    }

    pub fn inverse_mod(&self, m: u64) -> Option<Mat2> {
        let det = self.det_mod(m);
        let inv = mod_inverse(ResidueInt::new(det, m).ok()?).ok()?.value();
        let a = self.reduce(m).0;
        let adj = Mat2([[a[1][1], (m - a[0][1]) % m], [(m - a[1][0]) % m, a[0][0]]]);
        Some(adj.scale_mod(inv, m))
    }

    /// Column-major packing: the first two symbols form column one.
    pub fn from_block(codes: &[usize]) -> Mat2 {
        let c: Vec<u64> = codes.iter().map(|&x| x as u64).collect();
        Mat2([[c[0], c[2]], [c[1], c[3]]])
    }

    pub fn to_block(&self) -> [usize; 4] {
        let a = self.0;
        [a[0][0] as usize, a[1][0] as usize, a[0][1] as usize, a[1][1] as usize]
    }
}

fn apply_blocks(text: &str, key: &Mat2, alphabet: &Alphabet) -> Result<String, ClassicalError> {
    let codes = alphabet.encode(text)?;
    if codes.len() % 4 != 0 {
        return Err(ClassicalError::BadLength(codes.len()));
    }
    let m = alphabet.len() as u64;
    let mut out = Vec::with_capacity(codes.len());
    for block in codes.chunks(4) {
        out.extend(key.mul_mod(&Mat2::from_block(block), m).to_block());
    }
    Ok(alphabet.decode(&out))
}

pub fn hill_encrypt(plain: &str, key: &Mat2, alphabet: &Alphabet) -> Result<String, ClassicalError> {
    apply_blocks(plain, key, alphabet)
}

/// Applies a decryption matrix directly (no inversion).
pub fn hill_decrypt(cipher: &str, decrypt: &Mat2, alphabet: &Alphabet) -> Result<String, ClassicalError> {
    apply_blocks(cipher, decrypt, alphabet)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HillCandidate {
    /// Binary matrix added (times 15) to the mod-15 inverse.
    pub lift: Mat2,
    pub decrypt: Mat2,
    /// Whether the decryption matrix is a bijection mod 30.
    pub invertible: bool,
    pub plaintext: String,
}

/// Recovers every decryption matrix consistent with one known plaintext block.
pub fn hill_known_plaintext_recover(
    cipher: &str,
    block_index: usize,
    known_block: &str,
    alphabet: &Alphabet,
) -> Result<Vec<HillCandidate>, ClassicalError> {
    let m = HILL_MODULUS;
    if alphabet.len() as u64 != m {
        return Err(ClassicalError::BadAlphabet(format!("expected {m} symbols")));
    }
    let codes = alphabet.encode(cipher)?;
    if codes.len() % 4 != 0 || codes.len() < 4 * (block_index + 1) {
        return Err(ClassicalError::BadLength(codes.len()));
    }
    let known = alphabet.encode(known_block)?;
    if known.len() != 4 {
        return Err(ClassicalError::BadLength(known.len()));
    }
    let c3 = Mat2::from_block(&codes[4 * block_index..4 * block_index + 4]);
    let p3 = Mat2::from_block(&known);

    let c3_bar_inv = c3.inverse_mod(HALF_MODULUS).ok_or(ClassicalError::Mod15Singular)?;
    let base = p3.mul_mod(&c3_bar_inv, HALF_MODULUS);

    let mut out = Vec::new();
    for bits in 0u8..16 {
        let lift = Mat2([
            [(bits >> 3 & 1) as u64, (bits >> 2 & 1) as u64],
            [(bits >> 1 & 1) as u64, (bits & 1) as u64],
        ]);
        let d = base.add_mod(&lift.scale_mod(HALF_MODULUS, m), m);
        if d.mul_mod(&c3, m) != p3 {
            continue;
        }
        out.push(HillCandidate {
            lift,
            decrypt: d,
            invertible: d.is_invertible_mod(m),
            plaintext: hill_decrypt(cipher, &d, alphabet)?,
        });
    }
    if out.is_empty() {
        return Err(ClassicalError::KnownBlockInconsistent);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealignedCandidate {
    /// Index of the symbol removed to restore block alignment, if any.
    pub dropped_index: Option<usize>,
    pub ciphertext: String,
    pub candidates: Vec<HillCandidate>,
}

/// Like [`hill_known_plaintext_recover`], but when the ciphertext length is
/// one more than a multiple of four, tries removing each symbol in turn and
/// keeps every alignment for which recovery succeeds.
pub fn hill_recover_realigned(
    cipher: &str,
    block_index: usize,
    known_block: &str,
    alphabet: &Alphabet,
) -> Result<Vec<RealignedCandidate>, ClassicalError> {
    let chars: Vec<char> = cipher.chars().collect();
    match chars.len() % 4 {
        0 => Ok(vec![RealignedCandidate {
            dropped_index: None,
            ciphertext: cipher.to_string(),
            candidates: hill_known_plaintext_recover(cipher, block_index, known_block, alphabet)?,
        }]),
        1 => {
            alphabet.encode(cipher)?;
            let mut out = Vec::new();
            for drop in 0..chars.len() {
                let text: String = chars
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &c)| c)
                    .collect();
                if let Ok(candidates) = hill_known_plaintext_recover(&text, block_index, known_block, alphabet) {
                    out.push(RealignedCandidate {
                        dropped_index: Some(drop),
                        ciphertext: text,
                        candidates,
                    });
                }
            }
            if out.is_empty() {
                Err(ClassicalError::KnownBlockInconsistent)
            } else {
                Ok(out)
            }
        }
        _ => Err(ClassicalError::BadLength(chars.len())),
    }
}
