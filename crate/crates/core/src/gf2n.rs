//! Binary extension fields GF(2ⁿ), n ≤ 24, and the counting of elements
//! outside every proper subfield split by whether they lie in the image of
//! `x ↦ x² + x`.
//!
//! Elements are packed polynomial bitmasks; multiplication is carry-less
//! with reduction by a fixed irreducible polynomial (the numerically
//! smallest irreducible of each degree).

use crate::numtheory::{divisors, moebius};
use thiserror::Error;

pub const MAX_DEGREE: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree must be in 1..={MAX_DEGREE}, got {0}")]
    BadDegree(u32),
    #[error("polynomial {poly:#x} is not an irreducible polynomial of degree {n}")]
    Reducible { n: u32, poly: u32 },
    #[error("value {bits:#x} does not fit in GF(2^{n})")]
    OutOfRange { n: u32, bits: u32 },
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility by trial division with every polynomial of degree
/// `1..=n/2`.
pub fn is_irreducible(poly: u32) -> bool {
    let n = poly_degree(poly);
    if n < 1 {
        return false;
    }
    for d in 1..=(n / 2) {
        for div in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_mod(poly, div) == 0 {
                return false;
            }
        }
    }
    true
}

/// Smallest irreducible polynomial of each degree 1..=24, as bitmasks.
pub const IRREDUCIBLE_TABLE: [u32; 24] = [
    0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021, 0x8003, 0x1002b,
    0x20009, 0x40009, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021, 0x100001b,
];

/// The field GF(2ⁿ) with a fixed reduction polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2nField {
    n: u32,
    poly: u32,
}

impl Gf2nField {
    /// Field with the default reduction polynomial for degree `n`.
    pub fn new(n: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&n) {
            return Err(FieldError::BadDegree(n));
        }
        Self::with_poly(n, IRREDUCIBLE_TABLE[n as usize - 1])
    }

    pub fn with_poly(n: u32, poly: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&n) {
            return Err(FieldError::BadDegree(n));
        }
        if poly_degree(poly) != n as i32 || !is_irreducible(poly) {
            return Err(FieldError::Reducible { n, poly });
        }
        Ok(Self { n, poly })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn reduction_poly(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> u64 {
        1u64 << self.n
    }

    pub fn elem(&self, bits: u32) -> Result<Gf2nElem<'_>, FieldError> {
        if u64::from(bits) >= self.order() {
            return Err(FieldError::OutOfRange { n: self.n, bits });
        }
        Ok(Gf2nElem { bits, field: self })
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf2nElem<'_>> + '_ {
        (0..self.order() as u32).map(move |bits| Gf2nElem { bits, field: self })
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let mut acc: u64 = 0;
        let (a, mut b) = (a as u64, b);
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        let n = self.n as i32;
        let poly = self.poly as u64;
        for bit in (n..2 * n - 1).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= poly << (bit - n);
            }
        }
        acc as u32
    }

    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    /// `a^(2^k)`, the k-fold Frobenius image.
    pub fn frobenius(&self, mut a: u32, k: u32) -> u32 {
        for _ in 0..k {
            a = self.square(a);
        }
        a
    }

    /// Absolute trace `a + a² + a⁴ + … + a^(2^(n−1))`, which lies in GF(2).
    pub fn trace(&self, a: u32) -> u8 {
        let mut acc = 0u32;
        let mut t = a;
        for _ in 0..self.n {
            acc ^= t;
            t = self.square(t);
        }
        debug_assert!(acc <= 1, "trace must land in the prime field");
        acc as u8
    }

    /// 1 iff `a = x² + x` has a solution in the field.
    pub fn bob_symbol(&self, a: u32) -> u8 {
        1 - self.trace(a)
    }

    /// True iff `a` is fixed by the `k`-th Frobenius power for some proper
    /// divisor `k` of `n`, i.e. `a` lies in a proper subfield.
    pub fn in_proper_subfield(&self, a: u32) -> bool {
        self.proper_divisors().into_iter().any(|k| self.frobenius(a, k) == a)
    }

    fn proper_divisors(&self) -> Vec<u32> {
        divisors(self.n as u64)
            .into_iter()
            .filter(|&d| d != self.n as u64)
            .map(|d| d as u32)
            .collect()
    }

    /// Elements of the copy of GF(2ᵏ) inside this field (requires `k | n`).
    pub fn subfield_elements(&self, k: u32) -> Vec<u32> {
        assert!(self.n % k == 0, "GF(2^{k}) is not a subfield of GF(2^{})", self.n);
        (0..self.order() as u32)
            .filter(|&a| self.frobenius(a, k) == a)
            .collect()
    }
}

/// An element bound to its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2nElem<'f> {
    bits: u32,
    field: &'f Gf2nField,
}

impl<'f> Gf2nElem<'f> {
    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn field(self) -> &'f Gf2nField {
        self.field
    }

    pub fn add(self, other: Self) -> Self {
        Self {
            bits: self.bits ^ other.bits,
            field: self.field,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        Self {
            bits: self.field.mul(self.bits, other.bits),
            field: self.field,
        }
    }

    pub fn trace(self) -> u8 {
        self.field.trace(self.bits)
    }

    pub fn bob_symbol(self) -> u8 {
        self.field.bob_symbol(self.bits)
    }

    pub fn in_proper_subfield(self) -> bool {
        self.field.in_proper_subfield(self.bits)
    }
}

/// Sizes of the non-representable and representable parts of the
/// subfield-free elements of GF(2ⁿ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BSetCounts {
    pub b0: u128,
    pub b1: u128,
}

/// Number of elements of GF(2ⁿ) lying in no proper subfield:
/// `Σ_{d|n} μ(d)·2^(n/d)`.
pub fn subfield_free_count(n: u32) -> u128 {
    divisors(n as u64)
        .into_iter()
        .map(|d| moebius(d) as i128 * (1i128 << (n as u64 / d)))
        .sum::<i128>() as u128
}

fn odd_part(n: u32) -> u32 {
    n >> n.trailing_zeros()
}

/// Closed-form counts for 1 ≤ n ≤ 60.
///
/// `b0 = ½ Σ_{d|m} μ(d)·2^(n/d)` where `m` is the odd part of `n`;
/// `b1 = Σ_{d|n} μ(d)·2^(n/d) − b0`. For odd `n` both halves are equal.
pub fn count_b_sets(n: u32) -> BSetCounts {
    assert!((1..=60).contains(&n), "closed form supports 1..=60");
    let m = odd_part(n);
    let twice_b0: i128 = divisors(m as u64)
        .into_iter()
        .map(|d| moebius(d) as i128 * (1i128 << (n as u64 / d)))
        .sum();
    let b0 = (twice_b0 / 2) as u128;
    BSetCounts {
        b0,
        b1: subfield_free_count(n) - b0,
    }
}

/// `½ Σ_{d|n} μ(d)·2^(n/d)`, the divisor sum taken over all of `n` rather
/// than its odd part. It agrees with [`count_b_sets`] for odd `n` only and
/// is kept for side-by-side reporting.
pub fn b0_full_divisor_sum(n: u32) -> u128 {
    subfield_free_count(n) / 2
}

/// Brute-force classification of every element of the field.
pub fn count_b_sets_exhaustive(field: &Gf2nField) -> BSetCounts {
    let mut counts = BSetCounts { b0: 0, b1: 0 };
    // representability decided by the image of x² + x, not by the trace
    let image = artin_schreier_image(field);
    for a in field.elements() {
        if a.in_proper_subfield() {
            continue;
        }
        if image[a.bits() as usize] > 0 {
            counts.b1 += 1;
        } else {
            counts.b0 += 1;
        }
    }
    counts
}

/// Whether `a = x² + x` for some `x`, by direct search.
pub fn is_image_of_artin_schreier(field: &Gf2nField, a: u32) -> bool {
    (0..field.order() as u32).any(|x| field.square(x) ^ x == a)
}

/// How many elements of the copy of GF(2ᵏ) are *not* of the form `x² + x`
/// with `x` in the full field. Zero whenever `n/k` is even, half the
/// subfield otherwise.
pub fn subfield_nonrepresentable_count(field: &Gf2nField, k: u32) -> u64 {
    let image = artin_schreier_image(field);
    field
        .subfield_elements(k)
        .into_iter()
        .filter(|&a| image[a as usize] == 0)
        .count() as u64
}

/// Preimage counts of `x ↦ x² + x`, indexed by element.
pub fn artin_schreier_image(field: &Gf2nField) -> Vec<u8> {
    let mut hits = vec![0u8; field.order() as usize];
    for x in 0..field.order() as u32 {
        let y = field.square(x) ^ x;
        hits[y as usize] += 1;
    }
    hits
}
