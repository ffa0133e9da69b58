//! Classical puzzle ciphers and their solvers.

mod alphabet;
mod hill;
mod polybius;
mod puzzles;
mod quadcipher;

pub use alphabet::Alphabet;
pub use hill::{
    hill_decrypt, hill_encrypt, hill_known_plaintext_recover, hill_recover_realigned, HillCandidate, Mat2,
    RealignedCandidate, HILL_MODULUS,
};
pub use polybius::{polybius_decode, polybius_encode, IjPreference, PolybiusGrid};
pub use puzzles::{
    hidden_primes, hidden_primes_from, pin_candidates, pin_solve, pin_solve_trace, simulate_wallet_splits,
    wallet_feasible, HiddenPrimes, PinTrace,
};
pub use quadcipher::{quad_decrypt, quad_decrypt_options, quad_encrypt, quad_key_recover, QuadCipherKey, QUAD_MODULUS};

use crate::numtheory::NumError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(String),
    #[error("coordinate digit {0} is outside the 5x5 grid")]
    OutOfGrid(char),
    #[error("symbol {0:?} is not in the alphabet")]
    InvalidSymbol(char),
    #[error("symbol {0:?} has no preimage under the key")]
    NonResidue(char),
    #[error("no key satisfies the functional equation")]
    NoSolution,
    #[error("{0} keys satisfy the functional equation")]
    AmbiguousSolution(usize),
    #[error("root or primality check failed: {0}")]
    CheckFailed(String),
    #[error("elimination left {0} pin codes")]
    AmbiguousPin(usize),
    #[error("text length {0} is not a multiple of the block length")]
    BadLength(usize),
    #[error("ciphertext block is singular modulo 15")]
    Mod15Singular,
    #[error("no binary lift is consistent with the known block")]
    KnownBlockInconsistent,
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
    #[error(transparent)]
    Num(#[from] NumError),
}
