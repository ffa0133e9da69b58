//! Cryptanalysis and computational-algebra toolkit.
//!
//! Each module solves one family of problems and carries its own exact
//! oracles in tests:
//!
//! * [`numtheory`]: residues, CRT, Möbius, modular square roots, primality.
//! * [`gf2n`]: GF(2ⁿ) arithmetic, trace and subfield-free counting.
//! * [`classical`]: Polybius, quadratic cipher mod 37, Hill cipher recovery
//!   and small puzzle solvers.
//! * [`rfdecoder`]: rational-function interpolation with errors over Z₂₀₂₂
//!   via CRT and information-set decoding over GF(337).
//! * [`feistel`]: a 4-line generalised Feistel cipher with binary diffusion
//!   matrices and exact differential analysis.
//! * [`sbox`]: essential dependence and counts of super-dependent S-boxes.
//! * [`qsim`]: dense state-vector simulation with post-selection.
//! * [`protocols`]: three-pass protocols and key-chain e-coin schemes.

pub mod classical;
pub mod feistel;
pub mod gf2n;
pub mod numtheory;
pub mod protocols;
pub mod qsim;
pub mod rfdecoder;
pub mod sbox;
