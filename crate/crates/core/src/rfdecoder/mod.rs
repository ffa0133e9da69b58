//! Interpolation with errors: recover monic degree-16 `f`, `g` over Z₂₀₂₂
//! with `y = f(x)/g(x)` on at least `need` of the given points.
//!
//! The ring splits as Z₂ × Z₃ × GF(337). The two small factors are solved by
//! enumerating value tables, the large one by decoding a linear code with
//! pooled Gauss information-set decoding.

mod code;
mod small;
mod solve;

pub use code::{
    build_code, gv_min_distance, gv_min_distance_gilbert, isd_decode, isd_decode_with, IsdOptions, IsdOutcome,
    IsdVariant, LinearCodeInstance,
};
pub use small::{combine_mod6, enumerate_small_modulus, realize_table, Mod6Candidate, SmallModCandidate};
pub use solve::{solve_full, synth_instance, SolveParams, SolveReport, VerifiedKey};

use crate::numtheory::{crt_solve, CrtSystem};
use std::path::Path;
use thiserror::Error;

pub const RING_MODULUS: u64 = 2022;
pub const LARGE_PRIME: u64 = 337;
pub const DEGREE: usize = 16;
pub const DEFAULT_NEED: usize = 90;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: value {value} is not below 2022")]
    Range { line: usize, value: u64 },
    #[error("cannot read input: {0}")]
    Io(String),
    #[error("no candidate key survived verification")]
    NoCandidate,
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DataPoint {
    pub index: u64,
    pub x: u64,
    pub y: u64,
}

/// Non-leading coefficients of the numerator (`alpha`) and denominator
/// (`beta`), lowest degree first. Both polynomials carry an implicit `x¹⁶`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalFnKey {
    pub alpha: [u64; DEGREE],
    pub beta: [u64; DEGREE],
}

fn eval_monic(coeffs: &[u64; DEGREE], x: u64, m: u64) -> u64 {
    let x = x % m;
    let mut acc = 1u64;
    for &c in coeffs.iter().rev() {
        acc = (acc * x + c) % m;
    }
    acc
}

impl RationalFnKey {
    pub fn numerator(&self, x: u64, m: u64) -> u64 {
        eval_monic(&self.alpha, x, m)
    }

    pub fn denominator(&self, x: u64, m: u64) -> u64 {
        eval_monic(&self.beta, x, m)
    }

    /// Full scan of Z₂₀₂₂.
    pub fn denominator_invertible_everywhere(&self) -> bool {
        (0..RING_MODULUS).all(|x| crate::numtheory::gcd(self.denominator(x, RING_MODULUS), RING_MODULUS) == 1)
    }

    pub fn satisfies(&self, p: &DataPoint) -> bool {
        let m = RING_MODULUS;
        p.y * self.denominator(p.x, m) % m == self.numerator(p.x, m)
    }

    /// Direct evaluation of `y·g(x) ≡ f(x) (mod 2022)` over every point.
    pub fn count_satisfied(&self, points: &[DataPoint]) -> usize {
        points.iter().filter(|p| self.satisfies(p)).count()
    }

    pub fn reduce(&self, m: u64) -> RationalFnKey {
        RationalFnKey {
            alpha: self.alpha.map(|c| c % m),
            beta: self.beta.map(|c| c % m),
        }
    }

    /// Recombines keys given modulo 2, 3 and 337.
    pub fn from_residues(k2: &RationalFnKey, k3: &RationalFnKey, k337: &RationalFnKey) -> RationalFnKey {
        let join = |a: u64, b: u64, c: u64| {
            let sys = CrtSystem::new(vec![(a, 2), (b, 3), (c, LARGE_PRIME)]).expect("coprime moduli");
            crt_solve(&sys).expect("solvable").value()
        };
        let mut out = RationalFnKey {
            alpha: [0; DEGREE],
            beta: [0; DEGREE],
        };
        for j in 0..DEGREE {
            out.alpha[j] = join(k2.alpha[j], k3.alpha[j], k337.alpha[j]);
            out.beta[j] = join(k2.beta[j], k3.beta[j], k337.beta[j]);
        }
        out
    }
}

/// Parses `i,x,y` lines. Blank lines and a leading non-numeric header are skipped.
pub fn parse_points(text: &str) -> Result<Vec<DataPoint>, RfError> {
    let mut points = Vec::new();
    let mut first = true;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if std::mem::take(&mut first) && fields.iter().all(|f| f.parse::<u64>().is_err()) {
            continue;
        }
        if fields.len() != 3 {
            return Err(RfError::Parse {
                line,
                msg: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut vals = [0u64; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f.parse().map_err(|_| RfError::Parse {
                line,
                msg: format!("not a non-negative integer: {f:?}"),
            })?;
        }
        for &value in &vals[1..] {
            if value >= RING_MODULUS {
                return Err(RfError::Range { line, value });
            }
        }
        points.push(DataPoint {
            index: vals[0],
            x: vals[1],
            y: vals[2],
        });
    }
    points.sort_by_key(|p| p.index);
    Ok(points)
}

pub fn load_points(path: &Path) -> Result<Vec<DataPoint>, RfError> {
    let text = std::fs::read_to_string(path).map_err(|e| RfError::Io(e.to_string()))?;
    parse_points(&text)
}

pub fn points_to_csv(points: &[DataPoint]) -> String {
    let mut s = String::from("i,x,y\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", p.index, p.x, p.y));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_csv() {
        assert_eq!(
            parse_points("1,5,7\n").unwrap(),
            vec![DataPoint { index: 1, x: 5, y: 7 }]
        );
        let pts = parse_points("i,x,y\n2,1,1\n1,0,3\n\n").unwrap();
        assert_eq!(pts.iter().map(|p| p.index).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(parse_points("1,2022,0\n"), Err(RfError::Range { line: 1, value: 2022 }));
        assert!(matches!(
            parse_points("1,2,3\n1,x,3\n"),
            Err(RfError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_points("1,2\n"), Err(RfError::Parse { line: 1, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let (pts, _) = synth_instance(3, 324, 90);
        assert_eq!(pts.len(), 324);
        assert_eq!(parse_points(&points_to_csv(&pts)).unwrap(), pts);
    }

    proptest! {
        #[test]
        fn crt_split_round_trip(alpha in proptest::array::uniform16(0u64..2022), beta in proptest::array::uniform16(0u64..2022)) {
            let key = RationalFnKey { alpha, beta };
            let back = RationalFnKey::from_residues(&key.reduce(2), &key.reduce(3), &key.reduce(LARGE_PRIME));
            prop_assert_eq!(back, key);
        }
    }
}
