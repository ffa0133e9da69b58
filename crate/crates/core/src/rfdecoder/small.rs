//! Candidate enumeration modulo 2 and 3, where every polynomial collapses to
//! its value table on the field points.

use super::{DataPoint, DEGREE};
use crate::numtheory::pow_mod;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallModCandidate {
    pub modulus: u64,
    /// Value of `f/g` at each field point `0..modulus`.
    pub ratio: Vec<u64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mod6Candidate {
    pub ratio2: Vec<u64>,
    pub ratio3: Vec<u64>,
    pub count: usize,
    /// Positions (into the point slice) consistent modulo 6.
    pub positions: Vec<usize>,
}

fn all_tables(m: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Ranks every distinct ratio `f/g` modulo `m ∈ {2, 3}` by the number of
/// points with `y·g(x) ≡ f(x)`. Denominators must be nowhere zero, which the
/// invertibility of `g` over Z₂₀₂₂ forces.
pub fn enumerate_small_modulus(points: &[DataPoint], m: u64) -> Vec<SmallModCandidate> {
    assert!(m == 2 || m == 3, "modulus must be 2 or 3");
    let tables = all_tables(m);
    let mut by_ratio: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for g in tables.iter().filter(|g| g.iter().all(|&v| v != 0)) {
        for f in &tables {
            let ratio: Vec<u64> = f
                .iter()
                .zip(g)
                .map(|(&fv, &gv)| fv * pow_mod(gv, m - 2, m) % m)
                .collect();
            by_ratio.entry(ratio).or_insert_with(|| {
                points
                    .iter()
                    .filter(|p| p.y % m * g[(p.x % m) as usize] % m == f[(p.x % m) as usize])
                    .count()
            });
        }
    }
    let mut out: Vec<SmallModCandidate> = by_ratio
        .into_iter()
        .map(|(ratio, count)| SmallModCandidate {
            modulus: m,
            ratio,
            count,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.ratio.cmp(&b.ratio)));
    out
}

/// Every pairing of a mod-2 and a mod-3 ratio, ranked by joint agreement.
pub fn combine_mod6(points: &[DataPoint], c2: &[SmallModCandidate], c3: &[SmallModCandidate]) -> Vec<Mod6Candidate> {
    let mut out = Vec::with_capacity(c2.len() * c3.len());
    for a in c2 {
        for b in c3 {
            let positions: Vec<usize> = points
                .iter()
                .enumerate()
                .filter(|(_, p)| p.y % 2 == a.ratio[(p.x % 2) as usize] && p.y % 3 == b.ratio[(p.x % 3) as usize])
                .map(|(i, _)| i)
                .collect();
            out.push(Mod6Candidate {
                ratio2: a.ratio.clone(),
                ratio3: b.ratio.clone(),
                count: positions.len(),
                positions,
            });
        }
    }
    out.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.ratio2.cmp(&b.ratio2))
            .then_with(|| a.ratio3.cmp(&b.ratio3))
    });
    out
}

/// Non-leading coefficients of a monic degree-16 polynomial over GF(m)
/// whose values on `0..m` equal `table`.
pub fn realize_table(table: &[u64], m: u64) -> [u64; DEGREE] {
    let mut coeffs = [0u64; DEGREE];
    let n = m as usize;
    for (xi, &ti) in table.iter().enumerate().take(n) {
        let xi = xi as u64;
        let target = (ti + m - pow_mod(xi, DEGREE as u64, m)) % m;
        // Lagrange basis polynomial for xi, built as a coefficient vector.
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for xj in (0..m).filter(|&xj| xj != xi) {
            let mut next = vec![0u64; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] = (next[k + 1] + b) % m;
                next[k] = (next[k] + b * (m - xj)) % m;
            }
            basis = next;
            denom = denom * ((xi + m - xj) % m) % m;
        }
        let scale = target * pow_mod(denom, m - 2, m) % m;
        for (k, &b) in basis.iter().enumerate() {
            coeffs[k] = (coeffs[k] + b * scale) % m;
        }
    }
    coeffs
}
