use super::{
    build_code, combine_mod6, enumerate_small_modulus, isd_decode_with, realize_table, DataPoint, IsdOptions,
    RationalFnKey, RfError, DEFAULT_NEED, DEGREE, RING_MODULUS,
};
use crate::numtheory::gcd;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveParams {
    /// Minimum number of points the key must satisfy.
    pub need: usize,
    /// ISD iterations per mod-6 candidate.
    pub budget: u64,
    pub seed: u64,
    /// How many of the best mod-6 candidates to try.
    pub max_mod6: usize,
    pub isd: IsdOptions,
    /// Keep trying lower-ranked mod-6 candidates after a key verifies.
    pub all_ranks: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            need: DEFAULT_NEED,
            budget: 1_000_000,
            seed: 0,
            max_mod6: 2,
            isd: IsdOptions::default(),
            all_ranks: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedKey {
    pub key: RationalFnKey,
    /// Recounted by direct evaluation over Z₂₀₂₂.
    pub satisfied: usize,
    /// Rank of the mod-6 candidate it came from.
    pub mod6_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub candidates: Vec<VerifiedKey>,
    /// Agreement counts of the best mod-6 candidates, best first.
    pub mod6_counts: Vec<usize>,
    /// Size of the retained index set for each mod-6 candidate tried.
    pub retained: Vec<usize>,
    pub isd_iterations: u64,
    /// `need + (n − need)/6`: the retained size expected by chance alone.
    pub expected_retained: f64,
}

/// Full pipeline: rank ratios mod 2 and 3, combine mod 6, decode the
/// GF(337) code on the retained points, then lift by CRT and verify.
pub fn solve_full(points: &[DataPoint], params: &SolveParams) -> Result<SolveReport, RfError> {
    if params.need <= 2 * DEGREE {
        return Err(RfError::BadParams(format!("need must exceed {}", 2 * DEGREE)));
    }
    if points.len() < params.need {
        return Err(RfError::BadParams(format!(
            "{} points cannot satisfy need = {}",
            points.len(),
            params.need
        )));
    }
    let c2 = enumerate_small_modulus(points, 2);
    let c3 = enumerate_small_modulus(points, 3);
    let mod6 = combine_mod6(points, &c2, &c3);

    let mut report = SolveReport {
        candidates: Vec::new(),
        mod6_counts: mod6.iter().take(5).map(|c| c.count).collect(),
        retained: Vec::new(),
        isd_iterations: 0,
        expected_retained: params.need as f64 + (points.len() - params.need) as f64 / 6.0,
    };

    for (rank, cand) in mod6.iter().enumerate().take(params.max_mod6) {
        if cand.count < params.need || (!params.all_ranks && !report.candidates.is_empty()) {
            break;
        }
        report.retained.push(cand.count);
        let code = build_code(points, &cand.positions);
        let seed = params
            .seed
            .wrapping_add((rank as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let outcome = isd_decode_with(&code, cand.count - params.need, params.budget, seed, params.isd);
        report.isd_iterations += outcome.iterations;
        let Some(s) = outcome.solution else { continue };

        let ones2 = [1u64; 2];
        let ones3 = [1u64; 3];
        let k2 = RationalFnKey {
            alpha: realize_table(&cand.ratio2, 2),
            beta: realize_table(&ones2, 2),
        };
        let k3 = RationalFnKey {
            alpha: realize_table(&cand.ratio3, 3),
            beta: realize_table(&ones3, 3),
        };
        let mut k337 = RationalFnKey {
            alpha: [0; DEGREE],
            beta: [0; DEGREE],
        };
        for j in 0..DEGREE {
            k337.alpha[j] = s[j] as u64;
            k337.beta[j] = s[DEGREE + j] as u64;
        }
        let key = RationalFnKey::from_residues(&k2, &k3, &k337);
        let satisfied = key.count_satisfied(points);
        if satisfied >= params.need
            && key.denominator_invertible_everywhere()
            && !report.candidates.iter().any(|c| c.key == key)
        {
            report.candidates.push(VerifiedKey {
                key,
                satisfied,
                mod6_rank: rank,
            });
        }
    }
    if report.candidates.is_empty() {
        Err(RfError::NoCandidate)
    } else {
        Ok(report)
    }
}

/// A random instance with a planted key: `n_correct` points obey
/// `y = f(x)/g(x)`, the rest carry uniform values that do not.
pub fn synth_instance(seed: u64, n_points: usize, n_correct: usize) -> (Vec<DataPoint>, RationalFnKey) {
    assert!(n_correct <= n_points, "more correct points than points");
    let n = RING_MODULUS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = loop {
        let k = RationalFnKey {
            alpha: std::array::from_fn(|_| rng.gen_range(0..n)),
            beta: std::array::from_fn(|_| rng.gen_range(0..n)),
        };
        if k.denominator_invertible_everywhere() {
            break k;
        }
    };
    let mut correct = vec![false; n_points];
    correct[..n_correct].iter_mut().for_each(|c| *c = true);
    correct.shuffle(&mut rng);

    let points = correct
        .iter()
        .enumerate()
        .map(|(i, &ok)| {
            let x = rng.gen_range(0..n);
            let g = key.denominator(x, n);
            debug_assert_eq!(gcd(g, n), 1);
            let truth = key.numerator(x, n)
                * crate::numtheory::mod_inverse(crate::numtheory::ResidueInt::new(g, n).expect("valid"))
                    .expect("invertible")
                    .value()
                % n;
            let y = if ok {
                truth
            } else {
                loop {
                    let y = rng.gen_range(0..n);
                    if y != truth {
                        break y;
                    }
                }
            };
            DataPoint {
                index: i as u64 + 1,
                x,
                y,
            }
        })
        .collect();
    (points, key)
}
