//! Dense state-vector simulation of a few qubits with post-selection and a
//! Schmidt-rank entanglement test.
//!
//! Qubit 0 is the leftmost ket symbol: basis index `Σ bit_q · 2^(n−1−q)`.

use nalgebra::{Complex, DMatrix};
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

pub type C64 = Complex<f64>;

pub const MAX_QUBITS: usize = 8;
/// Singular values below this count as zero.
pub const SCHMIDT_THRESHOLD: f64 = 1e-9;
const ZERO_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("qubit index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("control and target must differ")]
    SameQubit,
    #[error("post-selected outcome has probability {0}")]
    ZeroProbabilityBranch(f64),
    #[error("{0} qubits exceeds the supported maximum")]
    TooManyQubits(usize),
    #[error("partition must be a proper non-empty subset")]
    BadPartition,
    #[error("invalid basis label {0:?}")]
    BadLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    Ry(usize, f64),
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::Z(q) | Gate::H(q) | Gate::Ry(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amps: Vec<C64>,
}

impl QuantumState {
    pub fn basis(n: usize, index: usize) -> Result<Self, QsimError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n));
        }
        if index >= 1 << n {
            return Err(QsimError::IndexOutOfRange(index));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Parses a label such as `"010"`.
    pub fn from_label(label: &str) -> Result<Self, QsimError> {
        let bad = || QsimError::BadLabel(label.to_string());
        let index = label.chars().try_fold(0usize, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok(acc << 1 | 1),
            _ => Err(bad()),
        })?;
        Self::basis(label.len(), index)
    }

    /// Normalises the given amplitudes.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, QsimError> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 || n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < ZERO_BRANCH {
            return Err(QsimError::ZeroProbabilityBranch(norm));
        }
        Ok(Self {
            n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn label(&self, index: usize) -> String {
        (0..self.n)
            .map(|q| if self.bit(index, q) { '1' } else { '0' })
            .collect()
    }

    fn bit(&self, index: usize, q: usize) -> bool {
        index >> (self.n - 1 - q) & 1 == 1
    }

    fn check(&self, q: usize) -> Result<(), QsimError> {
        if q < self.n {
            Ok(())
        } else {
            Err(QsimError::IndexOutOfRange(q))
        }
    }

    pub fn apply(&self, gate: &Gate) -> Result<Self, QsimError> {
        for q in gate.qubits() {
            self.check(q)?;
        }
        let mut out = self.amps.clone();
        match *gate {
            Gate::X(q) => {
                let m = 1 << (self.n - 1 - q);
                for (i, a) in out.iter_mut().enumerate() {
                    *a = self.amps[i ^ m];
                }
            }
            Gate::Z(q) => {
                for (i, a) in out.iter_mut().enumerate() {
                    if self.bit(i, q) {
                        *a = -*a;
                    }
                }
            }
            Gate::H(q) | Gate::Ry(q, _) => {
                let (m00, m01, m10, m11) = match *gate {
                    Gate::H(_) => (FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
                    Gate::Ry(_, theta) => {
                        let (s, c) = (theta / 2.0).sin_cos();
                        (c, -s, s, c)
                    }
                    _ => unreachable!(),
                };
                let m = 1 << (self.n - 1 - q);
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    let (a0, a1) = (self.amps[i], self.amps[i | m]);
                    out[i] = a0 * m00 + a1 * m01;
                    out[i | m] = a0 * m10 + a1 * m11;
                }
            }
            Gate::Cnot { control, target } => {
                if control == target {
                    return Err(QsimError::SameQubit);
                }
                let t = 1 << (self.n - 1 - target);
                for (i, a) in out.iter_mut().enumerate() {
                    if self.bit(i, control) {
                        *a = self.amps[i ^ t];
                    }
                }
            }
        }
        Ok(Self { n: self.n, amps: out })
    }

    pub fn measure_prob(&self, qubit: usize, outcome: bool) -> Result<f64, QsimError> {
        self.check(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.bit(i, qubit) == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn post_select(&self, qubit: usize, outcome: bool) -> Result<Self, QsimError> {
        let p = self.measure_prob(qubit, outcome)?;
        if p <= ZERO_BRANCH {
            return Err(QsimError::ZeroProbabilityBranch(p));
        }
        let scale = p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if self.bit(i, qubit) == outcome {
                    a / scale
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(Self { n: self.n, amps })
    }

    /// Removes a qubit that is definitely in `outcome`, e.g. after post-selection.
    pub fn drop_qubit(&self, qubit: usize, outcome: bool) -> Result<Self, QsimError> {
        self.check(qubit)?;
        if self.n == 1 {
            return Err(QsimError::BadPartition);
        }
        let amps = (0..self.amps.len())
            .filter(|&i| self.bit(i, qubit) == outcome)
            .map(|i| self.amps[i])
            .collect();
        Self::from_amplitudes(amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QuantumState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }

    /// Largest amplitude difference up to a global phase.
    pub fn distance_up_to_phase(&self, other: &QuantumState) -> f64 {
        let overlap: C64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    pub product: bool,
    /// Schmidt coefficients, descending.
    pub singular_values: Vec<f64>,
    pub schmidt_rank: usize,
}

/// Schmidt decomposition across `subset` versus the remaining qubits.
pub fn is_product_state(state: &QuantumState, subset: &[usize]) -> Result<ProductReport, QsimError> {
    let n = state.n;
    let mut side_a: Vec<usize> = subset.to_vec();
    side_a.sort_unstable();
    side_a.dedup();
    if side_a.is_empty() || side_a.len() >= n {
        return Err(QsimError::BadPartition);
    }
    for &q in &side_a {
        state.check(q)?;
    }
    let side_b: Vec<usize> = (0..n).filter(|q| !side_a.contains(q)).collect();
    let sub_index = |i: usize, side: &[usize]| side.iter().fold(0usize, |acc, &q| acc << 1 | state.bit(i, q) as usize);
    let mut m = DMatrix::<C64>::zeros(1 << side_a.len(), 1 << side_b.len());
    for (i, &a) in state.amps.iter().enumerate() {
        m[(sub_index(i, &side_a), sub_index(i, &side_b))] = a;
    }
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = sv.iter().filter(|&&s| s > SCHMIDT_THRESHOLD).count();
    Ok(ProductReport {
        product: rank <= 1,
        singular_values: sv,
        schmidt_rank: rank,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, QsimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n_qubits));
        }
        for g in &gates {
            for q in g.qubits() {
                if q >= n_qubits {
                    return Err(QsimError::IndexOutOfRange(q));
                }
            }
            if let Gate::Cnot { control, target } = g {
                if control == target {
                    return Err(QsimError::SameQubit);
                }
            }
        }
        Ok(Self { n_qubits, gates })
    }
}

pub fn run(circuit: &Circuit, initial: &QuantumState) -> Result<QuantumState, QsimError> {
    if initial.n != circuit.n_qubits {
        return Err(QsimError::IndexOutOfRange(initial.n));
    }
    circuit.gates.iter().try_fold(initial.clone(), |s, g| s.apply(g))
}

pub fn ghz_circuit() -> Circuit {
    Circuit::new(
        3,
        vec![
            Gate::H(0),
            Gate::Cnot { control: 0, target: 1 },
            Gate::Cnot { control: 0, target: 2 },
        ],
    )
    .expect("valid circuit")
}

/// CNOT with control and target swapped, from Hadamards and a plain CNOT.
pub fn reversed_cnot_circuit() -> Circuit {
    Circuit::new(
        2,
        vec![
            Gate::H(0),
            Gate::H(1),
            Gate::Cnot { control: 0, target: 1 },
            Gate::H(0),
            Gate::H(1),
        ],
    )
    .expect("valid circuit")
}

/// Prepares `(|001⟩ + |010⟩ + |100⟩)/√3` from `|000⟩`.
pub fn build_w_circuit() -> Circuit {
    let theta = 2.0 * (1.0 / 3f64.sqrt()).acos();
    let quarter = std::f64::consts::FRAC_PI_4;
    Circuit::new(
        3,
        vec![
            Gate::Ry(0, theta),
            // controlled-H from qubit 0 onto qubit 1
            Gate::Ry(1, quarter),
            Gate::Cnot { control: 0, target: 1 },
            Gate::Ry(1, -quarter),
            Gate::Cnot { control: 1, target: 2 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::X(0),
        ],
    )
    .expect("valid circuit")
}

pub fn ghz_state() -> QuantumState {
    run(&ghz_circuit(), &QuantumState::basis(3, 0).expect("valid")).expect("valid circuit")
}

pub fn w_state() -> QuantumState {
    run(&build_w_circuit(), &QuantumState::basis(3, 0).expect("valid")).expect("valid circuit")
}

/// One post-selection experiment and the fate of the remaining qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    pub description: String,
    pub qubit: usize,
    /// Whether a Hadamard was applied to the qubit before selecting.
    pub hadamard_first: bool,
    pub outcome: bool,
    pub probability: f64,
    pub remaining: QuantumState,
    pub entangled: bool,
    pub singular_values: Vec<f64>,
}

fn post_selection(
    description: &str,
    state: &QuantumState,
    qubit: usize,
    hadamard_first: bool,
    outcome: bool,
) -> Result<PostSelection, QsimError> {
    let s = if hadamard_first {
        state.apply(&Gate::H(qubit))?
    } else {
        state.clone()
    };
    let probability = s.measure_prob(qubit, outcome)?;
    let remaining = s.post_select(qubit, outcome)?.drop_qubit(qubit, outcome)?;
    let report = is_product_state(&remaining, &[0])?;
    Ok(PostSelection {
        description: description.to_string(),
        qubit,
        hadamard_first,
        outcome,
        probability,
        remaining,
        entangled: !report.product,
        singular_values: report.singular_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ReversedCnot,
    GhzPlus,
    WMeasure,
    WPlus,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::ReversedCnot,
        Experiment::GhzPlus,
        Experiment::WMeasure,
        Experiment::WPlus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ReversedCnot => "reversed-cnot",
            Experiment::GhzPlus => "ghz-plus",
            Experiment::WMeasure => "w-measure",
            Experiment::WPlus => "w-plus",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    /// The prepared state before any selection.
    pub state: QuantumState,
    /// For the reversed CNOT: input label, output state.
    pub truth_table: Vec<(String, QuantumState)>,
    pub selections: Vec<PostSelection>,
}

pub fn run_experiment(e: Experiment) -> Result<ExperimentReport, QsimError> {
    let mut report = ExperimentReport {
        experiment: e,
        state: QuantumState::basis(3, 0)?,
        truth_table: Vec::new(),
        selections: Vec::new(),
    };
    match e {
        Experiment::ReversedCnot => {
            let c = reversed_cnot_circuit();
            report.state = QuantumState::basis(2, 0)?;
            for i in 0..4 {
                let input = QuantumState::basis(2, i)?;
                report.truth_table.push((input.label(i), run(&c, &input)?));
            }
        }
        Experiment::GhzPlus => {
            let ghz = ghz_state();
            report
                .selections
                .push(post_selection("first qubit measured 0", &ghz, 0, false, false)?);
            report
                .selections
                .push(post_selection("first qubit selected in |+>", &ghz, 0, true, false)?);
            report
                .selections
                .push(post_selection("first qubit selected in |->", &ghz, 0, true, true)?);
            report.state = ghz;
        }
        Experiment::WMeasure => {
            let w = w_state();
            report
                .selections
                .push(post_selection("first qubit measured 0", &w, 0, false, false)?);
            report
                .selections
                .push(post_selection("first qubit measured 1", &w, 0, false, true)?);
            report
                .selections
                .push(post_selection("third qubit measured 0", &w, 2, false, false)?);
            report.state = w;
        }
        Experiment::WPlus => {
            let w = w_state();
            report
                .selections
                .push(post_selection("third qubit selected in |+>", &w, 2, true, false)?);
            report
                .selections
                .push(post_selection("third qubit measured 0", &w, 2, false, false)?);
            report.state = w;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> QuantumState {
        let amps = (0..1 << n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        QuantumState::from_amplitudes(amps).unwrap()
    }

    fn state(amps: &[(usize, f64)], n: usize) -> QuantumState {
        let mut v = vec![C64::new(0.0, 0.0); 1 << n];
        for &(i, a) in amps {
            v[i] = C64::new(a, 0.0);
        }
        QuantumState::from_amplitudes(v).unwrap()
    }

    #[test]
    fn gate_examples() {
        let s = QuantumState::from_label("10")
            .unwrap()
            .apply(&Gate::Cnot { control: 0, target: 1 })
            .unwrap();
        assert_eq!(s, QuantumState::from_label("11").unwrap());
        let h = QuantumState::basis(1, 0).unwrap().apply(&Gate::H(0)).unwrap();
        assert!(
            (h.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < TOL && (h.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < TOL
        );
        assert!(matches!(
            QuantumState::basis(2, 0).unwrap().apply(&Gate::X(2)),
            Err(QsimError::IndexOutOfRange(2))
        ));
        assert!(matches!(
            QuantumState::basis(2, 0)
                .unwrap()
                .apply(&Gate::Cnot { control: 1, target: 1 }),
            Err(QsimError::SameQubit)
        ));
    }

    #[test]
    fn unitarity_and_involutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s = random_state(3, &mut rng);
            for g in [
                Gate::X(1),
                Gate::Z(2),
                Gate::H(0),
                Gate::Ry(1, 0.7),
                Gate::Cnot { control: 2, target: 0 },
            ] {
                assert!((s.apply(&g).unwrap().norm() - 1.0).abs() < TOL);
            }
            for g in [Gate::X(0), Gate::Z(1), Gate::H(2)] {
                let back = s.apply(&g).unwrap().apply(&g).unwrap();
                assert!(back.distance_up_to_phase(&s) < TOL);
            }
        }
    }

    #[test]
    fn reversed_cnot_truth_table() {
        let c = reversed_cnot_circuit();
        for (input, output) in [("00", "00"), ("01", "11"), ("10", "10"), ("11", "01")] {
            let out = run(&c, &QuantumState::from_label(input).unwrap()).unwrap();
            let want = QuantumState::from_label(output).unwrap();
            for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
                assert!((a - b).norm() < TOL, "{input}");
            }
        }
        let empty = Circuit::new(2, vec![]).unwrap();
        let s = QuantumState::from_label("01").unwrap();
        assert_eq!(run(&empty, &s).unwrap(), s);
    }

    #[test]
    fn ghz_experiments() {
        let ghz = ghz_state();
        assert!(ghz.distance_up_to_phase(&state(&[(0, 1.0), (7, 1.0)], 3)) < TOL);
        assert!((ghz.measure_prob(0, false).unwrap() - 0.5).abs() < TOL);
        let rep = run_experiment(Experiment::GhzPlus).unwrap();
        let zero = &rep.selections[0];
        assert!(!zero.entangled);
        assert!(
            zero.remaining
                .distance_up_to_phase(&QuantumState::from_label("00").unwrap())
                < TOL
        );
        let plus = &rep.selections[1];
        assert!(plus.entangled);
        let phi_plus = state(&[(0, 1.0), (3, 1.0)], 2);
        for (a, b) in plus.remaining.amplitudes().iter().zip(phi_plus.amplitudes()) {
            assert!((a - b).norm() < TOL);
        }
        let minus = &rep.selections[2];
        let phi_minus = state(&[(0, 1.0), (3, -1.0)], 2);
        for (a, b) in minus.remaining.amplitudes().iter().zip(phi_minus.amplitudes()) {
            assert!((a - b).norm() < TOL);
        }
        assert!((plus.probability - 0.5).abs() < TOL);
    }

    #[test]
    fn w_state_and_selections() {
        let w = w_state();
        let r3 = 1.0 / 3f64.sqrt();
        for (i, a) in w.amplitudes().iter().enumerate() {
            let want = if i.count_ones() == 1 { r3 } else { 0.0 };
            assert!((a.re - want).abs() < TOL && a.im.abs() < TOL, "{i}");
        }
        assert!((w.norm() - 1.0).abs() < TOL);
        assert!((w.measure_prob(0, false).unwrap() - 2.0 / 3.0).abs() < TOL);

        let rep = run_experiment(Experiment::WMeasure).unwrap();
        assert!(rep.selections[0].entangled);
        let psi_plus = state(&[(1, 1.0), (2, 1.0)], 2);
        assert!(rep.selections[0].remaining.distance_up_to_phase(&psi_plus) < TOL);
        assert!(!rep.selections[1].entangled);
        assert!(
            rep.selections[1]
                .remaining
                .distance_up_to_phase(&QuantumState::from_label("00").unwrap())
                < TOL
        );

        let rep = run_experiment(Experiment::WPlus).unwrap();
        let plus = &rep.selections[0];
        assert!(plus.entangled);
        assert!(
            plus.remaining
                .distance_up_to_phase(&state(&[(0, 1.0), (1, 1.0), (2, 1.0)], 2))
                < TOL
        );
        assert!((plus.probability - 0.5).abs() < TOL);
    }

    #[test]
    fn w_plus_selection_factorises_before_dropping() {
        // selecting |+> on the third qubit leaves it in |+>, untouched
        let w = w_state();
        let p = w
            .apply(&Gate::H(2))
            .unwrap()
            .post_select(2, false)
            .unwrap()
            .apply(&Gate::H(2))
            .unwrap();
        assert!(is_product_state(&p, &[2]).unwrap().product);
        assert!(!is_product_state(&p, &[0]).unwrap().product);
    }

    #[test]
    fn product_checks() {
        assert!(
            is_product_state(&QuantumState::from_label("00").unwrap(), &[0])
                .unwrap()
                .product
        );
        let bell = state(&[(0, 1.0), (3, 1.0)], 2);
        let rep = is_product_state(&bell, &[0]).unwrap();
        assert!(!rep.product);
        assert!(
            (rep.singular_values[0] - FRAC_1_SQRT_2).abs() < 1e-12
                && (rep.singular_values[1] - FRAC_1_SQRT_2).abs() < 1e-12
        );
        assert_eq!(is_product_state(&bell, &[0, 1]), Err(QsimError::BadPartition));
    }

    #[test]
    fn post_selection_is_certain_afterwards() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = random_state(3, &mut rng);
            let q = rng.gen_range(0..3);
            let o = rng.gen_bool(0.5);
            let p = s.post_select(q, o).unwrap();
            assert!((p.measure_prob(q, o).unwrap() - 1.0).abs() < TOL);
        }
        let basis = QuantumState::from_label("101").unwrap();
        assert_eq!(basis.measure_prob(1, false).unwrap(), 1.0);
        assert!(matches!(
            basis.post_select(1, true),
            Err(QsimError::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn local_unitaries_keep_schmidt_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..50 {
            let s = if i % 2 == 0 {
                random_state(3, &mut rng)
            } else {
                // a product state across {0} | {1, 2}
                let a = random_state(1, &mut rng);
                let b = random_state(2, &mut rng);
                let amps = (0..8).map(|k| a.amplitudes()[k >> 2] * b.amplitudes()[k & 3]).collect();
                QuantumState::from_amplitudes(amps).unwrap()
            };
            let before = is_product_state(&s, &[0]).unwrap();
            let t = s
                .apply(&Gate::Ry(0, rng.gen_range(0.0..6.0)))
                .unwrap()
                .apply(&Gate::H(1))
                .unwrap()
                .apply(&Gate::Cnot { control: 1, target: 2 })
                .unwrap();
            let after = is_product_state(&t, &[0]).unwrap();
            assert_eq!(before.product, after.product);
            assert_eq!(before.product, i % 2 == 1);
            for (x, y) in before.singular_values.iter().zip(&after.singular_values) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
