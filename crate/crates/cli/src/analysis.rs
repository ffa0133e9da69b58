use crate::envelope::{big_decimal, int, Envelope, Status};
use clap::{Args, Subcommand, ValueEnum};
use cryptalg::feistel::{
    verify_theorem1, verify_theorem2, BinaryMatrix, FeistelParams, InvarianceReport, SBox, VerifyMode,
};
use cryptalg::gf2n::{count_b_sets, count_b_sets_exhaustive, Gf2nField};
use cryptalg::qsim::{run_experiment, Experiment, QuantumState};
use cryptalg::rfdecoder::{load_points, solve_full, synth_instance, IsdOptions, RfError, SolveParams, DEFAULT_NEED};
use cryptalg::sbox::{a1_size, count_super_dependent_exact, h_count, s_bounds, s_estimate_monte_carlo};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;

/// Bob's symbol in GF(2^n), or the sizes of the non-representable and
/// representable subfield-free sets.
#[derive(Debug, Args)]
pub struct BobArgs {
    /// Field degree.
    #[arg(long)]
    pub n: u32,
    /// Field element as an integer bit pattern; omit to count the sets.
    #[arg(long)]
    pub a: Option<u32>,
    /// Also classify every field element (n ≤ 24).
    #[arg(long)]
    pub exhaustive: bool,
}

const BOB: &str = "Bob's symbol over GF(2^n)";

pub fn bobsymbol(a: &BobArgs) -> Envelope {
    let mut env = Envelope::new("bobsymbol", BOB);
    if let Some(x) = a.a {
        let field = match Gf2nField::new(a.n) {
            Ok(f) => f,
            Err(e) => return Envelope::error("bobsymbol", BOB, e),
        };
        return match field.elem(x) {
            Ok(e) => {
                let sym = e.bob_symbol();
                env.line(format!("B_{}({x}) = {sym}", a.n));
                env.payload(json!({ "n": a.n, "a": x, "symbol": sym, "trace": e.trace() }))
            }
            Err(e) => Envelope::error("bobsymbol", BOB, e),
        };
    }
    if !(1..=60).contains(&a.n) {
        return Envelope::error(
            "bobsymbol",
            BOB,
            format!("closed form supports n in 1..=60, got {}", a.n),
        );
    }
    let c = count_b_sets(a.n);
    env.line(format!("|B0| = {}, |B1| = {}", c.b0, c.b1));
    let mut payload = json!({ "n": a.n, "b0": int(c.b0), "b1": int(c.b1) });
    if a.exhaustive {
        let field = match Gf2nField::new(a.n) {
            Ok(f) => f,
            Err(e) => return Envelope::error("bobsymbol", BOB, e),
        };
        let ex = count_b_sets_exhaustive(&field);
        env.line(format!("exhaustive: |B0| = {}, |B1| = {}", ex.b0, ex.b1));
        payload["exhaustive"] = json!({ "b0": int(ex.b0), "b1": int(ex.b1), "agrees": ex == c });
    }
    env.payload(payload)
}

/// Recover a degree-16 rational function over Z_2022 from noisy points.
#[derive(Debug, Args)]
pub struct InterpArgs {
    /// CSV of index,x,y rows.
    #[arg(long, conflicts_with = "synth")]
    pub input: Option<PathBuf>,
    /// Generate a planted instance from this seed instead of reading a file.
    #[arg(long)]
    pub synth: Option<u64>,
    /// Points in a generated instance.
    #[arg(long, default_value_t = 324)]
    pub points: usize,
    /// Correct points in a generated instance.
    #[arg(long, default_value_t = 90)]
    pub correct: usize,
    /// Points the key must satisfy.
    #[arg(long, default_value_t = DEFAULT_NEED)]
    pub need: usize,
    /// Decoding iterations per mod-6 candidate.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Mod-6 candidates to try, best first.
    #[arg(long, default_value_t = 2)]
    pub max_mod6: usize,
    /// Plain decoding: uniform samples, no error among them.
    #[arg(long)]
    pub plain: bool,
    /// Try every allowed mod-6 candidate even after a key verifies.
    #[arg(long)]
    pub all_ranks: bool,
}

const INTERP: &str = "rational function interpolation with errors";

fn key_json(k: &cryptalg::rfdecoder::RationalFnKey) -> Value {
    json!({ "alpha": k.alpha, "beta": k.beta })
}

pub fn interp(a: &InterpArgs, seed: u64) -> Envelope {
    let points = match (&a.input, a.synth) {
        (Some(p), _) => match load_points(p) {
            Ok(p) => p,
            Err(e) => return Envelope::error("interp", INTERP, e),
        },
        (None, Some(s)) => {
            if a.correct > a.points {
                return Envelope::error("interp", INTERP, "more correct points than points");
            }
            synth_instance(s, a.points, a.correct).0
        }
        (None, None) => return Envelope::error("interp", INTERP, "pass --input or --synth"),
    };
    let params = SolveParams {
        need: a.need,
        budget: a.budget,
        seed,
        max_mod6: a.max_mod6,
        isd: if a.plain {
            IsdOptions::PLAIN
        } else {
            IsdOptions::default()
        },
        all_ranks: a.all_ranks,
    };
    let mut env = Envelope::new("interp", INTERP);
    match solve_full(&points, &params) {
        Ok(r) => {
            env.line(format!(
                "{} points, best mod-6 agreement counts {:?}",
                points.len(),
                r.mod6_counts
            ));
            env.line(format!(
                "retained {:?}, decoding iterations {}",
                r.retained, r.isd_iterations
            ));
            for c in &r.candidates {
                env.line(format!(
                    "key satisfies {} points (mod-6 rank {})",
                    c.satisfied, c.mod6_rank
                ));
                env.line(format!("  alpha {:?}", c.key.alpha));
                env.line(format!("  beta  {:?}", c.key.beta));
            }
            let cands: Vec<Value> = r
                .candidates
                .iter()
                .map(|c| json!({ "key": key_json(&c.key), "satisfied": c.satisfied, "mod6_rank": c.mod6_rank }))
                .collect();
            env.payload(json!({
                "points": points.len(),
                "mod6_counts": r.mod6_counts,
                "retained": r.retained,
                "expected_retained": r.expected_retained,
                "isd_iterations": r.isd_iterations,
                "candidates": cands,
            }))
        }
        Err(RfError::NoCandidate) => {
            env.line("no candidate key survived verification");
            env.status(Status::NoCandidate)
                .payload(json!({ "points": points.len(), "candidates": [] }))
        }
        Err(e) => Envelope::error("interp", INTERP, e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixChoice {
    A1,
    A2,
    #[value(name = "a2-typeset")]
    A2Typeset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Propagation,
    FullTrace,
    Sampled,
}

#[derive(Debug, Subcommand)]
pub enum FeistelCommand {
    /// Check that a difference set is mapped into itself with probability 1.
    Verify(FeistelVerifyArgs),
}

#[derive(Debug, Args)]
pub struct FeistelVerifyArgs {
    /// A1 is checked against {α3 ⊕ α1 = ε}; A2 and its typeset variant
    /// against {(0, δ, δ, θ)}.
    #[arg(long, value_enum)]
    pub matrix: MatrixChoice,
    /// Word width in bits.
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub rounds: usize,
    /// `random:SEED`, `perm:SEED`, `identity`, or a path to a file of 2^m
    /// integers. Defaults to `random:<seed>`.
    #[arg(long)]
    pub sbox: Option<String>,
    /// Single ε for A1; all values when omitted.
    #[arg(long)]
    pub eps: Option<u8>,
    #[arg(long, value_enum, default_value_t = ModeChoice::Propagation)]
    pub mode: ModeChoice,
    /// Pairs checked in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

const FEISTEL: &str = "generalized Feistel difference invariants";

fn parse_sbox(desc: &str, m: u32) -> Result<SBox, String> {
    let seeded = |s: &str| s.parse::<u64>().map_err(|e| format!("bad S-box seed {s:?}: {e}"));
    if let Some(s) = desc.strip_prefix("random:") {
        return SBox::random_function(m, &mut ChaCha8Rng::seed_from_u64(seeded(s)?)).map_err(|e| e.to_string());
    }
    if let Some(s) = desc.strip_prefix("perm:") {
        return SBox::random_permutation(m, &mut ChaCha8Rng::seed_from_u64(seeded(s)?)).map_err(|e| e.to_string());
    }
    if desc == "identity" {
        return SBox::identity(m).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(desc).map_err(|e| format!("{desc}: {e}"))?;
    let table = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u8>().map_err(|e| format!("bad S-box entry {t:?}: {e}")))
        .collect::<Result<Vec<u8>, String>>()?;
    SBox::new(m, table).map_err(|e| e.to_string())
}

fn report_json(label: Value, r: &InvarianceReport) -> Value {
    json!({
        "set": label,
        "holds": r.holds,
        "exhaustive": r.exhaustive,
        "set_size": r.set_size,
        "checked": int(r.checked),
        "counterexample": r.counterexample.as_ref().map(|c| json!({
            "input": c.input,
            "input_difference": c.input_difference,
            "keys": c.keys.iter().map(|k| [k.0, k.1]).collect::<Vec<_>>(),
            "output_difference": c.output_difference,
        })),
    })
}

pub fn feistel(c: &FeistelCommand, seed: u64) -> Envelope {
    let FeistelCommand::Verify(a) = c;
    let fail = |e: &dyn std::fmt::Display| Envelope::error("feistel", FEISTEL, e);
    let sbox = match parse_sbox(a.sbox.as_deref().unwrap_or(&format!("random:{seed}")), a.m) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let matrix = match a.matrix {
        MatrixChoice::A1 => BinaryMatrix::A1,
        MatrixChoice::A2 => BinaryMatrix::A2,
        MatrixChoice::A2Typeset => BinaryMatrix::A2_TYPESET,
    };
    let params = match FeistelParams::new(matrix, sbox, a.rounds) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let mode = match a.mode {
        ModeChoice::Propagation => VerifyMode::Propagation,
        ModeChoice::FullTrace => VerifyMode::FullTrace,
        ModeChoice::Sampled => VerifyMode::Sampled {
            samples: a.samples,
            seed,
        },
    };
    let mut env = Envelope::new("feistel", FEISTEL);
    let flags = params.sbox.flags();
    env.line(format!(
        "m = {}, rounds = {}, S-box {:?} (bijective {}, affine {})",
        a.m,
        a.rounds,
        params.sbox.table(),
        flags.bijective,
        flags.affine
    ));
    let mut reports = Vec::new();
    let mut all_hold = true;
    let mut run = |label: Value, text: String, r: Result<InvarianceReport, cryptalg::feistel::FeistelError>| match r {
        Ok(r) => {
            all_hold &= r.holds;
            env.line(format!("{text}: {}", if r.holds { "holds" } else { "fails" }));
            if let Some(c) = &r.counterexample {
                env.line(format!(
                    "  counterexample: input {:?}, difference {:?} -> {:?}, keys {:?}",
                    c.input, c.input_difference, c.output_difference, c.keys
                ));
            }
            reports.push(report_json(label, &r));
            Ok(())
        }
        Err(e) => Err(e),
    };
    let outcome = if a.matrix == MatrixChoice::A1 {
        let eps: Vec<u8> = match a.eps {
            Some(e) => vec![e],
            None => (0..1u16 << a.m).map(|e| e as u8).collect(),
        };
        eps.into_iter().try_for_each(|e| {
            run(
                json!({ "kind": "xor-outer", "eps": e }),
                format!("a3 ^ a1 = {e}"),
                verify_theorem1(&params, e, mode),
            )
        })
    } else {
        run(
            json!({ "kind": "zero-equal-pair" }),
            "(0, d, d, t)".into(),
            verify_theorem2(&params, mode),
        )
    };
    if let Err(e) = outcome {
        return fail(&e);
    }
    env.payload(json!({
        "m": a.m,
        "rounds": a.rounds,
        "sbox": params.sbox.table(),
        "sbox_bijective": flags.bijective,
        "sbox_affine": flags.affine,
        "all_hold": all_hold,
        "reports": reports,
    }))
}

#[derive(Debug, Subcommand)]
pub enum SboxCommand {
    /// Count super-dependent permutations of F_2^n.
    Count(SboxCountArgs),
}

#[derive(Debug, Args)]
pub struct SboxCountArgs {
    #[arg(long)]
    pub n: u32,
    /// Exhaustive count (n ≤ 3).
    #[arg(long, conflicts_with_all = ["bounds", "mc"])]
    pub exact: bool,
    /// Inclusion–exclusion bounds from |A1|.
    #[arg(long, conflicts_with = "mc")]
    pub bounds: bool,
    /// Monte-Carlo estimate with this many samples.
    #[arg(long)]
    pub mc: Option<u64>,
}

const SBOX: &str = "super-dependent S-boxes";

/// A big count as the usual JSON integer plus its decimal string.
fn count_fields(payload: &mut Value, key: &str, decimal: String) {
    payload[key] = big_decimal(&decimal);
    payload[format!("{key}_decimal")] = json!(decimal);
}

pub fn sbox(c: &SboxCommand, seed: u64) -> Envelope {
    let SboxCommand::Count(a) = c;
    let fail = |e: &dyn std::fmt::Display| Envelope::error("sbox", SBOX, e);
    let mut env = Envelope::new("sbox", SBOX);
    let mut payload = json!({ "n": a.n });
    let exact = a.exact || (!a.bounds && a.mc.is_none() && a.n <= 3);
    let bounds = a.bounds || (!a.exact && a.mc.is_none() && a.n > 3);
    if exact {
        match count_super_dependent_exact(a.n) {
            Ok(s) => {
                env.line(format!("S({}) = {s}", a.n));
                payload["mode"] = json!("exact");
                payload["s"] = int(s);
            }
            Err(e) => return fail(&e),
        }
    }
    if bounds {
        let (lo, hi) = match s_bounds(a.n) {
            Ok(b) => b,
            Err(e) => return fail(&e),
        };
        let a1 = match a1_size(a.n) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        };
        let h: Vec<Value> = (0..=a.n.min(4))
            .filter_map(|k| h_count(k).ok())
            .map(|v| big_decimal(&v.to_string()))
            .collect();
        env.line(format!("|A1| = {a1}"));
        env.line(format!("{lo} <= S({}) <= {hi}", a.n));
        payload["mode"] = json!("bounds");
        count_fields(&mut payload, "a1", a1.to_string());
        count_fields(&mut payload, "lower", lo.to_string());
        count_fields(&mut payload, "upper", hi.to_string());
        payload["h"] = json!(h);
    }
    if let Some(samples) = a.mc {
        match s_estimate_monte_carlo(a.n, samples, seed) {
            Ok(m) => {
                env.line(format!(
                    "fraction {:.6} ({} / {}), 95% interval [{:.6}, {:.6}]",
                    m.fraction, m.hits, m.samples, m.ci_low, m.ci_high
                ));
                payload["mode"] = json!("monte-carlo");
                payload["estimate"] = json!({
                    "hits": m.hits, "samples": m.samples, "fraction": m.fraction,
                    "ci_low": m.ci_low, "ci_high": m.ci_high,
                });
            }
            Err(e) => return fail(&e),
        }
    }
    env.payload(payload)
}

#[derive(Debug, Subcommand)]
pub enum QsimCommand {
    /// Run one of the built-in circuit experiments.
    Demo(QsimDemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentChoice {
    ReversedCnot,
    GhzPlus,
    WMeasure,
    WPlus,
}

#[derive(Debug, Args)]
pub struct QsimDemoArgs {
    #[arg(long, value_enum)]
    pub experiment: ExperimentChoice,
}

const QSIM: &str = "three-qubit entanglement circuits";

fn state_json(s: &QuantumState) -> Value {
    let amps: Vec<Value> = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-15)
        .map(|(i, a)| json!({ "basis": s.label(i), "re": a.re, "im": a.im, "probability": a.norm_sqr() }))
        .collect();
    json!({ "qubits": s.qubits(), "amplitudes": amps })
}

fn state_text(s: &QuantumState) -> String {
    s.amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
        .map(|(i, a)| format!("({:+.6}{:+.6}i)|{}>", a.re, a.im, s.label(i)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn qsim(c: &QsimCommand) -> Envelope {
    let QsimCommand::Demo(a) = c;
    let e = match a.experiment {
        ExperimentChoice::ReversedCnot => Experiment::ReversedCnot,
        ExperimentChoice::GhzPlus => Experiment::GhzPlus,
        ExperimentChoice::WMeasure => Experiment::WMeasure,
        ExperimentChoice::WPlus => Experiment::WPlus,
    };
    let r = match run_experiment(e) {
        Ok(r) => r,
        Err(err) => return Envelope::error("qsim", QSIM, err),
    };
    let mut env = Envelope::new("qsim", QSIM);
    env.line(format!("experiment {}", e.name()));
    let mut payload = json!({ "experiment": e.name() });
    if r.truth_table.is_empty() {
        env.line(format!("state: {}", state_text(&r.state)));
        payload["state"] = state_json(&r.state);
    } else {
        let rows: Vec<Value> = r
            .truth_table
            .iter()
            .map(|(input, out)| {
                env.line(format!("|{input}> -> {}", state_text(out)));
                json!({ "input": input, "output": state_json(out) })
            })
            .collect();
        payload["truth_table"] = json!(rows);
    }
    let sel: Vec<Value> = r
        .selections
        .iter()
        .map(|s| {
            env.line(format!(
                "{}: probability {:.12}, remaining {}, {}",
                s.description,
                s.probability,
                state_text(&s.remaining),
                if s.entangled { "entangled" } else { "separable" }
            ));
            json!({
                "description": s.description,
                "qubit": s.qubit,
                "hadamard_first": s.hadamard_first,
                "outcome": u8::from(s.outcome),
                "probability": s.probability,
                "remaining": state_json(&s.remaining),
                "entangled": s.entangled,
                "singular_values": s.singular_values,
            })
        })
        .collect();
    payload["selections"] = json!(sel);
    env.payload(payload)
}
