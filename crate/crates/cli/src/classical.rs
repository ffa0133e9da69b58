use crate::envelope::{Envelope, Status};
use clap::Args;
use cryptalg::classical::{
    hidden_primes_from, hill_recover_realigned, pin_solve_trace, polybius_decode, polybius_encode, quad_decrypt,
    quad_encrypt, quad_key_recover, simulate_wallet_splits, wallet_feasible, Alphabet, IjPreference, Mat2,
    PolybiusGrid,
};
use serde_json::{json, Value};
use std::path::PathBuf;

fn read_text(inline: &Option<String>, file: &Option<PathBuf>) -> Result<String, String> {
    match (inline, file) {
        (Some(s), None) => Ok(s.clone()),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map(|s| s.trim_end_matches(['\r', '\n']).to_string())
            .map_err(|e| format!("{}: {e}", p.display())),
        (Some(_), Some(_)) => Err("give either --cipher or --file, not both".into()),
        (None, None) => Err("no ciphertext: pass --cipher or --file".into()),
    }
}

/// Decode a Polybius-square ciphertext of "row column ." groups.
#[derive(Debug, Args)]
pub struct PolybiusArgs {
    /// Ciphertext such as "21.42.24.15.33.14.".
    #[arg(long, conflicts_with = "encode")]
    pub cipher: Option<String>,
    /// Read the ciphertext from a text file.
    #[arg(long, conflicts_with_all = ["cipher", "encode"])]
    pub file: Option<PathBuf>,
    /// Encode this plaintext instead of decoding.
    #[arg(long)]
    pub encode: Option<String>,
    /// Grid letters, 25 of them, row by row (I stands for I/J).
    #[arg(long)]
    pub grid: Option<String>,
    /// Print J rather than I for the shared cell.
    #[arg(long)]
    pub j: bool,
}

const POLYBIUS: &str = "Polybius square";

pub fn polybius(a: &PolybiusArgs) -> Envelope {
    let grid = match &a.grid {
        Some(g) => match PolybiusGrid::new(g) {
            Ok(g) => g,
            Err(e) => return Envelope::error("polybius", POLYBIUS, e),
        },
        None => PolybiusGrid::default(),
    };
    let mut env = Envelope::new("polybius", POLYBIUS);
    if let Some(plain) = &a.encode {
        return match polybius_encode(plain, &grid) {
            Ok(c) => {
                env.line(&c);
                env.payload(json!({ "plaintext": plain, "ciphertext": c }))
            }
            Err(e) => Envelope::error("polybius", POLYBIUS, e),
        };
    }
    let cipher = match read_text(&a.cipher, &a.file) {
        Ok(c) => c,
        Err(e) => return Envelope::error("polybius", POLYBIUS, e),
    };
    let pref = if a.j { IjPreference::J } else { IjPreference::I };
    match polybius_decode(&cipher, &grid, pref) {
        Ok(p) => {
            env.line(&p);
            env.payload(json!({ "ciphertext": cipher, "plaintext": p }))
        }
        Err(e) => Envelope::error("polybius", POLYBIUS, e),
    }
}

/// Recover the quadratic substitution key over Z_37 and decrypt.
#[derive(Debug, Args)]
pub struct QuadArgs {
    /// Ciphertext over A-Z, 0-9 and space.
    #[arg(long, conflicts_with = "encrypt")]
    pub cipher: Option<String>,
    #[arg(long, conflicts_with_all = ["cipher", "encrypt"])]
    pub file: Option<PathBuf>,
    /// Encrypt this plaintext with the recovered key instead.
    #[arg(long)]
    pub encrypt: Option<String>,
    /// Rank candidates by how many space-separated tokens are among these words.
    #[arg(long, value_delimiter = ',')]
    pub words: Vec<String>,
    /// Number of candidates to list.
    #[arg(long, default_value_t = 20)]
    pub limit: usize,
}

const QUAD: &str = "quadratic substitution cipher modulo 37";

pub fn quadcipher(a: &QuadArgs) -> Envelope {
    let fail = |e: &dyn std::fmt::Display| Envelope::error("quadcipher", QUAD, e);
    let key = match quad_key_recover() {
        Ok(k) => k,
        Err(e) => return fail(&e),
    };
    let ab = Alphabet::latin37();
    let key_json = json!({ "a": key.a, "b": key.b, "c": key.c });
    let mut env = Envelope::new("quadcipher", QUAD);
    env.line(format!("key: f(x) = {}x^2 + {}x + {} (mod 37)", key.a, key.b, key.c));
    if let Some(plain) = &a.encrypt {
        return match quad_encrypt(plain, &key, &ab) {
            Ok(c) => {
                env.line(format!("ciphertext: {c}"));
                env.payload(json!({ "key": key_json, "plaintext": plain, "ciphertext": c }))
            }
            Err(e) => fail(&e),
        };
    }
    let cipher = match read_text(&a.cipher, &a.file) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let words: Vec<String> = a.words.iter().map(|w| w.to_uppercase()).collect();
    let score = |s: &str| s.split(' ').filter(|t| words.iter().any(|w| w == t)).count() as i64;
    let scorer: Option<&dyn Fn(&str) -> i64> = if words.is_empty() { None } else { Some(&score) };
    match quad_decrypt(&cipher, &key, &ab, scorer) {
        Ok(all) => {
            let shown: Vec<&String> = all.iter().take(a.limit).collect();
            env.line(format!("{} candidate plaintexts", all.len()));
            for s in &shown {
                env.line(format!("  {s:?}"));
            }
            env.payload(json!({
                "key": key_json,
                "ciphertext": cipher,
                "candidate_count": all.len(),
                "candidates": shown,
            }))
        }
        Err(e) => fail(&e),
    }
}

/// Recover a 2x2 Hill decryption matrix mod 30 from one known block.
#[derive(Debug, Args)]
pub struct HillArgs {
    /// Ciphertext over A-Z, 0, 1, comma and '!'.
    #[arg(long)]
    pub cipher: Option<String>,
    #[arg(long, conflicts_with = "cipher")]
    pub file: Option<PathBuf>,
    /// Zero-based index of the block whose plaintext is known.
    #[arg(long, default_value_t = 2)]
    pub block_index: usize,
    /// The known four-symbol plaintext block.
    #[arg(long, default_value = "FORW")]
    pub known: String,
}

const HILL: &str = "Hill cipher known-plaintext recovery";

fn mat(m: &Mat2) -> Value {
    json!(m.0)
}

pub fn hill(a: &HillArgs) -> Envelope {
    let cipher = match read_text(&a.cipher, &a.file) {
        Ok(c) => c,
        Err(e) => return Envelope::error("hill", HILL, e),
    };
    let ab = Alphabet::latin30();
    let aligned = match hill_recover_realigned(&cipher, a.block_index, &a.known, &ab) {
        Ok(v) => v,
        Err(e) => return Envelope::error("hill", HILL, e),
    };
    let mut env = Envelope::new("hill", HILL);
    let mut invertible = 0;
    let mut alignments = Vec::new();
    for r in &aligned {
        if let Some(i) = r.dropped_index {
            env.line(format!("dropping symbol {i}: {}", r.ciphertext));
        }
        let mut cands = Vec::new();
        for c in &r.candidates {
            if c.invertible {
                invertible += 1;
            }
            env.line(format!(
                "  lift {:?} decrypt {:?} {} {}",
                c.lift.0,
                c.decrypt.0,
                if c.invertible { "invertible" } else { "singular" },
                c.plaintext
            ));
            cands.push(json!({
                "lift": mat(&c.lift),
                "decrypt": mat(&c.decrypt),
                "invertible": c.invertible,
                "plaintext": c.plaintext,
            }));
        }
        alignments.push(json!({
            "dropped_index": r.dropped_index,
            "ciphertext": r.ciphertext,
            "candidates": cands,
        }));
    }
    let status = if invertible > 0 {
        Status::Ok
    } else {
        Status::NoCandidate
    };
    env.status(status)
        .payload(json!({ "alignments": alignments, "invertible_candidates": invertible }))
}

/// Find the PIN from the two overheard hints.
#[derive(Debug, Args)]
pub struct PinArgs {}

const PIN: &str = "PIN code from overheard hints";

pub fn pin(_: &PinArgs) -> Envelope {
    let t = pin_solve_trace();
    let mut env = Envelope::new("pin", PIN);
    env.line(format!("candidates: {:?}", t.candidates));
    env.line(format!("survivors: {:?}", t.survivors));
    let status = if t.survivors.len() == 1 {
        Status::Ok
    } else {
        Status::NoCandidate
    };
    env.status(status).payload(json!({
        "candidates": t.candidates,
        "digit_sum_ambiguous": t.digit_sum_ambiguous,
        "product_sum_ambiguous": t.product_sum_ambiguous,
        "survivors": t.survivors,
        "pin": (t.survivors.len() == 1).then(|| t.survivors[0]),
    }))
}

/// Decide whether repeated splitting, one coin commission per split, can
/// leave every wallet with the same amount.
#[derive(Debug, Args)]
pub struct WalletArgs {
    #[arg(long, default_value_t = 2022)]
    pub total: u64,
    /// Coins wanted in every wallet.
    #[arg(long, default_value_t = 8)]
    pub target: u64,
}

const WALLET: &str = "wallet splitting with commission";

pub fn wallet(a: &WalletArgs) -> Envelope {
    let mut env = Envelope::new("wallet", WALLET);
    if a.target == 0 {
        return Envelope::error("wallet", WALLET, "target must be positive");
    }
    // total − n = target·(n + 1)  ⇔  total − target = (target + 1)·n
    let equation = format!("{} = {}n", a.total.saturating_sub(a.target), a.target + 1);
    match wallet_feasible(a.total, a.target) {
        None => {
            env.line(format!("infeasible: {equation} has no natural solution"));
            env.status(Status::Infeasible).payload(json!({
                "total": a.total, "target": a.target, "equation": equation, "splits": null,
            }))
        }
        Some(n) => {
            let wallets = simulate_wallet_splits(a.total, a.target, n);
            env.line(format!("feasible with {n} splits ({equation})"));
            env.payload(json!({
                "total": a.total, "target": a.target, "equation": equation, "splits": n,
                "wallets": wallets.map(|w| w.len()),
            }))
        }
    }
}

/// Find the three primes hidden as roots of a cubic.
#[derive(Debug, Args)]
pub struct PrimesArgs {
    /// Coefficients of x^3 + a2 x^2 + a1 x + a0.
    #[arg(long, default_value_t = -342, allow_hyphen_values = true)]
    pub a2: i64,
    #[arg(long, default_value_t = 1691, allow_hyphen_values = true)]
    pub a1: i64,
    #[arg(long, default_value_t = -2022, allow_hyphen_values = true)]
    pub a0: i64,
}

const PRIMES: &str = "hidden primes";

pub fn primes(a: &PrimesArgs) -> Envelope {
    match hidden_primes_from(a.a2, a.a1, a.a0) {
        Ok(h) => {
            let mut env = Envelope::new("primes", PRIMES);
            env.line(format!("primes {:?}, quotient {}", h.primes, h.quotient));
            env.payload(json!({ "primes": h.primes, "quotient": h.quotient }))
        }
        Err(e) => Envelope::error("primes", PRIMES, e).status(Status::NoCandidate),
    }
}
