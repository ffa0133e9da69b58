use crate::envelope::{int, Envelope, Status};
use clap::{Args, ValueEnum};
use cryptalg::protocols::{
    add_eavesdrop_attack, multiplicative_attack, run_scenario, shamir_roundtrip, threepass_generic,
    xor_eavesdrop_attack, ByteTable, EventKind, Scheme, Transcript,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThreePassMode {
    /// Shamir's protocol with exponentiation modulo a prime.
    Shamir,
    /// XOR ciphers, which commute, next to a byte table, which does not.
    XorDemo,
    /// An eavesdropper combining the three transcript values.
    Attack,
}

/// Three-pass message transfer without a shared key.
#[derive(Debug, Args)]
pub struct ThreePassArgs {
    #[arg(long, value_enum, default_value_t = ThreePassMode::Shamir)]
    pub mode: ThreePassMode,
    /// Prime modulus for Shamir's protocol.
    #[arg(long, default_value_t = 1_000_003)]
    pub p: u64,
    /// Message; defaults to a value drawn from the seed.
    #[arg(long)]
    pub m: Option<u64>,
}

const THREEPASS: &str = "three-pass protocol";

fn transcript<T: Into<u128> + Copy>(t: &Transcript<T>) -> Value {
    json!({ "x1": int(t.x1), "x2": int(t.x2), "x3": int(t.x3) })
}

pub fn threepass(a: &ThreePassArgs, seed: u64) -> Envelope {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = Envelope::new("threepass", THREEPASS);
    match a.mode {
        ThreePassMode::Shamir => {
            let m =
                a.m.unwrap_or_else(|| if a.p > 3 { rng.gen_range(2..a.p - 1) } else { 2 });
            match shamir_roundtrip(a.p, m, seed) {
                Ok(r) => {
                    env.line(format!("p = {}, m = {m}", a.p));
                    env.line(format!(
                        "alice c = {}, d = {}",
                        r.alice.encrypt_exp, r.alice.decrypt_exp
                    ));
                    env.line(format!("bob   c = {}, d = {}", r.bob.encrypt_exp, r.bob.decrypt_exp));
                    env.line(format!(
                        "x1 = {}, x2 = {}, x3 = {}",
                        r.transcript.x1, r.transcript.x2, r.transcript.x3
                    ));
                    env.line(format!("bob recovers {}", r.recovered));
                    let status = if r.recovered == m { Status::Ok } else { Status::Error };
                    env.status(status).payload(json!({
                        "p": int(a.p),
                        "message": int(m),
                        "alice": { "c": int(r.alice.encrypt_exp), "d": int(r.alice.decrypt_exp) },
                        "bob": { "c": int(r.bob.encrypt_exp), "d": int(r.bob.decrypt_exp) },
                        "transcript": transcript(&r.transcript),
                        "recovered": int(r.recovered),
                    }))
                }
                Err(e) => Envelope::error("threepass", THREEPASS, e),
            }
        }
        ThreePassMode::XorDemo => {
            let (ka, kb): (u8, u8) = (rng.gen(), rng.gen());
            let m = a.m.map(|m| m as u8).unwrap_or_else(|| rng.gen());
            let xor = threepass_generic(|x: &u8| x ^ ka, |x| x ^ ka, |x| x ^ kb, |x| x ^ kb, m);
            let table = ByteTable::random(&mut rng);
            let mixed = threepass_generic(
                |x: &u8| table.encrypt(*x),
                |x| table.decrypt(*x),
                |x| x ^ kb,
                |x| x ^ kb,
                m,
            );
            env.line(format!("message {m}, keys {ka} and {kb}"));
            env.line(format!(
                "xor / xor: recovered {} ({})",
                xor.recovered,
                if xor.success { "success" } else { "failure" }
            ));
            env.line(format!(
                "table / xor: recovered {} ({})",
                mixed.recovered,
                if mixed.success { "success" } else { "failure" }
            ));
            env.payload(json!({
                "message": m,
                "keys": [ka, kb],
                "xor": { "transcript": transcript(&xor.transcript), "recovered": xor.recovered, "success": xor.success },
                "table_xor": { "transcript": transcript(&mixed.transcript), "recovered": mixed.recovered, "success": mixed.success },
            }))
        }
        ThreePassMode::Attack => {
            let (ka, kb): (u64, u64) = (rng.gen(), rng.gen());
            let m = a.m.unwrap_or_else(|| rng.gen());
            let xor = threepass_generic(|x: &u64| x ^ ka, |x| x ^ ka, |x| x ^ kb, |x| x ^ kb, m);
            let xor_found = xor_eavesdrop_attack(&xor.transcript);

            let (ka32, kb32): (u32, u32) = (rng.gen(), rng.gen());
            let m32 = m as u32;
            let add = threepass_generic(
                |x: &u32| x.wrapping_add(ka32),
                |x| x.wrapping_sub(ka32),
                |x| x.wrapping_add(kb32),
                |x| x.wrapping_sub(kb32),
                m32,
            );
            let add_found = add_eavesdrop_attack(&add.transcript);

            let p = a.p;
            let sm = if p > 3 { 2 + m % (p - 3) } else { 2 };
            let shamir = match shamir_roundtrip(p, sm, seed) {
                Ok(r) => r,
                Err(e) => return Envelope::error("threepass", THREEPASS, e),
            };
            let mul_found = multiplicative_attack(&shamir.transcript, p);

            env.line(format!("xor: message {m}, attacker computes {xor_found}"));
            env.line(format!("add mod 2^32: message {m32}, attacker computes {add_found}"));
            env.line(format!("shamir mod {p}: message {sm}, attacker computes {mul_found}"));
            env.payload(json!({
                "xor": { "message": int(m), "transcript": transcript(&xor.transcript), "attack": int(xor_found), "recovered": xor_found == m },
                "add": { "message": m32, "transcript": transcript(&add.transcript), "attack": add_found, "recovered": add_found == m32 },
                "shamir": { "p": int(p), "message": int(sm), "transcript": transcript(&shamir.transcript), "attack": int(mul_found), "recovered": mul_found == sm },
            }))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    /// Square roots modulo a secret composite.
    Rabin,
    /// Scaled exponents in a prime-order group.
    Group,
}

/// Scripted issue/spend/double-spend run of an e-coin key chain.
#[derive(Debug, Args)]
pub struct EcoinArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeChoice,
    #[arg(long, default_value_t = 5)]
    pub coins: u64,
}

const ECOIN: &str = "public keys for e-coins";

fn kind_name(k: &EventKind) -> &'static str {
    match k {
        EventKind::Issue => "issue",
        EventKind::Spend => "spend",
        EventKind::DoubleSpend => "double-spend",
        EventKind::WrongIndex => "wrong-index",
        EventKind::Unissued => "unissued",
        EventKind::MasterLeak { .. } => "master-leak",
    }
}

pub fn ecoin(a: &EcoinArgs, seed: u64) -> Envelope {
    let scheme = match a.scheme {
        SchemeChoice::Rabin => Scheme::Rabin,
        SchemeChoice::Group => Scheme::Group,
    };
    if a.coins == 0 {
        return Envelope::error("ecoin", ECOIN, "at least one coin is needed");
    }
    let r = match run_scenario(scheme, a.coins, seed) {
        Ok(r) => r,
        Err(e) => return Envelope::error("ecoin", ECOIN, e),
    };
    let mut env = Envelope::new("ecoin", ECOIN);
    let events: Vec<Value> = r
        .events
        .iter()
        .map(|e| {
            let outcome = match &e.outcome {
                Ok(()) => "accepted".to_string(),
                Err(reason) => format!("rejected: {reason}"),
            };
            let mut v = json!({ "index": e.index, "event": kind_name(&e.kind), "outcome": outcome });
            if let EventKind::MasterLeak { recovered } = e.kind {
                v["master_secret_recovered"] = json!(recovered);
                env.line(format!(
                    "coin {}: leaked coin key {} the master secret",
                    e.index,
                    if recovered { "reveals" } else { "does not reveal" }
                ));
            } else {
                env.line(format!("coin {}: {} {}", e.index, kind_name(&e.kind), outcome));
            }
            v
        })
        .collect();
    let ok = r.as_expected();
    env.line(if ok {
        "all outcomes as expected"
    } else {
        "unexpected outcome"
    });
    env.status(if ok { Status::Ok } else { Status::Error }).payload(json!({
        "scheme": match scheme { Scheme::Rabin => "rabin", Scheme::Group => "group" },
        "coins": a.coins,
        "events": events,
        "as_expected": ok,
    }))
}
