//! `cryptalg`: command-line front end for the toolkit.
//!
//! Every subcommand prints a result envelope, as plain text or as JSON with
//! `--json`. Exit status is 0 for `ok` and `infeasible`, 1 for
//! `no-candidate` and `error`, 2 for usage errors.

mod analysis;
mod classical;
mod envelope;
mod protocols;

use clap::{Parser, Subcommand};
use envelope::Envelope;
use std::io::Write;
use std::process::ExitCode;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 2022;

#[derive(Debug, Parser)]
#[command(
    name = "cryptalg",
    version,
    about = "Cryptanalysis and computational-algebra toolkit"
)]
pub struct Cli {
    /// Emit the result envelope as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for parallel searches (0 = one per core). Results do
    /// not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Polybius(classical::PolybiusArgs),
    Quadcipher(classical::QuadArgs),
    Hill(classical::HillArgs),
    Pin(classical::PinArgs),
    Wallet(classical::WalletArgs),
    Primes(classical::PrimesArgs),
    Bobsymbol(analysis::BobArgs),
    Interp(analysis::InterpArgs),
    #[command(subcommand)]
    Feistel(analysis::FeistelCommand),
    #[command(subcommand)]
    Sbox(analysis::SboxCommand),
    #[command(subcommand)]
    Qsim(analysis::QsimCommand),
    Threepass(protocols::ThreePassArgs),
    Ecoin(protocols::EcoinArgs),
}

pub fn dispatch(cli: &Cli) -> Envelope {
    let seed = cli.seed;
    match &cli.command {
        Command::Polybius(a) => classical::polybius(a),
        Command::Quadcipher(a) => classical::quadcipher(a),
        Command::Hill(a) => classical::hill(a),
        Command::Pin(a) => classical::pin(a),
        Command::Wallet(a) => classical::wallet(a),
        Command::Primes(a) => classical::primes(a),
        Command::Bobsymbol(a) => analysis::bobsymbol(a),
        Command::Interp(a) => analysis::interp(a, seed),
        Command::Feistel(c) => analysis::feistel(c, seed),
        Command::Sbox(c) => analysis::sbox(c, seed),
        Command::Qsim(c) => analysis::qsim(c),
        Command::Threepass(a) => protocols::threepass(a, seed),
        Command::Ecoin(a) => protocols::ecoin(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let env = dispatch(&cli);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(env.render(cli.json).as_bytes());
    let _ = out.flush();
    ExitCode::from(env.status.exit_code() as u8)
}
