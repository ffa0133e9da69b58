//! Key-free message transfer and single-use e-coin key chains.

pub mod ecoin;
pub mod threepass;

pub use ecoin::{
    group_sign, group_verify, rabin_sign, rabin_verify, recover_master_secret, run_scenario, CoinLedger, CoinState,
    EcoinError, Event, EventKind, GroupChain, GroupKeys, RabinChain, RabinKeys, RabinPublic, ScenarioReport, Scheme,
    SchnorrGroup, SchnorrSignature, ServiceKeys, SpendProof, SpendReject,
};
pub use threepass::{
    add_eavesdrop_attack, multiplicative_attack, shamir_roundtrip, shamir_run, threepass_generic, translation_attack,
    xor_eavesdrop_attack, ByteTable, GenericRun, ShamirParty, ShamirRun, ThreePassError, Transcript,
};
