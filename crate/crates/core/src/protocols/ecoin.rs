//! E-coin key chains. Alice owns a chain of coins; coin `i` carries a key
//! pair `(PK_i, SK_i)`. Only Alice can produce the secret keys, while the
//! service can derive every public key on its own and check spends.
//!
//! Scheme A (Rabin): `PK_i` is a quadratic residue mod `N = p·q` taken from
//! a hash stream keyed by the master seed, and `SK_i` its smallest square
//! root. Scheme B (group): `SK_i = SK₀·H(i)` in the exponent group of a
//! Schnorr subgroup, so `PK_i = PK₀^{H(i)}`.
//!
//! Hash layouts, all SHA-256 with big-endian integers:
//!
//! | use | input |
//! |-----|-------|
//! | Rabin candidate block `j` | `"ecoin/rabin/pk" ‖ K ‖ u64 i ‖ u64 counter ‖ u32 j` |
//! | message hash into `Z_N*` | `"ecoin/rabin/msg" ‖ u32 attempt ‖ m` |
//! | coin hash `H(i)` into `Z_q*` | `"ecoin/group/index" ‖ u64 i ‖ u32 attempt` |
//! | Schnorr nonce | `"ecoin/group/nonce" ‖ SK ‖ m` |
//! | Schnorr challenge | `"ecoin/group/challenge" ‖ R ‖ PK ‖ m` |
//!
//! Wide values are formed by concatenating blocks `j = 0, 1, …` until the
//! output has 64 bits more than the modulus, then reduced. Big integers are
//! hashed as their minimal big-endian bytes prefixed by a `u32` length.

use crate::numtheory::{big_mod_inverse, is_probable_prime};
use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EcoinError {
    #[error("invalid chain parameters: {0}")]
    BadParams(String),
    #[error("coin indices start at 1")]
    ZeroIndex,
}

const MR_ROUNDS: usize = 40;

fn hash_parts(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

fn big_bytes(x: &BigUint) -> Vec<u8> {
    let b = x.to_bytes_be();
    let mut out = (b.len() as u32).to_be_bytes().to_vec();
    out.extend(b);
    out
}

/// Hash output widened past `modulus` by 64 bits, reduced mod `modulus`.
fn wide_hash(prefix: &[&[u8]], modulus: &BigUint) -> BigUint {
    let want = modulus.bits() as usize + 64;
    let mut bytes = Vec::new();
    let mut j = 0u32;
    while bytes.len() * 8 < want {
        let jb = j.to_be_bytes();
        let mut parts = prefix.to_vec();
        parts.push(&jb);
        bytes.extend(hash_parts(&parts));
        j += 1;
    }
    BigUint::from_bytes_be(&bytes) % modulus
}

fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R, accept: impl Fn(&BigUint) -> bool) -> BigUint {
    loop {
        let mut c = rng.gen_biguint(bits);
        c.set_bit(bits - 1, true);
        c.set_bit(0, true);
        if accept(&c) && is_probable_prime(&c, MR_ROUNDS, rng) {
            return c;
        }
    }
}

// ---------------------------------------------------------------- scheme A

/// Alice's side of the Rabin chain: the factorization and the master seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RabinChain {
    p: BigUint,
    q: BigUint,
    n: BigUint,
    master: Vec<u8>,
}

/// What the service holds: the modulus and the master seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RabinPublic {
    pub n: BigUint,
    pub master: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RabinKeys {
    pub index: u64,
    /// Stream position at which the first quadratic residue appeared;
    /// published with the coin so the service can recompute `pk`.
    pub counter: u64,
    pub pk: BigUint,
    pub sk: BigUint,
}

impl RabinChain {
    pub fn new(p: BigUint, q: BigUint, master: Vec<u8>) -> Result<Self, EcoinError> {
        let three = BigUint::from(3u32);
        let four = BigUint::from(4u32);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for f in [&p, &q] {
            if f % &four != three {
                return Err(EcoinError::BadParams(format!("{f} is not 3 mod 4")));
            }
            if !is_probable_prime(f, MR_ROUNDS, &mut rng) {
                return Err(EcoinError::BadParams(format!("{f} is not prime")));
            }
        }
        if p == q {
            return Err(EcoinError::BadParams("the two primes must differ".into()));
        }
        let n = &p * &q;
        Ok(Self { p, q, n, master })
    }

    /// Two fresh primes ≡ 3 (mod 4) of `modulus_bits / 2` bits each.
    pub fn generate<R: Rng + ?Sized>(modulus_bits: u64, master: Vec<u8>, rng: &mut R) -> Result<Self, EcoinError> {
        if modulus_bits < 16 {
            return Err(EcoinError::BadParams(format!(
                "modulus of {modulus_bits} bits is too small"
            )));
        }
        let half = modulus_bits / 2;
        let three_mod_four = |c: &BigUint| c.bit(1);
        let p = random_prime(half, rng, three_mod_four);
        let q = loop {
            let q = random_prime(modulus_bits - half, rng, three_mod_four);
            if q != p {
                break q;
            }
        };
        Self::new(p, q, master)
    }

    pub fn public(&self) -> RabinPublic {
        RabinPublic {
            n: self.n.clone(),
            master: self.master.clone(),
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    fn is_qr_mod(a: &BigUint, p: &BigUint) -> bool {
        let r = a % p;
        !r.is_zero() && r.modpow(&((p - 1u32) >> 1), p).is_one()
    }

    /// True if `a` is a unit square mod `N`.
    pub fn is_residue(&self, a: &BigUint) -> bool {
        Self::is_qr_mod(a, &self.p) && Self::is_qr_mod(a, &self.q)
    }

    /// All four square roots of a unit residue, ascending.
    pub fn square_roots(&self, a: &BigUint) -> Vec<BigUint> {
        if !self.is_residue(a) {
            return Vec::new();
        }
        let root = |p: &BigUint| (a % p).modpow(&((p + 1u32) >> 2), p);
        let (rp, rq) = (root(&self.p), root(&self.q));
        // CRT basis: e_p ≡ 1 (mod p), 0 (mod q) and vice versa
        let ep = &self.q * big_mod_inverse(&self.q, &self.p).expect("distinct primes") % &self.n;
        let eq = &self.p * big_mod_inverse(&self.p, &self.q).expect("distinct primes") % &self.n;
        let mut roots = Vec::with_capacity(4);
        for sp in [rp.clone(), &self.p - &rp] {
            for sq in [rq.clone(), &self.q - &rq] {
                roots.push((&sp * &ep + &sq * &eq) % &self.n);
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }

    /// The smallest square root, `None` for non-residues.
    pub fn principal_root(&self, a: &BigUint) -> Option<BigUint> {
        self.square_roots(a).into_iter().next()
    }

    pub fn keys(&self, index: u64) -> Result<RabinKeys, EcoinError> {
        if index == 0 {
            return Err(EcoinError::ZeroIndex);
        }
        let public = self.public();
        let mut counter = 0;
        loop {
            let pk = public.candidate(index, counter);
            if let Some(sk) = self.principal_root(&pk) {
                return Ok(RabinKeys { index, counter, pk, sk });
            }
            counter += 1;
        }
    }
}

impl RabinPublic {
    /// The `counter`-th value of coin `index`'s stream.
    pub fn candidate(&self, index: u64, counter: u64) -> BigUint {
        let (ib, cb) = (index.to_be_bytes(), counter.to_be_bytes());
        wide_hash(&[b"ecoin/rabin/pk", &self.master, &ib, &cb], &self.n)
    }

    /// Service-side public key from the published counter.
    pub fn derive_pk(&self, index: u64, counter: u64) -> BigUint {
        self.candidate(index, counter)
    }

    /// Message hash into `Z_N*`.
    pub fn message_hash(&self, m: &[u8]) -> BigUint {
        let mut attempt = 0u32;
        loop {
            let ab = attempt.to_be_bytes();
            let h = wide_hash(&[b"ecoin/rabin/msg", &ab, m], &self.n);
            if !h.is_zero() && h.gcd(&self.n).is_one() {
                return h;
            }
            attempt += 1;
        }
    }
}

/// `c′ = Hmsg(m)·SK_i mod N`. Anyone holding `c′` and `m` can divide out
/// `SK_i`; that is harmless here because the recipient already holds the
/// coin's key and the coin is single-use.
pub fn rabin_sign(public: &RabinPublic, m: &[u8], sk: &BigUint) -> BigUint {
    public.message_hash(m) * sk % &public.n
}

/// Checks `c′² ≡ Hmsg(m)²·PK_i (mod N)`.
pub fn rabin_verify(public: &RabinPublic, m: &[u8], signature: &BigUint, pk: &BigUint) -> bool {
    let n = &public.n;
    if signature >= n || signature.is_zero() {
        return false;
    }
    let h = public.message_hash(m);
    signature * signature % n == &h * &h % n * pk % n
}

// ---------------------------------------------------------------- scheme B

/// The order-`q` subgroup of `Z_P*` generated by `g`, with `P = 2q·r + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchnorrGroup {
    pub modulus: BigUint,
    pub order: BigUint,
    pub generator: BigUint,
}

impl SchnorrGroup {
    pub fn new(modulus: BigUint, order: BigUint, generator: BigUint) -> Result<Self, EcoinError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        if !is_probable_prime(&modulus, MR_ROUNDS, &mut rng) || !is_probable_prime(&order, MR_ROUNDS, &mut rng) {
            return Err(EcoinError::BadParams("modulus and order must be prime".into()));
        }
        if !((&modulus - 1u32) % &order).is_zero() {
            return Err(EcoinError::BadParams("order does not divide modulus − 1".into()));
        }
        let g = &generator % &modulus;
        if g.is_one() || g.is_zero() || !g.modpow(&order, &modulus).is_one() {
            return Err(EcoinError::BadParams("generator does not have the stated order".into()));
        }
        Ok(Self {
            modulus,
            order,
            generator: g,
        })
    }

    pub fn generate<R: Rng + ?Sized>(order_bits: u64, modulus_bits: u64, rng: &mut R) -> Result<Self, EcoinError> {
        if order_bits < 8 || modulus_bits <= order_bits + 2 {
            return Err(EcoinError::BadParams(format!(
                "sizes {order_bits}/{modulus_bits} bits are unusable"
            )));
        }
        let q = random_prime(order_bits, rng, |_| true);
        let r_bits = modulus_bits - order_bits - 1;
        let two_q = &q << 1;
        let p = loop {
            let mut r = rng.gen_biguint(r_bits);
            r.set_bit(r_bits - 1, true);
            let p = &two_q * &r + 1u32;
            if is_probable_prime(&p, MR_ROUNDS, rng) {
                break p;
            }
        };
        let cofactor = (&p - 1u32) / &q;
        let g = loop {
            let h = rng.gen_biguint_range(&BigUint::from(2u32), &(&p - 1u32));
            let g = h.modpow(&cofactor, &p);
            if !g.is_one() {
                break g;
            }
        };
        Self::new(p, q, g)
    }

    /// 160-bit order in a 512-bit field.
    pub fn test_size<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::generate(160, 512, rng).expect("valid sizes")
    }

    /// 256-bit order in a 2048-bit field.
    pub fn demo_size<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::generate(256, 2048, rng).expect("valid sizes")
    }

    pub fn pow_g(&self, e: &BigUint) -> BigUint {
        self.generator.modpow(e, &self.modulus)
    }

    /// `H(i)` in `Z_q*`.
    pub fn index_hash(&self, index: u64) -> BigUint {
        let ib = index.to_be_bytes();
        let mut attempt = 0u32;
        loop {
            let ab = attempt.to_be_bytes();
            let h = wide_hash(&[b"ecoin/group/index", &ib, &ab], &self.order);
            if !h.is_zero() {
                return h;
            }
            attempt += 1;
        }
    }

    /// `PK_i = PK₀^{H(i)}`, computable without any secret.
    pub fn derive_pk(&self, pk0: &BigUint, index: u64) -> BigUint {
        pk0.modpow(&self.index_hash(index), &self.modulus)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupChain {
    pub group: SchnorrGroup,
    sk0: BigUint,
    pub pk0: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupKeys {
    pub index: u64,
    pub pk: BigUint,
    pub sk: BigUint,
}

impl GroupChain {
    pub fn new(group: SchnorrGroup, sk0: BigUint) -> Result<Self, EcoinError> {
        if sk0.is_zero() || sk0 >= group.order {
            return Err(EcoinError::BadParams("master secret must lie in 1..q".into()));
        }
        let pk0 = group.pow_g(&sk0);
        Ok(Self { group, sk0, pk0 })
    }

    pub fn generate<R: Rng + ?Sized>(group: SchnorrGroup, rng: &mut R) -> Self {
        let sk0 = rng.gen_biguint_range(&BigUint::one(), &group.order);
        Self::new(group, sk0).expect("sampled in range")
    }

    pub fn master_secret(&self) -> &BigUint {
        &self.sk0
    }

    pub fn keys(&self, index: u64) -> Result<GroupKeys, EcoinError> {
        if index == 0 {
            return Err(EcoinError::ZeroIndex);
        }
        let sk = &self.sk0 * self.group.index_hash(index) % &self.group.order;
        Ok(GroupKeys {
            index,
            pk: self.group.pow_g(&sk),
            sk,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchnorrSignature {
    pub commitment: BigUint,
    pub challenge: BigUint,
    pub response: BigUint,
}

fn schnorr_challenge(group: &SchnorrGroup, commitment: &BigUint, pk: &BigUint, m: &[u8]) -> BigUint {
    let (rb, pb) = (big_bytes(commitment), big_bytes(pk));
    wide_hash(&[b"ecoin/group/challenge", &rb, &pb, m], &group.order)
}

/// Schnorr signature with a nonce derived from the key and message.
pub fn group_sign(group: &SchnorrGroup, m: &[u8], sk: &BigUint) -> SchnorrSignature {
    let q = &group.order;
    let skb = big_bytes(sk);
    let nonce = wide_hash(&[b"ecoin/group/nonce", &skb, m], &(q - 1u32)) + 1u32;
    let commitment = group.pow_g(&nonce);
    let pk = group.pow_g(sk);
    let challenge = schnorr_challenge(group, &commitment, &pk, m);
    let response = (nonce + &challenge * sk) % q;
    SchnorrSignature {
        commitment,
        challenge,
        response,
    }
}

/// Verifies against `PK_i` derived from `PK₀` and `index`.
pub fn group_verify(group: &SchnorrGroup, pk0: &BigUint, index: u64, m: &[u8], sig: &SchnorrSignature) -> bool {
    if index == 0 || sig.response >= group.order || sig.commitment >= group.modulus || sig.commitment.is_zero() {
        return false;
    }
    let pk = group.derive_pk(pk0, index);
    if schnorr_challenge(group, &sig.commitment, &pk, m) != sig.challenge {
        return false;
    }
    let lhs = group.pow_g(&sig.response);
    let rhs = &sig.commitment * pk.modpow(&sig.challenge, &group.modulus) % &group.modulus;
    lhs == rhs
}

/// One leaked coin key gives away the whole chain: `SK₀ = SK_i·H(i)⁻¹`.
pub fn recover_master_secret(group: &SchnorrGroup, index: u64, sk: &BigUint) -> BigUint {
    let inv = big_mod_inverse(&group.index_hash(index), &group.order).expect("H(i) is a unit");
    sk * inv % &group.order
}

// ------------------------------------------------------------------ ledger

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinState {
    Unspent,
    Spent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SpendReject {
    #[error("signature does not verify")]
    BadSignature,
    #[error("coin already spent")]
    AlreadySpent,
    #[error("coin was never issued")]
    UnknownCoin,
}

/// What the service knows about a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ServiceKeys {
    Rabin(RabinPublic),
    Group { group: SchnorrGroup, pk0: BigUint },
}

/// A spend message's signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpendProof {
    Rabin { counter: u64, signature: BigUint },
    Group(SchnorrSignature),
}

impl ServiceKeys {
    pub fn verify(&self, index: u64, m: &[u8], proof: &SpendProof) -> bool {
        match (self, proof) {
            (ServiceKeys::Rabin(public), SpendProof::Rabin { counter, signature }) => {
                index != 0 && rabin_verify(public, m, signature, &public.derive_pk(index, *counter))
            }
            (ServiceKeys::Group { group, pk0 }, SpendProof::Group(sig)) => group_verify(group, pk0, index, m, sig),
            _ => false,
        }
    }
}

/// The service's coin registry. States only move from unspent to spent;
/// `&mut self` on [`CoinLedger::spend`] makes each spend a single atomic
/// step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoinLedger {
    coins: BTreeMap<u64, CoinState>,
}

impl CoinLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a coin as unspent. Re-issuing never resets a spent coin.
    pub fn issue(&mut self, index: u64) {
        self.coins.entry(index).or_insert(CoinState::Unspent);
    }

    pub fn state(&self, index: u64) -> Option<CoinState> {
        self.coins.get(&index).copied()
    }

    pub fn spend(&mut self, keys: &ServiceKeys, index: u64, m: &[u8], proof: &SpendProof) -> Result<(), SpendReject> {
        let state = self.coins.get_mut(&index).ok_or(SpendReject::UnknownCoin)?;
        if !keys.verify(index, m, proof) {
            return Err(SpendReject::BadSignature);
        }
        if *state == CoinState::Spent {
            return Err(SpendReject::AlreadySpent);
        }
        *state = CoinState::Spent;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coins.is_empty()
    }
}

// ---------------------------------------------------------------- scenario

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rabin,
    Group,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// Alice publishes coin `index`.
    Issue,
    /// Bob presents the coin with a valid signature for the first time.
    Spend,
    /// Bob presents the same coin again.
    DoubleSpend,
    /// A valid signature for this coin presented under the next index.
    WrongIndex,
    /// Spending an index that was never issued.
    Unissued,
    /// Group scheme only: the master secret recovered from one coin key.
    MasterLeak { recovered: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub index: u64,
    pub kind: EventKind,
    pub outcome: Result<(), SpendReject>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub scheme: Scheme,
    pub events: Vec<Event>,
    pub ledger: CoinLedger,
}

impl ScenarioReport {
    /// True if every event had its expected outcome.
    pub fn as_expected(&self) -> bool {
        self.events.iter().all(|e| match e.kind {
            EventKind::Issue | EventKind::Spend => e.outcome.is_ok(),
            EventKind::DoubleSpend => e.outcome == Err(SpendReject::AlreadySpent),
            EventKind::WrongIndex => e.outcome == Err(SpendReject::BadSignature),
            EventKind::Unissued => e.outcome == Err(SpendReject::UnknownCoin),
            EventKind::MasterLeak { recovered } => recovered,
        })
    }
}

/// Alice issues `coins` coins; for each, Bob spends it, tries again, and
/// replays the signature under the neighbouring index. Test-size keys.
pub fn run_scenario(scheme: Scheme, coins: u64, seed: u64) -> Result<ScenarioReport, EcoinError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut master = vec![0u8; 32];
    rng.fill(&mut master[..]);
    let mut ledger = CoinLedger::new();
    let mut events = Vec::new();

    type Signer<'a> = Box<dyn Fn(u64, &[u8]) -> Result<SpendProof, EcoinError> + 'a>;
    let (service, rabin, group): (ServiceKeys, Option<RabinChain>, Option<GroupChain>) = match scheme {
        Scheme::Rabin => {
            let chain = RabinChain::generate(512, master, &mut rng)?;
            (ServiceKeys::Rabin(chain.public()), Some(chain), None)
        }
        Scheme::Group => {
            let chain = GroupChain::generate(SchnorrGroup::test_size(&mut rng), &mut rng);
            let keys = ServiceKeys::Group {
                group: chain.group.clone(),
                pk0: chain.pk0.clone(),
            };
            (keys, None, Some(chain))
        }
    };
    let sign: Signer = match (&rabin, &group) {
        (Some(chain), _) => Box::new(move |i, m| {
            let k = chain.keys(i)?;
            Ok(SpendProof::Rabin {
                counter: k.counter,
                signature: rabin_sign(&chain.public(), m, &k.sk),
            })
        }),
        (_, Some(chain)) => {
            Box::new(move |i, m| Ok(SpendProof::Group(group_sign(&chain.group, m, &chain.keys(i)?.sk))))
        }
        _ => unreachable!(),
    };

    for i in 1..=coins {
        ledger.issue(i);
        events.push(Event {
            index: i,
            kind: EventKind::Issue,
            outcome: Ok(()),
        });
    }
    for i in 1..=coins {
        let m = format!("pay bob coin {i}");
        let proof = sign(i, m.as_bytes())?;
        if i < coins {
            events.push(Event {
                index: i + 1,
                kind: EventKind::WrongIndex,
                outcome: ledger.spend(&service, i + 1, m.as_bytes(), &proof),
            });
        }
        events.push(Event {
            index: i,
            kind: EventKind::Spend,
            outcome: ledger.spend(&service, i, m.as_bytes(), &proof),
        });
        events.push(Event {
            index: i,
            kind: EventKind::DoubleSpend,
            outcome: ledger.spend(&service, i, m.as_bytes(), &proof),
        });
    }
    let unissued = coins + 1;
    let m = b"pay bob unissued coin";
    events.push(Event {
        index: unissued,
        kind: EventKind::Unissued,
        outcome: ledger.spend(&service, unissued, m, &sign(unissued, m)?),
    });
    if let Some(chain) = &group {
        let leaked = chain.keys(1)?;
        let sk0 = recover_master_secret(&chain.group, 1, &leaked.sk);
        events.push(Event {
            index: 1,
            kind: EventKind::MasterLeak {
                recovered: &sk0 == chain.master_secret(),
            },
            outcome: Ok(()),
        });
    }
    Ok(ScenarioReport { scheme, events, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use std::sync::OnceLock;

    fn toy_rabin() -> RabinChain {
        RabinChain::new(7u32.into(), 11u32.into(), b"k".to_vec()).unwrap()
    }

    fn rabin_chain() -> &'static RabinChain {
        static C: OnceLock<RabinChain> = OnceLock::new();
        C.get_or_init(|| RabinChain::generate(512, b"master".to_vec(), &mut ChaCha8Rng::seed_from_u64(10)).unwrap())
    }

    fn group_chain() -> &'static GroupChain {
        static C: OnceLock<GroupChain> = OnceLock::new();
        C.get_or_init(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            GroupChain::generate(SchnorrGroup::test_size(&mut rng), &mut rng)
        })
    }

    #[test]
    fn toy_square_roots() {
        let c = toy_rabin();
        let four = BigUint::from(4u32);
        let roots: Vec<u32> = c.square_roots(&four).iter().map(|r| r.try_into().unwrap()).collect();
        assert_eq!(roots, [2, 9, 68, 75]);
        assert_eq!(c.principal_root(&four), Some(BigUint::from(2u32)));
        assert_eq!(c.principal_root(&BigUint::from(3u32)), None);
        for a in 1..77u32 {
            let a = BigUint::from(a);
            for r in c.square_roots(&a) {
                assert_eq!(&r * &r % 77u32, a);
            }
        }
    }

    #[test]
    fn rejects_bad_rabin_params() {
        assert!(RabinChain::new(5u32.into(), 11u32.into(), vec![]).is_err());
        assert!(RabinChain::new(7u32.into(), 7u32.into(), vec![]).is_err());
        assert!(RabinChain::new(15u32.into(), 11u32.into(), vec![]).is_err());
        assert_eq!(toy_rabin().keys(0), Err(EcoinError::ZeroIndex));
    }

    #[test]
    fn rabin_chain_keys() {
        let c = rabin_chain();
        let public = c.public();
        assert!((510..=512).contains(&c.modulus().bits()));
        for i in 1..=100 {
            let k = c.keys(i).unwrap();
            assert_eq!(&k.sk * &k.sk % c.modulus(), k.pk);
            assert_eq!(public.derive_pk(i, k.counter), k.pk);
            let roots = c.square_roots(&k.pk);
            assert_eq!(roots.len(), 4);
            assert_eq!(roots[0], k.sk);
            for r in &roots {
                assert_eq!(r * r % c.modulus(), k.pk);
            }
            // earlier stream positions were rejected as non-residues
            for ctr in 0..k.counter {
                assert!(!c.is_residue(&public.candidate(i, ctr)));
            }
        }
        assert_eq!(c.keys(5), c.keys(5));
    }

    #[test]
    fn rabin_signatures() {
        let c = rabin_chain();
        let public = c.public();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 1..=100 {
            let k = c.keys(i).unwrap();
            let mut m = vec![0u8; 24];
            rng.fill(&mut m[..]);
            let sig = rabin_sign(&public, &m, &k.sk);
            assert!(rabin_verify(&public, &m, &sig, &k.pk));
            let other = c.keys(i + 1).unwrap();
            assert!(!rabin_verify(&public, &m, &sig, &other.pk));
            m[3] ^= 0x10;
            assert!(!rabin_verify(&public, &m, &sig, &k.pk));
        }
    }

    #[test]
    fn group_chain_keys() {
        let c = group_chain();
        assert_eq!(c.group.order.bits(), 160);
        assert_eq!(c.pk0, c.group.pow_g(c.master_secret()));
        for i in 1..=100 {
            let k = c.keys(i).unwrap();
            assert_eq!(c.group.pow_g(&k.sk), k.pk);
            assert_eq!(c.group.derive_pk(&c.pk0, i), k.pk);
        }
        let mut seen = std::collections::HashSet::new();
        for i in 1..=10_000 {
            assert!(seen.insert(&c.master_secret().clone() * c.group.index_hash(i) % &c.group.order));
        }
    }

    #[test]
    fn group_signatures() {
        let c = group_chain();
        for i in 1..=20 {
            let m = format!("message {i}");
            let k = c.keys(i).unwrap();
            let sig = group_sign(&c.group, m.as_bytes(), &k.sk);
            assert!(group_verify(&c.group, &c.pk0, i, m.as_bytes(), &sig));
            assert!(!group_verify(&c.group, &c.pk0, i + 1, m.as_bytes(), &sig));
            assert!(!group_verify(&c.group, &c.pk0, i, b"other", &sig));
            let mut bad = sig.clone();
            bad.response = (&bad.response + 1u32) % &c.group.order;
            assert!(!group_verify(&c.group, &c.pk0, i, m.as_bytes(), &bad));
        }
    }

    #[test]
    fn master_secret_leak() {
        let c = group_chain();
        let leaked = c.keys(17).unwrap();
        let sk0 = recover_master_secret(&c.group, 17, &leaked.sk);
        assert_eq!(&sk0, c.master_secret());
        // with the master secret every other coin key follows
        let forged = GroupChain::new(c.group.clone(), sk0).unwrap();
        for i in [1, 2, 99] {
            assert_eq!(forged.keys(i), c.keys(i));
        }
        // the same ratio holds for every pair of coins
        let (a, b) = (c.keys(3).unwrap(), c.keys(8).unwrap());
        let ratio = &b.sk * big_mod_inverse(&a.sk, &c.group.order).unwrap() % &c.group.order;
        let expected =
            c.group.index_hash(8) * big_mod_inverse(&c.group.index_hash(3), &c.group.order).unwrap() % &c.group.order;
        assert_eq!(ratio, expected);
    }

    #[test]
    fn rejects_bad_group_params() {
        let g = &group_chain().group;
        assert!(SchnorrGroup::new(g.modulus.clone(), g.order.clone(), BigUint::one()).is_err());
        assert!(SchnorrGroup::new(g.modulus.clone(), &g.order + 2u32, g.generator.clone()).is_err());
        assert!(GroupChain::new(g.clone(), BigUint::zero()).is_err());
        assert!(GroupChain::new(g.clone(), g.order.clone()).is_err());
    }

    #[test]
    fn ledger_rules() {
        let c = group_chain();
        let keys = ServiceKeys::Group {
            group: c.group.clone(),
            pk0: c.pk0.clone(),
        };
        let mut ledger = CoinLedger::new();
        ledger.issue(1);
        ledger.issue(2);
        let sig = SpendProof::Group(group_sign(&c.group, b"m", &c.keys(1).unwrap().sk));
        assert_eq!(ledger.spend(&keys, 2, b"m", &sig), Err(SpendReject::BadSignature));
        assert_eq!(ledger.spend(&keys, 3, b"m", &sig), Err(SpendReject::UnknownCoin));
        assert_eq!(ledger.spend(&keys, 1, b"m", &sig), Ok(()));
        assert_eq!(ledger.spend(&keys, 1, b"m", &sig), Err(SpendReject::AlreadySpent));
        ledger.issue(1);
        assert_eq!(ledger.state(1), Some(CoinState::Spent));
        assert_eq!(ledger.state(2), Some(CoinState::Unspent));
        let rabin = SpendProof::Rabin {
            counter: 0,
            signature: BigUint::one(),
        };
        assert!(!keys.verify(2, b"m", &rabin));
    }

    #[test]
    fn scenarios() {
        for scheme in [Scheme::Rabin, Scheme::Group] {
            let r = run_scenario(scheme, 100, 5).unwrap();
            assert!(r.as_expected(), "{scheme:?}");
            assert_eq!(r.ledger.len(), 100);
            assert!((1..=100).all(|i| r.ledger.state(i) == Some(CoinState::Spent)));
            assert_eq!(r.events.iter().filter(|e| e.kind == EventKind::Spend).count(), 100);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ledger_never_unspends(ops in proptest::collection::vec((0u64..6, any::<bool>(), any::<bool>()), 0..40)) {
            let c = group_chain();
            let keys = ServiceKeys::Group { group: c.group.clone(), pk0: c.pk0.clone() };
            let sigs: Vec<SpendProof> = (1..6).map(|i| SpendProof::Group(group_sign(&c.group, b"m", &c.keys(i).unwrap().sk))).collect();
            let mut ledger = CoinLedger::new();
            let mut spent = std::collections::HashSet::new();
            for (i, issue, honest) in ops {
                if issue || i == 0 {
                    ledger.issue(i);
                } else {
                    let proof = &sigs[if honest { i as usize - 1 } else { i as usize % 5 }];
                    let out = ledger.spend(&keys, i, b"m", proof);
                    if out.is_ok() {
                        prop_assert!(spent.insert(i));
                    }
                }
                for &s in &spent {
                    prop_assert_eq!(ledger.state(s), Some(CoinState::Spent));
                }
            }
        }
    }
}
