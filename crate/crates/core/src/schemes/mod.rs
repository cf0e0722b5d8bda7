//! The four partially-homomorphic cryptosystems: textbook RSA and plain
//! ElGamal (multiplicative), Paillier and exponential ElGamal (additive),
//! and Goldwasser-Micali (single-bit XOR).
//!
//! Everything here is malleable by design: homomorphic combination requires
//! unpadded, structure-preserving encryption, so none of these schemes is
//! IND-CCA and textbook RSA is not even IND-CPA. They demonstrate computing
//! on ciphertexts, not a hardened transport.

pub mod elgamal;
pub mod gm;
pub mod paillier;
pub mod rsa;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::CryptoError;

pub use elgamal::{ElGamalKeypair, ElGamalPublicKey, ElGamalVariant, DEFAULT_ADD_BOUND};
pub use gm::{GmKeypair, GmPublicKey};
pub use paillier::{PaillierKeypair, PaillierPublicKey};
pub use rsa::{RsaKeypair, RsaPublicKey};

/// Closed enumeration of the supported schemes; the serialized tokens are
/// exactly these uppercase names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    Rsa,
    Paillier,
    ElGamalMul,
    ElGamalAdd,
    Gm,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::Rsa,
        SchemeId::Paillier,
        SchemeId::ElGamalMul,
        SchemeId::ElGamalAdd,
        SchemeId::Gm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::Rsa => "RSA",
            SchemeId::Paillier => "PAILLIER",
            SchemeId::ElGamalMul => "ELGAMAL_MUL",
            SchemeId::ElGamalAdd => "ELGAMAL_ADD",
            SchemeId::Gm => "GM",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = CryptoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "RSA" => Ok(SchemeId::Rsa),
            "PAILLIER" => Ok(SchemeId::Paillier),
            "ELGAMAL_MUL" => Ok(SchemeId::ElGamalMul),
            "ELGAMAL_ADD" => Ok(SchemeId::ElGamalAdd),
            "GM" => Ok(SchemeId::Gm),
            other => Err(CryptoError::SchemaViolation(format!("unknown scheme {other:?}"))),
        }
    }
}

/// 16-byte truncated SHA-256 of a public key's canonical serialization.
///
/// Stamped onto every ciphertext so material from different keys can never be
/// combined, and used by the provider to find the registered key for a blob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyFingerprint(pub [u8; 16]);

impl KeyFingerprint {
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(32);
        for b in self.0 {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<Self, CryptoError> {
        let bad = || CryptoError::SchemaViolation(format!("invalid fingerprint {s:?}"));
        if s.len() != 32 || !s.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
            return Err(bad());
        }
        let mut out = [0u8; 16];
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let hi = (chunk[0] as char).to_digit(16).ok_or_else(bad)?;
            let lo = (chunk[1] as char).to_digit(16).ok_or_else(bad)?;
            out[i] = (hi * 16 + lo) as u8;
        }
        Ok(KeyFingerprint(out))
    }
}

impl fmt::Display for KeyFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A ciphertext: scheme tag, one or two group elements, and the fingerprint
/// of the public key it was produced under. The second component is present
/// exactly for the ElGamal variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub scheme: SchemeId,
    pub c1: BigUint,
    pub c2: Option<BigUint>,
    pub fingerprint: KeyFingerprint,
}

impl Ciphertext {
    /// Total bit length across components; the ciphertext-expansion metric.
    pub fn bit_length(&self) -> u64 {
        self.c1.bits() + self.c2.as_ref().map_or(0, |c| c.bits())
    }
}

pub(crate) fn check_pair_compatible(
    scheme: SchemeId,
    ca: &Ciphertext,
    cb: &Ciphertext,
) -> Result<(), CryptoError> {
    for c in [ca, cb] {
        if c.scheme != scheme {
            return Err(CryptoError::SchemeMismatch { expected: scheme, found: c.scheme });
        }
    }
    if ca.fingerprint != cb.fingerprint {
        return Err(CryptoError::KeyMismatch);
    }
    Ok(())
}

/// Public half of any keypair; everything the provider is ever allowed to see.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PublicKey {
    Rsa(RsaPublicKey),
    Paillier(PaillierPublicKey),
    ElGamal(ElGamalPublicKey),
    Gm(GmPublicKey),
}

impl PublicKey {
    pub fn scheme(&self) -> SchemeId {
        match self {
            PublicKey::Rsa(_) => SchemeId::Rsa,
            PublicKey::Paillier(_) => SchemeId::Paillier,
            PublicKey::ElGamal(pk) => pk.scheme(),
            PublicKey::Gm(_) => SchemeId::Gm,
        }
    }

    pub fn fingerprint(&self) -> KeyFingerprint {
        crate::wire::key_fingerprint(self)
    }

    /// Scheme-generic encryption. GM interprets the value as a single bit.
    pub fn encrypt<R: Rng + ?Sized>(
        &self,
        value: &BigUint,
        rng: &mut R,
    ) -> Result<Ciphertext, CryptoError> {
        match self {
            PublicKey::Rsa(pk) => pk.encrypt(value),
            PublicKey::Paillier(pk) => pk.encrypt(value, rng),
            PublicKey::ElGamal(pk) => pk.encrypt(value, rng),
            PublicKey::Gm(pk) => {
                let bit = gm::bit_from_value(value)?;
                pk.encrypt_bit(bit, rng)
            }
        }
    }
}

/// A full keypair. The private half never leaves this process: wire documents
/// are produced from [`PublicKey`] only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Keypair {
    Rsa(RsaKeypair),
    Paillier(PaillierKeypair),
    ElGamal(ElGamalKeypair),
    Gm(GmKeypair),
}

impl Keypair {
    /// Generate a keypair of the requested scheme and modulus size.
    ///
    /// `add_bound` is required for ELGAMAL_ADD and rejected elsewhere.
    pub fn generate<R: Rng + ?Sized>(
        scheme: SchemeId,
        bits: u64,
        add_bound: Option<u64>,
        rng: &mut R,
    ) -> Result<Keypair, CryptoError> {
        if scheme != SchemeId::ElGamalAdd && add_bound.is_some() {
            return Err(CryptoError::InvalidKey(format!(
                "add_bound is only meaningful for ELGAMAL_ADD, not {scheme}"
            )));
        }
        Ok(match scheme {
            SchemeId::Rsa => Keypair::Rsa(RsaKeypair::generate(bits, rng)),
            SchemeId::Paillier => Keypair::Paillier(PaillierKeypair::generate(bits, rng)),
            SchemeId::ElGamalMul => {
                Keypair::ElGamal(ElGamalKeypair::generate(bits, ElGamalVariant::Mul, None, rng)?)
            }
            SchemeId::ElGamalAdd => {
                let bound = add_bound.ok_or_else(|| {
                    CryptoError::InvalidKey("ELGAMAL_ADD requires add_bound".into())
                })?;
                Keypair::ElGamal(ElGamalKeypair::generate(
                    bits,
                    ElGamalVariant::Add,
                    Some(bound),
                    rng,
                )?)
            }
            SchemeId::Gm => Keypair::Gm(GmKeypair::generate(bits, rng)),
        })
    }

    pub fn scheme(&self) -> SchemeId {
        match self {
            Keypair::Rsa(_) => SchemeId::Rsa,
            Keypair::Paillier(_) => SchemeId::Paillier,
            Keypair::ElGamal(kp) => kp.public.scheme(),
            Keypair::Gm(_) => SchemeId::Gm,
        }
    }

    pub fn public(&self) -> PublicKey {
        match self {
            Keypair::Rsa(kp) => PublicKey::Rsa(kp.public.clone()),
            Keypair::Paillier(kp) => PublicKey::Paillier(kp.public.clone()),
            Keypair::ElGamal(kp) => PublicKey::ElGamal(kp.public.clone()),
            Keypair::Gm(kp) => PublicKey::Gm(kp.public.clone()),
        }
    }

    pub fn fingerprint(&self) -> KeyFingerprint {
        self.public().fingerprint()
    }

    /// Scheme-generic decryption; GM bits come back as 0 or 1.
    pub fn decrypt(&self, ct: &Ciphertext) -> Result<BigUint, CryptoError> {
        match self {
            Keypair::Rsa(kp) => kp.decrypt(ct),
            Keypair::Paillier(kp) => kp.decrypt(ct),
            Keypair::ElGamal(kp) => kp.decrypt(ct),
            Keypair::Gm(kp) => kp.decrypt_bit(ct).map(BigUint::from),
        }
    }

    /// Re-checks every structural invariant of the key material; used when
    /// loading key files from disk.
    pub fn validate(&self) -> Result<(), CryptoError> {
        match self {
            Keypair::Rsa(kp) => kp.validate(),
            Keypair::Paillier(kp) => kp.validate(),
            Keypair::ElGamal(kp) => kp.validate(),
            Keypair::Gm(kp) => kp.validate(),
        }
    }
}
