//! Key-blind homomorphic evaluation.
//!
//! The provider side of the system calls [`evaluate`] with public key
//! material and ciphertexts only; the signature cannot reach any private
//! component. The capability matrix pins which single operation each scheme
//! supports, and evaluation is a left fold of the scheme's pairwise combine.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::CryptoError;
use crate::schemes::{elgamal, gm, paillier, rsa, Ciphertext, PublicKey, SchemeId};

/// The homomorphic operations: plaintext addition, multiplication, or XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HomomorphicOp {
    Add,
    Mul,
    Xor,
}

impl HomomorphicOp {
    pub const ALL: [HomomorphicOp; 3] = [HomomorphicOp::Add, HomomorphicOp::Mul, HomomorphicOp::Xor];

    pub fn as_str(&self) -> &'static str {
        match self {
            HomomorphicOp::Add => "ADD",
            HomomorphicOp::Mul => "MUL",
            HomomorphicOp::Xor => "XOR",
        }
    }
}

impl fmt::Display for HomomorphicOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HomomorphicOp {
    type Err = CryptoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ADD" => Ok(HomomorphicOp::Add),
            "MUL" => Ok(HomomorphicOp::Mul),
            "XOR" => Ok(HomomorphicOp::Xor),
            other => Err(CryptoError::SchemaViolation(format!("unknown operation {other:?}"))),
        }
    }
}

/// The capability matrix: RSA and plain ElGamal multiply, Paillier and
/// exponential ElGamal add, GM XORs single bits.
pub fn supports(scheme: SchemeId, op: HomomorphicOp) -> bool {
    supported_op(scheme) == op
}

/// Each scheme supports exactly one operation.
pub fn supported_op(scheme: SchemeId) -> HomomorphicOp {
    match scheme {
        SchemeId::Rsa => HomomorphicOp::Mul,
        SchemeId::Paillier => HomomorphicOp::Add,
        SchemeId::ElGamalMul => HomomorphicOp::Mul,
        SchemeId::ElGamalAdd => HomomorphicOp::Add,
        SchemeId::Gm => HomomorphicOp::Xor,
    }
}

fn combine_modulus(key: &PublicKey) -> BigUint {
    match key {
        PublicKey::Rsa(k) => k.n.clone(),
        PublicKey::Paillier(k) => k.n.clone(),
        PublicKey::ElGamal(k) => k.p.clone(),
        PublicKey::Gm(k) => k.n.clone(),
    }
}

/// Left fold of the scheme's combine over at least two ciphertexts.
///
/// Inputs must share one scheme and one key fingerprint matching `key`, and
/// the operation must be the scheme's supported one. For ELGAMAL_ADD no
/// plaintext-bound check happens here: the evaluator is key-blind, so an
/// overflowing sum surfaces at client decryption as PlaintextOutOfBound.
pub fn evaluate(
    op: HomomorphicOp,
    inputs: &[Ciphertext],
    key: &PublicKey,
) -> Result<Ciphertext, CryptoError> {
    if inputs.len() < 2 {
        return Err(CryptoError::TooFewInputs);
    }
    let scheme = inputs[0].scheme;
    if inputs.iter().any(|c| c.scheme != scheme) {
        return Err(CryptoError::MixedSchemes);
    }
    let fingerprint = inputs[0].fingerprint;
    if inputs.iter().any(|c| c.fingerprint != fingerprint) {
        return Err(CryptoError::MixedKeys);
    }
    if key.scheme() != scheme || key.fingerprint() != fingerprint {
        return Err(CryptoError::MixedKeys);
    }
    if !supports(scheme, op) {
        return Err(CryptoError::UnsupportedOp { scheme, op });
    }

    let modulus = combine_modulus(key);
    let mut acc = inputs[0].clone();
    for next in &inputs[1..] {
        acc = match scheme {
            SchemeId::Rsa => rsa::rsa_mul(&acc, next, &modulus)?,
            SchemeId::Paillier => paillier::paillier_add(&acc, next, &modulus)?,
            SchemeId::ElGamalMul | SchemeId::ElGamalAdd => {
                elgamal::elgamal_combine(&acc, next, &modulus)?
            }
            SchemeId::Gm => gm::gm_xor(&acc, next, &modulus)?,
        };
    }
    Ok(acc)
}
