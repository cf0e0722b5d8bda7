use thiserror::Error;

use crate::evaluator::HomomorphicOp;
use crate::schemes::SchemeId;

/// Errors raised by the arithmetic core, the schemes, and the evaluator.
///
/// Every variant maps to a stable code string via [`CryptoError::code`]; those
/// codes are what crosses the wire in ERROR frames.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("value is not invertible modulo the given modulus")]
    NotInvertible,
    #[error("modulus is invalid: {0}")]
    InvalidModulus(String),
    #[error("no exponent within the search bound matches the target")]
    NotFound,
    #[error("message is outside the scheme's plaintext space")]
    MessageOutOfRange,
    #[error("message shares a factor with the modulus and cannot be encrypted")]
    MessageNotUnit,
    #[error("ciphertext scheme {found} does not match {expected}")]
    SchemeMismatch { expected: SchemeId, found: SchemeId },
    #[error("ciphertext was produced under a different key")]
    KeyMismatch,
    #[error("ciphertext is invalid: {0}")]
    InvalidCiphertext(String),
    #[error("recovered plaintext exceeds the configured bound")]
    PlaintextOutOfBound,
    #[error("plaintext must be the bit 0 or 1")]
    InvalidBit,
    #[error("{scheme} does not support {op}")]
    UnsupportedOp { scheme: SchemeId, op: HomomorphicOp },
    #[error("inputs mix more than one scheme")]
    MixedSchemes,
    #[error("inputs mix ciphertexts from different keys")]
    MixedKeys,
    #[error("at least two ciphertext inputs are required")]
    TooFewInputs,
    #[error("document violates the wire schema: {0}")]
    SchemaViolation(String),
    #[error("ciphertext document is malformed: {0}")]
    MalformedCiphertext(String),
    #[error("key material is invalid: {0}")]
    InvalidKey(String),
}

impl CryptoError {
    /// Stable error code used in wire ERROR frames and CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            CryptoError::NotInvertible => "NotInvertible",
            CryptoError::InvalidModulus(_) => "InvalidModulus",
            CryptoError::NotFound => "NotFound",
            CryptoError::MessageOutOfRange => "MessageOutOfRange",
            CryptoError::MessageNotUnit => "MessageNotUnit",
            CryptoError::SchemeMismatch { .. } => "SchemeMismatch",
            CryptoError::KeyMismatch => "KeyMismatch",
            CryptoError::InvalidCiphertext(_) => "InvalidCiphertext",
            CryptoError::PlaintextOutOfBound => "PlaintextOutOfBound",
            CryptoError::InvalidBit => "InvalidBit",
            CryptoError::UnsupportedOp { .. } => "UnsupportedOp",
            CryptoError::MixedSchemes => "MixedSchemes",
            CryptoError::MixedKeys => "MixedKeys",
            CryptoError::TooFewInputs => "TooFewInputs",
            CryptoError::SchemaViolation(_) => "SchemaViolation",
            CryptoError::MalformedCiphertext(_) => "MalformedCiphertext",
            CryptoError::InvalidKey(_) => "InvalidKey",
        }
    }
}
