//! Partially-homomorphic encryption core: number theory, the four schemes,
//! key-blind evaluation, and the canonical wire formats.
//!
//! The provider (`vaultd`) and the client (`vaultctl`) both build on this
//! crate: schemes and evaluation live here so the two sides can never
//! disagree on arithmetic or on canonical bytes.
//!
//! The `parallel` feature (on by default) switches prime search to a
//! rayon-backed candidate scan; disabling it leaves a dependency-light
//! sequential build with identical outputs for identical generator states.

pub mod error;
pub mod evaluator;
pub mod numtheory;
pub mod schemes;
pub mod wire;

pub use error::CryptoError;
pub use evaluator::HomomorphicOp;
pub use schemes::{Ciphertext, KeyFingerprint, Keypair, PublicKey, SchemeId};
