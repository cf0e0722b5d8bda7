//! Textbook RSA, kept deliberately unpadded: e(x) = x^b mod n, d(y) = y^a
//! mod n, so e(x1)*e(x2) = e(x1*x2). Padding would destroy exactly that
//! identity, which is the point of this scheme here. Malleable by design and
//! not IND-CPA; plaintexts must be units of Z_n.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

use crate::error::CryptoError;
use crate::numtheory::{gen_prime, is_probable_prime, mod_inv, mod_pow, PRIME_ROUNDS};
use crate::schemes::{check_pair_compatible, Ciphertext, SchemeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPublicKey {
    /// Modulus n = p * q.
    pub n: BigUint,
    /// Public exponent.
    pub b: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaKeypair {
    pub public: RsaPublicKey,
    /// Prime factors of n.
    pub p: BigUint,
    pub q: BigUint,
    /// Private exponent, a*b = 1 (mod phi).
    pub a: BigUint,
    /// Euler totient (p-1)(q-1).
    pub phi: BigUint,
}

impl RsaPublicKey {
    /// c = x^b mod n. Deterministic: the same plaintext always yields the
    /// same bytes.
    pub fn encrypt(&self, x: &BigUint) -> Result<Ciphertext, CryptoError> {
        if x >= &self.n {
            return Err(CryptoError::MessageOutOfRange);
        }
        if !x.gcd(&self.n).is_one() {
            // Covers x = 0 and multiples of p or q.
            return Err(CryptoError::MessageNotUnit);
        }
        Ok(Ciphertext {
            scheme: SchemeId::Rsa,
            c1: mod_pow(x, &self.b, &self.n),
            c2: None,
            fingerprint: crate::wire::key_fingerprint(&crate::schemes::PublicKey::Rsa(
                self.clone(),
            )),
        })
    }
}

impl RsaKeypair {
    /// Random keypair with a modulus of exactly `bits` bits. The public
    /// exponent starts at 65537 and moves to the next odd candidate until it
    /// is coprime to phi.
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> RsaKeypair {
        assert!(bits >= 16 && bits % 2 == 0, "RSA modulus bits must be even and >= 16");
        let p = gen_prime(bits / 2, rng);
        let mut q = gen_prime(bits / 2, rng);
        while q == p {
            q = gen_prime(bits / 2, rng);
        }
        Self::from_primes(p, q, BigUint::from(65537u32), true)
            .expect("generated primes always form a valid key")
    }

    /// Build a keypair from known primes; used for fixtures and regression
    /// vectors. When `bump_exponent` is set, `b` is advanced by 2 until
    /// coprime to phi; otherwise a non-coprime `b` is an error.
    pub fn from_primes(
        p: BigUint,
        q: BigUint,
        mut b: BigUint,
        bump_exponent: bool,
    ) -> Result<RsaKeypair, CryptoError> {
        if p == q || !is_probable_prime(&p, PRIME_ROUNDS) || !is_probable_prime(&q, PRIME_ROUNDS) {
            return Err(CryptoError::InvalidKey("p and q must be distinct primes".into()));
        }
        let n = &p * &q;
        let phi = (&p - 1u32) * (&q - 1u32);
        while !b.gcd(&phi).is_one() {
            if !bump_exponent {
                return Err(CryptoError::InvalidKey("public exponent not coprime to phi".into()));
            }
            b += 2u32;
        }
        let a = mod_inv(&b, &phi).expect("b is coprime to phi");
        Ok(RsaKeypair { public: RsaPublicKey { n, b }, p, q, a, phi })
    }

    /// x = y^a mod n.
    pub fn decrypt(&self, ct: &Ciphertext) -> Result<BigUint, CryptoError> {
        if ct.scheme != SchemeId::Rsa {
            return Err(CryptoError::SchemeMismatch { expected: SchemeId::Rsa, found: ct.scheme });
        }
        if ct.fingerprint != crate::schemes::PublicKey::Rsa(self.public.clone()).fingerprint() {
            return Err(CryptoError::KeyMismatch);
        }
        Ok(mod_pow(&ct.c1, &self.a, &self.public.n))
    }

    pub fn validate(&self) -> Result<(), CryptoError> {
        let err = |msg: &str| Err(CryptoError::InvalidKey(msg.into()));
        if !is_probable_prime(&self.p, PRIME_ROUNDS) || !is_probable_prime(&self.q, PRIME_ROUNDS) {
            return err("p or q is not prime");
        }
        if self.p == self.q {
            return err("p and q must differ");
        }
        if self.public.n != &self.p * &self.q {
            return err("n != p*q");
        }
        if self.phi != (&self.p - 1u32) * (&self.q - 1u32) {
            return err("phi != (p-1)(q-1)");
        }
        if !self.public.b.gcd(&self.phi).is_one() {
            return err("b shares a factor with phi");
        }
        if (&self.a * &self.public.b) % &self.phi != BigUint::one() {
            return err("a*b != 1 (mod phi)");
        }
        Ok(())
    }
}

/// Homomorphic multiply: c = ca * cb mod n decrypts to x1 * x2 mod n.
pub fn rsa_mul(ca: &Ciphertext, cb: &Ciphertext, n: &BigUint) -> Result<Ciphertext, CryptoError> {
    check_pair_compatible(SchemeId::Rsa, ca, cb)?;
    Ok(Ciphertext {
        scheme: SchemeId::Rsa,
        c1: (&ca.c1 * &cb.c1) % n,
        c2: None,
        fingerprint: ca.fingerprint,
    })
}
