//! Goldwasser-Micali single-bit encryption over quadratic residuosity:
//! c = g^bit * r^2 mod n for a pseudosquare g (a non-residue modulo both
//! prime factors, so jacobi(g, n) = +1). A residue decrypts to 0, a
//! non-residue to 1, and multiplying ciphertexts XORs the bits.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::CryptoError;
use crate::numtheory::{gen_prime, is_probable_prime, jacobi, mod_pow, sample_unit, PRIME_ROUNDS};
use crate::schemes::{check_pair_compatible, Ciphertext, SchemeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmPublicKey {
    /// Modulus n = p * q.
    pub n: BigUint,
    /// Pseudosquare: jacobi(g, n) = +1 but g is a non-residue mod p and q.
    pub g: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmKeypair {
    pub public: GmPublicKey,
    pub p: BigUint,
    pub q: BigUint,
}

/// Accepts exactly 0 or 1 from a generic integer plaintext.
pub fn bit_from_value(value: &BigUint) -> Result<u8, CryptoError> {
    value
        .to_u8()
        .filter(|b| *b <= 1)
        .ok_or(CryptoError::InvalidBit)
}

impl GmPublicKey {
    pub fn encrypt_bit<R: Rng + ?Sized>(
        &self,
        bit: u8,
        rng: &mut R,
    ) -> Result<Ciphertext, CryptoError> {
        let r = sample_unit(&self.n, rng);
        self.encrypt_bit_with_nonce(bit, &r)
    }

    pub fn encrypt_bit_with_nonce(&self, bit: u8, r: &BigUint) -> Result<Ciphertext, CryptoError> {
        if bit > 1 {
            return Err(CryptoError::InvalidBit);
        }
        let r2 = (r * r) % &self.n;
        let c1 = if bit == 1 { &self.g * r2 % &self.n } else { r2 };
        Ok(Ciphertext {
            scheme: SchemeId::Gm,
            c1,
            c2: None,
            fingerprint: crate::schemes::PublicKey::Gm(self.clone()).fingerprint(),
        })
    }
}

impl GmKeypair {
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> GmKeypair {
        assert!(bits >= 16 && bits % 2 == 0, "GM modulus bits must be even and >= 16");
        let p = gen_prime(bits / 2, rng);
        let mut q = gen_prime(bits / 2, rng);
        while q == p {
            q = gen_prime(bits / 2, rng);
        }
        let n = &p * &q;
        let g = loop {
            let candidate = rng.gen_biguint_below(&n);
            if candidate < BigUint::from(2u32) {
                continue;
            }
            if is_pseudosquare(&candidate, &p, &q) {
                break candidate;
            }
        };
        GmKeypair { public: GmPublicKey { n, g }, p, q }
    }

    /// Keypair from known primes; picks the smallest pseudosquare so
    /// fixtures are reproducible.
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<GmKeypair, CryptoError> {
        if p == q || !is_probable_prime(&p, PRIME_ROUNDS) || !is_probable_prime(&q, PRIME_ROUNDS) {
            return Err(CryptoError::InvalidKey("p and q must be distinct primes".into()));
        }
        let n = &p * &q;
        let mut g = BigUint::from(2u32);
        while !is_pseudosquare(&g, &p, &q) {
            g += 1u32;
            if g >= n {
                return Err(CryptoError::InvalidKey("no pseudosquare below n".into()));
            }
        }
        Ok(GmKeypair { public: GmPublicKey { n, g }, p, q })
    }

    /// 0 if c1 is a quadratic residue modulo p, 1 otherwise.
    pub fn decrypt_bit(&self, ct: &Ciphertext) -> Result<u8, CryptoError> {
        if ct.scheme != SchemeId::Gm {
            return Err(CryptoError::SchemeMismatch { expected: SchemeId::Gm, found: ct.scheme });
        }
        if ct.fingerprint != crate::schemes::PublicKey::Gm(self.public.clone()).fingerprint() {
            return Err(CryptoError::KeyMismatch);
        }
        if ct.c1.is_zero() || ct.c1 >= self.public.n || !ct.c1.gcd(&self.public.n).is_one() {
            return Err(CryptoError::InvalidCiphertext("not a unit of Z_n".into()));
        }
        let euler = mod_pow(&ct.c1, &((&self.p - 1u32) >> 1), &self.p);
        Ok(if euler.is_one() { 0 } else { 1 })
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
        if !is_pseudosquare(&self.public.g, &self.p, &self.q) {
            return err("g is not a pseudosquare");
        }
        Ok(())
    }
}

fn is_pseudosquare(g: &BigUint, p: &BigUint, q: &BigUint) -> bool {
    jacobi(g, p).map(|s| s == -1).unwrap_or(false)
        && jacobi(g, q).map(|s| s == -1).unwrap_or(false)
}

/// Homomorphic XOR: c = ca * cb mod n decrypts to b1 ^ b2.
pub fn gm_xor(ca: &Ciphertext, cb: &Ciphertext, n: &BigUint) -> Result<Ciphertext, CryptoError> {
    check_pair_compatible(SchemeId::Gm, ca, cb)?;
    Ok(Ciphertext {
        scheme: SchemeId::Gm,
        c1: (&ca.c1 * &cb.c1) % n,
        c2: None,
        fingerprint: ca.fingerprint,
    })
}
