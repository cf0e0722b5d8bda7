//! ElGamal over Z_p^* for a safe prime p = 2q + 1, in two variants sharing
//! one key shape:
//!
//! * MUL: e(x, r) = (alpha^r, x * beta^r); componentwise products multiply
//!   plaintexts.
//! * ADD (exponential): e(x, r) = (alpha^r, alpha^x * beta^r); products add
//!   exponents, and decryption recovers x from alpha^x by baby-step
//!   giant-step, bounded by `add_bound`.
//!
//! The nonce r is drawn from [1, p-2]: r = 0 would emit c1 = 1 and hand the
//! masked plaintext straight to the observer, so it is excluded.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::CryptoError;
use crate::numtheory::{bsgs_dlog, gen_safe_prime, is_probable_prime, mod_inv, mod_pow, PRIME_ROUNDS};
use crate::schemes::{check_pair_compatible, Ciphertext, SchemeId};

/// Default plaintext bound for the additive variant: BSGS recovers
/// exponents up to 2^20 with a table of 2^10 entries.
pub const DEFAULT_ADD_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElGamalVariant {
    Mul,
    Add,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElGamalPublicKey {
    /// Safe prime modulus.
    pub p: BigUint,
    /// Generator of Z_p^*.
    pub alpha: BigUint,
    /// alpha^a mod p for the private exponent a.
    pub beta: BigUint,
    pub variant: ElGamalVariant,
    /// Maximum recoverable plaintext; present exactly for the ADD variant.
    pub add_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElGamalKeypair {
    pub public: ElGamalPublicKey,
    /// Private exponent in [1, p-2].
    pub a: BigUint,
}

impl ElGamalPublicKey {
    pub fn scheme(&self) -> SchemeId {
        match self.variant {
            ElGamalVariant::Mul => SchemeId::ElGamalMul,
            ElGamalVariant::Add => SchemeId::ElGamalAdd,
        }
    }

    fn sample_nonce<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        // Uniform over [1, p-2].
        rng.gen_biguint_range(&BigUint::one(), &(&self.p - 1u32))
    }

    pub fn encrypt<R: Rng + ?Sized>(
        &self,
        x: &BigUint,
        rng: &mut R,
    ) -> Result<Ciphertext, CryptoError> {
        let r = self.sample_nonce(rng);
        self.encrypt_with_nonce(x, &r)
    }

    pub fn encrypt_with_nonce(&self, x: &BigUint, r: &BigUint) -> Result<Ciphertext, CryptoError> {
        assert!(
            !r.is_zero() && r <= &(&self.p - 2u32),
            "nonce must lie in [1, p-2]"
        );
        let c2 = match self.variant {
            ElGamalVariant::Mul => {
                if x.is_zero() || x >= &self.p {
                    return Err(CryptoError::MessageOutOfRange);
                }
                x * mod_pow(&self.beta, r, &self.p) % &self.p
            }
            ElGamalVariant::Add => {
                let bound = self.add_bound.expect("ADD variant always carries add_bound");
                if x > &BigUint::from(bound) {
                    return Err(CryptoError::MessageOutOfRange);
                }
                mod_pow(&self.alpha, x, &self.p) * mod_pow(&self.beta, r, &self.p) % &self.p
            }
        };
        Ok(Ciphertext {
            scheme: self.scheme(),
            c1: mod_pow(&self.alpha, r, &self.p),
            c2: Some(c2),
            fingerprint: crate::schemes::PublicKey::ElGamal(self.clone()).fingerprint(),
        })
    }
}

impl ElGamalKeypair {
    /// Keypair over a fresh safe prime of exactly `bits` bits and a verified
    /// generator of Z_p^*.
    pub fn generate<R: Rng + ?Sized>(
        bits: u64,
        variant: ElGamalVariant,
        add_bound: Option<u64>,
        rng: &mut R,
    ) -> Result<ElGamalKeypair, CryptoError> {
        match (variant, add_bound) {
            (ElGamalVariant::Add, None) => {
                return Err(CryptoError::InvalidKey("ELGAMAL_ADD requires add_bound".into()))
            }
            (ElGamalVariant::Add, Some(0)) => {
                return Err(CryptoError::InvalidKey("add_bound must be >= 1".into()))
            }
            (ElGamalVariant::Mul, Some(_)) => {
                return Err(CryptoError::InvalidKey("ELGAMAL_MUL takes no add_bound".into()))
            }
            _ => {}
        }
        let (p, q) = gen_safe_prime(bits, rng);
        let alpha = find_generator(&p, &q, rng);
        let a = rng.gen_biguint_range(&BigUint::one(), &(&p - 1u32));
        let beta = mod_pow(&alpha, &a, &p);
        Ok(ElGamalKeypair {
            public: ElGamalPublicKey { p, alpha, beta, variant, add_bound },
            a,
        })
    }

    /// Keypair from fixed parameters; validates them like a key file load.
    pub fn from_parts(
        p: BigUint,
        alpha: BigUint,
        a: BigUint,
        variant: ElGamalVariant,
        add_bound: Option<u64>,
    ) -> Result<ElGamalKeypair, CryptoError> {
        let beta = mod_pow(&alpha, &a, &p);
        let kp = ElGamalKeypair {
            public: ElGamalPublicKey { p, alpha, beta, variant, add_bound },
            a,
        };
        kp.validate()?;
        Ok(kp)
    }

    pub fn decrypt(&self, ct: &Ciphertext) -> Result<BigUint, CryptoError> {
        let scheme = self.public.scheme();
        if ct.scheme != scheme {
            return Err(CryptoError::SchemeMismatch { expected: scheme, found: ct.scheme });
        }
        if ct.fingerprint != crate::schemes::PublicKey::ElGamal(self.public.clone()).fingerprint()
        {
            return Err(CryptoError::KeyMismatch);
        }
        let c2 = ct
            .c2
            .as_ref()
            .ok_or_else(|| CryptoError::InvalidCiphertext("missing second component".into()))?;
        let p = &self.public.p;
        let shared = mod_pow(&ct.c1, &self.a, p);
        let unmasked = c2 * mod_inv(&shared, p)? % p;
        match self.public.variant {
            ElGamalVariant::Mul => Ok(unmasked),
            ElGamalVariant::Add => {
                let bound = self.public.add_bound.expect("ADD variant always carries add_bound");
                bsgs_dlog(&self.public.alpha, &unmasked, p, bound)
                    .map(BigUint::from)
                    .map_err(|_| CryptoError::PlaintextOutOfBound)
            }
        }
    }

    pub fn validate(&self) -> Result<(), CryptoError> {
        let err = |msg: &str| Err(CryptoError::InvalidKey(msg.into()));
        let p = &self.public.p;
        if !is_probable_prime(p, PRIME_ROUNDS) {
            return err("p is not prime");
        }
        let q = (p - 1u32) >> 1;
        if !is_probable_prime(&q, PRIME_ROUNDS) {
            return err("p is not a safe prime");
        }
        let alpha = &self.public.alpha;
        if alpha < &BigUint::from(2u32) || alpha > &(p - 2u32) {
            return err("alpha out of range");
        }
        // Order divides 2q; excluding 1, 2 and q leaves exactly 2q.
        if mod_pow(alpha, &BigUint::from(2u32), p).is_one() || mod_pow(alpha, &q, p).is_one() {
            return err("alpha does not generate Z_p^*");
        }
        if self.a.is_zero() || self.a > p - 2u32 {
            return err("private exponent out of range");
        }
        if self.public.beta != mod_pow(alpha, &self.a, p) {
            return err("beta != alpha^a");
        }
        match (self.public.variant, self.public.add_bound) {
            (ElGamalVariant::Add, Some(b)) if b >= 1 => Ok(()),
            (ElGamalVariant::Add, _) => err("ADD variant requires add_bound >= 1"),
            (ElGamalVariant::Mul, None) => Ok(()),
            (ElGamalVariant::Mul, Some(_)) => err("MUL variant takes no add_bound"),
        }
    }
}

fn find_generator<R: Rng + ?Sized>(p: &BigUint, q: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let candidate = rng.gen_biguint_range(&BigUint::from(2u32), &(p - 1u32));
        if !mod_pow(&candidate, &BigUint::from(2u32), p).is_one()
            && !mod_pow(&candidate, q, p).is_one()
        {
            return candidate;
        }
    }
}

/// Componentwise product; multiplies plaintexts under MUL and adds them
/// under ADD (within the recoverable bound).
pub fn elgamal_combine(
    ca: &Ciphertext,
    cb: &Ciphertext,
    p: &BigUint,
) -> Result<Ciphertext, CryptoError> {
    if ca.scheme != cb.scheme {
        return Err(CryptoError::SchemeMismatch { expected: ca.scheme, found: cb.scheme });
    }
    check_pair_compatible(ca.scheme, ca, cb)?;
    if !matches!(ca.scheme, SchemeId::ElGamalMul | SchemeId::ElGamalAdd) {
        return Err(CryptoError::SchemeMismatch {
            expected: SchemeId::ElGamalMul,
            found: ca.scheme,
        });
    }
    let (a2, b2) = match (&ca.c2, &cb.c2) {
        (Some(a2), Some(b2)) => (a2, b2),
        _ => return Err(CryptoError::InvalidCiphertext("missing second component".into())),
    };
    Ok(Ciphertext {
        scheme: ca.scheme,
        c1: (&ca.c1 * &cb.c1) % p,
        c2: Some((a2 * b2) % p),
        fingerprint: ca.fingerprint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Regression keys: p=23, alpha=5, a=6, so beta=8.
    fn toy_mul() -> ElGamalKeypair {
        ElGamalKeypair::from_parts(big(23), big(5), big(6), ElGamalVariant::Mul, None).unwrap()
    }

    fn toy_add() -> ElGamalKeypair {
        ElGamalKeypair::from_parts(big(23), big(5), big(6), ElGamalVariant::Add, Some(20)).unwrap()
    }

    #[test]
    fn toy_key_beta() {
        assert_eq!(toy_mul().public.beta, big(8));
        assert_eq!(toy_add().public.beta, big(8));
    }

    #[test]
    fn mul_fixed_vectors() {
        let kp = toy_mul();
        let ct = kp.public.encrypt_with_nonce(&big(10), &big(3)).unwrap();
        assert_eq!(ct.c1, big(10));
        assert_eq!(ct.c2, Some(big(14)));
        assert_eq!(kp.decrypt(&ct).unwrap(), big(10));

        let one = kp.public.encrypt(&big(1), &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        assert_eq!(kp.decrypt(&one).unwrap(), big(1));
    }

    #[test]
    fn add_fixed_vectors() {
        let kp = toy_add();
        let ct = kp.public.encrypt_with_nonce(&big(4), &big(3)).unwrap();
        assert_eq!(ct.c1, big(10));
        assert_eq!(ct.c2, Some(big(1)));
        assert_eq!(kp.decrypt(&ct).unwrap(), big(4));

        // x = 0 leaves c2 = beta^r.
        let zero = kp.public.encrypt_with_nonce(&big(0), &big(3)).unwrap();
        assert_eq!(zero.c2, Some(mod_pow(&kp.public.beta, &big(3), &kp.public.p)));
        assert_eq!(kp.decrypt(&zero).unwrap(), big(0));
    }

    #[test]
    fn combine_fixed_vectors() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let kp = toy_mul();
        let prod = elgamal_combine(
            &kp.public.encrypt(&big(3), &mut rng).unwrap(),
            &kp.public.encrypt(&big(5), &mut rng).unwrap(),
            &kp.public.p,
        )
        .unwrap();
        assert_eq!(kp.decrypt(&prod).unwrap(), big(15));

        let ident = elgamal_combine(
            &kp.public.encrypt(&big(7), &mut rng).unwrap(),
            &kp.public.encrypt(&big(1), &mut rng).unwrap(),
            &kp.public.p,
        )
        .unwrap();
        assert_eq!(kp.decrypt(&ident).unwrap(), big(7));

        let kp = toy_add();
        let sum = elgamal_combine(
            &kp.public.encrypt(&big(2), &mut rng).unwrap(),
            &kp.public.encrypt(&big(3), &mut rng).unwrap(),
            &kp.public.p,
        )
        .unwrap();
        assert_eq!(kp.decrypt(&sum).unwrap(), big(5));
    }

    #[test]
    fn add_overflow_surfaces_as_plaintext_out_of_bound() {
        // The group must be large enough that the overflowing exponent sum
        // does not wrap back under the bound via the generator's order.
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let kp = ElGamalKeypair::generate(32, ElGamalVariant::Add, Some(10), &mut rng).unwrap();
        let sum = elgamal_combine(
            &kp.public.encrypt(&big(7), &mut rng).unwrap(),
            &kp.public.encrypt(&big(8), &mut rng).unwrap(),
            &kp.public.p,
        )
        .unwrap();
        assert_eq!(kp.decrypt(&sum), Err(CryptoError::PlaintextOutOfBound));
    }

    #[test]
    fn message_bounds_enforced() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mul = toy_mul();
        assert_eq!(mul.public.encrypt(&big(0), &mut rng), Err(CryptoError::MessageOutOfRange));
        assert_eq!(mul.public.encrypt(&big(23), &mut rng), Err(CryptoError::MessageOutOfRange));
        let add = toy_add();
        assert_eq!(add.public.encrypt(&big(21), &mut rng), Err(CryptoError::MessageOutOfRange));
        assert!(add.public.encrypt(&big(20), &mut rng).is_ok());
    }

    #[test]
    fn generated_keys_have_verified_generators() {
        for seed in 0..4 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let kp =
                ElGamalKeypair::generate(16, ElGamalVariant::Mul, None, &mut rng).unwrap();
            let p = &kp.public.p;
            let q = (p - 1u32) >> 1;
            assert_eq!(p.bits(), 16);
            assert!(!mod_pow(&kp.public.alpha, &big(2), p).is_one());
            assert!(!mod_pow(&kp.public.alpha, &q, p).is_one());
            assert_eq!(kp.public.beta, mod_pow(&kp.public.alpha, &kp.a, p));
            kp.validate().unwrap();
        }
    }

    #[test]
    fn roundtrip_generated_keys_both_variants() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let mul = ElGamalKeypair::generate(32, ElGamalVariant::Mul, None, &mut rng).unwrap();
        for _ in 0..25 {
            let x = rng.gen_biguint_range(&BigUint::one(), &mul.public.p);
            let ct = mul.public.encrypt(&x, &mut rng).unwrap();
            assert_eq!(mul.decrypt(&ct).unwrap(), x);
        }
        let add =
            ElGamalKeypair::generate(32, ElGamalVariant::Add, Some(1 << 12), &mut rng).unwrap();
        for _ in 0..25 {
            let x = big(rng.gen_range(0..=1u64 << 12));
            let ct = add.public.encrypt(&x, &mut rng).unwrap();
            assert_eq!(add.decrypt(&ct).unwrap(), x);
        }
    }

    #[test]
    fn probabilistic_encryptions_are_distinct() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let kp = ElGamalKeypair::generate(32, ElGamalVariant::Mul, None, &mut rng).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            let ct = kp.public.encrypt(&big(10), &mut rng).unwrap();
            assert!(seen.insert((ct.c1, ct.c2)));
        }
    }

    #[test]
    fn variant_and_key_mismatches_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mul = toy_mul();
        let add = toy_add();
        let ct_mul = mul.public.encrypt(&big(3), &mut rng).unwrap();
        let ct_add = add.public.encrypt(&big(3), &mut rng).unwrap();

        // MUL and ADD are distinct schemes even over identical parameters.
        assert!(matches!(add.decrypt(&ct_mul), Err(CryptoError::SchemeMismatch { .. })));
        assert!(matches!(
            elgamal_combine(&ct_mul, &ct_add, &mul.public.p),
            Err(CryptoError::SchemeMismatch { .. })
        ));

        let other =
            ElGamalKeypair::from_parts(big(23), big(5), big(7), ElGamalVariant::Mul, None)
                .unwrap();
        assert_eq!(other.decrypt(&ct_mul), Err(CryptoError::KeyMismatch));
    }

    #[test]
    fn keygen_argument_validation() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        assert!(matches!(
            ElGamalKeypair::generate(16, ElGamalVariant::Add, None, &mut rng),
            Err(CryptoError::InvalidKey(_))
        ));
        assert!(matches!(
            ElGamalKeypair::generate(16, ElGamalVariant::Mul, Some(5), &mut rng),
            Err(CryptoError::InvalidKey(_))
        ));
    }
}
