//! Paillier: e(x, r) = g^x * r^n mod n^2, d(y) = L(y^lambda mod n^2) * mu
//! mod n with L(u) = (u - 1) / n. Multiplying ciphertexts adds plaintexts
//! modulo n.
//!
//! Key generation defaults to g = n + 1, for which L(g^lambda mod n^2) =
//! lambda mod n is always invertible when gcd(n, lambda) = 1 and g^x mod n^2
//! collapses to 1 + x*n. A validated random-g mode is kept alongside.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::CryptoError;
use crate::numtheory::{gen_prime, lcm, mod_inv, mod_pow, sample_unit};
use crate::schemes::{check_pair_compatible, Ciphertext, SchemeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierPublicKey {
    /// Modulus n = p * q; plaintexts live in Z_n, ciphertexts in Z_{n^2}.
    pub n: BigUint,
    /// Group element in Z_{n^2}^*, by default n + 1.
    pub g: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierKeypair {
    pub public: PaillierPublicKey,
    /// Carmichael function lambda(n) = lcm(p-1, q-1).
    pub lambda: BigUint,
    /// Cached inverse of L(g^lambda mod n^2) modulo n.
    pub mu: BigUint,
}

impl PaillierPublicKey {
    pub fn n_squared(&self) -> BigUint {
        &self.n * &self.n
    }

    /// Probabilistic encryption with a fresh unit nonce.
    pub fn encrypt<R: Rng + ?Sized>(
        &self,
        x: &BigUint,
        rng: &mut R,
    ) -> Result<Ciphertext, CryptoError> {
        let r = sample_unit(&self.n, rng);
        self.encrypt_with_nonce(x, &r)
    }

    /// Encryption with an explicit nonce; fixtures and regression vectors
    /// need the deterministic form.
    pub fn encrypt_with_nonce(&self, x: &BigUint, r: &BigUint) -> Result<Ciphertext, CryptoError> {
        if x >= &self.n {
            return Err(CryptoError::MessageOutOfRange);
        }
        let n2 = self.n_squared();
        let g_to_x = if self.g == &self.n + 1u32 {
            // (n+1)^x = 1 + x*n (mod n^2)
            (BigUint::one() + x * &self.n) % &n2
        } else {
            mod_pow(&self.g, x, &n2)
        };
        let c1 = g_to_x * mod_pow(&(r % &self.n), &self.n, &n2) % &n2;
        Ok(Ciphertext {
            scheme: SchemeId::Paillier,
            c1,
            c2: None,
            fingerprint: crate::schemes::PublicKey::Paillier(self.clone()).fingerprint(),
        })
    }
}

/// L(u) = (u - 1) / n, defined on integers congruent to 1 modulo n.
fn l_function(u: &BigUint, n: &BigUint) -> Result<BigUint, CryptoError> {
    let shifted = u - 1u32;
    if !(&shifted % n).is_zero() {
        return Err(CryptoError::InvalidCiphertext(
            "value not congruent to 1 modulo n".into(),
        ));
    }
    Ok(shifted / n)
}

impl PaillierKeypair {
    pub fn generate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> PaillierKeypair {
        assert!(bits >= 16 && bits % 2 == 0, "Paillier modulus bits must be even and >= 16");
        loop {
            let p = gen_prime(bits / 2, rng);
            let mut q = gen_prime(bits / 2, rng);
            while q == p {
                q = gen_prime(bits / 2, rng);
            }
            if let Ok(kp) = Self::from_primes(&p, &q) {
                return kp;
            }
        }
    }

    /// Keypair from known primes with the default g = n + 1.
    pub fn from_primes(p: &BigUint, q: &BigUint) -> Result<PaillierKeypair, CryptoError> {
        let n = p * q;
        let g = &n + 1u32;
        Self::from_primes_with_g(p, q, g)
    }

    /// The paper-faithful mode: any g in Z_{n^2}^* with invertible
    /// L(g^lambda mod n^2) is accepted; others are rejected.
    pub fn from_primes_with_g(
        p: &BigUint,
        q: &BigUint,
        g: BigUint,
    ) -> Result<PaillierKeypair, CryptoError> {
        if p == q {
            return Err(CryptoError::InvalidKey("p and q must differ".into()));
        }
        let n = p * q;
        let pq_phi = (p - 1u32) * (q - 1u32);
        if !n.gcd(&pq_phi).is_one() {
            return Err(CryptoError::InvalidKey("gcd(n, (p-1)(q-1)) != 1".into()));
        }
        let n2 = &n * &n;
        if !g.gcd(&n2).is_one() || g >= n2 {
            return Err(CryptoError::InvalidKey("g is not a unit of Z_{n^2}".into()));
        }
        let lambda = lcm(&(p - 1u32), &(q - 1u32));
        let l_value = l_function(&mod_pow(&g, &lambda, &n2), &n)
            .map_err(|_| CryptoError::InvalidKey("L(g^lambda) undefined".into()))?;
        let mu = mod_inv(&l_value, &n)
            .map_err(|_| CryptoError::InvalidKey("L(g^lambda) not invertible mod n".into()))?;
        Ok(PaillierKeypair { public: PaillierPublicKey { n, g }, lambda, mu })
    }

    /// Random-g key generation retained for fidelity to the construction's
    /// original statement; rejects candidates until invertibility holds.
    pub fn generate_with_random_g<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> PaillierKeypair {
        assert!(bits >= 16 && bits % 2 == 0, "Paillier modulus bits must be even and >= 16");
        loop {
            let p = gen_prime(bits / 2, rng);
            let mut q = gen_prime(bits / 2, rng);
            while q == p {
                q = gen_prime(bits / 2, rng);
            }
            let n2 = (&p * &q) * (&p * &q);
            for _ in 0..32 {
                let g = sample_unit(&n2, rng);
                if let Ok(kp) = Self::from_primes_with_g(&p, &q, g) {
                    return kp;
                }
            }
        }
    }

    pub fn decrypt(&self, ct: &Ciphertext) -> Result<BigUint, CryptoError> {
        if ct.scheme != SchemeId::Paillier {
            return Err(CryptoError::SchemeMismatch {
                expected: SchemeId::Paillier,
                found: ct.scheme,
            });
        }
        if ct.fingerprint != crate::schemes::PublicKey::Paillier(self.public.clone()).fingerprint()
        {
            return Err(CryptoError::KeyMismatch);
        }
        let n = &self.public.n;
        let n2 = self.public.n_squared();
        if ct.c1.is_zero() || ct.c1 >= n2 || !ct.c1.gcd(&n2).is_one() {
            return Err(CryptoError::InvalidCiphertext("not a unit of Z_{n^2}".into()));
        }
        let l_value = l_function(&mod_pow(&ct.c1, &self.lambda, &n2), n)?;
        Ok(l_value * &self.mu % n)
    }

    pub fn validate(&self) -> Result<(), CryptoError> {
        let n = &self.public.n;
        let n2 = self.public.n_squared();
        if self.lambda.is_zero() {
            return Err(CryptoError::InvalidKey("lambda must be positive".into()));
        }
        if !self.public.g.gcd(&n2).is_one() {
            return Err(CryptoError::InvalidKey("g is not a unit of Z_{n^2}".into()));
        }
        let l_value = l_function(&mod_pow(&self.public.g, &self.lambda, &n2), n)
            .map_err(|_| CryptoError::InvalidKey("L(g^lambda) undefined".into()))?;
        let mu = mod_inv(&l_value, n)
            .map_err(|_| CryptoError::InvalidKey("L(g^lambda) not invertible".into()))?;
        if mu != self.mu {
            return Err(CryptoError::InvalidKey("mu is not the inverse of L(g^lambda)".into()));
        }
        Ok(())
    }
}

/// Homomorphic add: c = ca * cb mod n^2 decrypts to (x1 + x2) mod n.
pub fn paillier_add(
    ca: &Ciphertext,
    cb: &Ciphertext,
    n: &BigUint,
) -> Result<Ciphertext, CryptoError> {
    check_pair_compatible(SchemeId::Paillier, ca, cb)?;
    let n2 = n * n;
    Ok(Ciphertext {
        scheme: SchemeId::Paillier,
        c1: (&ca.c1 * &cb.c1) % n2,
        c2: None,
        fingerprint: ca.fingerprint,
    })
}
