//! Arbitrary-precision modular arithmetic and the number-theoretic
//! primitives the schemes are built from: modular exponentiation and
//! inversion, Miller-Rabin primality, prime and safe-prime generation,
//! Jacobi symbols, unit sampling, and a baby-step giant-step discrete log.
//!
//! All randomness is drawn from a caller-supplied [`rand::Rng`] so tests can
//! inject a seeded generator; production callers pass an OS-grade source.
//! Prime search draws candidate batches from the caller's generator and then
//! tests them, in parallel when the `parallel` feature is enabled. Because
//! candidates are drawn before testing and the first passing candidate in
//! batch order wins, the parallel and sequential paths return identical
//! primes for identical generator states.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::CryptoError;

/// Miller-Rabin rounds used when generating key material (error < 2^-128).
pub const PRIME_ROUNDS: u32 = 64;

/// Candidates drawn per search round; all are drawn from the caller's
/// generator before any testing so the parallel and sequential paths agree.
const PRIME_BATCH: usize = 32;
const SAFE_PRIME_BATCH: usize = 128;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; 1024];
        let mut primes = Vec::new();
        for n in 2..sieve.len() {
            if sieve[n] {
                primes.push(n as u64);
                for m in (n * n..sieve.len()).step_by(n) {
                    sieve[m] = false;
                }
            }
        }
        primes
    })
}

/// base^exp mod m by square-and-multiply. Total for any modulus >= 2.
pub fn mod_pow(base: &BigUint, exp: &BigUint, m: &BigUint) -> BigUint {
    assert!(m >= &BigUint::from(2u32), "modulus must be >= 2");
    base.modpow(exp, m)
}

/// Extended Euclid: returns (g, u, v) with a*u + b*v = g = gcd(a, b).
pub fn egcd(a: &BigUint, b: &BigUint) -> (BigUint, BigInt, BigInt) {
    assert!(
        !(a.is_zero() && b.is_zero()),
        "gcd(0, 0) is undefined"
    );
    let ext = BigInt::from(a.clone()).extended_gcd(&BigInt::from(b.clone()));
    let g = ext.gcd.to_biguint().expect("gcd of nonnegative inputs");
    (g, ext.x, ext.y)
}

/// Multiplicative inverse of x modulo m, in [0, m).
pub fn mod_inv(x: &BigUint, m: &BigUint) -> Result<BigUint, CryptoError> {
    assert!(m >= &BigUint::from(2u32), "modulus must be >= 2");
    let xm = x % m;
    if xm.is_zero() {
        return Err(CryptoError::NotInvertible);
    }
    let (g, u, _) = egcd(&xm, m);
    if !g.is_one() {
        return Err(CryptoError::NotInvertible);
    }
    let mi = BigInt::from(m.clone());
    Ok(u.mod_floor(&mi).to_biguint().expect("mod_floor is nonnegative"))
}

/// Least common multiple of two positive integers.
pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    assert!(!a.is_zero() && !b.is_zero(), "lcm requires positive inputs");
    a.lcm(b)
}

/// Deterministic seed for the Miller-Rabin bases of a given candidate.
///
/// Witness bases are derived from the candidate itself so the test is a pure
/// function of (n, rounds): reproducible across runs and safe to call from
/// parallel search workers without threading a generator through.
fn witness_rng(n: &BigUint) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(b"miller-rabin-witness-v1");
    hasher.update(n.to_bytes_be());
    ChaCha20Rng::from_seed(hasher.finalize().into())
}

/// Miller-Rabin probable-prime test with small-prime trial division first.
///
/// False-positive probability is below 4^-rounds. Trial division by the
/// primes under 1024 makes the answer exact for all n < 2^20.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    assert!(rounds >= 1, "at least one round required");
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if *n == pb {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }

    // n - 1 = 2^s * d with d odd
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n_minus_1 >> s;

    let mut rng = witness_rng(n);
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_candidate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    // Top two bits set so products of two such primes have exactly 2*bits bits.
    let mut c = rng.gen_biguint(bits);
    c.set_bit(bits - 1, true);
    c.set_bit(bits - 2, true);
    c.set_bit(0, true);
    c
}

/// Random prime with exactly `bits` bits (top two bits set).
///
/// Dispatches to the parallel search when the `parallel` feature is enabled;
/// the result is identical to [`gen_prime_sequential`] for the same generator
/// state.
pub fn gen_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    #[cfg(feature = "parallel")]
    {
        gen_prime_parallel(bits, rng)
    }
    #[cfg(not(feature = "parallel"))]
    {
        gen_prime_sequential(bits, rng)
    }
}

/// Sequential fallback for [`gen_prime`]; always available.
pub fn gen_prime_sequential<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 8, "primes below 8 bits are not supported");
    loop {
        let batch: Vec<BigUint> = (0..PRIME_BATCH).map(|_| prime_candidate(bits, rng)).collect();
        if let Some(p) = batch.into_iter().find(|c| is_probable_prime(c, PRIME_ROUNDS)) {
            return p;
        }
    }
}

/// Parallel candidate search for [`gen_prime`].
#[cfg(feature = "parallel")]
pub fn gen_prime_parallel<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 8, "primes below 8 bits are not supported");
    loop {
        let batch: Vec<BigUint> = (0..PRIME_BATCH).map(|_| prime_candidate(bits, rng)).collect();
        if let Some(p) = batch
            .into_par_iter()
            .find_first(|c| is_probable_prime(c, PRIME_ROUNDS))
        {
            return p;
        }
    }
}

/// Cheap rejection of safe-prime candidates: trial-divides q and p = 2q + 1
/// by the small primes using one scalar residue per prime.
fn safe_pair_survives_sieve(q: &BigUint) -> bool {
    for &p in small_primes() {
        let qm = (q % p).to_u64().expect("residue fits u64");
        if qm == 0 || (2 * qm + 1) % p == 0 {
            return false;
        }
    }
    true
}

fn check_safe_pair(q: BigUint) -> Option<(BigUint, BigUint)> {
    if !safe_pair_survives_sieve(&q) {
        return None;
    }
    let p = (&q << 1u32) + 1u32;
    // Single rounds weed out composites before paying for full verification.
    if !is_probable_prime(&q, 1) || !is_probable_prime(&p, 1) {
        return None;
    }
    if is_probable_prime(&q, PRIME_ROUNDS) && is_probable_prime(&p, PRIME_ROUNDS) {
        Some((p, q))
    } else {
        None
    }
}

fn safe_prime_candidate<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    // q gets bits-1 bits with the top bit set so p = 2q + 1 has exactly `bits`.
    let mut q = rng.gen_biguint(bits - 1);
    q.set_bit(bits - 2, true);
    q.set_bit(0, true);
    q
}

/// Safe prime p = 2q + 1 with exactly `bits` bits; returns (p, q).
pub fn gen_safe_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> (BigUint, BigUint) {
    #[cfg(feature = "parallel")]
    {
        gen_safe_prime_parallel(bits, rng)
    }
    #[cfg(not(feature = "parallel"))]
    {
        gen_safe_prime_sequential(bits, rng)
    }
}

/// Sequential fallback for [`gen_safe_prime`]; always available.
pub fn gen_safe_prime_sequential<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> (BigUint, BigUint) {
    assert!(bits >= 16, "safe primes below 16 bits are not supported");
    loop {
        let batch: Vec<BigUint> =
            (0..SAFE_PRIME_BATCH).map(|_| safe_prime_candidate(bits, rng)).collect();
        if let Some(pair) = batch.into_iter().find_map(check_safe_pair) {
            return pair;
        }
    }
}

/// Parallel candidate search for [`gen_safe_prime`].
#[cfg(feature = "parallel")]
pub fn gen_safe_prime_parallel<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> (BigUint, BigUint) {
    assert!(bits >= 16, "safe primes below 16 bits are not supported");
    loop {
        let batch: Vec<BigUint> =
            (0..SAFE_PRIME_BATCH).map(|_| safe_prime_candidate(bits, rng)).collect();
        if let Some(pair) = batch.into_par_iter().filter_map(check_safe_pair).find_first(|_| true) {
            return pair;
        }
    }
}

/// Jacobi symbol (a/n) for odd n >= 3.
pub fn jacobi(a: &BigUint, n: &BigUint) -> Result<i8, CryptoError> {
    if n.is_even() || n < &BigUint::from(3u32) {
        return Err(CryptoError::InvalidModulus(format!(
            "jacobi symbol requires an odd modulus >= 3, got {n}"
        )));
    }
    let mut a = a % n;
    let mut n = n.clone();
    let mut sign = 1i8;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1u32;
            let r = (&n % 8u32).to_u8().expect("residue fits u8");
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            sign = -sign;
        }
        a %= &n;
    }
    Ok(if n.is_one() { sign } else { 0 })
}

/// Uniform draw from the units of Z_m via rejection sampling.
pub fn sample_unit<R: Rng + ?Sized>(m: &BigUint, rng: &mut R) -> BigUint {
    assert!(m >= &BigUint::from(2u32), "modulus must be >= 2");
    loop {
        let x = rng.gen_biguint_below(m);
        if !x.is_zero() && x.gcd(m).is_one() {
            return x;
        }
    }
}

/// Smallest x in [0, bound] with base^x = target (mod m), by baby-step
/// giant-step: O(sqrt(bound)) time and memory.
pub fn bsgs_dlog(
    base: &BigUint,
    target: &BigUint,
    m: &BigUint,
    bound: u64,
) -> Result<u64, CryptoError> {
    assert!(bound >= 1, "bound must be >= 1");
    assert!(m >= &BigUint::from(2u32), "modulus must be >= 2");
    let base = base % m;
    let target = target % m;

    let steps = (bound + 1).sqrt() + 1;
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(steps as usize);
    let mut cur = BigUint::one();
    for j in 0..steps {
        table.entry(cur.clone()).or_insert(j);
        cur = (&cur * &base) % m;
    }

    // cur is now base^steps; its inverse drives the giant steps.
    let giant = match mod_inv(&cur, m) {
        Ok(inv) => inv,
        Err(_) => {
            // Base not invertible: no giant steps possible, scan linearly.
            return linear_dlog(&base, &target, m, bound);
        }
    };

    let mut gamma = target;
    let mut i = 0u64;
    while i * steps <= bound {
        if let Some(&j) = table.get(&gamma) {
            let x = i * steps + j;
            if x <= bound {
                return Ok(x);
            }
        }
        gamma = (&gamma * &giant) % m;
        i += 1;
    }
    Err(CryptoError::NotFound)
}

fn linear_dlog(
    base: &BigUint,
    target: &BigUint,
    m: &BigUint,
    bound: u64,
) -> Result<u64, CryptoError> {
    let mut acc = BigUint::one();
    for x in 0..=bound {
        if acc == *target {
            return Ok(x);
        }
        acc = (&acc * base) % m;
    }
    Err(CryptoError::NotFound)
}
