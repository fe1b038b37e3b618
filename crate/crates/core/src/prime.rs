//! Random probable primes for generic rational points.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

const SMALL_PRIME_LIMIT: u32 = 4096;

fn small_primes() -> Vec<u32> {
    let n = SMALL_PRIME_LIMIT as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            (i * i..n).step_by(i).for_each(|j| sieve[j] = false);
        }
        i += 1;
    }
    (0..n as u32).filter(|&p| sieve[p as usize]).collect()
}

fn miller_rabin_round(n: &BigUint, d: &BigUint, s: u32, a: &BigUint) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Miller–Rabin with base 2 plus `rounds` random bases.
pub fn is_probable_prime<R: Rng + ?Sized>(n: &BigUint, rounds: u32, rng: &mut R) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for p in small_primes() {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0) as u32;
    let d = &n1 >> s;
    if !miller_rabin_round(n, &d, s, &BigUint::from(2u32)) {
        return false;
    }
    let two = BigUint::from(2u32);
    (0..rounds).all(|_| {
        let a = rng.gen_biguint_range(&two, &n1);
        miller_rabin_round(n, &d, s, &a)
    })
}

/// Uniformly random probable prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 2, "a prime needs at least 2 bits");
    if bits <= 12 {
        let ps: Vec<u32> = small_primes()
            .into_iter()
            .filter(|&p| (u64::BITS - (p as u64).leading_zeros()) as u64 == bits)
            .collect();
        return BigUint::from(ps[rng.gen_range(0..ps.len())]);
    }
    let primes = small_primes();
    loop {
        let mut c = rng.gen_biguint(bits);
        c.set_bit(bits - 1, true);
        c.set_bit(0, true);
        // incremental sieve over c, c+2, c+4, ...
        let mut residues: Vec<u32> = primes.iter().map(|&p| (&c % p).to_u32().unwrap()).collect();
        for step in 0..(20 * bits as u32) {
            // residues[0] is mod 2 and stays odd
            if !residues[1..].contains(&0) {
                let cand = &c + BigUint::from(2 * step);
                if cand.bits() != bits {
                    break;
                }
                if is_probable_prime(&cand, 24, rng) {
                    return cand;
                }
            }
            for (r, &p) in residues.iter_mut().zip(&primes) {
                *r = (*r + 2) % p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2u32, 3, 5, 7919, 65537, 1_000_000_007] {
            assert!(is_probable_prime(&BigUint::from(p), 8, &mut rng), "{p}");
        }
        for c in [1u64, 4, 561, 1105, 7917, 3_215_031_751, 1_000_000_007 * 3] {
            assert!(!is_probable_prime(&BigUint::from(c), 8, &mut rng), "{c}");
        }
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m127, 8, &mut rng));
        assert!(!is_probable_prime(&((BigUint::one() << 128u32) + 1u32), 8, &mut rng));
    }

    #[test]
    fn random_prime_has_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for bits in [5u64, 64, 256] {
            let p = random_prime(bits, &mut rng);
            assert_eq!(p.bits(), bits);
            assert!(is_probable_prime(&p, 16, &mut rng));
        }
    }
}
