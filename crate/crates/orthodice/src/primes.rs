//! Prime utilities for side-count bookkeeping: sieve, prime ranks,
//! Miller-Rabin, and decimal digit counts of huge integers.
//!
//! Digit counts avoid radix conversion entirely: for a number with tens of
//! millions of bits, `to_string` is quadratic and hopeless, while the bit
//! length pins the digit count to at most two candidates which are separated
//! by a single exact power-of-ten comparison (and usually by none at all).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// All primes `<= limit` by sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut p = 2usize;
    while p * p <= n {
        if !composite[p] {
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| !composite[i]).map(|i| i as u64).collect()
}

/// 1-based rank of `p` among the primes (`prime_rank(2) = 1`), or `None`
/// if `p` is not prime. Sieves up to `p`, so intended for moderate `p`.
pub fn prime_rank(p: u64) -> Option<u64> {
    if p < 2 {
        return None;
    }
    let primes = sieve_primes(p);
    match primes.binary_search(&p) {
        Ok(i) => Some(i as u64 + 1),
        Err(_) => None,
    }
}

/// Miller-Rabin primality test.
///
/// For `n < 2^64` the fixed witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29,
/// 31, 37} is known to be deterministic. Larger inputs are tested against the
/// same witnesses plus further small primes, giving a fixed-seed probabilistic
/// test (error probability below 4^-25); proving primality at that size is
/// out of scope.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    const WITNESSES: [u32; 25] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97,
    ];
    if let Some(small) = n.to_u32() {
        if WITNESSES.contains(&small) {
            return true;
        }
    }
    if n.is_even() {
        return false;
    }
    let rounds = if n.bits() <= 64 { 12 } else { WITNESSES.len() };
    // n - 1 = d * 2^s with d odd
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n - 1 > 0");
    let d = &n_minus_1 >> s;
    'witness: for &a in &WITNESSES[..rounds] {
        let a = BigUint::from(a);
        if &a % n == BigUint::zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Rational bounds on log10(2): L_LO/SCALE < log10(2) < L_HI/SCALE.
const SCALE: u128 = 100_000_000_000_000_000;
const L_LO: u128 = 30_102_999_566_398_119;
const L_HI: u128 = 30_102_999_566_398_120;

/// Number of decimal digits of `x` (1 for zero).
///
/// From `2^(b-1) <= x < 2^b` the digit count lies in
/// `[floor((b-1) log10 2) + 1, floor(b log10 2) + 1]`. The floors are
/// evaluated with exact rational bounds on `log10 2`; when the two ends
/// coincide (the overwhelmingly common case, including every Mersenne
/// number) no big arithmetic happens at all. Otherwise one exact comparison
/// against a power of ten settles it.
pub fn decimal_digits(x: &BigUint) -> u64 {
    if x.is_zero() {
        return 1;
    }
    let bits = x.bits();
    if bits <= 20 {
        // Fits comfortably in u64; count directly.
        let mut v = x.to_u64().expect("bits <= 20");
        let mut d = 0;
        while v > 0 {
            d += 1;
            v /= 10;
        }
        return d;
    }
    let floor_bounds = |b: u128| -> (u128, u128) { (b * L_LO / SCALE, b * L_HI / SCALE) };
    let (lo1, _) = floor_bounds(bits as u128 - 1);
    let (_, hi2) = floor_bounds(bits as u128);
    let d_min = lo1 as u64 + 1;
    let d_max = hi2 as u64 + 1;
    if d_min == d_max {
        return d_min;
    }
    // Rare: candidates d_min..=d_max (a span of 1, or 2 if a floor bound was
    // ambiguous). Find the smallest d with x < 10^d.
    let mut d = d_min;
    let mut power = BigUint::from(10u32).pow(d as u32);
    while *x >= power {
        power *= 10u32;
        d += 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_known_primes() {
        assert_eq!(sieve_primes(1), Vec::<u64>::new());
        assert_eq!(sieve_primes(12), vec![2, 3, 5, 7, 11]);
        assert_eq!(sieve_primes(100).len(), 25);
        assert_eq!(sieve_primes(1_000_000).len(), 78_498);
    }

    #[test]
    fn prime_ranks() {
        assert_eq!(prime_rank(2), Some(1));
        assert_eq!(prime_rank(37), Some(12));
        assert_eq!(prime_rank(541), Some(100));
        assert_eq!(prime_rank(104_729), Some(10_000));
        assert_eq!(prime_rank(4), None);
        assert_eq!(prime_rank(1), None);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve_below_ten_thousand() {
        let primes = sieve_primes(10_000);
        let mut next = primes.iter().peekable();
        for n in 0..=10_000u64 {
            let expected = match next.peek() {
                Some(&&p) if p == n => {
                    next.next();
                    true
                }
                _ => false,
            };
            assert_eq!(is_probable_prime(&BigUint::from(n)), expected, "n={n}");
        }
    }

    #[test]
    fn miller_rabin_known_large_cases() {
        // 2^61 - 1 is a Mersenne prime; 2^67 - 1 famously is not.
        let m61 = (BigUint::one() << 61u32) - 1u32;
        let m67 = (BigUint::one() << 67u32) - 1u32;
        assert!(is_probable_prime(&m61));
        assert!(!is_probable_prime(&m67));
        // Carmichael numbers must not fool the test.
        for c in [561u64, 1105, 1729, 41041, 825265] {
            assert!(!is_probable_prime(&BigUint::from(c)), "carmichael {c}");
        }
    }

    #[test]
    fn digit_counts_match_string_lengths() {
        assert_eq!(decimal_digits(&BigUint::zero()), 1);
        for v in [1u64, 9, 10, 11, 99, 100, 101, 999_999, 1_000_000, u64::MAX] {
            assert_eq!(
                decimal_digits(&BigUint::from(v)),
                v.to_string().len() as u64,
                "v={v}"
            );
        }
        // Straddle every power-of-ten boundary near powers of two.
        for e in 1..=400u32 {
            for base in [
                BigUint::from(10u32).pow(e),
                BigUint::from(2u32).pow(e),
                BigUint::from(7u32).pow(e),
            ] {
                for delta in [-1i32, 0, 1] {
                    let x = match delta {
                        -1 => &base - 1u32,
                        1 => &base + 1u32,
                        _ => base.clone(),
                    };
                    if x.is_zero() {
                        continue;
                    }
                    assert_eq!(
                        decimal_digits(&x),
                        x.to_string().len() as u64,
                        "base ~ {base}, delta {delta}"
                    );
                }
            }
        }
    }
}
