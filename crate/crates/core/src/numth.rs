//! Integer number theory on machine words: primality and factorization.
//!
//! Only what the field layer and the order computations need. Values up to
//! 2^124 appear as factors of q⁴ − 1 (namely q² + 1 for q < 2^62).

use std::collections::BTreeMap;

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `a * b mod m` for any `m < 2^127`.
pub fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(m < 1 << 127);
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let mut a = a % m;
    let mut b = b % m;
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc += a;
            if acc >= m {
                acc -= m;
            }
        }
        a <<= 1;
        if a >= m {
            a -= m;
        }
        b >>= 1;
    }
    acc
}

pub fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL_PRIMES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin for inputs below 2^127. Exact below 3.3·10^24; above that
/// the 20 fixed prime bases leave an error probability far below anything
/// observable at the sizes used here.
pub fn is_prime_u128(n: u128) -> bool {
    if n <= u64::MAX as u128 {
        return is_prime_u64(n as u64);
    }
    const BASES: [u128; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    for p in BASES {
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant of Pollard rho; returns a nontrivial divisor of a composite
// odd `n`.
fn pollard_brent(n: u128) -> u128 {
    let mut c: u128 = 1;
    loop {
        let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u128, 2u128, 1u128);
        let mut q = 1u128;
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = 64.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod_u128(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u128, out: &mut BTreeMap<u128, u32>) {
    if n == 1 {
        return;
    }
    if is_prime_u128(n) {
        *out.entry(n).or_default() += 1;
        return;
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize_u128(mut n: u128) -> Vec<(u128, u32)> {
    assert!(n > 0, "cannot factor zero");
    let mut out = BTreeMap::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            *out.entry(p).or_default() += 1;
            n /= p;
        }
    }
    let mut p = 53u128;
    while p < 10_000 && p * p <= n {
        while n.is_multiple_of(p) {
            *out.entry(p).or_default() += 1;
            n /= p;
        }
        p += 2;
    }
    if n > 1 {
        factor_into(n, &mut out);
    }
    out.into_iter().collect()
}

/// Distinct prime divisors of q⁴ − 1 = (q − 1)(q + 1)(q² + 1).
pub fn prime_divisors_q4_minus_1(q: u64) -> Vec<u128> {
    let q = q as u128;
    let mut primes: Vec<u128> = [q - 1, q + 1, q * q + 1]
        .into_iter()
        .flat_map(|n| factorize_u128(n).into_iter().map(|(p, _)| p))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primality_matches_sieve() {
        let n = 5000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(i as u64), p, "{i}");
        }
    }

    #[test]
    fn large_primes_and_strong_pseudoprimes() {
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(3_215_031_751)); // spsp to bases 2,3,5,7
        assert!(is_prime_u128((1u128 << 89) - 1));
        assert!(!is_prime_u128(((1u128 << 61) - 1) * ((1u128 << 31) - 1)));
    }

    #[test]
    fn factorization_reconstructs() {
        for n in [624u128, 2400, 1 << 40, 600_851_475_143, ((1u128 << 61) - 1) * 1_000_003] {
            let f = factorize_u128(n);
            let prod: u128 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.iter().all(|&(p, _)| is_prime_u128(p)));
        }
        assert_eq!(factorize_u128(624), vec![(2, 4), (3, 1), (13, 1)]);
    }

    #[test]
    fn q4_minus_1_divisors() {
        assert_eq!(prime_divisors_q4_minus_1(5), vec![2, 3, 13]);
        // 7^4 - 1 = 2400 = 2^5 * 3 * 5^2
        assert_eq!(prime_divisors_q4_minus_1(7), vec![2, 3, 5]);
    }
}
