//! Deterministic Miller-Rabin primality testing.
//!
//! The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is
//! deterministic for every n < 3_317_044_064_679_887_385_961_981 (Sorenson &
//! Webster), which comfortably covers the widths this crate supports.

/// Largest input for which the fixed witness set is a proof.
pub(crate) const PRIMALITY_WIDTH: u128 = 3_317_044_064_679_887_385_961_981;

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Binary (shift-and-add) multiplication mod m, for moduli above 2^64.
pub(crate) fn mulmod_u128(mut a: u128, mut b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return mulmod_u64((a % m) as u64, (b % m) as u64, m as u64) as u128;
    }
    a %= m;
    b %= m;
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = addmod_u128(acc, a, m);
        }
        a = addmod_u128(a, a, m);
        b >>= 1;
    }
    acc
}

fn addmod_u128(a: u128, b: u128, m: u128) -> u128 {
    // a, b < m <= 2^127 so a + b cannot wrap i128-width u128 arithmetic.
    let s = a.wrapping_add(b);
    if s >= m || s < a {
        s.wrapping_sub(m)
    } else {
        s
    }
}

pub(crate) fn powmod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u128(acc, base, m);
        }
        base = mulmod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &w in &WITNESSES {
        let mut x = powmod_u64(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_u128(n: u128) -> bool {
    debug_assert!(n < PRIMALITY_WIDTH);
    if n <= u64::MAX as u128 {
        return is_prime_u64(n as u64);
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &w in &WITNESSES {
        let mut x = powmod_u128(w as u128, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality check. `false` for n < 2.
///
/// Panics in debug builds beyond the proven witness width; callers in this
/// crate validate their ranges first.
pub fn is_prime(n: i128) -> bool {
    if n < 2 {
        return false;
    }
    is_prime_u128(n as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes_against_trial_division() {
        let trial = |n: u64| -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        };
        for n in 0u64..5000 {
            assert_eq!(is_prime(n as i128), trial(n), "n={n}");
        }
    }

    #[test]
    fn known_large_cases() {
        assert!(is_prime((1u128 << 61) as i128 - 1)); // Mersenne prime 2^61-1
        assert!(!is_prime(((1u128 << 61) as i128 - 1) * 3));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
                                           // 10^20 + 39 is prime; exercises the u128 path via mulmod widths.
        assert!(is_prime(100_000_000_000_000_000_039i128));
    }
}
