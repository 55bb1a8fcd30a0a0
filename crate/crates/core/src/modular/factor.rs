//! Integer factorization: trial division plus Pollard rho (Brent variant)
//! with a fixed, deterministic parameter sequence.

use super::primality::{is_prime, mulmod_u128, mulmod_u64, PRIMALITY_WIDTH};
use crate::error::{Error, Result};

/// A complete prime factorization, `(prime, exponent)` pairs sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(i128, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(i128, u32)] {
        &self.factors
    }

    /// Reconstructs the factored integer.
    pub fn value(&self) -> Result<i128> {
        let mut v: i128 = 1;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                v = crate::util::cmul(v, p)?;
            }
        }
        Ok(v)
    }

    /// Largest prime factor; `None` for the empty product 1.
    pub fn greatest_prime(&self) -> Option<i128> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Mobius function of the factored integer.
    pub fn mobius(&self) -> i32 {
        if !self.is_squarefree() {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All positive divisors, sorted ascending.
    pub fn divisors(&self) -> Vec<i128> {
        let mut divs = vec![1i128];
        for &(p, e) in &self.factors {
            let prev = divs.clone();
            let mut pe = 1i128;
            for _ in 0..e {
                pe *= p;
                divs.extend(prev.iter().map(|d| d * pe));
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Sum of divisors.
    pub fn sigma(&self) -> i128 {
        self.factors.iter().fold(1i128, |acc, &(p, e)| {
            let mut s = 1i128;
            let mut pe = 1i128;
            for _ in 0..e {
                pe *= p;
                s += pe;
            }
            acc * s
        })
    }
}

fn rho_brent_u64(n: u64, c: u64) -> Option<u64> {
    // Brent cycle finding for f(x) = x^2 + c, seed 2. Deterministic.
    let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
    let (mut x, mut ys) = (2u64, 2u64);
    let mut y = 2u64;
    let mut d = 1u64;
    let mut r = 1u64;
    let mut q = 1u64;
    const BATCH: u64 = 128;
    while d == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && d == 1 {
            ys = y;
            let lim = BATCH.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mulmod_u64(q, x.abs_diff(y), n);
            }
            d = gcd_u64(q, n);
            k += lim;
        }
        r <<= 1;
        if r > 1 << 22 {
            return None;
        }
    }
    if d == n {
        // Backtrack one step at a time.
        loop {
            ys = f(ys);
            d = gcd_u64(x.abs_diff(ys), n);
            if d > 1 {
                break;
            }
        }
    }
    (d != n).then_some(d)
}

fn rho_brent_u128(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| {
        let fx = mulmod_u128(x, x, n);
        if fx + c >= n {
            fx + c - n
        } else {
            fx + c
        }
    };
    let (mut x, mut ys) = (2u128, 2u128);
    let mut y = 2u128;
    let mut d = 1u128;
    let mut r = 1u128;
    let mut q = 1u128;
    const BATCH: u128 = 128;
    while d == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && d == 1 {
            ys = y;
            let lim = BATCH.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mulmod_u128(q, x.abs_diff(y), n);
            }
            d = gcd_u128(q, n);
            k += lim;
        }
        r <<= 1;
        if r > 1 << 24 {
            return None;
        }
    }
    if d == n {
        loop {
            ys = f(ys);
            d = gcd_u128(x.abs_diff(ys), n);
            if d > 1 {
                break;
            }
        }
    }
    (d != n).then_some(d)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn split(n: u128) -> u128 {
    // Fixed c = 1, 2, 3, ... keeps runs reproducible.
    if n <= u64::MAX as u128 {
        let m = n as u64;
        for c in 1u64.. {
            if let Some(d) = rho_brent_u64(m, c) {
                return d as u128;
            }
        }
        unreachable!()
    }
    for c in 1u128.. {
        if let Some(d) = rho_brent_u128(n, c) {
            return d;
        }
    }
    unreachable!()
}

fn factor_into(n: u128, out: &mut Vec<i128>) {
    if n == 1 {
        return;
    }
    if is_prime(n as i128) {
        out.push(n as i128);
        return;
    }
    let d = split(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Complete prime factorization of `n >= 1`.
///
/// Deterministic for the supported width (see [`is_prime`]); `factorize(1)`
/// is the empty product.
pub fn factorize(n: i128) -> Result<Factorization> {
    if n < 1 {
        return Err(Error::invalid(format!(
            "factorize requires n >= 1, got {n}"
        )));
    }
    if (n as u128) >= PRIMALITY_WIDTH {
        return Err(Error::range(format!(
            "factorize input {n} exceeds the deterministic primality width"
        )));
    }
    let mut rest = n as u128;
    let mut primes: Vec<i128> = Vec::new();
    // Trial division by a short wheel first; rho handles the rest.
    for p in TRIAL_PRIMES {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            rest /= p;
            primes.push(p as i128);
        }
    }
    if rest > 1 {
        if let Some(&last) = TRIAL_PRIMES.last() {
            if rest <= (last as u128) * (last as u128) {
                primes.push(rest as i128);
                rest = 1;
            }
        }
    }
    if rest > 1 {
        factor_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(i128, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { factors })
}

/// Greatest prime factor of `n >= 2`.
pub fn gpf(n: i128) -> Result<i128> {
    if n < 2 {
        return Err(Error::invalid(format!("gpf requires n >= 2, got {n}")));
    }
    Ok(factorize(n)?
        .greatest_prime()
        .expect("n >= 2 has a prime factor"))
}

/// `true` iff `n >= 1` has no repeated prime factor.
pub fn is_squarefree(n: i128) -> Result<bool> {
    Ok(factorize(n)?.is_squarefree())
}

/// Mobius function for `n >= 1`.
pub fn mobius(n: i128) -> Result<i32> {
    Ok(factorize(n)?.mobius())
}

const TRIAL_PRIMES: [u32; 168] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421,
    431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547,
    557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
    661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797,
    809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919, 929,
    937, 941, 947, 953, 967, 971, 977, 983, 991, 997,
];
