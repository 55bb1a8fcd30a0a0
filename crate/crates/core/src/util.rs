//! Small arithmetic helpers used across the crate.

use crate::error::{Error, Result};

/// Checked addition on i128.
pub(crate) fn cadd(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b)
        .ok_or_else(|| Error::range(format!("integer overflow in {a} + {b}")))
}

/// Checked subtraction on i128.
pub(crate) fn csub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b)
        .ok_or_else(|| Error::range(format!("integer overflow in {a} - {b}")))
}

/// Checked multiplication on i128.
pub(crate) fn cmul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b)
        .ok_or_else(|| Error::range(format!("integer overflow in {a} * {b}")))
}

/// Least nonnegative residue of `x` mod `m` (m > 0).
pub(crate) fn umod(x: i128, m: i128) -> i128 {
    debug_assert!(m > 0);
    x.rem_euclid(m)
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0.
pub(crate) fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `x` mod `m` (m >= 1), if gcd(x, m) = 1. modinv(x, 1) = Some(0).
pub(crate) fn modinv(x: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = egcd(umod(x, m), m);
    if g == 1 {
        Some(umod(s, m))
    } else {
        None
    }
}

/// gcd of two i128 values, always nonnegative.
pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    egcd(a, b).0
}

/// Pairwise (tree) summation in a fixed order.
///
/// Deterministic: the result depends only on the order of `xs`, never on
/// thread count, so parallel drivers that assemble `xs` in a fixed order get
/// bit-identical aggregates.
pub fn tree_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => {
            let mid = n / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}
