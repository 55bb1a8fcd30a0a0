//! Exact modular arithmetic for quadratic congruences a*v^2 + h == 0 (mod k):
//! Jacobi symbols, modular square roots, Hensel lifting, CRT assembly of the
//! full root set, and the multiplicative root-count rho(a, h, k).
//!
//! All values are checked 128-bit signed integers; overflow is an error.

mod factor;
mod primality;
mod sieve;

pub use factor::{factorize, gpf, is_squarefree, mobius, Factorization};
pub use primality::is_prime;
pub use sieve::{primes_in_range, primes_up_to, segment_bounds};

use crate::error::{Error, Result};
use crate::util::{cadd, cmul, modinv, umod};
use primality::powmod_u128;

/// Residues `v` in `[0, modulus)` with a*v^2 + h == 0 (mod modulus),
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    pub modulus: i128,
    pub roots: Vec<i128>,
}

impl RootSet {
    pub fn count(&self) -> usize {
        self.roots.len()
    }
}

/// Jacobi symbol (n/m) for odd positive m; equals the Legendre symbol when m
/// is prime.
pub fn jacobi(n: i128, m: i128) -> Result<i32> {
    if m <= 0 || m % 2 == 0 {
        return Err(Error::invalid(format!(
            "jacobi symbol needs odd positive m, got {m}"
        )));
    }
    let mut n = umod(n, m);
    let mut m = m;
    let mut sign = 1i32;
    while n != 0 {
        while n % 2 == 0 {
            n /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut n, &mut m);
        if n % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        n = umod(n, m);
    }
    Ok(if m == 1 { sign } else { 0 })
}

/// Square roots of n mod an odd prime p (Tonelli-Shanks).
///
/// Returns 0, 1, or 2 roots: two iff (n/p) = 1, one iff p | n.
pub fn sqrt_mod_p(n: i128, p: i128) -> Result<RootSet> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(Error::invalid(format!(
            "sqrt_mod_p needs an odd prime, got {p}"
        )));
    }
    let n = umod(n, p);
    if n == 0 {
        return Ok(RootSet {
            modulus: p,
            roots: vec![0],
        });
    }
    if jacobi(n, p)? != 1 {
        return Ok(RootSet {
            modulus: p,
            roots: vec![],
        });
    }
    let pu = p as u128;
    let nu = n as u128;
    let r = if p % 4 == 3 {
        powmod_u128(nu, (pu + 1) / 4, pu)
    } else {
        tonelli_shanks(nu, pu)
    };
    let r = r as i128;
    debug_assert_eq!(umod(r * r, p), n);
    let mut roots = vec![r, p - r];
    roots.sort_unstable();
    Ok(RootSet { modulus: p, roots })
}

fn tonelli_shanks(n: u128, p: u128) -> u128 {
    // Write p - 1 = q * 2^s with q odd.
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // Smallest quadratic non-residue as the auxiliary base; deterministic.
    let mut z = 2u128;
    while powmod_u128(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod_u128(z, q, p);
    let mut t = powmod_u128(n, q, p);
    let mut r = powmod_u128(n, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = primality::mulmod_u128(t2, t2, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = primality::mulmod_u128(b, b, p);
        }
        m = i;
        c = primality::mulmod_u128(b, b, p);
        t = primality::mulmod_u128(t, c, p);
        r = primality::mulmod_u128(r, b, p);
    }
    r
}

/// Enumeration guard for the ramified branch of [`roots_mod_prime_power`].
const ENUM_LIMIT: i128 = 1_000_000_000;

/// Roots of a*v^2 + h == 0 modulo p^j.
///
/// For p not dividing 2ah the roots mod p are lifted by Hensel's lemma, so
/// the root count is independent of j. For p | 2ah every residue mod p^j is
/// checked directly; those primes are small in practice and the scan is
/// exact with no case analysis.
pub fn roots_mod_prime_power(a: i128, h: i128, p: i128, j: u32) -> Result<RootSet> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if j == 0 {
        return Err(Error::invalid(
            "prime-power exponent must be >= 1".to_string(),
        ));
    }
    let mut pj: i128 = 1;
    for _ in 0..j {
        pj = cmul(pj, p)?;
    }
    let two_ah = cmul(2, cmul(a, h)?)?;
    if two_ah != 0 && umod(two_ah, p) != 0 {
        return hensel_roots(a, h, p, pj);
    }
    if pj > ENUM_LIMIT {
        return Err(Error::range(format!(
            "direct residue scan mod {p}^{j} exceeds the enumeration limit"
        )));
    }
    let mut roots = Vec::new();
    let a_red = umod(a, pj);
    let h_red = umod(h, pj);
    let mut val = h_red; // a*v^2 + h at v = 0
    let mut delta = umod(a_red, pj); // a*(2v+1) at v = 0
    let step = umod(2 * a_red, pj);
    for v in 0..pj {
        if val == 0 {
            roots.push(v);
        }
        val += delta;
        if val >= pj {
            val -= pj;
        }
        delta += step;
        if delta >= pj {
            delta -= pj;
        }
    }
    Ok(RootSet { modulus: pj, roots })
}

fn hensel_roots(a: i128, h: i128, p: i128, pj: i128) -> Result<RootSet> {
    // Solve v^2 == -h / a (mod p), then lift each root one power at a time.
    let ainv = modinv(a, p).ok_or_else(|| Error::internal("a invertible mod p by branch"))?;
    let target = umod(cmul(umod(-h, p), ainv)?, p);
    let base = sqrt_mod_p(target, p)?;
    let mut roots = Vec::with_capacity(base.roots.len());
    for &r0 in &base.roots {
        let mut x = r0;
        let mut m = p;
        while m < pj {
            // x' = x - f(x) * inv(f'(x)) computed one p-power step up.
            let m_next = cmul(m, p)?;
            let fx = umod(cadd(cmul(a, cmul(x, x)?)?, h)?, m_next);
            let fprime = umod(cmul(2, cmul(a, x)?)?, p);
            let inv = modinv(fprime, p)
                .ok_or_else(|| Error::internal("f'(x) invertible mod p in Hensel branch"))?;
            debug_assert_eq!(umod(fx, m), 0);
            let t = umod(cmul(fx / m, p - umod(inv, p))?, p);
            x = umod(cadd(x, cmul(t, m)?)?, m_next);
            m = m_next;
        }
        debug_assert_eq!(umod(cadd(cmul(a, cmul(x, x)?)?, h)?, pj), 0);
        roots.push(x);
    }
    roots.sort_unstable();
    Ok(RootSet { modulus: pj, roots })
}

/// All roots of a*v^2 + h == 0 (mod k), assembled by CRT over the
/// factorization of k. `roots_mod_k(_, _, 1)` is `{0}`.
pub fn roots_mod_k(a: i128, h: i128, k: i128) -> Result<RootSet> {
    if k < 1 {
        return Err(Error::invalid(format!("modulus must be >= 1, got {k}")));
    }
    let mut residues: Vec<i128> = vec![0];
    let mut modulus: i128 = 1;
    for &(p, e) in factorize(k)?.factors() {
        let local = roots_mod_prime_power(a, h, p, e)?;
        if local.roots.is_empty() {
            return Ok(RootSet {
                modulus: k,
                roots: vec![],
            });
        }
        let inv =
            modinv(modulus, local.modulus).ok_or_else(|| Error::internal("coprime CRT moduli"))?;
        let combined_mod = cmul(modulus, local.modulus)?;
        let mut next = Vec::with_capacity(residues.len() * local.roots.len());
        for &r in &residues {
            for &s in &local.roots {
                // x == r (mod modulus), x == s (mod local.modulus)
                let t = umod(cmul(umod(s - r, local.modulus), inv)?, local.modulus);
                next.push(cadd(r, cmul(modulus, t)?)?);
            }
        }
        residues = next;
        modulus = combined_mod;
    }
    debug_assert_eq!(modulus, k);
    residues.sort_unstable();
    Ok(RootSet {
        modulus: k,
        roots: residues,
    })
}

/// rho(a, h, k) = #{v mod k : a*v^2 + h == 0 (mod k)}.
///
/// Multiplicative in k. At primes p not dividing 2ah the count is the closed
/// form 1 + (-ah/p), independent of the exponent; ramified prime powers are
/// counted by direct enumeration.
pub fn rho(a: i128, h: i128, k: i128) -> Result<i128> {
    if k < 1 {
        return Err(Error::invalid(format!("modulus must be >= 1, got {k}")));
    }
    let mut count: i128 = 1;
    let minus_ah = cmul(-1, cmul(a, h)?)?;
    let two_ah = cmul(2, cmul(a, h)?)?;
    for &(p, e) in factorize(k)?.factors() {
        let local = if two_ah != 0 && umod(two_ah, p) != 0 {
            (1 + jacobi(minus_ah, p)?) as i128
        } else {
            roots_mod_prime_power(a, h, p, e)?.count() as i128
        };
        if local == 0 {
            return Ok(0);
        }
        count = cmul(count, local)?;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_roots(a: i128, h: i128, k: i128) -> Vec<i128> {
        (0..k)
            .filter(|&v| (a * v * v + h).rem_euclid(k) == 0)
            .collect()
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(-1, 5).unwrap(), 1);
        assert_eq!(jacobi(-1, 3).unwrap(), -1);
        assert_eq!(jacobi(0, 7).unwrap(), 0);
        assert!(jacobi(3, 4).is_err());
        assert!(jacobi(3, -5).is_err());
        assert_eq!(jacobi(5, 1).unwrap(), 1);
    }

    #[test]
    fn jacobi_matches_euler_criterion() {
        for &p in &[3i128, 5, 7, 11, 13, 17, 19, 23, 101, 997] {
            for n in -20..20 {
                let j = jacobi(n, p).unwrap();
                let e = powmod_u128(umod(n, p) as u128, ((p - 1) / 2) as u128, p as u128);
                let euler = if e == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(j, euler, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_mod_p(-1, 13).unwrap().roots, vec![5, 8]);
        assert!(sqrt_mod_p(3, 7).unwrap().roots.is_empty());
        assert_eq!(sqrt_mod_p(0, 5).unwrap().roots, vec![0]);
        assert!(sqrt_mod_p(2, 15).is_err());
        assert!(sqrt_mod_p(2, 2).is_err());
    }

    #[test]
    fn sqrt_exhaustive_small_primes() {
        for p in primes_up_to(500).into_iter().skip(1) {
            let p = p as i128;
            for n in 0..p {
                let rs = sqrt_mod_p(n, p).unwrap();
                let expect: Vec<i128> = (0..p).filter(|&x| umod(x * x - n, p) == 0).collect();
                assert_eq!(rs.roots, expect, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(
            roots_mod_prime_power(1, 1, 5, 2).unwrap().roots,
            vec![7, 18]
        );
        assert_eq!(roots_mod_prime_power(1, 1, 2, 1).unwrap().roots, vec![1]);
        assert!(roots_mod_prime_power(1, 1, 2, 2).unwrap().roots.is_empty());
        assert!(roots_mod_prime_power(1, 1, 4, 1).is_err());
    }

    #[test]
    fn prime_power_matches_brute() {
        for &(a, h) in &[
            (1i128, 1i128),
            (1, 5),
            (2, 3),
            (3, 10),
            (5, 7),
            (1, -3),
            (4, 9),
        ] {
            for &(p, jmax) in &[(2i128, 6u32), (3, 4), (5, 3), (7, 3), (11, 2), (13, 2)] {
                let mut pj = 1i128;
                for j in 1..=jmax {
                    pj *= p;
                    let got = roots_mod_prime_power(a, h, p, j).unwrap();
                    assert_eq!(got.roots, brute_roots(a, h, pj), "a={a} h={h} p={p} j={j}");
                }
            }
        }
    }

    #[test]
    fn hensel_count_stable_in_exponent() {
        for &(a, h) in &[(1i128, 1i128), (1, 5), (2, 7), (3, 5)] {
            for &p in &[5i128, 7, 11, 13, 17] {
                if (2 * a * h) % p == 0 {
                    continue;
                }
                let c1 = roots_mod_prime_power(a, h, p, 1).unwrap().count();
                for j in 2..=4 {
                    assert_eq!(roots_mod_prime_power(a, h, p, j).unwrap().count(), c1);
                }
            }
        }
    }

    #[test]
    fn roots_mod_k_examples() {
        assert_eq!(roots_mod_k(1, 1, 65).unwrap().roots, vec![8, 18, 47, 57]);
        assert_eq!(roots_mod_k(1, 1, 1).unwrap().roots, vec![0]);
        assert!(roots_mod_k(1, 1, 4).unwrap().roots.is_empty());
        assert!(roots_mod_k(1, 1, 0).is_err());
        // 57^2 + 1 = 65 * 50
        assert_eq!((57 * 57 + 1) % 65, 0);
    }

    #[test]
    fn rho_examples_and_consistency() {
        assert_eq!(rho(1, 1, 5).unwrap(), 2);
        assert_eq!(rho(1, 1, 3).unwrap(), 0);
        assert_eq!(rho(1, 1, 1).unwrap(), 1);
        for &(a, h) in &[(1i128, 1i128), (1, 2), (2, 1), (1, 5), (3, 7)] {
            for k in 1..400 {
                let rs = roots_mod_k(a, h, k).unwrap();
                assert_eq!(rs.roots, brute_roots(a, h, k), "a={a} h={h} k={k}");
                assert_eq!(
                    rho(a, h, k).unwrap() as usize,
                    rs.count(),
                    "a={a} h={h} k={k}"
                );
            }
        }
    }

    #[test]
    fn rho_closed_form_at_unramified_primes() {
        for p in primes_up_to(10_000) {
            let p = p as i128;
            for &(a, h) in &[(1i128, 1i128), (1, 5), (2, 3), (3, 10), (5, 7)] {
                if (2 * a * h) % p == 0 {
                    continue;
                }
                let expect = 1 + jacobi(-a * h, p).unwrap() as i128;
                assert_eq!(rho(a, h, p).unwrap(), expect, "p={p} a={a} h={h}");
            }
        }
    }
}
