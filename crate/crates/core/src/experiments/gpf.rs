//! Greatest-prime-factor scan over a*n^2 + h for n in [X, 2X], and the exact
//! prime-power identity sum_n log(a n^2 + h) = sum_{p^j} log p * #{n : p^j | a n^2 + h}.
//!
//! Both routes factor the window values: one by sieving root progressions
//! (roots of the congruence mod p^j swept through the window), one by
//! factoring each value independently. Agreement of the two prime multisets
//! is an exact, desk-checkable identity.

use crate::error::{Error, Result};
use crate::modular::{factorize, gpf, primes_up_to, roots_mod_prime_power};
use crate::util::{cadd, cmul, tree_sum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

fn window_value(a: i128, h: i128, n: i128) -> Result<i128> {
    cadd(cmul(a, cmul(n, n)?)?, h)
}

/// Greatest prime factor of each window value, by root-progression sieving.
///
/// Returns, for n in [n_lo, n_hi], the exact greatest prime factor of
/// a*n^2 + h. Primes up to sqrt(max value) are swept along the progressions
/// n == root (mod p); any residual > 1 after the sweep is prime.
fn sieve_gpf_window(a: i128, h: i128, n_lo: i128, n_hi: i128) -> Result<Vec<i128>> {
    let len = (n_hi - n_lo + 1) as usize;
    let mut residual: Vec<i128> = Vec::with_capacity(len);
    for n in n_lo..=n_hi {
        residual.push(window_value(a, h, n)?);
    }
    let max_val = *residual.iter().max().expect("nonempty window");
    let mut best = vec![1i128; len];
    let sqrt_max = (max_val as u128).isqrt() as u64;
    for p in primes_up_to(sqrt_max) {
        let p = p as i128;
        let roots = roots_mod_prime_power(a, h, p, 1)?;
        for &root in &roots.roots {
            let mut n = n_lo + (root - n_lo).rem_euclid(p);
            while n <= n_hi {
                let idx = (n - n_lo) as usize;
                while residual[idx] % p == 0 {
                    residual[idx] /= p;
                }
                if p > best[idx] {
                    best[idx] = p;
                }
                n += p;
            }
        }
    }
    for (idx, &r) in residual.iter().enumerate() {
        if r > 1 && r > best[idx] {
            best[idx] = r;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpfBin {
    /// Left endpoint of the exponent bin [lo, lo + width).
    pub lo: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpfReport {
    pub parameters: BTreeMap<String, String>,
    /// Largest greatest-prime-factor over the window.
    pub max_gpf: u64,
    /// The n realizing it (smallest such n).
    pub argmax_n: u64,
    /// log of max_gpf in base X.
    pub max_exponent: f64,
    pub bin_width: f64,
    /// Histogram of per-n exponents log_X(gpf(a n^2 + h)).
    pub bins: Vec<GpfBin>,
    pub runtime_secs: f64,
}

impl GpfReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("exponent_bin_lo,count\n");
        for b in &self.bins {
            out.push_str(&format!("{},{}\n", super::report::fmt_f64(b.lo), b.count));
        }
        out
    }
}

const GPF_BIN_WIDTH: f64 = 0.05;

/// Scan n in [X, 2X]: the maximum of gpf(a n^2 + h), its exponent
/// log_X(max), and the histogram of per-n exponents.
pub fn gpf_scan(x: u64, a: i128, h: i128) -> Result<GpfReport> {
    let start = Instant::now();
    if x < 2 {
        return Err(Error::invalid(format!("gpf_scan needs X >= 2, got {x}")));
    }
    if a < 1 || h < 1 {
        return Err(Error::invalid("need a >= 1 and h >= 1".to_string()));
    }
    let (n_lo, n_hi) = (x as i128, 2 * x as i128);
    window_value(a, h, n_hi)?; // surface overflow before the sweep

    // Fixed segmentation: results are aggregated in segment order.
    let seg: i128 = 1 << 15;
    let mut cuts = Vec::new();
    let mut s = n_lo;
    while s <= n_hi {
        cuts.push((s, (s + seg - 1).min(n_hi)));
        s += seg;
    }
    let per_segment: Vec<Vec<i128>> = cuts
        .par_iter()
        .map(|&(lo, hi)| sieve_gpf_window(a, h, lo, hi))
        .collect::<Result<_>>()?;

    let lnx = (x as f64).ln();
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    let mut max_gpf: i128 = 0;
    let mut argmax_n: i128 = 0;
    for (seg_idx, seg_best) in per_segment.iter().enumerate() {
        let lo = cuts[seg_idx].0;
        for (i, &g) in seg_best.iter().enumerate() {
            let e = (g as f64).ln() / lnx;
            *bins.entry((e / GPF_BIN_WIDTH).floor() as i64).or_insert(0) += 1;
            if g > max_gpf {
                max_gpf = g;
                argmax_n = lo + i as i128;
            }
        }
    }

    // Cross-check the winner through the independent factorization route.
    let direct = gpf(window_value(a, h, argmax_n)?)?;
    if direct != max_gpf {
        return Err(Error::internal(format!(
            "sieve gpf {max_gpf} disagrees with factorization gpf {direct} at n = {argmax_n}"
        )));
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("X".into(), x.to_string());
    parameters.insert("a".into(), a.to_string());
    parameters.insert("h".into(), h.to_string());
    Ok(GpfReport {
        parameters,
        max_gpf: u64::try_from(max_gpf)
            .map_err(|_| Error::range("maximal prime factor exceeds u64".to_string()))?,
        argmax_n: argmax_n as u64,
        max_exponent: (max_gpf as f64).ln() / lnx,
        bin_width: GPF_BIN_WIDTH,
        bins: bins
            .into_iter()
            .map(|(k, count)| GpfBin {
                lo: k as f64 * GPF_BIN_WIDTH,
                count,
            })
            .collect(),
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub parameters: BTreeMap<String, String>,
    /// sum_n log(a n^2 + h), assembled from per-n factorizations.
    pub lhs_log: f64,
    /// sum over prime powers of log p * (progression count), assembled from
    /// root sieving only.
    pub rhs_log: f64,
    /// rhs_log - lhs_log: floating-point noise when the identity holds.
    pub difference: f64,
    /// Exact comparison of the two prime multisets.
    pub multisets_equal: bool,
    /// First few mismatching primes "(p, exponent_factored, exponent_sieved)".
    pub mismatches: Vec<String>,
}

/// Count of n in [n_lo, n_hi] with n == root (mod m).
fn progression_count(root: i128, m: i128, n_lo: i128, n_hi: i128) -> u64 {
    let first = n_lo + (root - n_lo).rem_euclid(m);
    if first > n_hi {
        0
    } else {
        ((n_hi - first) / m + 1) as u64
    }
}

/// Exact identity between the two factorizations of the window a*n^2 + h,
/// n in [X, 2X]: per-n factoring on one side, root sieving over all prime
/// powers on the other. The prime multisets must agree exactly.
pub fn chebyshev_identity(x: u64, a: i128, h: i128) -> Result<ChebyshevReport> {
    if x < 2 || a < 1 || h < 1 {
        return Err(Error::invalid("need X >= 2, a >= 1, h >= 1".to_string()));
    }
    let (n_lo, n_hi) = (x as i128, 2 * x as i128);
    let max_val = window_value(a, h, n_hi)?;

    // Route 1: factor every value independently.
    let ns: Vec<i128> = (n_lo..=n_hi).collect();
    let factored: Vec<(f64, Vec<(i128, u32)>)> = ns
        .par_iter()
        .map(|&n| -> Result<(f64, Vec<(i128, u32)>)> {
            let v = window_value(a, h, n)?;
            Ok(((v as f64).ln(), factorize(v)?.factors().to_vec()))
        })
        .collect::<Result<_>>()?;
    let lhs_log = tree_sum(&factored.iter().map(|f| f.0).collect::<Vec<_>>());
    let mut exps_factored: BTreeMap<i128, u64> = BTreeMap::new();
    for (_, factors) in &factored {
        for &(p, e) in factors {
            *exps_factored.entry(p).or_insert(0) += e as u64;
        }
    }

    // Route 2: sieve-assembled counts over all prime powers p^j <= max value.
    let primes = primes_up_to(max_val as u64);
    let sieved: Vec<(i128, u64, f64)> = primes
        .par_iter()
        .map(|&p| -> Result<(i128, u64, f64)> {
            let p = p as i128;
            let mut pj = p;
            let mut total = 0u64;
            let mut j = 1u32;
            loop {
                let roots = roots_mod_prime_power(a, h, p, j)?;
                let mut cnt = 0u64;
                for &root in &roots.roots {
                    cnt += progression_count(root, pj, n_lo, n_hi);
                }
                total += cnt;
                // Counts are non-increasing in j: p^(j+1) | v forces p^j | v.
                if cnt == 0 {
                    break;
                }
                match pj.checked_mul(p) {
                    Some(next) if next <= max_val => {
                        pj = next;
                        j += 1;
                    }
                    _ => break,
                }
            }
            Ok((p, total, (p as f64).ln() * total as f64))
        })
        .collect::<Result<_>>()?;
    let rhs_log = tree_sum(&sieved.iter().map(|s| s.2).collect::<Vec<_>>());
    let mut exps_sieved: BTreeMap<i128, u64> = BTreeMap::new();
    for &(p, total, _) in &sieved {
        if total > 0 {
            exps_sieved.insert(p, total);
        }
    }

    let mut mismatches = Vec::new();
    for (p, e1) in &exps_factored {
        let e2 = exps_sieved.get(p).copied().unwrap_or(0);
        if *e1 != e2 && mismatches.len() < 16 {
            mismatches.push(format!("({p}, {e1}, {e2})"));
        }
    }
    for (p, e2) in &exps_sieved {
        if !exps_factored.contains_key(p) && mismatches.len() < 16 {
            mismatches.push(format!("({p}, 0, {e2})"));
        }
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("X".into(), x.to_string());
    parameters.insert("a".into(), a.to_string());
    parameters.insert("h".into(), h.to_string());
    Ok(ChebyshevReport {
        parameters,
        lhs_log,
        rhs_log,
        difference: rhs_log - lhs_log,
        multisets_equal: mismatches.is_empty() && exps_factored == exps_sieved,
        mismatches,
    })
}
