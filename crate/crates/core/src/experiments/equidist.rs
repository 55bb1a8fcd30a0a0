//! Distribution of normalized roots v/p over prime moduli: interval counts
//! against the density prediction, exponential-sum diagnostics, and the
//! prime sum entering the shifted-shift hypothesis.

use crate::error::{Error, Result};
use crate::modular::{primes_in_range, rho, roots_mod_prime_power, segment_bounds};
use crate::util::{gcd, tree_sum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// One half-open interval (alpha, beta] of normalized roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistRow {
    pub alpha: f64,
    pub beta: f64,
    /// Exact number of pairs (p, v) with p <= X, a v^2 + h == 0 (mod p),
    /// v/p in (alpha, beta].
    pub count: u64,
    /// (beta - alpha) * sum of rho(a, h, p) over p <= X.
    pub expected: f64,
    /// count / expected - 1.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<EquidistRow>,
    /// Exact sum of rho(a, h, p) over primes p <= X.
    pub rho_sum: u64,
    pub max_abs_deviation: f64,
    pub runtime_secs: f64,
}

impl EquidistReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,count,expected,deviation\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                super::report::fmt_f64(r.alpha),
                super::report::fmt_f64(r.beta),
                r.count,
                super::report::fmt_f64(r.expected),
                super::report::fmt_f64(r.deviation)
            ));
        }
        out
    }
}

fn validate_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    if intervals.is_empty() {
        return Err(Error::invalid(
            "at least one interval is required".to_string(),
        ));
    }
    for &(a, b) in intervals {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
            return Err(Error::invalid(format!(
                "intervals must satisfy 0 <= alpha < beta <= 1, got ({a}, {b}]"
            )));
        }
    }
    Ok(())
}

/// Exact interval counts of normalized roots v/p over primes p <= x.
///
/// Work is split over sieve segments; the per-segment integer tallies are
/// folded in segment order, so results do not depend on the worker count.
pub fn equidist(x: u64, a: i128, h: i128, intervals: &[(f64, f64)]) -> Result<EquidistReport> {
    let start = Instant::now();
    validate_intervals(intervals)?;
    if a < 1 || h < 1 || gcd(a, h) != 1 {
        return Err(Error::invalid(
            "need a, h >= 1 with gcd(a, h) = 1".to_string(),
        ));
    }
    if !crate::modular::is_squarefree(h)? {
        return Err(Error::invalid(format!("shift h = {h} must be squarefree")));
    }

    let segments = segment_bounds(2, x);
    let per_segment: Vec<(Vec<u64>, u64)> = segments
        .par_iter()
        .map(|&(lo, hi)| -> Result<(Vec<u64>, u64)> {
            let mut counts = vec![0u64; intervals.len()];
            let mut rho_sum = 0u64;
            for p in primes_in_range(lo, hi) {
                let roots = roots_mod_prime_power(a, h, p as i128, 1)?;
                rho_sum += roots.roots.len() as u64;
                for &v in &roots.roots {
                    let ratio_num = v as u64;
                    for (i, &(al, be)) in intervals.iter().enumerate() {
                        // v/p in (al, be], compared exactly through v vs al*p.
                        let vf = ratio_num as f64;
                        if vf > al * p as f64 && vf <= be * p as f64 {
                            counts[i] += 1;
                        }
                    }
                }
            }
            Ok((counts, rho_sum))
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; intervals.len()];
    let mut rho_sum = 0u64;
    for (c, r) in per_segment {
        for (i, v) in c.into_iter().enumerate() {
            counts[i] += v;
        }
        rho_sum += r;
    }

    let mut rows = Vec::with_capacity(intervals.len());
    let mut max_dev: f64 = 0.0;
    for (i, &(al, be)) in intervals.iter().enumerate() {
        let expected = (be - al) * rho_sum as f64;
        let deviation = if expected > 0.0 {
            counts[i] as f64 / expected - 1.0
        } else {
            f64::NAN
        };
        if deviation.is_finite() {
            max_dev = max_dev.max(deviation.abs());
        }
        rows.push(EquidistRow {
            alpha: al,
            beta: be,
            count: counts[i],
            expected,
            deviation,
        });
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("X".into(), x.to_string());
    parameters.insert("a".into(), a.to_string());
    parameters.insert("h".into(), h.to_string());
    Ok(EquidistReport {
        parameters,
        rows,
        rho_sum,
        max_abs_deviation: max_dev,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// A complex value reported by [`weyl_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylValue {
    pub re: f64,
    pub im: f64,
    /// Exact number of summands (pairs (p, v)).
    pub terms: u64,
}

impl WeylValue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Exponential-sum diagnostic sum over p <= x, v root mod p of e(m v / p).
pub fn weyl_sum(x: u64, a: i128, h: i128, m: i64) -> Result<WeylValue> {
    if a < 1 || h < 1 {
        return Err(Error::invalid("need a, h >= 1".to_string()));
    }
    let segments = segment_bounds(2, x);
    let per_segment: Vec<(f64, f64, u64)> = segments
        .par_iter()
        .map(|&(lo, hi)| -> Result<(f64, f64, u64)> {
            let mut res = Vec::new();
            let mut ims = Vec::new();
            let mut terms = 0u64;
            for p in primes_in_range(lo, hi) {
                let roots = roots_mod_prime_power(a, h, p as i128, 1)?;
                for &v in &roots.roots {
                    let angle = 2.0 * std::f64::consts::PI * m as f64 * v as f64 / p as f64;
                    res.push(angle.cos());
                    ims.push(angle.sin());
                    terms += 1;
                }
            }
            Ok((tree_sum(&res), tree_sum(&ims), terms))
        })
        .collect::<Result<_>>()?;
    let re = tree_sum(&per_segment.iter().map(|s| s.0).collect::<Vec<_>>());
    let im = tree_sum(&per_segment.iter().map(|s| s.1).collect::<Vec<_>>());
    let terms = per_segment.iter().map(|s| s.2).sum();
    Ok(WeylValue { re, im, terms })
}

/// The prime sum sum_{Y <= p < Z} (log p / p) * rho(a, h, p), exactly
/// enumerated, together with the number of contributing primes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSum {
    pub sum: f64,
    pub primes: u64,
}

pub fn hypothesis_sum(a: i128, h: i128, y: u64, z: u64) -> Result<HypothesisSum> {
    if y < 2 || z <= y {
        return Err(Error::invalid(format!("need 2 <= Y < Z, got Y={y}, Z={z}")));
    }
    let segments = segment_bounds(y, z - 1);
    let per_segment: Vec<(f64, u64)> = segments
        .par_iter()
        .map(|&(lo, hi)| -> Result<(f64, u64)> {
            let mut terms = Vec::new();
            let mut primes = 0u64;
            for p in primes_in_range(lo, hi) {
                let r = rho(a, h, p as i128)?;
                primes += 1;
                if r != 0 {
                    terms.push((p as f64).ln() / p as f64 * r as f64);
                }
            }
            Ok((tree_sum(&terms), primes))
        })
        .collect::<Result<_>>()?;
    let sum = tree_sum(&per_segment.iter().map(|s| s.0).collect::<Vec<_>>());
    let primes = per_segment.iter().map(|s| s.1).sum();
    Ok(HypothesisSum { sum, primes })
}

/// Companion comparison value (1 + eps) * log(Z/Y) + 1/eps.
pub fn hypothesis_bound(y: u64, z: u64, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    Ok((1.0 + eps) * ((z as f64) / (y as f64)).ln() + 1.0 / eps)
}
