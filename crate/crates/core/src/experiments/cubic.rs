//! The divisor experiment for a*x^2 + b*y^3: root counts with cubic shifts,
//! the smoothed average of rho_{a, b y^3}(d) over y against its main term,
//! and the divisor-window discrepancy built from the sequences
//! a_n (lattice counts) and b_n (density model).

use super::bump::BumpFn;
use super::report::{DiscrepancyRow, ExperimentReport};
use crate::error::{Error, Result};
use crate::modular::{factorize, rho};
use crate::util::{cadd, cmul, gcd, tree_sum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// #{x mod d : a x^2 + b y^3 == 0 (mod d)}. No squarefree assumption on the
/// cubic shift: ramified prime powers fall back to direct enumeration inside
/// the general root counter.
pub fn rho_cubic(a: i128, b: i128, y: i128, d: i128) -> Result<i128> {
    if d < 1 {
        return Err(Error::invalid(format!("modulus must be >= 1, got {d}")));
    }
    let shift = cmul(b, cmul(y, cmul(y, y)?)?)?;
    rho(a, shift, d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YPoissonReport {
    pub parameters: BTreeMap<String, String>,
    /// sum over y of f2(y/B) * rho_{a, b y^3}(d).
    pub lhs: f64,
    /// B * integral(f2): the Poisson main term after the complete sum.
    pub main: f64,
    pub error: f64,
    /// sum over y mod d of rho_{a, b y^3}(d); equals d for squarefree d
    /// coprime to a*b.
    pub complete_sum: i64,
}

/// Complete sum over a full period: sum_{y mod d} rho_{a, b y^3}(d).
pub fn rho_cubic_complete_sum(a: i128, b: i128, d: i128) -> Result<i64> {
    if d < 1 {
        return Err(Error::invalid(format!("modulus must be >= 1, got {d}")));
    }
    let mut total: i128 = 0;
    for y in 0..d {
        total += rho_cubic(a, b, y, d)?;
    }
    i64::try_from(total).map_err(|_| Error::range("complete sum exceeds i64".to_string()))
}

/// Smoothed average of rho_{a, b y^3}(d) over y ~ B against the main term
/// B * integral(f2), plus the complete-sum identity over a full period.
pub fn ypoisson_check(
    a: i128,
    b: i128,
    d: i128,
    big_b: i64,
    f2: &BumpFn,
) -> Result<YPoissonReport> {
    if a < 1 || b < 1 || gcd(a, b) != 1 {
        return Err(Error::invalid(
            "need a, b >= 1 with gcd(a, b) = 1".to_string(),
        ));
    }
    if d < 1 || !factorize(d)?.is_squarefree() {
        return Err(Error::invalid(format!(
            "modulus d = {d} must be squarefree and >= 1"
        )));
    }
    if big_b < 2 || (d as f64) > (big_b as f64).powf(0.9) {
        return Err(Error::invalid(format!(
            "need d <= B^0.9, got d={d}, B={big_b}"
        )));
    }
    let (lo, hi) = f2.support();
    let y_lo = (lo * big_b as f64).ceil() as i128;
    let y_hi = (hi * big_b as f64).floor() as i128;
    let ys: Vec<i128> = (y_lo..=y_hi).collect();
    let terms: Vec<f64> = ys
        .par_iter()
        .map(|&y| -> Result<f64> {
            let w = f2.eval(y as f64 / big_b as f64);
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * rho_cubic(a, b, y, d)? as f64)
        })
        .collect::<Result<_>>()?;
    let lhs = tree_sum(&terms);
    let main = big_b as f64 * f2.integral();
    let complete = rho_cubic_complete_sum(a, b, d)?;

    let mut parameters = BTreeMap::new();
    parameters.insert("a".into(), a.to_string());
    parameters.insert("b".into(), b.to_string());
    parameters.insert("d".into(), d.to_string());
    parameters.insert("B".into(), big_b.to_string());
    Ok(YPoissonReport {
        parameters,
        lhs,
        main,
        error: lhs - main,
        complete_sum: complete,
    })
}

/// Parameters of the divisor-window experiment for a*x^2 + b*y^3.
#[derive(Debug, Clone)]
pub struct CubicDivisorParams {
    pub x: i64,
    /// Scale of the modulus window k ~ K.
    pub k_scale: i64,
    pub d_max: i64,
    pub a: i128,
    pub b: i128,
    /// Scale of the quadratic variable, in (delta * sqrt(X), sqrt(X)].
    pub big_a: i64,
    /// Scale of the cubic variable, in (delta * X^(1/3), X^(1/3)].
    pub big_b: i64,
}

/// The sequence a_n = sum over lattice points a x^2 + b y^3 = n of
/// f1(x/A) f2(y/B), as a sparse map keyed by n, plus its total mass.
fn lattice_sequence(
    p: &CubicDivisorParams,
    f1: &BumpFn,
    f2: &BumpFn,
) -> Result<(BTreeMap<i64, f64>, f64)> {
    let (lo1, hi1) = f1.support();
    let (lo2, hi2) = f2.support();
    let x_lo = (lo1 * p.big_a as f64).ceil() as i128;
    let x_hi = (hi1 * p.big_a as f64).floor() as i128;
    let y_lo = (lo2 * p.big_b as f64).ceil() as i128;
    let y_hi = (hi2 * p.big_b as f64).floor() as i128;
    let mut map: BTreeMap<i64, f64> = BTreeMap::new();
    let mut mass_terms = Vec::new();
    for x in x_lo..=x_hi {
        let w1 = f1.eval(x as f64 / p.big_a as f64);
        if w1 == 0.0 {
            continue;
        }
        for y in y_lo..=y_hi {
            let w2 = f2.eval(y as f64 / p.big_b as f64);
            if w2 == 0.0 {
                continue;
            }
            let n = cadd(cmul(p.a, cmul(x, x)?)?, cmul(p.b, cmul(y, cmul(y, y)?)?)?)?;
            let n = i64::try_from(n)
                .map_err(|_| Error::range("lattice value exceeds i64".to_string()))?;
            *map.entry(n).or_insert(0.0) += w1 * w2;
            mass_terms.push(w1 * w2);
        }
    }
    Ok((map, tree_sum(&mass_terms)))
}

/// Divisor-window discrepancy for the cubic sequence: rows are divisors
/// d <= d_max, the cell value is
///
///   sum over squarefree k == 0 (mod d) of f(k/K) * ( sum_n a_{k n} - sum_n b_{k n} ),
///
/// with b_n = f(n/X) * A B int(f1) int(f2) / (X int(f)). The total is the
/// sum of absolute cell values and the ratio is total / X^(5/6).
#[allow(clippy::too_many_arguments)]
pub fn x2y3_type_i2(
    p: &CubicDivisorParams,
    f: &BumpFn,
    f1: &BumpFn,
    f2: &BumpFn,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    if p.a < 1 || p.b < 1 || gcd(p.a, p.b) != 1 {
        return Err(Error::invalid(
            "need a, b >= 1 with gcd(a, b) = 1".to_string(),
        ));
    }
    if p.x < 8 {
        return Err(Error::invalid(
            "X is too small for the cubic experiment".to_string(),
        ));
    }
    let xf = p.x as f64;
    let delta = f.delta();
    let (amax, bmax) = (xf.sqrt(), xf.powf(1.0 / 3.0));
    if !(p.big_a as f64 > delta * amax && p.big_a as f64 <= amax + 1e-9) {
        return Err(Error::invalid(format!(
            "need A in (delta sqrt(X), sqrt(X)], got A={}, X={}",
            p.big_a, p.x
        )));
    }
    if !(p.big_b as f64 > delta * bmax && p.big_b as f64 <= bmax + 1e-9) {
        return Err(Error::invalid(format!(
            "need B in (delta X^(1/3), X^(1/3)], got B={}, X={}",
            p.big_b, p.x
        )));
    }
    if (p.k_scale as f64) > xf.powf(0.75) + 1e-9 {
        return Err(Error::invalid(format!(
            "need K <= X^(3/4), got K={}",
            p.k_scale
        )));
    }
    if (p.d_max as f64) > xf.powf(0.25) + 1e-9 {
        return Err(Error::invalid(format!(
            "need d_max <= X^(1/4), got {}",
            p.d_max
        )));
    }

    let (a_map, _) = lattice_sequence(p, f1, f2)?;
    let b_scale =
        p.big_a as f64 * p.big_b as f64 * f1.integral() * f2.integral() / (xf * f.integral());
    let (lo_f, hi_f) = f.support();
    let n_lo = (lo_f * xf).ceil() as i64;
    let n_hi = (hi_f * xf).floor() as i64;
    let v_max = a_map.keys().next_back().copied().unwrap_or(0).max(n_hi);

    // Per-k inner sums, computed once and reused across the divisor rows.
    let k_lo = ((lo_f * p.k_scale as f64).ceil() as i64).max(1);
    let k_hi = (hi_f * p.k_scale as f64).floor() as i64;
    let ks: Vec<i64> = (k_lo..=k_hi).collect();
    let per_k: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| -> Result<(f64, f64)> {
            let wk = f.eval(k as f64 / p.k_scale as f64);
            if wk == 0.0 || !factorize(k as i128)?.is_squarefree() {
                return Ok((0.0, 0.0));
            }
            let mut a_side = Vec::new();
            let mut m = k;
            while m <= v_max {
                if let Some(&v) = a_map.get(&m) {
                    a_side.push(v);
                }
                m += k;
            }
            let mut b_side = Vec::new();
            let mut m = n_lo + (k - n_lo.rem_euclid(k)).rem_euclid(k);
            while m <= n_hi {
                b_side.push(f.eval(m as f64 / xf) * b_scale);
                m += k;
            }
            Ok((wk * tree_sum(&a_side), wk * tree_sum(&b_side)))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(p.d_max as usize);
    for d in 1..=p.d_max {
        let mut exact_terms = Vec::new();
        let mut main_terms = Vec::new();
        let mut k = k_lo + (d - k_lo.rem_euclid(d)).rem_euclid(d);
        while k <= k_hi {
            let (e, m) = per_k[(k - k_lo) as usize];
            exact_terms.push(e);
            main_terms.push(m);
            k += d;
        }
        rows.push(DiscrepancyRow::new(
            format!("d={d}"),
            tree_sum(&exact_terms),
            tree_sum(&main_terms),
        ));
    }
    let abs_errors: Vec<f64> = rows.iter().map(|r| r.error.abs()).collect();
    let total_error = tree_sum(&abs_errors);
    let mass: Vec<f64> = rows
        .iter()
        .map(|r| r.exact_count.abs() + r.main_term.abs())
        .collect();
    let trivial_bound = tree_sum(&mass);
    let target_bound = xf.powf(5.0 / 6.0);

    let mut parameters = BTreeMap::new();
    parameters.insert("X".into(), p.x.to_string());
    parameters.insert("K".into(), p.k_scale.to_string());
    parameters.insert("D".into(), p.d_max.to_string());
    parameters.insert("a".into(), p.a.to_string());
    parameters.insert("b".into(), p.b.to_string());
    parameters.insert("A".into(), p.big_a.to_string());
    parameters.insert("B".into(), p.big_b.to_string());
    Ok(ExperimentReport {
        experiment: "x2y3_type_i2".into(),
        parameters,
        rows,
        total_error,
        trivial_bound,
        target_bound,
        ratio_to_bound: total_error / target_bound,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Total mass sum_n a_n of the lattice sequence, for calibration against
/// A * B * int(f1) * int(f2).
pub fn lattice_mass(p: &CubicDivisorParams, f1: &BumpFn, f2: &BumpFn) -> Result<f64> {
    Ok(lattice_sequence(p, f1, f2)?.1)
}
