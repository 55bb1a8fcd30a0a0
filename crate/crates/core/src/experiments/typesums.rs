//! Smooth-window root sums against their density main terms.
//!
//! Both experiments compute, for moduli k in a smooth dyadic window, the
//! exact weighted count of integers l with a*l^2 + h == 0 (mod k) and
//! psi-weight l/X, minus the expected density rho(a,h,k)/k * X * integral.
//! The first aggregates absolute cell errors over divisors d | k; the second
//! carries bilinear coefficients on k = m*n.

use super::bump::BumpFn;
use super::report::{DiscrepancyRow, ExperimentReport, Theta};
use crate::error::{Error, Result};
use crate::modular::{is_squarefree, rho, roots_mod_k};
use crate::util::{gcd, tree_sum};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

/// Exact weighted sum over l in the support of psi(l/X) with
/// a*l^2 + h == 0 (mod k), together with the number of such l.
///
/// Enumerates the roots mod k once and walks each residue class through the
/// window; cost O(rho(k) * (X/k + 1)) plus one factorization of k.
pub fn window_root_sum(a: i128, h: i128, k: i64, x: i64, psi: &BumpFn) -> Result<(f64, u64)> {
    let roots = roots_mod_k(a, h, k as i128)?;
    let (lo, hi) = psi.support();
    let xf = x as f64;
    let mut terms: Vec<f64> = Vec::new();
    let mut count = 0u64;
    for &nu in &roots.roots {
        let nu = nu as i64;
        let t_lo = ((lo * xf - nu as f64) / k as f64).ceil() as i64;
        let t_hi = ((hi * xf - nu as f64) / k as f64).floor() as i64;
        for t in t_lo..=t_hi {
            let l = nu + t * k;
            let w = psi.eval(l as f64 / xf);
            if w != 0.0 {
                terms.push(w);
            }
            let lf = l as f64;
            if lf >= lo * xf && lf <= hi * xf {
                count += 1;
            }
        }
    }
    Ok((tree_sum(&terms), count))
}

fn validate_ah(a: i128, h: i128) -> Result<()> {
    if a < 1 {
        return Err(Error::invalid(format!(
            "leading coefficient must be >= 1, got {a}"
        )));
    }
    if h < 1 {
        return Err(Error::invalid(format!("shift must be >= 1, got {h}")));
    }
    if !is_squarefree(h)? {
        return Err(Error::invalid(format!("shift h = {h} must be squarefree")));
    }
    if gcd(a, h) != 1 {
        return Err(Error::invalid(format!(
            "need gcd(a, h) = 1, got a={a}, h={h}"
        )));
    }
    Ok(())
}

/// Divisor-averaged discrepancy: for every d <= d_max, the cell value is
/// sum over k == 0 (mod d) of psi1(k/K) * (exact window count - density
/// main term), and the reported total is the sum of absolute cell values.
///
/// The target bound is D^(1/2) X^(1/2) (D^(1/2) + h^(1/4)) (1 + X/(D(D+h^(1/2))))^theta.
#[allow(clippy::too_many_arguments)]
pub fn type1(
    x: i64,
    k_scale: i64,
    d_max: i64,
    a: i128,
    h: i128,
    psi1: &BumpFn,
    psi2: &BumpFn,
    theta: Theta,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    validate_ah(a, h)?;
    if !(1 <= d_max && d_max <= k_scale) {
        return Err(Error::invalid(format!(
            "need 1 <= D <= K, got D={d_max}, K={k_scale}"
        )));
    }
    if x < 2 || (k_scale as i128) > (x as i128) * (x as i128) {
        return Err(Error::invalid(format!(
            "need K <= X^2 and X >= 2, got K={k_scale}, X={x}"
        )));
    }
    if (d_max as i128) * (d_max as i128) > x as i128 {
        return Err(Error::invalid(format!(
            "need D <= sqrt(X), got D={d_max}, X={x}"
        )));
    }
    let (lo1, hi1) = psi1.support();
    if lo1 <= 0.0 {
        return Err(Error::invalid(
            "the modulus weight must be supported on positive k".to_string(),
        ));
    }

    let k_lo = ((lo1 * k_scale as f64).ceil() as i64).max(1);
    let k_hi = (hi1 * k_scale as f64).floor() as i64;
    let main_scale = x as f64 * psi2.integral();

    // Per-k pass, parallel over k in fixed order.
    let ks: Vec<i64> = (k_lo..=k_hi).collect();
    let per_k: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| -> Result<(f64, f64)> {
            let w1 = psi1.eval(k as f64 / k_scale as f64);
            if w1 == 0.0 {
                return Ok((0.0, 0.0));
            }
            let (wsum, _) = window_root_sum(a, h, k, x, psi2)?;
            let main = rho(a, h, k as i128)? as f64 / k as f64 * main_scale;
            Ok((w1 * wsum, w1 * main))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(d_max as usize);
    for d in 1..=d_max {
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
    let mass: Vec<f64> = rows.iter().map(|r| r.exact_count + r.main_term).collect();
    let trivial_bound = tree_sum(&mass);
    let (df, xf, hf) = (d_max as f64, x as f64, h as f64);
    let target_bound = df.sqrt()
        * xf.sqrt()
        * (df.sqrt() + hf.powf(0.25))
        * (1.0 + xf / (df * (df + hf.sqrt()))).powf(theta.value());

    let mut parameters = BTreeMap::new();
    parameters.insert("X".into(), x.to_string());
    parameters.insert("K".into(), k_scale.to_string());
    parameters.insert("D".into(), d_max.to_string());
    parameters.insert("a".into(), a.to_string());
    parameters.insert("h".into(), h.to_string());
    parameters.insert("theta".into(), theta.value().to_string());
    Ok(ExperimentReport {
        experiment: "type1".into(),
        parameters,
        rows,
        total_error,
        trivial_bound,
        target_bound,
        ratio_to_bound: total_error / target_bound,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Bilinear discrepancy: coefficients alpha on m ~ M and beta on squarefree
/// n ~ N (both bounded by 1) against the modulus k = m*n. Cell rows are the
/// grouped moduli k; the reported total is the signed sum, and the ratio
/// compares |total| with
/// M^(1/2) X^(1/2) + M^(1/4) N^(1/2) X^(1/2) (N^(1/2)+h^(1/8)) (1 + X/(M^(1/2) N (N+h^(1/4))))^theta.
#[allow(clippy::too_many_arguments)]
pub fn type2(
    x: i64,
    m_scale: i64,
    n_scale: i64,
    a: i128,
    h: i128,
    alpha: &(dyn Fn(i64) -> f64 + Sync),
    beta: &(dyn Fn(i64) -> f64 + Sync),
    psi: &BumpFn,
    theta: Theta,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    validate_ah(a, h)?;
    if !(m_scale >= n_scale && n_scale >= 1) {
        return Err(Error::invalid(format!(
            "need M >= N >= 1, got M={m_scale}, N={n_scale}"
        )));
    }
    if (m_scale as i128) * (n_scale as i128) < x as i128 || m_scale > x {
        return Err(Error::invalid(format!(
            "need M*N >= X and M <= X, got M={m_scale}, N={n_scale}, X={x}"
        )));
    }

    // Group the bilinear coefficients on the modulus k = m*n.
    let mut coeff: BTreeMap<i64, f64> = BTreeMap::new();
    for m in (m_scale + 1)..=(2 * m_scale) {
        let am = alpha(m);
        if am.abs() > 1.0 + 1e-12 {
            return Err(Error::invalid(format!("|alpha({m})| = {am} exceeds 1")));
        }
        if am == 0.0 {
            continue;
        }
        for n in (n_scale + 1)..=(2 * n_scale) {
            let bn = beta(n);
            if bn == 0.0 {
                continue;
            }
            if bn.abs() > 1.0 + 1e-12 {
                return Err(Error::invalid(format!("|beta({n})| = {bn} exceeds 1")));
            }
            if !is_squarefree(n as i128)? {
                return Err(Error::invalid(format!(
                    "beta must be supported on squarefree n; beta({n}) = {bn}"
                )));
            }
            *coeff.entry(m * n).or_insert(0.0) += am * bn;
        }
    }

    let main_scale = x as f64 * psi.integral();
    let cells: Vec<(i64, f64)> = coeff.into_iter().collect();
    let rows: Vec<DiscrepancyRow> = cells
        .par_iter()
        .map(|&(k, c)| -> Result<DiscrepancyRow> {
            let (wsum, _) = window_root_sum(a, h, k, x, psi)?;
            let main = rho(a, h, k as i128)? as f64 / k as f64 * main_scale;
            Ok(DiscrepancyRow::new(format!("k={k}"), c * wsum, c * main))
        })
        .collect::<Result<_>>()?;

    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let total_error = tree_sum(&errors);
    let mass: Vec<f64> = rows
        .iter()
        .map(|r| r.exact_count.abs() + r.main_term.abs())
        .collect();
    let trivial_bound = tree_sum(&mass);
    let (mf, nf, xf, hf) = (m_scale as f64, n_scale as f64, x as f64, h as f64);
    let target_bound = mf.sqrt() * xf.sqrt()
        + mf.powf(0.25)
            * nf.sqrt()
            * xf.sqrt()
            * (nf.sqrt() + hf.powf(0.125))
            * (1.0 + xf / (mf.sqrt() * nf * (nf + hf.powf(0.25)))).powf(theta.value());

    let mut parameters = BTreeMap::new();
    parameters.insert("X".into(), x.to_string());
    parameters.insert("M".into(), m_scale.to_string());
    parameters.insert("N".into(), n_scale.to_string());
    parameters.insert("a".into(), a.to_string());
    parameters.insert("h".into(), h.to_string());
    parameters.insert("theta".into(), theta.value().to_string());
    Ok(ExperimentReport {
        experiment: "type2".into(),
        parameters,
        rows,
        total_error,
        trivial_bound,
        target_bound,
        ratio_to_bound: total_error.abs() / target_bound,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}
