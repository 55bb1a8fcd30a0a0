//! Exhaustive finite verifiers for the parametrizations of symmetric
//! matrices with congruence conditions.
//!
//! The sets in question are infinite; each verifier fixes a box on matrix
//! entries and checks the claimed disjoint-union structure exactly inside
//! that box. Generation is exact (quadratic-form ellipse enumeration or a
//! constructive per-element decomposition), so there are no boundary-loss
//! artifacts: a reported miss or double hit is a genuine counterexample.

use crate::error::{Error, Result};
use crate::lattice::{act, heegner_points, RealMat, SymMat, UniMat};
use crate::modular::factorize;
use crate::util::{cadd, cmul, gcd, modinv, umod};
use std::collections::BTreeMap;

/// Upper-triangular Hecke orbit representative (e f; 0 g) with e*g = h and
/// 0 <= f < g.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeckeOrbitRep {
    pub e: i128,
    pub f: i128,
    pub g: i128,
}

impl HeckeOrbitRep {
    /// The integer matrix (g -f; 0 e) of determinant h; applying it by the
    /// symmetric action and dividing by h^? is handled by the callers.
    pub fn h_times_inverse(&self) -> (i128, i128, i128, i128) {
        (self.g, -self.f, 0, self.e)
    }
}

/// Outcome of a box-restricted verification run.
///
/// `passes()` iff every target element was produced exactly once. Misses and
/// double hits are rendered as strings (triples or pairs of triples) so one
/// report type serves all three verifiers.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ParamReport {
    pub parameters: BTreeMap<String, String>,
    pub elements_enumerated: usize,
    pub hits: usize,
    pub misses: Vec<String>,
    pub double_hits: Vec<String>,
}

impl ParamReport {
    pub fn passes(&self) -> bool {
        self.misses.is_empty() && self.double_hits.is_empty()
    }
}

fn render_sym(g: &SymMat) -> String {
    format!("({}, {}, {})", g.a, g.b, g.c)
}

/// All Hecke orbit representatives for h >= 1; the count is sigma(h).
pub fn hecke_orbits(h: i128) -> Result<Vec<HeckeOrbitRep>> {
    if h < 1 {
        return Err(Error::invalid(format!(
            "hecke_orbits needs h >= 1, got {h}"
        )));
    }
    let mut out = Vec::new();
    for g in factorize(h)?.divisors() {
        let e = h / g;
        for f in 0..g {
            out.push(HeckeOrbitRep { e, f, g });
        }
    }
    Ok(out)
}

/// The Hecke average (T_h f)(g) = h^{-1/2} * sum over orbits sigma of
/// f(sigma * g / sqrt(h)). Linear in f; T_1 is the identity.
pub fn hecke_apply(h: i128, f: impl Fn(&RealMat) -> f64, g: &RealMat) -> Result<f64> {
    let orbits = hecke_orbits(h)?;
    let scale = 1.0 / (h as f64).sqrt();
    let mut terms: Vec<f64> = Vec::with_capacity(orbits.len());
    for s in &orbits {
        let sm = RealMat {
            a: s.e as f64,
            b: s.f as f64,
            c: 0.0,
            d: s.g as f64,
        };
        terms.push(f(&sm.mul(g).scale(scale)));
    }
    Ok(crate::util::tree_sum(&terms) * scale)
}

/// All triples (a, b, c) with a*c - b^2 = coeff_a * h, a, c > 0,
/// c == 0 (mod coeff_a * d), b == 0 (mod coeff_a), and every entry bounded
/// by `entry_bound` in absolute value. Direct scan over (a, c).
pub fn enumerate_s(coeff_a: i128, h: i128, d: i128, entry_bound: i128) -> Result<Vec<SymMat>> {
    if coeff_a < 1 || d < 1 {
        return Err(Error::invalid(
            "enumerate_s needs a >= 1 and d >= 1".to_string(),
        ));
    }
    let det = cmul(coeff_a, h)?;
    let step = cmul(coeff_a, d)?;
    let mut out = Vec::new();
    if entry_bound < 1 {
        return Ok(out);
    }
    for a in 1..=entry_bound {
        let mut c = step;
        while c <= entry_bound {
            let b2 = cmul(a, c)? - det;
            if b2 >= 0 {
                let b = b2.isqrt();
                if b * b == b2 && b <= entry_bound && b % coeff_a == 0 {
                    out.push(SymMat::new(a, b, c));
                    if b != 0 {
                        out.push(SymMat::new(a, -b, c));
                    }
                }
            }
            c += step;
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Integer rows r with r * g * r^t <= bound, for positive definite g.
/// The set is an ellipse: exact enumeration, no truncation slack.
fn rows_in_ellipse(g: &SymMat, bound: i128) -> Result<Vec<(i128, i128)>> {
    let det = g.det()?;
    debug_assert!(det > 0 && g.a > 0);
    let mut rows = Vec::new();
    if bound < 1 {
        return Ok(rows);
    }
    // a*p^2 + 2b*p*q + c*q^2 = ((a*p + b*q)^2 + det*q^2) / a
    let qmax = cmul(bound, g.a)?.isqrt() / det.isqrt().max(1);
    for q in -(qmax + 1)..=(qmax + 1) {
        let rem = cmul(bound, g.a)? - cmul(det, cmul(q, q)?)?;
        if rem < 0 {
            continue;
        }
        let half = rem.isqrt();
        // |a*p + b*q| <= half
        let lo = (-half - g.b * q).div_euclid(g.a);
        let hi = (half - g.b * q).div_euclid(g.a);
        for p in lo..=hi + 1 {
            let val = cadd(
                cadd(cmul(g.a, cmul(p, p)?)?, cmul(2, cmul(g.b, cmul(p, q)?)?)?)?,
                cmul(g.c, cmul(q, q)?)?,
            )?;
            if val <= bound && (p, q) != (0, 0) {
                rows.push((p, q));
            }
        }
    }
    Ok(rows)
}

/// Verify that the box-restricted set S_{a,h}(d) is the disjoint union over
/// reduced representatives sigma of determinant a*h and Gamma_0(a*d)-cosets
/// tau (filtered by the two congruences) of the orbits gamma * tau applied
/// to sigma, counted modulo the stabilizer weight 1/|stab(sigma)|.
///
/// Every unimodular image of every representative that lands in the box is
/// enumerated exactly (ellipse enumeration of matrix rows), so the full
/// projective fiber over each target is visible. A target is covered with
/// total weight one iff its fiber over its unique sigma has size exactly
/// stab(sigma): fewer is a miss, more (or a second sigma) a double hit.
pub fn verify_para1(coeff_a: i128, h: i128, d: i128, entry_bound: i128) -> Result<ParamReport> {
    if coeff_a < 1 || h < 1 || d < 1 {
        return Err(Error::invalid(
            "verify_para1 needs a, h, d >= 1".to_string(),
        ));
    }
    if gcd(coeff_a, h) != 1 {
        return Err(Error::invalid(format!(
            "need gcd(a, h) = 1, got a={coeff_a}, h={h}"
        )));
    }
    let q = cmul(coeff_a, d)?;
    let targets = enumerate_s(coeff_a, h, d, entry_bound)?;
    let det = cmul(coeff_a, h)?;
    // target -> (per-sigma signed fiber sizes); enumeration sees gamma and
    // -gamma separately, so projective fiber size is count / 2.
    let mut produced: BTreeMap<SymMat, Vec<(SymMat, u8, usize)>> = BTreeMap::new();

    for sigma in heegner_points(det)? {
        let base = sigma.sym;
        let rows = rows_in_ellipse(&base, entry_bound)?;
        for &(p1, q1) in &rows {
            for &(p2, q2) in &rows {
                if cmul(p1, q2)? - cmul(q1, p2)? != 1 {
                    continue;
                }
                let gamma = UniMat {
                    a: p1,
                    b: q1,
                    c: p2,
                    d: q2,
                };
                let m = act(&gamma, &base)?;
                if m.b.abs() > entry_bound {
                    continue;
                }
                // Congruence filters; both are invariant on Gamma_0(q) cosets,
                // so they hold for every fiber element of m or for none.
                if umod(m.c, q) != 0 || umod(m.b, coeff_a) != 0 {
                    continue;
                }
                debug_assert!(m.a <= entry_bound && m.c <= entry_bound);
                let entry = produced.entry(m).or_default();
                match entry.iter_mut().find(|(s, _, _)| *s == base) {
                    Some((_, _, count)) => *count += 1,
                    None => entry.push((base, sigma.stab_order, 1)),
                }
            }
        }
    }

    let mut misses = Vec::new();
    let mut double_hits = Vec::new();
    let mut hits = 0usize;
    for t in &targets {
        match produced.get(t).map(Vec::as_slice) {
            None | Some([]) => misses.push(render_sym(t)),
            Some([(_, stab, count)]) => {
                // Weighted coverage: (count / 2) / stab must be exactly 1.
                if *count == 2 * *stab as usize {
                    hits += 1;
                } else if *count < 2 * *stab as usize {
                    misses.push(render_sym(t));
                } else {
                    double_hits.push(render_sym(t));
                }
            }
            Some(_) => double_hits.push(render_sym(t)),
        }
    }
    for m in produced.keys() {
        if targets.binary_search(m).is_err() {
            return Err(Error::internal(format!(
                "generated element {} outside the target set",
                render_sym(m)
            )));
        }
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("a".to_string(), coeff_a.to_string());
    parameters.insert("h".to_string(), h.to_string());
    parameters.insert("d".to_string(), d.to_string());
    parameters.insert("bound".to_string(), entry_bound.to_string());
    Ok(ParamReport {
        parameters,
        elements_enumerated: targets.len(),
        hits,
        misses,
        double_hits,
    })
}

fn lower_shear(g: &SymMat, x: i128) -> Result<SymMat> {
    // n[x]^t acting on (a, b, c): a fixed, b -> b + x*a, c -> c + 2xb + x^2 a.
    act(&UniMat::lower(x), g)
}

/// Verify the pair parametrization: inside the box, the pairs
/// (g1, g2) in S_{a,h}(s*n1) x S_{a,h}(s*n2) with equal top-left entry and
/// b1 == b2 (mod s*a1) are exactly the shears
/// `(n[a*s*n1*u1]^t . g, n[a*s*n2*u2]^t . g)` of g in `S_{a,h}(s*n1*n2)`, one
/// pair per class (u1, u2) mod the diagonal (n2, n1) shifts.
pub fn verify_para2(
    coeff_a: i128,
    h: i128,
    s: i128,
    n1: i128,
    n2: i128,
    entry_bound: i128,
) -> Result<ParamReport> {
    if coeff_a < 1 || h < 1 || s < 1 || n1 < 1 || n2 < 1 {
        return Err(Error::invalid(
            "verify_para2 needs positive parameters".to_string(),
        ));
    }
    if gcd(coeff_a, h) != 1 {
        return Err(Error::invalid(format!(
            "need gcd(a, h) = 1, got a={coeff_a}, h={h}"
        )));
    }
    if gcd(n1, n2) != 1 {
        return Err(Error::invalid(format!(
            "need gcd(n1, n2) = 1, got {n1}, {n2}"
        )));
    }

    // Left side: the pair set, by direct scan grouped on the shared entry a.
    let side1 = enumerate_s(coeff_a, h, cmul(s, n1)?, entry_bound)?;
    let side2 = enumerate_s(coeff_a, h, cmul(s, n2)?, entry_bound)?;
    let mut by_a: BTreeMap<i128, Vec<SymMat>> = BTreeMap::new();
    for g2 in &side2 {
        by_a.entry(g2.a).or_default().push(*g2);
    }
    let mut targets: Vec<(SymMat, SymMat)> = Vec::new();
    for g1 in &side1 {
        if let Some(partners) = by_a.get(&g1.a) {
            let m = cmul(s, g1.a)?;
            for g2 in partners {
                if umod(g1.b - g2.b, m) == 0 {
                    targets.push((*g1, *g2));
                }
            }
        }
    }
    targets.sort_unstable();

    // Right side: for g in S_{a,h}(s*n1*n2) with the shared entry in the box
    // and b ranging wide enough to reach the box after a canonical shear,
    // enumerate classes (u1 in [0, n2), u2 in Z) whose images land in the box.
    let asn1 = cmul(coeff_a, cmul(s, n1)?)?;
    let asn2 = cmul(coeff_a, cmul(s, n2)?)?;
    let wide = cadd(entry_bound, cmul(asn1, cmul(n2 - 1, entry_bound)?)?)?;
    let det = cmul(coeff_a, h)?;
    let q12 = cmul(asn1, n2)?;
    let mut sources: BTreeMap<(SymMat, SymMat), Vec<(i128, i128, SymMat)>> = BTreeMap::new();
    for a in 1..=entry_bound {
        for b in -wide..=wide {
            if umod(b, coeff_a) != 0 {
                continue;
            }
            let num = cadd(cmul(b, b)?, det)?;
            if umod(num, a) != 0 {
                continue;
            }
            let c = num / a;
            if umod(c, q12) != 0 {
                continue;
            }
            let g = SymMat::new(a, b, c);
            for u1 in 0..n2 {
                let x1 = cmul(asn1, u1)?;
                let g1 = lower_shear(&g, x1)?;
                if g1.b.abs() > entry_bound || g1.c > entry_bound {
                    continue;
                }
                // u2 range from |b + a*s*n2*u2*a_entry| <= bound.
                let denom = cmul(asn2, a)?;
                let lo = (-entry_bound - b).div_euclid(denom) - 1;
                let hi = (entry_bound - b).div_euclid(denom) + 1;
                for u2 in lo..=hi {
                    let g2 = lower_shear(&g, cmul(asn2, u2)?)?;
                    if g2.b.abs() > entry_bound || g2.c > entry_bound {
                        continue;
                    }
                    sources.entry((g1, g2)).or_default().push((u1, u2, g));
                }
            }
        }
    }

    let mut misses = Vec::new();
    let mut double_hits = Vec::new();
    let mut hits = 0usize;
    for pair in &targets {
        match sources.get(pair).map(|v| v.len()).unwrap_or(0) {
            0 => misses.push(format!("{} | {}", render_sym(&pair.0), render_sym(&pair.1))),
            1 => hits += 1,
            _ => double_hits.push(format!("{} | {}", render_sym(&pair.0), render_sym(&pair.1))),
        }
    }
    for pair in sources.keys() {
        if targets.binary_search(pair).is_err() {
            return Err(Error::internal(format!(
                "generated pair {} | {} outside the target set",
                render_sym(&pair.0),
                render_sym(&pair.1)
            )));
        }
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("a".to_string(), coeff_a.to_string());
    parameters.insert("h".to_string(), h.to_string());
    parameters.insert("s".to_string(), s.to_string());
    parameters.insert("n1".to_string(), n1.to_string());
    parameters.insert("n2".to_string(), n2.to_string());
    parameters.insert("bound".to_string(), entry_bound.to_string());
    Ok(ParamReport {
        parameters,
        elements_enumerated: targets.len(),
        hits,
        misses,
        double_hits,
    })
}

/// Decompose g in S_{a, h*y^2}(d) as the image of a unique base in
/// S_{a,h}(d) under y * sigma^{-1} for a unique Hecke orbit sigma in H_y.
///
/// Construction: e is the maximal divisor of y with e^2 | c; writing
/// b = e*b1, c = e^2*c1 and g = y/e, the shift f is the unique solution of
/// b1 + f*c1 == 0 (mod g) refined by the top-entry congruence mod g^2. The
/// modular division b1/c1 is performed on integers before inversion.
pub fn cube_decompose(
    g: &SymMat,
    h: i128,
    y: i128,
    coeff_a: i128,
    d: i128,
) -> Result<(HeckeOrbitRep, SymMat)> {
    if y < 1 || h < 1 || coeff_a < 1 || d < 1 {
        return Err(Error::invalid(
            "cube_decompose needs positive parameters".to_string(),
        ));
    }
    if umod(h, y) != 0 {
        return Err(Error::invalid(format!("need y | h, got y={y}, h={h}")));
    }
    if !factorize(gcd(h, cmul(y, y)?))?.is_squarefree() {
        return Err(Error::invalid(format!(
            "gcd(h, y^2) must be squarefree (h={h}, y={y})"
        )));
    }
    if gcd(coeff_a, h) != 1 || gcd(y, cmul(coeff_a, d)?) != 1 {
        return Err(Error::invalid(
            "need gcd(a, h) = 1 and gcd(y, a*d) = 1".to_string(),
        ));
    }
    let det_expected = cmul(coeff_a, cmul(h, cmul(y, y)?)?)?;
    if g.det()? != det_expected || !g.is_positive()? {
        return Err(Error::invalid(format!(
            "matrix {} must be positive with determinant a*h*y^2 = {det_expected}",
            render_sym(g)
        )));
    }

    // Maximal e | y with e^2 | c.
    let mut e = 1i128;
    for div in factorize(y)?.divisors() {
        if umod(g.c, cmul(div, div)?) == 0 && div > e {
            e = div;
        }
    }
    let gq = y / e;
    let f = if gq == 1 {
        0
    } else {
        if umod(g.b, e) != 0 {
            return Err(Error::internal(format!(
                "e | b fails in decomposition of {}",
                render_sym(g)
            )));
        }
        let b1 = g.b / e;
        let c1 = g.c / (e * e);
        let d0 = gcd(c1, gq);
        if umod(b1, d0) != 0 {
            return Err(Error::internal(format!(
                "gcd-adjusted inverse unavailable for {}",
                render_sym(g)
            )));
        }
        let gr = gq / d0;
        let inv = modinv(umod(c1 / d0, gr), gr)
            .ok_or_else(|| Error::internal("c1/d0 invertible mod g/d0".to_string()))?;
        let f0 = umod(cmul(-(b1 / d0), inv)?, gr);
        // Refine mod g by the top-entry congruence mod g^2.
        let gq2 = cmul(gq, gq)?;
        let mut found = None;
        let mut t = 0;
        while t < d0 {
            let cand = f0 + t * gr;
            let top = cadd(
                cadd(
                    cmul(e, cmul(e, g.a / 1)?)?,
                    cmul(2, cmul(e, cmul(cand, g.b / e)?)?)?,
                )?,
                cmul(cand, cmul(cand, g.c / (e * e))?)?,
            )?;
            // top = e^2*a + 2*e*f*b + f^2*c scaled: recompute directly below.
            let direct = cadd(
                cadd(cmul(e * e, g.a)?, cmul(2 * e * cand, g.b)?)?,
                cmul(cand * cand, g.c)?,
            )?;
            debug_assert_eq!(top * e * e % (e * e), 0);
            if umod(direct / (e * e), gq2) == 0 && umod(b1 + cand * c1, gq) == 0 {
                if found.is_some() {
                    return Err(Error::internal(format!(
                        "non-unique shift in decomposition of {}",
                        render_sym(g)
                    )));
                }
                found = Some(cand);
            }
            t += 1;
        }
        found.ok_or_else(|| {
            Error::internal(format!(
                "no admissible shift in decomposition of {}",
                render_sym(g)
            ))
        })?
    };
    let sigma = HeckeOrbitRep { e, f, g: gq };

    // base = (sigma / y) . g, entrywise exact.
    let base = apply_orbit_over_y(&sigma, g, y)?;
    if base.det()? != cmul(coeff_a, h)?
        || umod(base.c, cmul(coeff_a, d)?) != 0
        || umod(base.b, coeff_a) != 0
    {
        return Err(Error::internal(format!(
            "decomposition of {} left the target set",
            render_sym(g)
        )));
    }
    debug_assert_eq!(apply_y_inverse_orbit(&sigma, &base, y)?, *g);
    Ok((sigma, base))
}

/// (sigma / y) . g = y^{-2} * sigma * g * sigma^t, which is integral exactly
/// when sigma is the orbit produced by [`cube_decompose`].
fn apply_orbit_over_y(sigma: &HeckeOrbitRep, g: &SymMat, y: i128) -> Result<SymMat> {
    let (e, f, gq) = (sigma.e, sigma.f, sigma.g);
    let y2 = cmul(y, y)?;
    let a = cadd(
        cadd(cmul(e * e, g.a)?, cmul(2 * e * f, g.b)?)?,
        cmul(f * f, g.c)?,
    )?;
    let b = cadd(cmul(y, g.b)?, cmul(gq * f, g.c)?)?;
    let c = cmul(gq * gq, g.c)?;
    if umod(a, y2) != 0 || umod(b, y2) != 0 || umod(c, y2) != 0 {
        return Err(Error::internal("orbit image is not integral".to_string()));
    }
    Ok(SymMat::new(a / y2, b / y2, c / y2))
}

/// (y * sigma^{-1}) . base, the inverse of [`apply_orbit_over_y`].
fn apply_y_inverse_orbit(sigma: &HeckeOrbitRep, base: &SymMat, y: i128) -> Result<SymMat> {
    let (m11, m12, m21, m22) = sigma.h_times_inverse();
    debug_assert_eq!(m11 * m22 - m12 * m21, y);
    let a = cadd(
        cadd(cmul(m11 * m11, base.a)?, cmul(2 * m11 * m12, base.b)?)?,
        cmul(m12 * m12, base.c)?,
    )?;
    let b = cadd(
        cadd(
            cmul(m11 * m21, base.a)?,
            cmul(m11 * m22 + m12 * m21, base.b)?,
        )?,
        cmul(m12 * m22, base.c)?,
    )?;
    let c = cadd(
        cadd(cmul(m21 * m21, base.a)?, cmul(2 * m21 * m22, base.b)?)?,
        cmul(m22 * m22, base.c)?,
    )?;
    Ok(SymMat::new(a, b, c))
}

/// Verify the cube parametrization: every box element of determinant
/// a*h*y^2 with the S_{a,.}(d) congruences decomposes through exactly one
/// Hecke orbit of H_y.
pub fn verify_para3(
    coeff_a: i128,
    h: i128,
    y: i128,
    d: i128,
    entry_bound: i128,
) -> Result<ParamReport> {
    if y < 1 || umod(h, y) != 0 {
        return Err(Error::invalid(format!(
            "need y >= 1 and y | h, got y={y}, h={h}"
        )));
    }
    if !factorize(gcd(h, cmul(y, y)?))?.is_squarefree() {
        return Err(Error::invalid(format!(
            "gcd(h, y^2) must be squarefree (h={h}, y={y})"
        )));
    }
    if gcd(coeff_a, h) != 1 || gcd(y, cmul(coeff_a, d)?) != 1 {
        return Err(Error::invalid(
            "need gcd(a, h) = 1 and gcd(y, a*d) = 1".to_string(),
        ));
    }

    // Internal consistency of the orbit set: the Hecke average of the
    // constant 1 must equal sigma(y) / sqrt(y).
    let sigma_y = factorize(y)?.sigma() as f64;
    let avg = hecke_apply(y, |_| 1.0, &UniMat::identity().to_real())?;
    if (avg - sigma_y / (y as f64).sqrt()).abs() > 1e-9 * (1.0 + sigma_y) {
        return Err(Error::internal(
            "Hecke orbit count does not match sigma(y)".to_string(),
        ));
    }

    let targets = enumerate_s(coeff_a, cmul(h, cmul(y, y)?)?, d, entry_bound)?;
    let orbits = hecke_orbits(y)?;
    let mut misses = Vec::new();
    let mut double_hits = Vec::new();
    let mut hits = 0usize;
    for t in &targets {
        // Count every orbit whose image is integral and lands in the base set;
        // the claimed uniqueness makes this count 1.
        let mut sources = 0usize;
        for s in &orbits {
            if let Ok(base) = apply_orbit_over_y(s, t, y) {
                if base.det().ok() == Some(cmul(coeff_a, h)?)
                    && base.is_positive()?
                    && umod(base.c, cmul(coeff_a, d)?) == 0
                    && umod(base.b, coeff_a) == 0
                    && apply_y_inverse_orbit(s, &base, y)? == *t
                {
                    sources += 1;
                }
            }
        }
        let constructed = cube_decompose(t, h, y, coeff_a, d);
        match (sources, constructed) {
            (1, Ok(_)) => hits += 1,
            (0, _) | (_, Err(_)) => misses.push(render_sym(t)),
            _ => double_hits.push(render_sym(t)),
        }
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("a".to_string(), coeff_a.to_string());
    parameters.insert("h".to_string(), h.to_string());
    parameters.insert("y".to_string(), y.to_string());
    parameters.insert("d".to_string(), d.to_string());
    parameters.insert("bound".to_string(), entry_bound.to_string());
    Ok(ParamReport {
        parameters,
        elements_enumerated: targets.len(),
        hits,
        misses,
        double_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hecke_orbit_examples() {
        assert_eq!(
            hecke_orbits(1).unwrap(),
            vec![HeckeOrbitRep { e: 1, f: 0, g: 1 }]
        );
        let h2 = hecke_orbits(2).unwrap();
        assert_eq!(
            h2,
            vec![
                HeckeOrbitRep { e: 2, f: 0, g: 1 },
                HeckeOrbitRep { e: 1, f: 0, g: 2 },
                HeckeOrbitRep { e: 1, f: 1, g: 2 },
            ]
        );
        assert_eq!(hecke_orbits(4).unwrap().len(), 7);
        for h in 1..=10_000 {
            assert_eq!(
                hecke_orbits(h).unwrap().len() as i128,
                factorize(h).unwrap().sigma(),
                "h={h}"
            );
        }
    }

    #[test]
    fn hecke_apply_examples() {
        let g = UniMat::identity().to_real();
        // h = 1: a single orbit and unit normalization.
        let v = hecke_apply(1, |m| m.a + 2.0 * m.d, &g).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        // Constant test function: sigma(h) / sqrt(h).
        for h in 1..50i128 {
            let v = hecke_apply(h, |_| 1.0, &g).unwrap();
            let expect = factorize(h).unwrap().sigma() as f64 / (h as f64).sqrt();
            assert!((v - expect).abs() < 1e-9, "h={h}");
        }
        // h = 2 box indicator against the explicit 3-term sum.
        let indicator = |m: &RealMat| {
            if m.a.abs() <= 1.2 && m.b.abs() <= 0.5 && m.d.abs() <= 1.2 {
                1.0
            } else {
                0.0
            }
        };
        let v = hecke_apply(2, indicator, &g).unwrap();
        let s = 2.0f64.sqrt();
        let direct: f64 = [
            RealMat {
                a: 2.0 / s,
                b: 0.0,
                c: 0.0,
                d: 1.0 / s,
            },
            RealMat {
                a: 1.0 / s,
                b: 0.0,
                c: 0.0,
                d: 2.0 / s,
            },
            RealMat {
                a: 1.0 / s,
                b: 1.0 / s,
                c: 0.0,
                d: 2.0 / s,
            },
        ]
        .iter()
        .map(&indicator)
        .sum::<f64>()
            / s;
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn enumerate_s_examples() {
        let got = enumerate_s(1, 1, 1, 2).unwrap();
        let expect = vec![
            SymMat::new(1, -1, 2),
            SymMat::new(1, 0, 1),
            SymMat::new(1, 1, 2),
            SymMat::new(2, -1, 1),
            SymMat::new(2, 1, 1),
        ];
        let mut expect = expect;
        expect.sort_unstable();
        assert_eq!(got, expect);

        let got = enumerate_s(1, 1, 2, 2).unwrap();
        assert_eq!(got, vec![SymMat::new(1, -1, 2), SymMat::new(1, 1, 2)]);

        // det 2 with 2 | b and 2 | c inside the box of side 4: the scan also
        // finds (3, +-2, 2) since 3*2 - 4 = 2.
        let got = enumerate_s(2, 1, 1, 4).unwrap();
        assert_eq!(
            got,
            vec![
                SymMat::new(1, 0, 2),
                SymMat::new(3, -2, 2),
                SymMat::new(3, 2, 2)
            ]
        );

        assert!(enumerate_s(1, 1, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn para1_examples() {
        let r = verify_para1(1, 1, 1, 5).unwrap();
        assert!(
            r.passes(),
            "misses={:?} doubles={:?}",
            r.misses,
            r.double_hits
        );
        assert_eq!(r.hits, r.elements_enumerated);
        assert!(r.elements_enumerated > 0);

        let r = verify_para1(1, 5, 2, 10).unwrap();
        assert!(
            r.passes(),
            "misses={:?} doubles={:?}",
            r.misses,
            r.double_hits
        );

        let r = verify_para1(1, 1, 1, 0).unwrap();
        assert_eq!(r.elements_enumerated, 0);
        assert!(r.passes());
    }

    #[test]
    fn para2_examples() {
        let r = verify_para2(1, 1, 1, 1, 1, 5).unwrap();
        assert!(
            r.passes(),
            "misses={:?} doubles={:?}",
            r.misses,
            r.double_hits
        );
        assert!(r.elements_enumerated > 0);

        // Vacuous cell: -1 is a non-residue mod 3, so no c == 0 (mod 3) at
        // determinant 1 and the pair set is empty; still a pass.
        let r = verify_para2(1, 1, 1, 2, 3, 30).unwrap();
        assert!(r.passes());
        assert_eq!(r.elements_enumerated, 0);

        let r = verify_para2(1, 5, 2, 1, 2, 40).unwrap();
        assert!(
            r.passes(),
            "misses={:?} doubles={:?}",
            r.misses,
            r.double_hits
        );

        assert!(verify_para2(1, 1, 1, 2, 4, 10).is_err());
    }

    #[test]
    fn para2_nonempty_asymmetric_cells() {
        // Cells where both congruence classes are solvable, so the pair set
        // has real content and the shear classes are nontrivial.
        for &(h, s, n1, n2, bound) in &[
            (1i128, 1i128, 1i128, 2i128, 40i128),
            (5, 1, 1, 2, 40),
            (5, 1, 2, 3, 60),
            (6, 1, 2, 3, 60),
        ] {
            let r = verify_para2(1, h, s, n1, n2, bound).unwrap();
            assert!(
                r.passes(),
                "h={h} s={s} n=({n1},{n2}): misses={:?} doubles={:?}",
                r.misses,
                r.double_hits
            );
            assert!(
                r.elements_enumerated > 0,
                "cell h={h} ({n1},{n2}) unexpectedly vacuous"
            );
        }
    }

    #[test]
    fn cube_decompose_examples() {
        let (sigma, base) = cube_decompose(&SymMat::new(1, 0, 8), 2, 2, 1, 1).unwrap();
        assert_eq!(sigma, HeckeOrbitRep { e: 2, f: 0, g: 1 });
        assert_eq!(base, SymMat::new(1, 0, 2));

        let (sigma, base) = cube_decompose(&SymMat::new(2, 0, 4), 2, 2, 1, 1).unwrap();
        assert_eq!(sigma.e * sigma.g, 2);
        assert_eq!(
            apply_y_inverse_orbit(&sigma, &base, 2).unwrap(),
            SymMat::new(2, 0, 4)
        );

        let g = SymMat::new(3, 1, 2);
        let (sigma, base) = cube_decompose(&g, 5, 1, 1, 1).unwrap();
        assert_eq!(sigma, HeckeOrbitRep { e: 1, f: 0, g: 1 });
        assert_eq!(base, g);
    }

    #[test]
    fn cube_roundtrip_on_base_set() {
        // Shear every base element out by each orbit and decompose back.
        let (h, y, a, d) = (2i128, 2i128, 1i128, 1i128);
        for base in enumerate_s(a, h, d, 40).unwrap() {
            for sigma in hecke_orbits(y).unwrap() {
                let g = apply_y_inverse_orbit(&sigma, &base, y).unwrap();
                let (sigma2, base2) = cube_decompose(&g, h, y, a, d).unwrap();
                assert_eq!((sigma2, base2), (sigma, base), "base={base:?}");
            }
        }
    }

    #[test]
    fn cube_roundtrip_hits_gcd_adjusted_inverse() {
        // y = 6 produces orbits with composite lower entry, and bases with
        // gcd(c1, g) > 1 drive the adjusted-inverse path of the shift solve.
        // Example: base (1, 0, 6) under (e, f, g) = (2, 1, 3) maps to
        // (15, -12, 24), where c1 = 6 shares the factor 3 with g.
        let (h, y, a, d) = (6i128, 6i128, 1i128, 1i128);
        let g = apply_y_inverse_orbit(
            &HeckeOrbitRep { e: 2, f: 1, g: 3 },
            &SymMat::new(1, 0, 6),
            y,
        )
        .unwrap();
        assert_eq!(g, SymMat::new(15, -12, 24));
        let (sigma, base) = cube_decompose(&g, h, y, a, d).unwrap();
        assert_eq!(sigma, HeckeOrbitRep { e: 2, f: 1, g: 3 });
        assert_eq!(base, SymMat::new(1, 0, 6));

        for base in enumerate_s(a, h, d, 30).unwrap() {
            for sigma in hecke_orbits(y).unwrap() {
                let g = apply_y_inverse_orbit(&sigma, &base, y).unwrap();
                let (sigma2, base2) = cube_decompose(&g, h, y, a, d).unwrap();
                assert_eq!(
                    (sigma2, base2),
                    (sigma, base),
                    "base={base:?} sigma={sigma:?}"
                );
            }
        }
    }

    #[test]
    fn para3_examples() {
        let r = verify_para3(1, 2, 2, 1, 50).unwrap();
        assert!(
            r.passes(),
            "misses={:?} doubles={:?}",
            r.misses,
            r.double_hits
        );
        assert!(r.elements_enumerated > 0);

        let r = verify_para3(1, 6, 2, 1, 80).unwrap();
        assert!(
            r.passes(),
            "misses={:?} doubles={:?}",
            r.misses,
            r.double_hits
        );

        let r = verify_para3(1, 1, 1, 1, 10).unwrap();
        assert!(r.passes());
    }

    #[test]
    fn report_serializes() {
        let r = verify_para1(1, 1, 1, 4).unwrap();
        let js = serde_json::to_string(&r).unwrap();
        let back: ParamReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back.hits, r.hits);
        assert_eq!(back.elements_enumerated, r.elements_enumerated);
    }
}
