//! SL2(Z) machinery for integer symmetric matrices of positive determinant:
//! the action g -> gamma * g * gamma^t, reduction into the standard
//! fundamental domain, Heegner points, coset representatives of Gamma_0(q),
//! and the hyperbolic size invariants u and u_R.

use crate::error::{Error, Result};
use crate::util::{cadd, cmul, csub, gcd, umod};

/// An element of SL2(Z): integer matrix (a b; c d) with det = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniMat {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl UniMat {
    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Result<Self> {
        let det = csub(cmul(a, d)?, cmul(b, c)?)?;
        if det != 1 {
            return Err(Error::invalid(format!(
                "matrix ({a}, {b}; {c}, {d}) has determinant {det}, expected 1"
            )));
        }
        Ok(UniMat { a, b, c, d })
    }

    pub fn identity() -> Self {
        UniMat {
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    /// S = (0 -1; 1 0), inversion.
    pub fn gen_s() -> Self {
        UniMat {
            a: 0,
            b: -1,
            c: 1,
            d: 0,
        }
    }

    /// T = (1 1; 0 1), translation.
    pub fn gen_t() -> Self {
        UniMat {
            a: 1,
            b: 1,
            c: 0,
            d: 1,
        }
    }

    /// `n[x] = (1 x; 0 1)`.
    pub fn upper(x: i128) -> Self {
        UniMat {
            a: 1,
            b: x,
            c: 0,
            d: 1,
        }
    }

    /// `n[x]^t = (1 0; x 1)`.
    pub fn lower(x: i128) -> Self {
        UniMat {
            a: 1,
            b: 0,
            c: x,
            d: 1,
        }
    }

    pub fn mul(&self, other: &UniMat) -> Result<UniMat> {
        Ok(UniMat {
            a: cadd(cmul(self.a, other.a)?, cmul(self.b, other.c)?)?,
            b: cadd(cmul(self.a, other.b)?, cmul(self.b, other.d)?)?,
            c: cadd(cmul(self.c, other.a)?, cmul(self.d, other.c)?)?,
            d: cadd(cmul(self.c, other.b)?, cmul(self.d, other.d)?)?,
        })
    }

    /// Exact inverse (d -b; -c a).
    pub fn inverse(&self) -> UniMat {
        UniMat {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Membership in Gamma_0(q): lower-left entry divisible by q.
    pub fn in_gamma0(&self, q: i128) -> bool {
        q >= 1 && self.c.rem_euclid(q) == 0
    }

    /// Image of i under the Mobius action, as a point of the upper half-plane.
    pub fn act_on_i(&self) -> UpperHalfPoint {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let den = c * c + d * d;
        UpperHalfPoint {
            x: (a * c + b * d) / den,
            y: 1.0 / den,
        }
    }

    pub fn to_real(&self) -> RealMat {
        RealMat {
            a: self.a as f64,
            b: self.b as f64,
            c: self.c as f64,
            d: self.d as f64,
        }
    }
}

/// An integer symmetric matrix (a b; b c), stored as the triple (a, b, c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymMat {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl SymMat {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        SymMat { a, b, c }
    }

    /// det (a b; b c) = a*c - b^2.
    pub fn det(&self) -> Result<i128> {
        csub(cmul(self.a, self.c)?, cmul(self.b, self.b)?)
    }

    /// Positive definite: a > 0 and det > 0 (hence c > 0).
    pub fn is_positive(&self) -> Result<bool> {
        Ok(self.a > 0 && self.det()? > 0)
    }

    /// The point (b + i*sqrt(det)) / c of the upper half-plane.
    pub fn to_point(&self) -> Result<UpperHalfPoint> {
        let det = self.det()?;
        if det <= 0 || self.c <= 0 {
            return Err(Error::invalid(format!(
                "triple ({}, {}, {}) is not positive definite",
                self.a, self.b, self.c
            )));
        }
        Ok(UpperHalfPoint {
            x: self.b as f64 / self.c as f64,
            y: (det as f64).sqrt() / self.c as f64,
        })
    }
}

/// A point x + i*y of the upper half-plane (y > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(Error::invalid(format!(
                "({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(UpperHalfPoint { x, y })
    }

    /// Mobius action of an integer unimodular matrix.
    pub fn moebius(&self, g: &UniMat) -> UpperHalfPoint {
        let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
        let den = (c * self.x + d).powi(2) + (c * self.y).powi(2);
        UpperHalfPoint {
            x: ((a * self.x + b) * (c * self.x + d) + a * c * self.y * self.y) / den,
            y: self.y / den,
        }
    }
}

/// A real 2x2 matrix, used for the skewed size u_R and Hecke averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMat {
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &RealMat) -> RealMat {
        RealMat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn scale(&self, s: f64) -> RealMat {
        RealMat {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }
}

/// A reduced representative of an SL2(Z)-orbit of positive symmetric
/// matrices, together with the order of its projective stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeegnerPoint {
    pub sym: SymMat,
    pub stab_order: u8,
}

/// The action g -> gamma * g * gamma^t on symmetric matrices. Preserves the
/// determinant and positive definiteness.
pub fn act(gamma: &UniMat, g: &SymMat) -> Result<SymMat> {
    let UniMat { a, b, c, d } = *gamma;
    let SymMat {
        a: ga,
        b: gb,
        c: gc,
    } = *g;
    // Rows r1 = (a, b), r2 = (c, d); result = (r1 g r1^t, r1 g r2^t, r2 g r2^t).
    let q = |p: i128, q_: i128, r: i128, s: i128| -> Result<i128> {
        // (p, q_) * g * (r, s)^t
        let t1 = cmul(cmul(p, r)?, ga)?;
        let t2 = cmul(cadd(cmul(p, s)?, cmul(q_, r)?)?, gb)?;
        let t3 = cmul(cmul(q_, s)?, gc)?;
        cadd(cadd(t1, t2)?, t3)
    };
    Ok(SymMat {
        a: q(a, b, a, b)?,
        b: q(a, b, c, d)?,
        c: q(c, d, c, d)?,
    })
}

/// Bottom-right entry of tau * g * tau^t: c0^2*a + 2*c0*d0*b + d0^2*c for
/// tau with bottom row (c0, d0). Depends only on that row.
pub fn c_transform(tau: &UniMat, g: &SymMat) -> Result<i128> {
    let (c0, d0) = (tau.c, tau.d);
    let t1 = cmul(cmul(c0, c0)?, g.a)?;
    let t2 = cmul(cmul(2, cmul(c0, d0)?)?, g.b)?;
    let t3 = cmul(cmul(d0, d0)?, g.c)?;
    cadd(cadd(t1, t2)?, t3)
}

/// Reduction convention for triples (a, b, c) of determinant h > 0, phrased
/// for the point z = (b + i*sqrt(h)) / c:
/// Re z in [-1/2, 1/2], |z| >= 1, and on either boundary (|b| = c/2 or
/// a = c) additionally b >= 0. Every orbit contains exactly one such triple.
pub fn is_reduced(g: &SymMat) -> Result<bool> {
    if !g.is_positive()? {
        return Ok(false);
    }
    let two_b = cmul(2, g.b)?;
    Ok(two_b.abs() <= g.c
        && g.c <= g.a
        && (two_b.abs() != g.c || g.b >= 0)
        && (g.a != g.c || g.b >= 0))
}

/// Reduce a positive symmetric matrix into the fundamental domain.
///
/// Returns the reduced representative and the accumulated transform gamma
/// with act(gamma, g) equal to the reduced triple. Classical T/S descent:
/// translate b into [-c/2, c/2), invert when a < c; each inversion strictly
/// decreases c, so the loop terminates.
pub fn reduce(g: &SymMat) -> Result<(HeegnerPoint, UniMat)> {
    let det = g.det()?;
    if det <= 0 || !g.is_positive()? {
        return Err(Error::invalid(format!(
            "reduce needs a positive definite triple, got ({}, {}, {}) with det {det}",
            g.a, g.b, g.c
        )));
    }
    let mut cur = *g;
    let mut total = UniMat::identity();
    let apply = |m: &UniMat, cur: &mut SymMat, total: &mut UniMat| -> Result<()> {
        *cur = act(m, cur)?;
        *total = m.mul(total)?;
        Ok(())
    };
    loop {
        // b <- b - t*c with the result in [-c/2, c/2)
        let t = cadd(cmul(2, cur.b)?, cur.c)?.div_euclid(cmul(2, cur.c)?);
        if t != 0 {
            apply(&UniMat::upper(-t), &mut cur, &mut total)?;
        }
        if cur.a < cur.c {
            apply(&UniMat::gen_s(), &mut cur, &mut total)?;
            continue;
        }
        // Boundary ties: prefer b >= 0.
        if cmul(2, cur.b)? == -cur.c {
            apply(&UniMat::gen_t(), &mut cur, &mut total)?;
        }
        if cur.a == cur.c && cur.b < 0 {
            apply(&UniMat::gen_s(), &mut cur, &mut total)?;
        }
        break;
    }
    debug_assert!(is_reduced(&cur)?);
    debug_assert_eq!(act(&total, g)?, cur);
    let stab = stabilizer_order_of_sym(&cur);
    Ok((
        HeegnerPoint {
            sym: cur,
            stab_order: stab,
        },
        total,
    ))
}

fn stabilizer_order_of_sym(g: &SymMat) -> u8 {
    if g.a == g.c && g.b == 0 {
        2 // the orbit of i
    } else if g.a == g.c && 2 * g.b == g.c {
        3 // the corner (1 + i*sqrt(3)) / 2
    } else {
        1
    }
}

/// Order in {1, 2, 3} of the projective stabilizer of a reduced point.
pub fn stabilizer_order(z: &HeegnerPoint) -> u8 {
    stabilizer_order_of_sym(&z.sym)
}

/// All reduced triples of determinant h: one representative per SL2(Z)-orbit
/// of positive symmetric matrices with a*c - b^2 = h.
///
/// Scans the hull c <= 2*sqrt(h), |b| <= c/2 and keeps the triples that are
/// already reduced; the reduction convention picks exactly one per orbit.
pub fn heegner_points(h: i128) -> Result<Vec<HeegnerPoint>> {
    if h < 1 {
        return Err(Error::invalid(format!("determinant must be >= 1, got {h}")));
    }
    let cmax = cmul(4, h)?.isqrt();
    let mut out = Vec::new();
    for c in 1..=cmax {
        let bmax = c / 2;
        for b in -bmax..=bmax {
            let num = cadd(cmul(b, b)?, h)?;
            if num % c != 0 {
                continue;
            }
            let g = SymMat::new(num / c, b, c);
            if is_reduced(&g)? {
                out.push(HeegnerPoint {
                    sym: g,
                    stab_order: stabilizer_order_of_sym(&g),
                });
            }
        }
    }
    out.sort_by_key(|p| (p.sym.c, p.sym.b, p.sym.a));
    Ok(out)
}

/// Representatives of the right cosets Gamma_0(q) \ SL2(Z).
///
/// Cosets correspond to points of the projective line over Z/q via the
/// bottom row (c0 : d0); the count is q * prod_{p | q} (1 + 1/p). Each class
/// is lifted to a genuine SL2(Z) matrix.
pub fn coset_reps(q: i128) -> Result<Vec<UniMat>> {
    if q < 1 {
        return Err(Error::invalid(format!("level must be >= 1, got {q}")));
    }
    let mut reps = Vec::new();
    for (c0, d0) in projective_line(q)? {
        reps.push(lift_bottom_row(c0, d0, q)?);
    }
    Ok(reps)
}

/// Canonical representatives (c0, d0) of P^1(Z/q): pairs with
/// gcd(c0, d0, q) = 1 modulo scaling by units, each class represented by its
/// lexicographically smallest member.
pub(crate) fn projective_line(q: i128) -> Result<Vec<(i128, i128)>> {
    if q == 1 {
        return Ok(vec![(0, 0)]);
    }
    let qu = q as usize;
    let units: Vec<i128> = (1..q).filter(|&u| gcd(u, q) == 1).collect();
    let mut seen = vec![false; qu * qu];
    let mut classes = Vec::new();
    for c0 in 0..q {
        for d0 in 0..q {
            if seen[(c0 * q + d0) as usize] {
                continue;
            }
            if gcd(gcd(c0, d0), q) != 1 {
                continue;
            }
            let mut canon = (c0, d0);
            for &u in &units {
                let p = (umod(u * c0, q), umod(u * d0, q));
                seen[(p.0 * q + p.1) as usize] = true;
                if p < canon {
                    canon = p;
                }
            }
            classes.push(canon);
        }
    }
    classes.sort_unstable();
    Ok(classes)
}

fn lift_bottom_row(c0: i128, d0: i128, q: i128) -> Result<UniMat> {
    if q == 1 {
        return Ok(UniMat::identity());
    }
    // Adjust d0 by multiples of q until gcd(c0', d0') = 1, then complete.
    let (mut c, mut d) = (c0, d0);
    if c == 0 {
        c = q;
    }
    let mut t = 0i128;
    loop {
        let dt = cadd(d, cmul(t, q)?)?;
        if gcd(c, dt) == 1 {
            d = dt;
            break;
        }
        t += 1;
        if t > 4 * q {
            return Err(Error::internal(format!(
                "failed to lift ({c0}:{d0}) mod {q}"
            )));
        }
    }
    // a*d - b*c = 1
    let (g, s, tneg) = crate::util::egcd(d, c);
    debug_assert_eq!(g, 1);
    let m = UniMat::new(s, -tneg, c, d)?;
    debug_assert_eq!(umod(m.c - c0, q), 0);
    debug_assert_eq!(umod(m.d - d0, q), 0);
    Ok(m)
}

/// Hyperbolic point-pair invariant u(w, z) = |w - z|^2 / (4 Im w Im z).
pub fn u_invariant(w: &UpperHalfPoint, z: &UpperHalfPoint) -> f64 {
    let dx = w.x - z.x;
    let dy = w.y - z.y;
    (dx * dx + dy * dy) / (4.0 * w.y * z.y)
}

/// R-skewed hyperbolic size u_R(g) = (a^2 + (b/R)^2 + (c*R)^2 + d^2 - 2) / 4
/// for a real matrix of determinant 1. u_1(g) = u(g*i, i).
pub fn u_skewed(g: &RealMat, r: f64) -> f64 {
    let br = g.b / r;
    let cr = g.c * r;
    0.25 * (g.a * g.a + br * br + cr * cr + g.d * g.d - 2.0)
}
