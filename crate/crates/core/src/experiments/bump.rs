//! Smooth compactly supported test functions.
//!
//! The prototype is exp(-1/(1 - u^2)) on (-1, 1), mapped affinely onto the
//! requested support [lo, hi]. All derivatives vanish at the endpoints, so
//! lattice sums against these weights converge to the integral faster than
//! any power of the point count.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Quadrature tolerance requested from the adaptive integrator.
const QUAD_TOL: f64 = 1e-12;

/// A smooth bump supported exactly on [lo, hi], with its integral cached at
/// construction (adaptive Simpson, certified error below 1e-10).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BumpFn {
    lo: f64,
    hi: f64,
    /// Smoothness scale delta in (0, 1]; recorded for derivative-bound
    /// bookkeeping (the J-th derivative grows like delta^-J).
    delta: f64,
    integral: f64,
    integral_err: f64,
}

impl BumpFn {
    pub fn new(lo: f64, hi: f64, delta: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!(
                "bump support needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid(format!(
                "bump scale delta must lie in (0, 1], got {delta}"
            )));
        }
        let mut bump = BumpFn {
            lo,
            hi,
            delta,
            integral: 0.0,
            integral_err: 0.0,
        };
        let (value, err) = adaptive_simpson(|x| bump.eval(x), lo, hi, QUAD_TOL);
        bump.integral = value;
        bump.integral_err = err;
        debug_assert!(err <= 1e-10);
        Ok(bump)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Pointwise value; identically zero outside (lo, hi).
    pub fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let w = 1.0 - u * u;
        if w <= 0.0 {
            0.0
        } else {
            (-1.0 / w).exp()
        }
    }

    /// Cached integral over the support.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Error bound attached to the cached integral.
    pub fn integral_error(&self) -> f64 {
        self.integral_err
    }
}

/// Adaptive Simpson quadrature; returns (value, error_estimate).
fn adaptive_simpson(f: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f((a + b) / 2.0) + f(b))
    }
    fn recurse(
        f: impl Fn(f64) -> f64 + Copy,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> (f64, f64) {
        let m = (a + b) / 2.0;
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        let delta = left + right - whole;
        if depth >= 48 || delta.abs() <= 15.0 * tol {
            return (left + right + delta / 15.0, delta.abs() / 15.0);
        }
        let (lv, le) = recurse(f, a, m, left, tol / 2.0, depth + 1);
        let (rv, re) = recurse(f, m, b, right, tol / 2.0, depth + 1);
        (lv + rv, le + re)
    }
    let whole = simpson(f, lo, hi);
    recurse(f, lo, hi, whole, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_symmetry() {
        let b = BumpFn::new(-1.0, 1.0, 1.0).unwrap();
        assert_eq!(b.eval(-1.0), 0.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(2.0), 0.0);
        assert!(b.eval(0.0) > 0.0);
        for x in [-0.9, -0.4, 0.1, 0.77] {
            let mirrored = b.eval(-1.0 + 1.0 - x); // lo + hi - x
            assert!((b.eval(x) - mirrored).abs() < 1e-16);
        }
        let c = BumpFn::new(1.0, 2.5, 0.5).unwrap();
        for x in [1.1, 1.9, 2.2] {
            assert!((c.eval(x) - c.eval(1.0 + 2.5 - x)).abs() < 1e-16);
        }
    }

    #[test]
    fn integral_of_standard_bump() {
        // Independent oracle: composite Simpson on a fixed fine grid.
        let b = BumpFn::new(-1.0, 1.0, 1.0).unwrap();
        let n = 1 << 20;
        let h = 2.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = -1.0 + i as f64 * h;
            acc += h / 6.0 * (b.eval(a) + 4.0 * b.eval(a + h / 2.0) + b.eval(a + h));
        }
        assert!(
            (b.integral() - acc).abs() < 1e-10,
            "adaptive {} vs composite {acc}",
            b.integral()
        );
        assert!((b.integral() - 0.4440).abs() < 1e-4);
        assert!(b.integral_error() <= 1e-10);
        assert!(b.integral() > 0.0);
    }

    #[test]
    fn integral_scales_affinely() {
        let b = BumpFn::new(-1.0, 1.0, 1.0).unwrap();
        let c = BumpFn::new(3.0, 7.0, 1.0).unwrap();
        assert!((c.integral() - 2.0 * b.integral()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(BumpFn::new(1.0, 1.0, 0.5).is_err());
        assert!(BumpFn::new(2.0, 1.0, 0.5).is_err());
        assert!(BumpFn::new(0.0, 1.0, 0.0).is_err());
        assert!(BumpFn::new(0.0, 1.0, 1.5).is_err());
    }
}
