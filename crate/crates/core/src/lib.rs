//! Roots of the quadratic congruence a*l^2 + h == 0 (mod k), exactly.
//!
//! The crate has four layers:
//!
//! - [`modular`]: Jacobi symbols, deterministic primality and factorization,
//!   modular square roots, Hensel lifting, and the multiplicative root count
//!   rho(a, h, k).
//! - [`lattice`]: integer symmetric matrices of fixed determinant under the
//!   SL2(Z) action gamma * g * gamma^t, fundamental-domain reduction, Heegner
//!   points, cosets of the congruence subgroup Gamma_0(q), and the hyperbolic
//!   point-pair invariants u and u_R.
//! - [`parametrize`]: exhaustive finite verifiers for the parametrizations of
//!   symmetric matrices with congruence conditions by Heegner points, coset
//!   representatives, and Hecke orbits.
//! - [`experiments`]: desk-scale experiment harnesses (smooth-window root
//!   counts against their density main terms, equidistribution of v/p,
//!   greatest-prime-factor scans, automorphic kernel sums, and a divisor
//!   experiment for a*x^2 + b*y^3), all with exact integer enumeration
//!   underneath and deterministic aggregation.

pub mod error;
pub mod experiments;
pub mod lattice;
pub mod modular;
pub mod parametrize;
pub(crate) mod util;

pub use error::{Error, Result};
pub use util::tree_sum;
