//! Desk-scale experiment harnesses over the exact arithmetic layers.
//!
//! Each experiment enumerates an integer structure exactly, forms the
//! density main term from rho and a smooth-weight integral, and reports the
//! measured discrepancy next to the target bound as a ratio. Real
//! aggregation is pairwise in a fixed order, so results are independent of
//! the worker count.

mod bump;
mod cubic;
mod equidist;
mod gpf;
mod kernels;
mod report;
mod typesums;

pub use bump::BumpFn;
pub use cubic::{
    lattice_mass, rho_cubic, rho_cubic_complete_sum, x2y3_type_i2, ypoisson_check,
    CubicDivisorParams, YPoissonReport,
};
pub use equidist::{
    equidist, hypothesis_bound, hypothesis_sum, weyl_sum, EquidistReport, EquidistRow,
    HypothesisSum, WeylValue,
};
pub use gpf::{chebyshev_identity, gpf_scan, ChebyshevReport, GpfBin, GpfReport};
pub use kernels::{kernel_heegner, kernel_lowertriang, KernelReport, KernelRow, LowerTriangParams};
pub use report::{fmt_f64, DiscrepancyRow, ExperimentReport, Theta};
pub use typesums::{type1, type2, window_root_sum};
