//! Gegenbauer polynomials, Ferrers functions on the cut (-1, 1) and the
//! off-cut second-kind function for real z > 1, with the machinery to
//! check their integral and expansion identities numerically.
//!
//! The numerical modules are generic over [`scalar::Real`] (`f32`, `f64`).
//! Type aliases with a `64` suffix fix the scalar to `f64`.
//!
//! ```
//! use cutleg::{ferrers_p, gegenbauer_all};
//!
//! let c = gegenbauer_all(2, 1.0_f64, 0.5).unwrap();
//! assert!((c[2] - 0.0).abs() < 1e-15); // U_2(1/2) = 4/4 - 1
//!
//! let p = ferrers_p(1.0_f64, 0.0, 0.3).unwrap();
//! assert!((p.value - 0.3).abs() < 1e-14);
//! ```

// guards are written as !(x op y) so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod gegenbauer;
pub mod harness;
pub mod kernels;
pub mod legendre;
pub mod quadrature;
pub mod scalar;
pub mod series;

pub use closed_form::{
    boundary_rhs, gamma_prefactor, left_rhs, left_rhs_q_form, neumann_rhs, offcut_rhs, right_rhs,
    split_combination,
};
pub use error::{Error, Result};
pub use gegenbauer::{
    gegenbauer_all, gegenbauer_coeffs, gegenbauer_synth, renorm_gegenbauer, ExpansionCoeffs,
    GegenbauerBasis,
};
pub use harness::{
    closure_roundtrip, sweep, verify_identity, GridSpec, IdentityId, IdentityParams,
    IdentityReport,
};
pub use kernels::{gamma_real, hyp2f1_real, ln_gamma_pos, ScalarEval};
pub use legendre::{
    cut_boundary_values, ferrers_p, ferrers_q, offcut_q_phase_removed, CutOrderDegree,
    FerrersMethod, FerrersValue,
};
pub use quadrature::{
    integral_left_lhs, integral_offcut_lhs, integral_right_lhs, tanh_sinh, QuadResult,
};
pub use scalar::Real;
pub use series::{abel_sum, series_lhs, series_rhs, SeriesFamily, SeriesResult};

pub type ScalarEval64 = ScalarEval<f64>;
pub type GegenbauerBasis64 = GegenbauerBasis<f64>;
pub type ExpansionCoeffs64 = ExpansionCoeffs<f64>;
pub type CutOrderDegree64 = CutOrderDegree<f64>;
pub type FerrersValue64 = FerrersValue<f64>;
pub type QuadResult64 = QuadResult<f64>;
pub type SeriesResult64 = SeriesResult<f64>;
