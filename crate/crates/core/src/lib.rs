//! Generalized Cesàro operators `C_t` acting on truncated Taylor series.
//!
//! `C_t` sends the coefficients `(a_n)` of `f` to
//! `b_n = (t^n a_0 + t^{n-1} a_1 + ... + a_n) / (n + 1)`, for `t` in `[0, 1]`.
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! at the crate root fix `f64` unless they end in `32`.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cesaro;
pub mod dynamics;
pub mod error;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod weights;

pub use cesaro::{
    c1_log_image_closed_form, classical_c1_log_image, CesaroOperator, InverseOperator, LogImage,
    LowerTriangular, Strategy,
};
pub use dynamics::{
    cesaro_mean, doubling_schedule, ergodic_limit_projection, ergodic_trace, power_apply,
    power_bound_certificate, range_preimage, ErgodicTrace, NormTag, PowerBoundReport,
    WeightedCheck,
};
pub use error::{Error, Result};
pub use quadrature::GaussLegendre;
pub use scalar::{log_ratio, Cx, Real};
pub use series::{format_f64, DiscPoint, TaylorSeries, DEFAULT_TRUNCATION};
pub use spectral::{
    dense_spectrum_check, distance_to_spectrum, eigen_closed_form, eigenpair,
    finite_section_spectrum, product_bound_scan, resolvent_apply, resolvent_equicontinuity_scan,
    resolvent_forward_substitution, EigenPair, EquicontinuityScan, ProductBoundReport,
    ProductSample, ResolventQuery, TOL_LAMBDA,
};
pub use weights::{
    frechet_norm_k, gamma_norm_bound, operator_norm_witness, q_r_norm, q_r_norm_refined,
    standard_weight_norm_bound, weighted_sup_norm, Direction, Flavor, GammaBound, NormEstimate,
    SupGrid, Weight, WeightKind,
};

pub type Complex = num_complex::Complex64;

pub type Series = TaylorSeries<f64>;
pub type Series32 = TaylorSeries<f32>;
pub type Operator = CesaroOperator<f64>;
pub type Operator32 = CesaroOperator<f32>;
pub type Inverse = InverseOperator<f64>;
pub type Inverse32 = InverseOperator<f32>;
pub type RadialWeight = Weight<f64>;
pub type RadialWeight32 = Weight<f32>;
pub type Eigen = EigenPair<f64>;
pub type Resolvent = ResolventQuery<f64>;
pub type ProductReport = ProductBoundReport<f64>;
pub type Trace = ErgodicTrace<f64>;
