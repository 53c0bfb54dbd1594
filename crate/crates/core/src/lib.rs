//! Bracketed bounds on the joint spectral radius of finite complex matrix
//! sets, together with the constructive tools around its regularity:
//! flag-adapted block norms, ε-inflation curves and Hölder fits,
//! single-matrix perturbation certificates, growth-constant estimation and
//! pointwise lower-bound certificates, and a sampled continuous-time lift.
//!
//! Products follow the convention that the word (i_1, …, i_k) denotes
//! A_{i_k} ⋯ A_{i_1}.

pub mod bounds;
pub mod certify;
pub mod ct;
pub mod error;
pub mod inflation;
pub mod io;
pub mod matrix;
pub mod norms;
pub mod perturbation;
pub mod random;
pub mod reducibility;
pub mod set;

pub use bounds::{bracket, lower_bound, upper_bound, BoundsBracket, OperatorNormBound, SpectralNorm};
pub use error::{JsrError, Result};
pub use matrix::{operator_norm, spectral_radius, Matrix, NormKind, C64};
pub use set::{balanced_hull, enumerate_products, hausdorff_distance, scale, Ball, Budget, InflatedSet, MatrixSet, Word};
