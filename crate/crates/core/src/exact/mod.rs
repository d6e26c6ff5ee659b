//! Exact arithmetic: integers, valuations, polynomials, homogeneous forms,
//! resultants, plus the floating-point root finder and Mahler measure.

pub mod arith;
pub mod form;
pub mod mahler;
pub mod parse;
pub mod poly;
pub mod resultant;
pub mod roots;

use serde::{Deserialize, Serialize};

pub use arith::{valuation, valuation_int, Place, Valuation};
pub use form::{HomogeneousForm, SparsePoly};
pub use mahler::mahler_measure;
pub use parse::{parse_binary_form, parse_form, parse_polynomial};
pub use poly::IntPolynomial;
pub use resultant::{macaulay_resultant, resultant, sylvester_resultant};
pub use roots::complex_roots;

/// A floating-point value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}
