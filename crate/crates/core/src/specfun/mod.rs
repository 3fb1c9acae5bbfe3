//! Special functions, quadrature and extended-precision arithmetic.

mod binomial;
mod extended;
mod gamma;
mod interference;
mod multiprecision;
mod quadrature;

pub use binomial::{
    alternating_binomial_combination, alternating_binomial_sum, BinomialSum, BinomialTerm, DOUBLE_PRECISION_MAX_N,
    PRECISION_LIMIT,
};
pub use extended::Quad;
pub use gamma::lower_incomplete_gamma;
pub use interference::{
    full_interference_integral, gauss_2f1_special, interference_exponent_integral, ExtendedInterference,
};
pub use multiprecision::{alternating_binomial_multi, big_to_f64, working_bits, MultiContext, MultiInterference};
pub use quadrature::{integrate, integrate_semiinfinite, Integral, QuadratureSpec};

/// Failure of a numerical routine.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("argument outside the domain: {0}")]
    Domain(&'static str),
    #[error("did not converge (estimate {estimate}, error {error})")]
    NonConvergence { estimate: f64, error: f64 },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("alternating sum of {n} terms lost precision (error bound {error_bound})")]
    Precision { n: u32, error_bound: f64 },
}
