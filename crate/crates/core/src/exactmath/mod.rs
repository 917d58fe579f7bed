//! Exact arithmetic over Q: rationals, polynomials, matrices, real roots,
//! factorization, Smith normal form and simple algebraic number fields.

pub mod factor;
pub mod matrix;
pub mod numfield;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod smith;

pub use factor::factor_over_q;
pub use matrix::RationalMatrix;
pub use numfield::{field_solve, NfElem, NumberField};
pub use poly::Poly;
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};
pub use roots::{sturm_count, IsolatingInterval};
pub use smith::{smith_normal_form, SmithDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division is not exact")]
    InexactDivision,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("empty interval: lo must be < hi")]
    EmptyInterval,
    #[error("root at interval endpoint {0}; perturb the endpoint by a small rational")]
    EndpointRoot(String),
    #[error("degree {0} exceeds the supported bound {1}")]
    UnsupportedDegree(usize, usize),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("minimal polynomial is not irreducible or interval does not isolate a root: {0}")]
    InvalidField(String),
}
