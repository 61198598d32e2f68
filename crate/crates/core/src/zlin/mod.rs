//! Exact integer linear algebra, polynomials and real algebraic numbers.

mod algebraic;
mod factor;
mod field;
mod matrix;
mod poly;
mod spectral;

pub use algebraic::AlgebraicReal;
pub use factor::{factor, factor_square_free};
pub use field::{FieldElement, NumberField};
pub use matrix::{IntMatrix, IntVector};
pub use poly::IntPoly;
pub use spectral::{
    is_positive_vector, local_minimal_poly, max_root_modulus, pair, pf_data, recurrence_rate, spectral_growth, symmetric_square, PfData,
    PureRate, SpectralGrowth, EMPIRICAL_HORIZON, EXACT_DEGREE_LIMIT,
};
