//! Exact real-algebraic arithmetic.
//!
//! Polynomials over `Z`, rational intervals, Sturm-certified root isolation,
//! real algebraic numbers given by an isolating interval, and canonical
//! coordinates in `Z[λ]`.

mod interval;
pub(crate) mod number;
mod poly;
mod ring;
mod salem;
mod sturm;

pub use interval::Interval;
pub use number::AlgebraicNumber;
pub use poly::IntPoly;
pub use ring::{reduce_mod_minpoly, Coords, Fixed, PowerTable, Ring, RingElement};
pub use salem::{
    lambda_ring, salem_beta, salem_identity_holds, salem_lambda, salem_polynomial,
    verify_salem_growth,
};
pub use sturm::{isolate_real_roots, SturmChain};
