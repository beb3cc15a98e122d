//! Certified multifractal computations for self-similar measures on the real
//! line whose maps share a single contraction ratio.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebraic`]: integer polynomials, Sturm root isolation, rational
//!   intervals, real algebraic numbers and exact canonical forms in `Z[λ]`.
//! * [`ifs`]: equal-ratio iterated function systems, word composition and the
//!   level-`k` equivalence classes `S_I = S_J`.
//! * [`measure`]: finite-atom approximations of the self-similar measure and
//!   exact dyadic box / ball masses.
//! * [`spectrum`]: `L^q` spectrum estimates, derivatives, Legendre transforms
//!   and certified slope bounds.
//! * [`awsc`]: separation statistics (`t_n` window counts, digit-set gaps).
//! * [`moran`]: Moran-set dimensions and the multi-scale schedule recursion.

pub mod algebraic;
pub mod awsc;
mod error;
pub mod ifs;
pub mod measure;
pub mod moran;
pub mod numeric;
pub mod spectrum;

pub use error::{Error, Result};
