//! Exact computer algebra for quasi-shuffle algebras, truncated bimoulds, and
//! balanced multiple q-zeta values.
//!
//! Everything here is exact: coefficients are arbitrary-precision rationals
//! ([`Q`]), q-expansions are dense rational series truncated at an explicit
//! order ([`qseries::QSeries`]), and bimoulds are polynomial coefficient
//! tables truncated at an explicit weight ([`bimould::TruncBimould`]).
//! Floating point appears only in the advisory numeric limit check.
//!
//! Module map:
//!
//! * [`rational`] — rational helpers: parsing, Bernoulli numbers, binomials.
//! * [`words`] — letters, words, linear combinations, deconcatenation.
//! * [`quasishuffle`] — quasi-shuffle products for several letter alphabets,
//!   the letter-merging rules that define them, and the p/y shuffle variant.
//! * [`qseries`] — dense exact q-expansions and the nested-sum / partition
//!   generators used as independent oracles.
//! * [`regmaps`] — regularization of leading divergent letters, the related
//!   coproduct, the exponential alphabet change between the two main letter
//!   families, and the swap/involution maps.
//! * [`bimould`] — truncated bimoulds over a coefficient ring, mould
//!   multiplication, variable substitutions, and the quasi-shuffle symmetry
//!   checkers at the level of generating series.
//! * [`eisenstein`] — the depth-two extended double shuffle solver and the
//!   construction of combinatorial bi-multiple Eisenstein series, from which
//!   balanced multiple q-zeta values are read off.
//! * [`analysis`] — verification suites (product, tau invariance, derivation,
//!   bimould symmetries), exact linear relation finding, and formal limits.

pub mod analysis;
pub mod bimould;
pub mod eisenstein;
pub mod error;
pub mod qseries;
pub mod quasishuffle;
pub mod rational;
pub mod regmaps;
pub mod words;

pub use error::CoreError;
pub use rational::Q;
pub use words::{Alphabet, Letter, LinComb, TensorComb, Word};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
