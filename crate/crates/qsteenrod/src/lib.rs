//! Exact mod-p quantum Steenrod structure constants for the local P¹ Calabi–Yau
//! threefold and for T*P¹, computed by equivariant fixed-point localization, together
//! with the identities they satisfy: covariant constancy, the rank-2 module
//! structure of flat endomorphisms, and annihilation of arithmetic flat sections.

pub mod error;
pub mod exact_arith;
pub mod localization_engine;
pub mod poly_series;
pub mod quantum_connection;
pub mod flat_sections;

pub use error::{Error, Result};
pub use exact_arith::{FieldElement, PrimeModulus, Scalar};
pub use num_rational::BigRational;
pub use poly_series::{Basis, Endo2, GradedSeries, Monomial, Truncation};

/// Series over F_p.
pub type ModPSeries = GradedSeries<FieldElement>;
/// Series over Q.
pub type RationalSeries = GradedSeries<BigRational>;
/// 2×2 endomorphism over F_p.
pub type ModPEndo = Endo2<FieldElement>;
/// 2×2 endomorphism over Q.
pub type RationalEndo = Endo2<BigRational>;
