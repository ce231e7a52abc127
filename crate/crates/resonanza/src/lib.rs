//! Exact symbolic and numeric workbench for integrable sets of fully
//! resonant nonlinear oscillators: construction of the classical families,
//! machine verification of involution/closure/independence claims, Weyl
//! quantization with an explicit Moyal-bracket audit, and joint spectral
//! lattices on truncated Fock spaces.

pub mod coeff;
pub mod eqfreq;
pub mod error;
pub mod freq;
pub mod linalg;
pub mod n3;
pub mod poly;
pub mod rank;
pub mod sets;
pub mod symplectic;
pub mod fock;
pub mod op;
pub mod spectrum;
pub mod verify;
pub mod weyl;

pub use coeff::{ExactComplex, QuadRat, Rat};
pub use error::Error;
pub use freq::FrequencyVector;
pub use poly::{Monomial, Polynomial, RationalPoint, Var};
pub use rank::jacobian_rank;
pub use sets::IntegrableSet;
