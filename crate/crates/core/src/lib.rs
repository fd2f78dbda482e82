//! Variance statistics of additive functions on Ewens-distributed random
//! permutations.
//!
//! The library computes the closed-form mean and variance of linear
//! statistics h(σ) = Σ aⱼkⱼ(σ) under the Ewens measure, builds the
//! quadratic-form matrix Mₙ whose spectrum μᵣ = (−1)ʳ(r−1)!/(θ)ᵣ governs the
//! sharp variance bound D ≤ ((θ+2)/(θ+1))·θB, and verifies the spectrum, the
//! discrete-Hahn eigenbasis and the supporting hypergeometric identities in
//! exact rational arithmetic. Exhaustive enumeration and seeded Monte Carlo
//! provide independent ground truth.

pub mod error;
pub mod esf;
pub mod export;
pub mod hahn;
pub mod mat;
pub mod oracle;
pub mod scalar;
pub mod spectral;

pub use error::Error;
pub use num_rational::BigRational;
pub use scalar::{Scalar, ThetaParam, ThetaTable};
