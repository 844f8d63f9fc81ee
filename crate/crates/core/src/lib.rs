//! Numerical toolkit for the lacunary Orlicz difference sequence spaces
//! `c₀^λ(M, Δ, s, θ)`, `c^λ(M, Δ, s, θ)` and `ℓ∞^λ(M, Δ, s, θ)`.
//!
//! Modules, bottom-up:
//!
//! - [`orlicz`]: Orlicz functions and their numerical validation.
//! - [`lacunary`]: lacunary sequences and block decompositions.
//! - [`lambda`]: the `Λ̄` triangle, its inverse and the dual transform.
//! - [`matrix`]: row-finite matrices, associated matrices, composition
//!   with triangles, column limits.
//! - [`norms`]: block modulars, Luxemburg-type norms, dual norms.
//! - [`chi`]: operator norms, Hausdorff measure of noncompactness
//!   estimates and compactness verdicts.
//! - [`oracle`]: brute-force checks of the underlying identities.
//!
//! All infinite objects are handled on explicit finite horizons; nothing
//! here picks a truncation silently.

pub mod bisect;
pub mod chi;
pub mod error;
pub mod lacunary;
pub mod lambda;
pub mod matrix;
pub mod norms;
pub mod oracle;
pub mod orlicz;

pub use error::{Error, Result};
pub use lacunary::LacunarySequence;
pub use lambda::LambdaSystem;
pub use matrix::{AssociatedMatrix, MatrixSpec};
pub use norms::{NormReport, SpaceSpec, SpaceTag};
pub use orlicz::OrliczFunction;
