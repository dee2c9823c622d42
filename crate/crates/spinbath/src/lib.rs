//! Decoherence of a central qubit coupled to a bath of `N` spin-`S` particles.
//!
//! The crate covers two coupling geometries and their supporting machinery:
//!
//! * [`xy_model`] — Heisenberg-XY coupling: reduced-density-matrix evolution by
//!   quadrature over the large-`N` distribution of the total angular momentum,
//!   asymptotic coherence, and the decoherence time.
//! * [`ising_mf`] / [`ising_exact`] — transverse-field Ising bath: mean-field
//!   thermodynamics and closed-form coherence for S ∈ {1, 3/2, 2}, plus the
//!   exact `w = 0` solution through angular-momentum degeneracy sums.
//! * [`degeneracy`] / [`distribution`] — exact multiplicities ν(j, N; S) with
//!   arbitrary-precision integers, and the exact/Gaussian law of `j`.
//! * [`hp_boson`] — the large-`S` bosonic (Jaynes–Cummings) limit.
//! * [`spin_algebra`] — dense spin matrices and small-system brute-force
//!   oracles that everything else is validated against.
//!
//! The [`cli`] module exposes the same functionality as subcommands producing
//! deterministic CSV/JSON/SVG output; the `spinbath` binary is a thin wrapper
//! around it.

pub mod cli;
pub mod degeneracy;
pub mod distribution;
mod error;
pub mod half;
pub mod hp_boson;
pub mod ising_exact;
pub mod ising_mf;
pub(crate) mod matrix;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod spin_algebra;
pub mod xy_model;

pub use error::Error;
pub use half::HalfInteger;
pub use series::CoherenceSeries;

pub type Result<T> = std::result::Result<T, Error>;
