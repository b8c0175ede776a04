//! Numerical laboratory for the sub-Laplacian on the three-dimensional
//! Heisenberg nilmanifold `M = Γ\H₁`.
//!
//! The crate builds the explicit eigenbasis of `L_M` (torus characters and
//! Berezin–Weil–Zak images of rescaled Hermite functions), evaluates both
//! sides of the exact L⁴ lattice-sum identity for single-sector packets,
//! reproduces Zygmund's L⁴ bound on `𝕋²` by exact arithmetic, and measures
//! the growth of the `L² → L⁴` norms of the spectral projectors.
//!
//! Modules, bottom-up:
//!
//! - [`special_fn`]: Hermite and Laguerre functions by scaled recurrences.
//! - [`group`]: the group law, reduction modulo `Γ`, Schrödinger representation.
//! - [`basis`]: eigenfunctions, eigenvalues, projectors, spectrum enumeration.
//! - [`quadrature`]: periodic trapezoid rules on `M` and `𝕋²`.
//! - [`key_identity`]: discrete STFT, lattice sums and the identity residual.
//! - [`zygmund`]: lattice points on circles and correlation sums.
//! - [`extremal`]: sharpness windows, upper-bound constants, extremizer search.

pub mod basis;
pub mod error;
pub mod extremal;
pub mod group;
pub mod key_identity;
pub mod lattice;
pub mod quadrature;
pub mod special_fn;
pub mod zygmund;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `2π`, used everywhere a phase is formed.
pub(crate) const TAU: f64 = 2.0 * core::f64::consts::PI;

/// A ChaCha stream determined by `(seed, stream)` alone, so parallel work
/// items draw reproducible numbers regardless of scheduling.
pub fn seeded_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
