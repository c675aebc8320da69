//! Numerical harness for spectral cluster estimates and the cubic nonlinear
//! Schrödinger equation on the round sphere, synthetic Zoll spectra and the
//! flat torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`harmonic_basis`]: Gauss–Legendre grids, spherical-harmonic and torus
//!   Fourier transforms, exact quadrature of band-limited products.
//! * [`spectral_ops`]: spectrum models, degree projectors, spectral windows
//!   and Sobolev norms.
//! * [`bilinear_estimates`]: product norms, the alternating maximisation of
//!   bilinear Rayleigh quotients, L^p ratios and power-law fits.
//! * [`arithmetic`]: exact lattice counts behind the time-frequency
//!   resonance arguments.
//! * [`evolution`]: linear propagators, split-step NLS, Picard iteration,
//!   bilinear Strichartz functionals and the flow-map stability probe.
//! * [`bourgain`]: discretised X^{s,b} norms of time-sampled trajectories.

pub mod arithmetic;
pub mod bilinear_estimates;
pub mod bourgain;
pub mod error;
pub mod evolution;
pub mod harmonic_basis;
pub mod spectral_ops;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) mod rng {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Deterministic stream for a (seed, stream) pair.
    pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }
}
