//! Coulomb gases and the exactly solvable planar ensembles.
//!
//! The crate samples the Boltzmann–Gibbs law of `n` charged particles in
//! R^d (Metropolis and Metropolis-adjusted Langevin chains), the
//! random-matrix models whose spectra realize two-dimensional gases
//! (Ginibre, spherical, truncated unitary, products), and evaluates the
//! closed-form laws those samples must obey: equilibrium measures,
//! Gamma/Gaussian laws of linear statistics, determinantal correlation
//! functions and Gumbel edge fluctuations.

pub mod detkernel;
pub mod equilibrium;
pub mod error;
pub mod exactlaws;
pub mod kernel;
pub mod linalg;
pub mod quadrature;
pub mod rmt;
pub mod sampler;
pub mod special;
pub mod stats;

pub use equilibrium::{equilibrium_for, EquilibriumLabel, EquilibriumMeasure};
pub use error::{Error, Result};
pub use exactlaws::DistributionSpec;
pub use kernel::{Configuration, Dimension, GasParameters, Point, Potential, RadialProfile};
pub use num_complex::Complex64;
pub use rmt::SpectrumSample;
pub use sampler::{ChainOutput, ChainState, SamplerConfig, Scheme};
pub use stats::{GofReport, GofTest, TestFunction};

/// Deterministic RNG used throughout: ChaCha8 seeded from a `u64`.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Seeded RNG for stream `seed`.
pub fn rng_from_seed(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
