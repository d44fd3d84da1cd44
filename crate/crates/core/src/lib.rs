//! Multiscale toolkit for particles coupled by a dynamical spring network.
//!
//! * [`micro`]: overdamped Brownian particles whose springs are created and
//!   destroyed by Poisson clocks on a periodic rectangle.
//! * [`spectral`]: pseudospectral solver for the limiting aggregation-diffusion
//!   equation `f_t = Lap f + gamma div(f grad(V * f))`.
//! * [`dispersion`] and [`bifurcation`]: linear stability of the homogeneous
//!   state, critical coupling, and the cubic amplitude equations that decide
//!   between supercritical and subcritical onset.
//! * [`specfun`] and [`potential`]: Bessel/Struve functions and the Hookean
//!   potential with its Fourier representation.

pub mod error;
pub mod specfun;
pub mod potential;
pub mod dispersion;
pub mod spectral;
pub mod micro;
pub mod io;
pub mod bifurcation;

pub use error::{Error, Result};
pub use potential::{HookeParams, PeriodicDomain, RadialPotential};
pub use dispersion::DimensionlessParams;
