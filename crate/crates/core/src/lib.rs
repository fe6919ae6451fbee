//! Fourier analysis on compact groups and a numerical test of
//! precompactness for families in `L^p(G)`.

pub mod audit;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod fourier;
pub mod group;
pub mod io;
pub mod norms;
pub mod pego;
pub mod quadrature;
pub mod repr;

pub use error::{Error, Result};
pub use fourier::{FourierCoefficients, Harmonics, SampledFunction};
pub use group::{GroupDescriptor, GroupPoint, NeighborhoodSpec, Quaternion};
pub use quadrature::{haar_quadrature, Exactness, QuadratureRule};
pub use repr::{CMatrix, DualSubset, Frame, IrrepLabel};
