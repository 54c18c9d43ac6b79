//! Normalized Sorkin parameter κ for triple-slit interference, from a closed
//! form, from far-field path-integral quadrature and from exact-propagator
//! Riemann sums.

pub mod analytic;
pub mod error;
pub mod fraunhofer;
pub mod fresnel;
pub mod geometry;
pub mod grid;
pub mod profile;
pub mod quadrature;
pub mod slits;

pub use error::{Error, Result};
pub use fraunhofer::{EpsilonMode, FraunhoferContext, PathSpec};
pub use fresnel::{AperturePoint, FresnelModel, RiemannGrid};
pub use geometry::{rescale_to_dimensionless, Geometry, Preset, ScaledGeometry, Warning};
pub use grid::{DetectorGrid, QuadratureSpec};
pub use profile::{Abscissa, KappaProfile, Method};
pub use slits::{sorkin_combination, PathAmplitudes, Slit, SlitSet};
