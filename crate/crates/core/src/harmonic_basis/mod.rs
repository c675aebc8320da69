//! Quadrature grids and spectral transforms on the sphere and the flat torus.

pub mod grid;
pub mod legendre;
pub mod sphere;
pub mod torus;

pub use grid::{build_sphere_grid, gauss_legendre, SphereGrid, DEFAULT_MAX_GRID_POINTS};
pub use legendre::{normalized_legendre, LegendreTable};
pub use sphere::{
    equatorial_mass_fraction, integrate_product, make_highest_weight, sh_analyze, sh_index, sh_len,
    sh_synthesize, spherical_harmonic, GridFunction, HarmonicField, Quadrature, SphereTransform,
};
pub use torus::{torus_analyze, torus_synthesize, TorusField, TorusTransform};
