//! Spectrum models, projectors, spectral windows and Sobolev norms.

mod ops;
mod spectrum;

pub use ops::{
    apply_window, bump, japanese, project_degree, sobolev_norm, sobolev_norm_with, weyl_count, ModalField,
    SpectralWindow,
};
pub use spectrum::{make_zoll_spectrum, round_spectrum, SpectrumKind, SpectrumModel, ZollParams};
