//! Time-sampled trajectories and discretized Bourgain `X^{s,b}` norms.

mod sampled;
mod suite;
mod xsb;

pub use sampled::{dft_frequency, smooth_step, time_window, TimeSampledField, TimeWindow};
pub use suite::{
    embedding_suite, equivalence_suite, free_mode_norms, random_trajectory, EmbeddingReport, EquivalenceReport, SuiteGrid,
};
pub use xsb::{
    l2t_l2x_norm, l4_embedding_constant, l4t_l2x_norm, linf_embedding_constant, linf_t_l2x_norm, norm_equivalence_ratio, weight_ratio_bound, xsb_norm, XsbNorm,
    NYQUIST_TOL,
};
