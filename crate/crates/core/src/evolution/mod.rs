//! Linear and cubic Schrödinger evolution of spectral fields, Duhamel iteration and
//! bilinear Strichartz functionals.

mod io;
mod nls;
mod picard;
mod probe;
mod propagate;
mod scan;
mod strichartz;
mod torus_strichartz;

pub use io::{read_trajectory, snapshot_from_text, snapshot_to_text, write_trajectory, TrajectoryDump, TRAJECTORY_CSV_HEADER};
pub use nls::{nls_evolve, ConservationReport, NlsOptions, NlsSolver, NonlinearStep, BLOWUP_MASS_DRIFT};
pub use picard::{picard_solve, PicardOptions, PicardResult};
pub use probe::{flow_stability_probe, ProbeOptions, StabilityProbe};
pub use propagate::{linear_propagate, mode_phases, propagate_state, EvolutionState};
pub use scan::{strichartz_exponent_scan, strichartz_extremal, StrichartzGeometry, StrichartzScan, StrichartzScanPoint};
pub use strichartz::{
    bilinear_strichartz, bilinear_strichartz_torus, strichartz_parseval_sphere, StrichartzMethod, StrichartzSample,
    TIME_RESOLUTION_TOL,
};
pub use torus_strichartz::{torus_shell, TorusExtremum, TorusStrichartz};
