//! Bilinear product norms of spectrally localized fields, their extremal constants,
//! L^p growth ratios and power-law fits.

mod engine;
mod extremal;
mod fit;
mod power;
mod sogge;

pub use engine::{Coupling, ExtremalOptions, Extremum, GroupedBilinear, Maximum};
pub use extremal::{bilinear_quotient, extremal_bilinear_constant, window_center, BilinearScanResult};
pub use fit::{fit_growth_exponent, PowerFit};
pub use power::{dot, norm, power_iteration, DenseHermitian, HermitianOperator, PowerOptions, PowerResult};
pub use sogge::{
    product_l2, quadruple_orthogonality_check, sogge_exponent, sogge_ratio, SoggeExponentTable,
};

/// CSV header of extremal-constant scans.
pub const SCAN_CSV_HEADER: &str = "lambda,mu,constant,iters,residual,restarts_used";

impl BilinearScanResult {
    /// One CSV row matching [`SCAN_CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{}",
            self.lambda, self.mu, self.constant, self.iterations, self.residual, self.restarts_used
        )
    }
}
