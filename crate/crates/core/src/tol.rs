use crate::error::{Error, Result};

/// Numerical thresholds used throughout the pipeline.
///
/// `rank_tol` drives every span/rank decision (relative singular-value
/// cutoff); `residual_tol` bounds matrix-equation residuals in Frobenius
/// norm. Both are overridable from the CLI.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

/// Absolute clustering tolerance for eigenvalue-pattern refinement.
/// Looser than `rank_tol` because eigenvalues amplify perturbations.
pub const EIG_CLUSTER_TOL: f64 = 1e-7;

/// Default seed for the (few) seeded randomized searches.
pub const DEFAULT_SEED: u64 = 0x51EE7;

impl Tolerance {
    pub fn new(rank_tol: f64, residual_tol: f64) -> Result<Self> {
        if !(rank_tol > 0.0) || !(residual_tol > 0.0) {
            return Err(Error::InvalidInput(
                "tolerances must be strictly positive".into(),
            ));
        }
        if rank_tol > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "rank_tol {rank_tol:e} exceeds the 1e-6 ceiling"
            )));
        }
        Ok(Self {
            rank_tol,
            residual_tol,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            residual_tol: 1e-9,
        }
    }
}
