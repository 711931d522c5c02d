use thiserror::Error;

/// Errors surfaced by the analysis and synthesis pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not skew-Hermitian (residual {residual:.3e})")]
    NotSkewHermitian { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("Lie closure exceeded max_dim = {max_dim} (dimension reached {reached}); tolerance pathology")]
    ClosureOverflow { max_dim: usize, reached: usize },

    #[error("iteration limit {max_iter} exceeded in {context}")]
    MaxIterExceeded { max_iter: usize, context: &'static str },

    #[error("input subspace is not abelian (max commutator residual {residual:.3e})")]
    NotAbelian { residual: f64 },

    #[error("per-sigma P spaces disagree (assumption A-b violation or tolerance pathology): {0}")]
    SimplicityMismatch(String),

    #[error("normalization relation A\u{2020}B + B\u{2020}A = \u{3b1}1 violated (residual {residual:.3e})")]
    RelatViolation { residual: f64 },

    #[error("rank anomaly in normal-space block structure: {0}")]
    RankAnomaly(String),

    #[error("invalid Cartan pair: {0}")]
    InvalidCartanPair(String),

    #[error("KAK factorization did not converge (best residual {best_residual:.3e}, tolerance {tol:.3e})")]
    KakNonConvergence { best_residual: f64, tol: f64 },

    #[error("steering factor membership certificate failed: {0}")]
    CertificateFailure(String),

    #[error("abelian span is not projection-generated (dimension {span_dim} vs {block_count} blocks)")]
    ProjectionSpanMismatch { span_dim: usize, block_count: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
