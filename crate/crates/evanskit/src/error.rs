use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not skew-symmetric (defect {0:e})")]
    NonSkew(f64),
    #[error("matrix is not symmetric (defect {0:e})")]
    NonSymmetric(f64),
    #[error("expected a one-dimensional kernel, found {0} small singular values")]
    RankError(usize),
    #[error("root iteration did not converge after {0} sweeps")]
    NoConverge(usize),
    #[error("J(c) is singular at c = {c} (|det| = {det:e})")]
    SingularJc { c: f64, det: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("speed c = {0} outside the wave family's window")]
    SpeedOutOfWindow(f64),
    #[error("two-two splitting fails at lambda = {re}+{im}i")]
    SplittingViolated { re: f64, im: f64 },
    #[error("spatial exponents nearly coincide (spacing {0:e})")]
    DegenerateMu(f64),
    #[error("adjoint normalization failed (pairing {0:e})")]
    NormalizationFail(f64),
    #[error("step size fell below minimum at xi = {0}")]
    StepFail(f64),
    #[error("rescaled solution overflowed at xi = {0}")]
    Overflow(f64),
    #[error("finite-difference step too large (fit residual {0:e})")]
    StepTooLarge(f64),
    #[error("contour meets the continuous spectrum or a zero near lambda = {re}+{im}i")]
    ContourOnSpectrum { re: f64, im: f64 },
    #[error("accumulated phase {0} is not a multiple of 2 pi")]
    NonClosure(f64),
    #[error("estimators disagree: {0}")]
    Inconsistent(String),
    #[error("degenerate quantity: {0}")]
    Degenerate(String),
    #[error("tail fit drifts by {0:e}")]
    NoPlateau(f64),
    #[error("homoclinic not transversal (|Pi| = {0:e})")]
    NonTransverse(f64),
    #[error("orientation wedge vanishes")]
    OrientationFail,
    #[error("expected a simple zero eigenvalue, found {0}")]
    KernelDim(usize),
    #[error("model lacks wave family")]
    NoWave,
}

impl Error {
    /// Hypothesis failures as opposed to numerical breakdowns.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::SingularJc { .. }
                | Error::SplittingViolated { .. }
                | Error::DegenerateMu(_)
                | Error::NonTransverse(_)
                | Error::Degenerate(_)
                | Error::KernelDim(_)
                | Error::OrientationFail
                | Error::SpeedOutOfWindow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
