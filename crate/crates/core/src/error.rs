use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input has a nonzero imaginary part: {0}")]
    NonRealInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("radius {0} out of range")]
    RadiusOutOfRange(String),
    #[error("point {0} outside the open unit polydisc")]
    OutsideDomain(String),
    #[error("λ·λ term produced; values must stay λ-linear")]
    LambdaSquare,
    #[error("λ enclosure level {0} unavailable")]
    LambdaPrecision(u32),
    #[error("polynomial has a non-rational coefficient")]
    NonRationalCoefficient,
    #[error("degenerate node set: {0}")]
    DegenerateNodes(String),
    #[error("hyperplane search exceeded its step cap for node {0}")]
    SearchCapExceeded(String),
    #[error("rounding target with nonzero imaginary part at exponent {0}")]
    NonRealTarget(String),
    #[error("target at the origin must be an integer, got {0}")]
    OriginTargetNotInteger(String),
    #[error("excluded points contain the gadget target {0}")]
    ExcludedContainsTarget(String),
    #[error("stage {stage} exhausted: {reason}")]
    StageExhausted { stage: usize, reason: String },
    #[error("the origin must belong to S")]
    OriginNotInS,
    #[error("the origin carries no exponent tuple")]
    ZeroPointNeedsNoTheta,
    #[error("zero denominator while steering node {0}")]
    DenominatorZero(usize),
    #[error("exact node mode needs every 1/rho_i to be an integer")]
    ExactModeRequired,
    #[error("exponent budget exceeded: |theta_{k}| would be {size}")]
    ExponentBudget { k: usize, size: String },
    #[error("certificate entry `{0}` fails")]
    CertificateFails(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("verification failed: {}", .0.join("; "))]
    VerificationFailure(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Format(_) => 2,
            Error::StageExhausted { .. } => 4,
            Error::CertificateFails(_) | Error::VerificationFailure(_) => 3,
            _ => 1,
        }
    }
}
