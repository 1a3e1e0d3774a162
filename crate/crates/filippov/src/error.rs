use thiserror::Error;

use crate::system::Side;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlpError {
    #[error("switching-line normal c is (0,0)")]
    ZeroNormal,
    #[error("degenerate {0:?} field: det(A) = 0")]
    DegenerateField(Side),
    #[error("y = {0} is not in a sliding region")]
    NotSlidingRegion(f64),
    #[error("no admissible focus on either side")]
    NoAdmissibleFocus,
    #[error("a12+ b1- equals a12- b1+; the canonical form needs them distinct")]
    CrossProductsEqual,
    #[error("eta is zero")]
    EtaZero,
    #[error("shear requires delta = 1")]
    DeltaNotOne,
    #[error("orbit does not return to the switching line")]
    NoReturn,
    #[error("orbit from the axis does not enter the {0:?} half-plane")]
    WrongSide(Side),
    #[error("degenerate tangency at y = {0}")]
    DegenerateTangency(f64),
    #[error("half-map condition violated: {0}")]
    ConditionViolated(String),
    #[error("parameter {0} outside its admissible range")]
    OutOfRange(f64),
    #[error("y = {0} outside the half-map domain")]
    DomainError(f64),
    #[error("no window found: {0}")]
    WindowNotFound(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("malformed spec: {0}")]
    MalformedSpec(String),
}

impl FlpError {
    /// Malformed input (as opposed to a failed analysis).
    pub fn is_input_error(&self) -> bool {
        matches!(self, FlpError::ZeroNormal | FlpError::MalformedSpec(_))
    }
}

pub type Result<T> = std::result::Result<T, FlpError>;
