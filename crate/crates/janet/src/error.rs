use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum JanetError {
    /// A parameter specialization hit a pole of a scalar (denominator
    /// vanished); the requested point lies outside the generic locus.
    #[error("specialization hits a denominator zero")]
    SpecializationPole,

    /// Operator shapes or labels are incompatible for the requested
    /// operation (composition, stacking, comparison).
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A coordinate change matrix is not invertible.
    #[error("coordinate change matrix is singular")]
    SingularChange,

    /// An iterative completion exceeded its step cap without stabilizing.
    #[error("{what} did not stabilize within {cap} steps")]
    CapExceeded { what: &'static str, cap: usize },

    /// Name not present in the operator registry.
    #[error("unknown catalog entry: {0}")]
    UnknownCatalogEntry(String),

    /// Registry entry invoked with a wrong argument list.
    #[error("bad catalog arguments for {name}: {reason}")]
    BadCatalogArguments { name: String, reason: String },

    /// Input violates a precondition of the requested analysis.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
