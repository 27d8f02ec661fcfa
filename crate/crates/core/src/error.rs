use thiserror::Error;

use crate::parser::ParseDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("axiom `{axiom}` violated: {witness}")]
    AxiomViolation { axiom: String, witness: String },
    #[error("element does not belong to model `{0}`")]
    ModelMismatch(String),
    #[error("product {left} ∧ {right} leaves the span of the basis")]
    CapExceeded { left: String, right: String },
    #[error("unknown generator index {0}")]
    UnknownGenerator(usize),
    #[error("vector part must be a constant combination of action generators")]
    NonConstantCoefficient,
    #[error("action is not pure for generator `{0}`")]
    NotPure(String),
    #[error("action is not isotropic: <δ_{i}, δ_{j}> = {value}")]
    NotIsotropic { i: usize, j: usize, value: String },
    #[error("function f_{0} is not invariant")]
    NonInvariantFunction(usize),
    #[error("transformation data is not invariant: {0}")]
    NonInvariantData(String),
    #[error("differential does not square to zero: {0}")]
    DSquaredNonzero(String),
    #[error("differential leaves the invariant subspace: {0}")]
    NotInvariantClosed(String),
    #[error("boundary vector {0} is not contained in the cycle space")]
    NotContained(usize),
    #[error("operation supports a single equivariant variable, got {0}")]
    MultiVariableUnsupported(usize),
    #[error("generator lists of source and target differ: {0}")]
    GeneratorMismatch(String),
    #[error("morphism is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("Euler class is not invertible after inverting u: {0}")]
    EulerNotInvertible(String),
    #[error("generator differential is inconsistent: {0}")]
    InconsistentDifferential(String),
    #[error("{}", format_diagnostics(.0))]
    Parse(Vec<ParseDiagnostic>),
    #[error("{0}")]
    Io(String),
}

fn format_diagnostics(diags: &[ParseDiagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}
