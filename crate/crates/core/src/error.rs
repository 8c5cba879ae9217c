use alloc::string::String;
use core::fmt;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share an index set do not.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// An argument is outside the documented domain.
    InvalidArgument(String),
    /// Odd Chebyshev degree where only even degrees have radial values.
    OddDegree(usize),
    /// Kernel degree exceeds the requested depth.
    DegreeExceedsDepth {
        degree: usize,
        depth: usize,
    },
    /// Kernel and graph were built for different `p`.
    PrimeMismatch {
        kernel: u64,
        graph: u64,
    },
    /// `N` too small for the principal construction.
    InsufficientDepth {
        depth: usize,
        min_depth: usize,
    },
    /// No admissible `q` in the Dirichlet window.
    DirichletWindowEmpty {
        best_fejer: f64,
        required: f64,
        lower: f64,
        upper: f64,
    },
    /// A synthesized kernel failed its own certificate.
    CertificateViolation(String),
    IrregularDegree {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    SelfLoop {
        vertex: usize,
    },
    DuplicateEdge {
        u: usize,
        v: usize,
    },
    VertexOutOfRange {
        vertex: usize,
        n_vertices: usize,
    },
    OddDegreeSum {
        degree: usize,
        n_vertices: usize,
    },
    RejectionBudgetExhausted {
        attempts: usize,
    },
    /// Full eigendecomposition requested above the dense cutoff.
    TooLargeForDense {
        n_vertices: usize,
        cutoff: usize,
    },
    /// An eigensolver result failed its residual or orthonormality check.
    EigenCheckFailed(String),
    /// The Lanczos iteration did not converge within its budget.
    NoConvergence {
        iterations: usize,
    },
}

impl Error {
    /// True when the failure is a legitimate "hypothesis not met" outcome
    /// rather than a usage or numerical error.
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            Error::InsufficientDepth { .. } | Error::DirichletWindowEmpty { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::OddDegree(n) => {
                write!(f, "radial propagation values exist only for even degree, got {n}")
            }
            Error::DegreeExceedsDepth { degree, depth } => {
                write!(f, "kernel degree {degree} exceeds depth {depth}")
            }
            Error::PrimeMismatch { kernel, graph } => {
                write!(f, "kernel built for p = {kernel} applied to graph with p = {graph}")
            }
            Error::InsufficientDepth { depth, min_depth } => {
                write!(f, "insufficient depth N = {depth}; need N >= {min_depth}")
            }
            Error::DirichletWindowEmpty { best_fejer, required, lower, upper } => write!(
                f,
                "Dirichlet window empty: no even q in ({lower}, {upper}] reaches Fejér value > {required} (best {best_fejer})"
            ),
            Error::CertificateViolation(msg) => write!(f, "certificate violation: {msg}"),
            Error::IrregularDegree { vertex, degree, expected } => {
                write!(f, "vertex {vertex} has degree {degree}, expected {expected}")
            }
            Error::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Error::DuplicateEdge { u, v } => write!(f, "duplicate edge {u}-{v}"),
            Error::VertexOutOfRange { vertex, n_vertices } => {
                write!(f, "vertex {vertex} out of range for {n_vertices} vertices")
            }
            Error::OddDegreeSum { degree, n_vertices } => write!(
                f,
                "no {degree}-regular graph on {n_vertices} vertices: degree sum is odd"
            ),
            Error::RejectionBudgetExhausted { attempts } => {
                write!(f, "pairing model failed to produce a simple graph in {attempts} attempts")
            }
            Error::TooLargeForDense { n_vertices, cutoff } => write!(
                f,
                "{n_vertices} vertices exceeds the dense eigensolver cutoff {cutoff}"
            ),
            Error::EigenCheckFailed(msg) => write!(f, "eigensolver check failed: {msg}"),
            Error::NoConvergence { iterations } => {
                write!(f, "Lanczos did not converge after {iterations} iterations")
            }
        }
    }
}

impl core::error::Error for Error {}
