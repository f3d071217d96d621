// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("agent {0} has a self-loop")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) has zero weight")]
    ZeroWeight(usize, usize),
    #[error("edge ({0}, {1}) has a non-finite weight")]
    NonFiniteWeight(usize, usize),
    #[error("agent id {id} is out of range for a network of {n} agents")]
    BadId { id: usize, n: usize },
    #[error("member set does not induce a strongly connected subgraph")]
    NotStronglyConnected,
    #[error("network is not weakly connected")]
    NotWeaklyConnected,
    #[error("parameter constraint violated for agent {agent}: {reason}")]
    ParamConstraintViolated { agent: usize, reason: String },
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("spectral radius estimate did not settle (last estimate {estimate})")]
    NonConvergedEstimate { estimate: f64 },
    #[error("iteration cap of {max_iters} reached (residual {residual:e})")]
    IterationCapReached { max_iters: usize, residual: f64 },
    #[error("unit eigenvalue of sink {sink} is not simple")]
    DegenerateEigenspace { sink: usize },
    #[error("sink {sink} contains a stubborn agent")]
    StubbornSinkRejected { sink: usize },
    #[error("sink {sink} does not contribute a unit eigenvalue")]
    NotInfluenceFree { sink: usize },
    #[error("linear system is singular in {context}")]
    SingularSystem { context: &'static str },
    #[error("no spectrum supplied for sink {0}")]
    MissingSpectrum(usize),
    #[error("agent {0} is not a non-source node of the graph")]
    NotANode(usize),
    #[error("no probe attached to agent {0}")]
    MissingProbe(usize),
    #[error("node {0} is not a source")]
    NotASource(usize),
    #[error("enumeration exceeded the complexity cap of {limit}")]
    ComplexityCapExceeded { limit: usize },
    #[error("perturbation delta must be nonzero")]
    ZeroDelta,
    #[error("edge ({0}, {1}) does not exist")]
    NoSuchEdge(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
