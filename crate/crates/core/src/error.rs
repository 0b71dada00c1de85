use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("edge ({u}, {v}) has non-positive or non-finite length {length}")]
    NonPositiveLength { u: usize, v: usize, length: f64 },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("subdivision resolution must be positive, got {0}")]
    NonPositiveResolution(f64),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sampler budget is zero")]
    SamplerBudgetZero,
    #[error("profile is empty")]
    EmptyProfile,
    #[error("need at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("argument {value} outside domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("vertex {z} is not on the canonical geodesic [{x}, {y}]")]
    ZNotOnGeodesic { x: usize, y: usize, z: usize },
    #[error("endpoint lies inside the open ball of radius {t} around {z}")]
    EndpointInsideBall { z: usize, t: f64 },
    #[error("no admissible (x, y, z) triple for t = {0}")]
    NoAdmissibleTriple(f64),
    #[error("basepoint {0} is not a vertex of the base graph")]
    BadBasepoint(usize),
    #[error("tower needs at least one level")]
    ZeroLevels,
    #[error("scale {scale} exceeds graph diameter {diameter}")]
    ScaleExceedsDiameter { scale: f64, diameter: f64 },
    #[error("graph is not a tree")]
    NotATree,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Parse failures map to exit code 3, every other failure to 2.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Parse { .. } => 3,
            _ => 2,
        }
    }
}
