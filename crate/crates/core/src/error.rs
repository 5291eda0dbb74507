use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time {num}/{den}: numerator and denominator must be positive")]
    InvalidTime { num: u64, den: u64 },

    #[error("invalid tolerance: need 0 < eps_verify ({eps_verify}) <= eps_structural ({eps_structural}) < 1")]
    InvalidTolerance { eps_structural: f64, eps_verify: f64 },

    #[error("invalid system spec: {0}")]
    InvalidSpec(String),

    #[error("horizon {horizon} too small: need at least {needed}")]
    HorizonTooSmall { horizon: u64, needed: u64 },

    #[error("map beta({s},{t}) is not an isometry (residual {residual:e})")]
    NotIsometric { s: u64, t: u64, residual: f64 },

    #[error("map beta({s},{t}) is missing")]
    MissingMap { s: u64, t: u64 },

    #[error("associativity fails at ({r},{s},{t}) (residual {residual:e})")]
    NotAssociative { r: u64, s: u64, t: u64, residual: f64 },

    #[error("malformed system data: {0}")]
    Schema(String),

    #[error("inconsistent data: {relation} violated (residual {residual:e})")]
    Inconsistent { relation: String, residual: f64 },

    #[error("systems live on different grids")]
    GridMismatch,

    #[error("generator {generator} is not admissible for type {type_name}")]
    InadmissibleGenerator { generator: &'static str, type_name: String },

    #[error("family is not an automorphism (residual {residual:e})")]
    NotAnAutomorphism { residual: f64 },

    #[error("decomposition into generators failed (residual {residual:e})")]
    DecompositionFailed { residual: f64 },

    #[error("automorphism cannot be lifted: {0}")]
    NotLiftable(String),

    #[error("basis does not satisfy its declared condition (residual {residual:e})")]
    InvalidBasis { residual: f64 },

    #[error("type E2 has no refinement: no system restricts to it at m >= 2")]
    E2Refinement,

    #[error("operation needs a type E3 system, got {0}")]
    NotType3(String),

    #[error("off the grid: {0}")]
    OffGrid(String),

    #[error("system is not embeddable: {0}")]
    NotEmbeddable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidTime { .. } => "invalid_time",
            Error::InvalidTolerance { .. } => "invalid_tolerance",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::HorizonTooSmall { .. } => "horizon_too_small",
            Error::NotIsometric { .. } => "not_isometric",
            Error::MissingMap { .. } => "missing_map",
            Error::NotAssociative { .. } => "not_associative",
            Error::Schema(_) => "schema",
            Error::Inconsistent { .. } => "inconsistent",
            Error::GridMismatch => "grid_mismatch",
            Error::InadmissibleGenerator { .. } => "inadmissible_generator",
            Error::NotAnAutomorphism { .. } => "not_an_automorphism",
            Error::DecompositionFailed { .. } => "decomposition_failed",
            Error::NotLiftable(_) => "not_liftable",
            Error::InvalidBasis { .. } => "invalid_basis",
            Error::E2Refinement => "e2_refinement",
            Error::NotType3(_) => "not_type3",
            Error::OffGrid(_) => "off_grid",
            Error::NotEmbeddable(_) => "not_embeddable",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
