use thiserror::Error;

/// Errors produced by the modeling, synthesis and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula being evaluated.
    #[error("{quantity} = {value} is outside its domain: {bound}")]
    Domain {
        quantity: &'static str,
        value: f64,
        bound: String,
    },

    /// The requested curvature cannot be produced at this radius.
    #[error(
        "target curvature {target} 1/m is not attainable at R0 = {r0} m; attainable range is (0, {supremum}) 1/m"
    )]
    Infeasible {
        target: f64,
        r0: f64,
        supremum: f64,
    },

    /// An iterative routine failed to meet its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown genus `{given}`; valid tags are: {valid}")]
    UnknownGenus { given: String, valid: String },

    /// Point correspondences do not determine a unique projective map.
    #[error("degenerate correspondences: {0}")]
    RankDeficient(String),

    #[error("point {index} maps onto the line at infinity (w = {w:e})")]
    PointAtInfinity { index: usize, w: f64 },

    #[error("centerline has zero total length")]
    ZeroLength,

    #[error("duplicate vertex in curvature triangle centred at index {index}")]
    DuplicateVertex { index: usize },

    #[error("profile grids or masks do not match: {0}")]
    MismatchedGrid(String),

    #[error("region `{0}` contains no valid grid points")]
    EmptyRegion(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
