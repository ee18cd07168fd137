use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown root system family `{0}`")]
    UnknownFamily(String),
    #[error("rank {rank} out of range for family {family}")]
    RankOutOfRange { family: String, rank: usize },
    #[error("vector is not a root of the system")]
    NotARoot,
    #[error("Weyl group has more than {cap} elements")]
    WeylGroupTooLarge { cap: usize },
    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),
    #[error("invalid multiplicity: {0}")]
    InvalidMultiplicity(String),

    #[error("resonant spectral parameter at mu = {mu:?} (|(mu,mu)+2(mu,lambda)| = {size:e})")]
    ResonantParameter { mu: Vec<u32>, size: f64 },
    #[error("requested height {0} exceeds the table limit")]
    HeightOverflow(usize),
    #[error("point is not in the closed negative chamber")]
    OutsideNegativeChamber,
    #[error("series tail estimate {estimate:e} exceeds tolerance {tol:e} (heuristic geometric extrapolation)")]
    TailNotConverged { estimate: f64, tol: f64 },

    #[error("log-gamma pole at nonpositive integer {0}")]
    PoleAtNonpositiveInteger(f64),
    #[error("indeterminate c-function limit: {0}")]
    IndeterminateAfterLimit(String),
    #[error("c-function has a pole here ({poles} Gamma poles against {zeros} zeros)")]
    CFunctionPole { poles: usize, zeros: usize },
    #[error("multiplicity is not regular (c~(rho(k)) = 0)")]
    NotRegular,
    #[error("Sigma^pi is not contained in Sigma union 2 Sigma")]
    MC1Violated,
    #[error("regularity relation violated at root {0:?}")]
    RegularityViolated(Vec<String>),

    #[error("connection formula loses all precision here (estimated relative error {estimate:e})")]
    PrecisionLoss { estimate: f64 },
    #[error("point within {margin} of a wall or the origin (min |alpha(H)| = {dist:e})")]
    TooCloseToWallOrOrigin { dist: f64, margin: f64 },
    #[error("finite-difference step {h} too large for wall distance {dist}")]
    StepTooLarge { h: f64, dist: f64 },

    #[error("degree {deg} exceeds cap {cap}")]
    DegreeCapExceeded { deg: usize, cap: usize },

    #[error("unknown catalog family `{0}`")]
    UnknownCatalogFamily(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("no valid matched pair for this entry")]
    NoMatchedPair,

    #[error("inversion requires k >= 0 on every orbit; orbit `{0}` is negative (no inversion theorem available for this case)")]
    NonnegativityViolated(String),
    #[error("transform error: {0}")]
    Transform(String),
}

pub type Result<T> = std::result::Result<T, Error>;
