use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("not a bijection: {0}")]
    NotBijective(String),
    #[error("invalid operation table: {0}")]
    InvalidTable(String),
    #[error("operands live on different universes")]
    UniverseMismatch,
    #[error("subset is not preserved: op{triple:?} = {value} lies outside")]
    SubsetNotPreserved { triple: [u8; 3], value: u8 },
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("closure exceeded the bound of {bound} members (reached {partial})")]
    ClosureBoundExceeded { bound: usize, partial: usize },
    #[error("operation is not a majority operation")]
    NotMajority,
    #[error("minimality is undefined on a one-element universe")]
    TrivialUniverse,
    #[error("member {index} does not preserve the subset: {source}")]
    MemberViolatesSubset { index: usize, source: Box<Error> },
    #[error("restriction map does not respect composition at outer {outer}, inner {inner:?}")]
    NotHomomorphic { outer: usize, inner: [usize; 3] },
    #[error("internal consistency violation: {0}")]
    Consistency(String),
    #[error("term syntax error at byte {pos}: {msg}")]
    TermSyntax { pos: usize, msg: String },
    #[error("cyclic shift set exceeds the budget of {budget} terms (reached {partial})")]
    ShiftBudgetExceeded { budget: usize, partial: usize },
    #[error("term evaluates to a projection over the left-projection majority algebra")]
    ProjectionTerm,
    #[error("operation is not a one-point star extension: {0}")]
    NotStarExtension(String),
    #[error("candidate index {index} out of range (count {count})")]
    IndexOutOfRange { index: String, count: String },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint rejected at offset {offset}: {msg}")]
    CorruptCheckpoint { offset: usize, msg: String },
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("fixture missing: {0}")]
    FixtureMissing(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
