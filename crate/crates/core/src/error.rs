use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    Cycle(String, String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("element `{0}` declared twice")]
    DuplicateElement(String),

    #[error("{what} would reach {reached} (limit {limit})")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        reached: usize,
    },

    #[error("stage {stage} of the approximation chain is too large: {detail}")]
    StageLimit { stage: usize, detail: String },

    #[error("map is not order-preserving: `{0}` <= `{1}` but images are not ordered")]
    NotMonotone(String, String),

    #[error("map is invalid: {0}")]
    InvalidMap(String),

    #[error("relation is not transitive: `{0}` <= `{1}` <= `{2}` but not `{0}` <= `{2}`")]
    NotTransitive(String, String, String),

    #[error("relation is not reflexive at `{0}`")]
    NotReflexive(String),

    #[error("wrong extension kind: {0}")]
    ExtensionKind(String),

    #[error("extensions do not share a base poset")]
    BaseMismatch,

    #[error("maps disagree on the base element `{0}`")]
    BaseDisagreement(String),

    #[error("side condition violated: pi_Y({y}) <= pi_X({x}) but g({y}) is not below f({x})")]
    SideConditionViolated { x: String, y: String },

    #[error("hypothesis violated in component {component}: {condition}")]
    HypothesisViolated { component: usize, condition: String },

    #[error("collection is not standard: missing principal set of `{0}`")]
    NotStandard(String),

    #[error("invalid specification: {0}")]
    InvalidSpecification(String),

    #[error("cardinal {0} is not supported")]
    UnsupportedCardinal(String),

    #[error("map does not have enough meets: undefined at `{0}`")]
    NotEnoughMeets(String),

    #[error("map does not have enough joins: undefined at `{0}`")]
    NotEnoughJoins(String),

    #[error("composition law violated at ({0}, {1}, {2})")]
    CompositionLawViolated(usize, usize, usize),

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("operator at {0} needs at least two arguments")]
    Arity(usize),

    #[error("generator `{0}` is not bound")]
    UnboundGenerator(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// Stable machine-readable code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Cycle(..) => "CycleError",
            Error::UnknownElement(_) => "UnknownElement",
            Error::DuplicateElement(_) => "DuplicateElement",
            Error::SizeLimit { .. } | Error::StageLimit { .. } => "SizeLimit",
            Error::NotMonotone(..) => "NotMonotone",
            Error::InvalidMap(_) => "InvalidMap",
            Error::NotTransitive(..) => "NotTransitive",
            Error::NotReflexive(_) => "NotReflexive",
            Error::ExtensionKind(_) => "ExtensionKindError",
            Error::BaseMismatch => "BaseMismatch",
            Error::BaseDisagreement(_) => "BaseMismatch",
            Error::SideConditionViolated { .. } => "SideConditionViolated",
            Error::HypothesisViolated { .. } => "HypothesisViolated",
            Error::NotStandard(_) => "NotStandard",
            Error::InvalidSpecification(_) => "InvalidSpecification",
            Error::UnsupportedCardinal(_) => "UnsupportedCardinal",
            Error::NotEnoughMeets(_) => "NotEnoughMeets",
            Error::NotEnoughJoins(_) => "NotEnoughJoins",
            Error::CompositionLawViolated(..) => "CompositionLawViolated",
            Error::Syntax { .. } => "SyntaxError",
            Error::Arity(_) => "ArityError",
            Error::UnboundGenerator(_) => "UnboundGenerator",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::Parse { .. } => "ParseError",
        }
    }

    pub(crate) fn size(what: &'static str, limit: usize, reached: usize) -> Self {
        Error::SizeLimit {
            what,
            limit,
            reached,
        }
    }
}
