use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("ambient group for q = {q}, degree {degree} exceeds the supported size")]
    AmbientTooLarge { q: u64, degree: u32 },
    #[error("{order} does not divide the ambient order {ambient}")]
    SubgroupOrder { order: u128, ambient: u128 },
    #[error("power {e} does not divide the ambient order {ambient}")]
    PowerNotDividing { e: u128, ambient: u128 },
    #[error("root of unity with exponent {exponent} is not in the subgroup of order {order}")]
    NotInSubgroup { exponent: u128, order: u128 },
    #[error("element of order {order} is not in the field of {p}^{k} elements")]
    NotInField { order: u128, p: u64, k: u32 },
    #[error("field of {p}^{k} elements is too large")]
    FieldTooLarge { p: u64, k: u32 },
    #[error("degree {small} does not divide degree {big}")]
    DegreeNotDividing { big: u32, small: u32 },
    #[error("malformed fraction {0:?}")]
    BadFraction(String),
    #[error("extension is not tame: p = {p} divides e = {e}")]
    NotTame { p: u64, e: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("z_EF exponent {0} is out of range for mu_(q^f - 1)")]
    BadZ(u128),
    #[error("ambient model too small: no e-th roots for {0}")]
    AmbientSizing(String),
    #[error("invalid inner form: {0}")]
    InvalidInnerForm(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("invalid jumps: {0}")]
    InvalidJumps(String),
    #[error("double coset {0} is not symmetric")]
    NotSymmetric(usize),
    #[error("t-factor pairing failure: {0}")]
    Pairing(String),
    #[error("t-factor paths disagree: {0}")]
    PathMismatch(String),
    #[error("configuration rejected: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
