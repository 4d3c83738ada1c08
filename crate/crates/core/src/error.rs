use thiserror::Error;

use crate::game::MAX_PLAYERS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("table has {got} entries, expected 2^{n} = {expected}")]
    LengthMismatch { n: usize, expected: usize, got: usize },
    #[error("the empty coalition must have worth 0, got {0}")]
    NonzeroEmptyCoalition(String),
    #[error("{0} players exceeds the dense-table limit of {MAX_PLAYERS}")]
    SizeLimitExceeded(usize),
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("coalitions overlap on players {0:?}")]
    OverlappingArguments(Vec<usize>),
    #[error("cannot restrict a game to the empty coalition")]
    EmptyRestriction,
    #[error("player {player} is outside a universe of {n} players")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("coalition over {got} players used with a {expected}-player game")]
    UniverseMismatch { expected: usize, got: usize },
    #[error("boycott requires two distinct players, got {0} twice")]
    SamePlayer(usize),
    #[error("instance with {n} players exceeds the enumeration limit of {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("characteristic value magnitude exceeds the supported range")]
    Overflow,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
