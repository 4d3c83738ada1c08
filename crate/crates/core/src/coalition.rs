use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::GameError;

/// A player index in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(pub usize);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for PlayerId {
    fn from(i: usize) -> Self {
        PlayerId(i)
    }
}

/// A subset of a universe of `n <= 32` players, bit `t` standing for player `t`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    bits: u32,
    universe: u8,
}

pub(crate) fn universe_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        debug_assert!(n <= 32);
        Self {
            bits: 0,
            universe: n as u8,
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            bits: universe_mask(n),
            universe: n as u8,
        }
    }

    pub fn from_bits(n: usize, bits: u32) -> Result<Self, GameError> {
        if n > 32 {
            return Err(GameError::SizeLimitExceeded(n));
        }
        if bits & !universe_mask(n) != 0 {
            let player = (bits & !universe_mask(n)).trailing_zeros() as usize;
            return Err(GameError::PlayerOutOfRange { player, n });
        }
        Ok(Self {
            bits,
            universe: n as u8,
        })
    }

    pub fn from_players<I>(n: usize, players: I) -> Result<Self, GameError>
    where
        I: IntoIterator,
        I::Item: Into<PlayerId>,
    {
        if n > 32 {
            return Err(GameError::SizeLimitExceeded(n));
        }
        let mut bits = 0u32;
        for p in players {
            let PlayerId(i) = p.into();
            if i >= n {
                return Err(GameError::PlayerOutOfRange { player: i, n });
            }
            bits |= 1 << i;
        }
        Ok(Self {
            bits,
            universe: n as u8,
        })
    }

    pub fn singleton(n: usize, player: usize) -> Result<Self, GameError> {
        Self::from_players(n, [player])
    }

    /// Players `start..end` of an `n`-player universe.
    pub fn range(n: usize, start: usize, end: usize) -> Result<Self, GameError> {
        Self::from_players(n, start..end)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn universe_size(&self) -> usize {
        self.universe as usize
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, player: usize) -> bool {
        player < 32 && self.bits & (1 << player) != 0
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            bits: self.bits | other.bits,
            universe: self.universe,
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            bits: self.bits & other.bits,
            universe: self.universe,
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self {
            bits: self.bits & !other.bits,
            universe: self.universe,
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: !self.bits & universe_mask(self.universe_size()),
            universe: self.universe,
        }
    }

    pub fn with(&self, player: usize) -> Self {
        Self {
            bits: self.bits | (1 << player),
            universe: self.universe,
        }
    }

    pub fn without(&self, player: usize) -> Self {
        Self {
            bits: self.bits & !(1 << player),
            universe: self.universe,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits & other.bits == 0
    }

    /// Members in ascending order.
    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.universe_size()).filter(move |&i| bits & (1 << i) != 0)
    }

    /// All subsets of this coalition, in ascending bitmask order.
    pub fn subsets(&self) -> impl Iterator<Item = Coalition> {
        let universe = self.universe;
        submasks(self.bits).map(move |bits| Coalition { bits, universe })
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.players().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as the ascending list of member indices.
impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for p in self.players() {
            seq.serialize_element(&p)?;
        }
        seq.end()
    }
}

/// Every submask of `mask`, ascending, including `0` and `mask` itself.
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    // Enumerates by carrying through the holes of `mask`: (s - mask) & mask.
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(cur.wrapping_sub(mask) & mask)
        };
        Some(cur)
    })
}
