//! Finite TU games over bit-indexed coalitions.
//!
//! Values are stored as `i128` numerators over one shared positive
//! denominator. Every transform in the crate (subgames, boycotts, sums)
//! stays on that integer grid, so lookups and comparisons are exact without
//! allocating a big rational per coalition.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::coalition::{submasks, universe_mask, Coalition, PlayerId};
use crate::error::GameError;
use crate::rational::GameValue;

/// Dense-table limit on the number of players.
pub const MAX_PLAYERS: usize = 20;

/// Bound on stored numerators and the shared denominator. Leaves enough
/// headroom in `i128` for three-term boycott sums and size-class sums of
/// up to 2^20 marginals.
pub(crate) const MAX_MAGNITUDE: i128 = 1 << 100;

/// A violating `(i, j, S)` triple reported by the pairwise checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub s: Coalition,
}

impl fmt::Display for PairWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(i={}, j={}, S={})", self.i, self.j, self.s)
    }
}

/// A game `(N, v)` with `v(∅) = 0`.
#[derive(Clone)]
pub struct Game {
    n: usize,
    den: i128,
    nums: Vec<i128>,
    names: Option<Vec<String>>,
}

impl PartialEq for Game {
    /// Tables are compared; player names are labels only.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.den == other.den && self.nums == other.nums
    }
}

impl Eq for Game {}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table: Vec<String> = self.table().iter().map(|v| v.to_string()).collect();
        f.debug_struct("Game")
            .field("n", &self.n)
            .field("table", &table)
            .finish()
    }
}

fn check_player_count(n: usize) -> Result<(), GameError> {
    if n == 0 {
        return Err(GameError::NoPlayers);
    }
    if n > MAX_PLAYERS {
        return Err(GameError::SizeLimitExceeded(n));
    }
    Ok(())
}

impl Game {
    /// Builds a game from its dense table, indexed by coalition bitmask.
    pub fn new(n: usize, table: Vec<GameValue>) -> Result<Self, GameError> {
        check_player_count(n)?;
        let expected = 1usize << n;
        if table.len() != expected {
            return Err(GameError::LengthMismatch {
                n,
                expected,
                got: table.len(),
            });
        }
        if !table[0].is_zero() {
            return Err(GameError::NonzeroEmptyCoalition(table[0].to_string()));
        }
        let mut lcm = BigInt::one();
        for v in &table {
            lcm = lcm.lcm(v.denom());
        }
        let den = lcm
            .to_i128()
            .filter(|d| *d <= MAX_MAGNITUDE)
            .ok_or(GameError::Overflow)?;
        let nums = table
            .iter()
            .map(|v| {
                let scaled = v.numer() * (&lcm / v.denom());
                scaled
                    .to_i128()
                    .filter(|x| x.abs() <= MAX_MAGNITUDE)
                    .ok_or(GameError::Overflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_raw(n, nums, den)
    }

    /// Integer-valued game.
    pub fn from_integers(n: usize, table: &[i64]) -> Result<Self, GameError> {
        Self::new(n, table.iter().map(|&x| GameValue::from_integer(x)).collect())
    }

    /// Numerators over a shared positive denominator. The result is reduced.
    pub(crate) fn from_raw(n: usize, mut nums: Vec<i128>, mut den: i128) -> Result<Self, GameError> {
        check_player_count(n)?;
        let expected = 1usize << n;
        if nums.len() != expected {
            return Err(GameError::LengthMismatch {
                n,
                expected,
                got: nums.len(),
            });
        }
        if den <= 0 {
            return Err(GameError::ZeroDenominator);
        }
        if nums[0] != 0 {
            return Err(GameError::NonzeroEmptyCoalition(
                GameValue::from_i128_ratio(nums[0], den).to_string(),
            ));
        }
        let mut g = den;
        for x in &nums {
            if g == 1 {
                break;
            }
            g = g.gcd(x);
        }
        if g > 1 {
            for x in nums.iter_mut() {
                *x /= g;
            }
            den /= g;
        }
        if den > MAX_MAGNITUDE || nums.iter().any(|x| x.abs() > MAX_MAGNITUDE) {
            return Err(GameError::Overflow);
        }
        Ok(Self {
            n,
            den,
            nums,
            names: None,
        })
    }

    /// Attaches display names, one per player.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, GameError> {
        if names.len() != self.n {
            return Err(GameError::InvalidParameter(format!(
                "{} names given for {} players",
                names.len(),
                self.n
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub(crate) fn with_names_of(mut self, other: &Game) -> Self {
        if other.n == self.n {
            self.names = other.names.clone();
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of a player; its index when the game carries no names.
    pub fn player_name(&self, i: usize) -> String {
        match &self.names {
            Some(names) => names[i].clone(),
            None => i.to_string(),
        }
    }

    pub(crate) fn nums(&self) -> &[i128] {
        &self.nums
    }

    pub(crate) fn den(&self) -> i128 {
        self.den
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::full(self.n)
    }

    pub fn empty_coalition(&self) -> Coalition {
        Coalition::empty(self.n)
    }

    /// Coalition over this game's universe.
    pub fn coalition<I>(&self, players: I) -> Result<Coalition, GameError>
    where
        I: IntoIterator,
        I::Item: Into<PlayerId>,
    {
        Coalition::from_players(self.n, players)
    }

    pub(crate) fn check_coalition(&self, c: &Coalition) -> Result<(), GameError> {
        if c.universe_size() != self.n {
            return Err(GameError::UniverseMismatch {
                expected: self.n,
                got: c.universe_size(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_player(&self, i: usize) -> Result<(), GameError> {
        if i >= self.n {
            return Err(GameError::PlayerOutOfRange { player: i, n: self.n });
        }
        Ok(())
    }

    pub fn value(&self, s: &Coalition) -> GameValue {
        debug_assert_eq!(s.universe_size(), self.n);
        self.value_of_bits(s.bits())
    }

    pub fn value_of_bits(&self, bits: u32) -> GameValue {
        GameValue::from_i128_ratio(self.nums[bits as usize], self.den)
    }

    pub fn grand_value(&self) -> GameValue {
        self.value_of_bits(universe_mask(self.n))
    }

    /// The dense table as exact rationals.
    pub fn table(&self) -> Vec<GameValue> {
        self.nums
            .iter()
            .map(|&x| GameValue::from_i128_ratio(x, self.den))
            .collect()
    }

    /// Table as floating point, for the sampled estimators.
    pub fn table_f64(&self) -> Vec<f64> {
        let den = self.den as f64;
        self.nums.iter().map(|&x| x as f64 / den).collect()
    }

    /// `v(S ∪ C) - v(S)`.
    pub fn marginal(&self, c: &Coalition, s: &Coalition) -> Result<GameValue, GameError> {
        self.check_coalition(c)?;
        self.check_coalition(s)?;
        if !c.is_disjoint(s) {
            return Err(GameError::OverlappingArguments(c.intersection(s).players().collect()));
        }
        let with = self.nums[(c.bits() | s.bits()) as usize];
        let without = self.nums[s.bits() as usize];
        Ok(GameValue::from_i128_ratio(with - without, self.den))
    }

    /// The subgame `v_C(S) = v(S ∩ C)` on the same player set.
    pub fn subgame(&self, c: &Coalition) -> Result<Game, GameError> {
        self.check_coalition(c)?;
        let mask = c.bits() as usize;
        let nums = (0..self.nums.len()).map(|s| self.nums[s & mask]).collect();
        Ok(Self::from_raw(self.n, nums, self.den)?.with_names_of(self))
    }

    /// The game played by the members of `C` alone, reindexed in ascending order.
    pub fn restrict(&self, c: &Coalition) -> Result<Game, GameError> {
        self.check_coalition(c)?;
        if c.is_empty() {
            return Err(GameError::EmptyRestriction);
        }
        let members: Vec<usize> = c.players().collect();
        let m = members.len();
        let nums = (0..1usize << m)
            .map(|t| {
                let original = members
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| t & (1 << k) != 0)
                    .fold(0usize, |acc, (_, &p)| acc | (1 << p));
                self.nums[original]
            })
            .collect();
        let mut g = Self::from_raw(m, nums, self.den)?;
        if let Some(names) = &self.names {
            g.names = Some(members.iter().map(|&p| names[p].clone()).collect());
        }
        Ok(g)
    }

    /// Per-coalition sum of two games on the same player set.
    pub fn sum(&self, other: &Game) -> Result<Game, GameError> {
        if self.n != other.n {
            return Err(GameError::UniverseMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let lcm = self.den.lcm(&other.den);
        let (fa, fb) = (lcm / self.den, lcm / other.den);
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(&a, &b)| {
                a.checked_mul(fa)
                    .zip(b.checked_mul(fb))
                    .and_then(|(x, y)| x.checked_add(y))
                    .ok_or(GameError::Overflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_raw(self.n, nums, lcm)?.with_names_of(self))
    }

    /// The supermodularity (convexity) test in pairwise-increment form:
    /// `v(S+i+j) - v(S+j) >= v(S+i) - v(S)` for all `i < j`, `S ⊆ N∖{i,j}`.
    ///
    /// Returns the lexicographically smallest violation, or `None` for a convex game.
    pub fn supermodularity_violation(&self) -> Option<PairWitness> {
        let full = universe_mask(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (bi, bj) = (1u32 << i, 1u32 << j);
                let rest = full & !bi & !bj;
                for s in submasks(rest) {
                    if self.second_difference(s, bi, bj) < 0 {
                        return Some(PairWitness {
                            i,
                            j,
                            s: Coalition::from_bits(self.n, s).unwrap(),
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_supermodular(&self) -> bool {
        self.supermodularity_violation().is_none()
    }

    /// `v(S+i+j) - v(S+j) - v(S+i) + v(S)` on the integer grid.
    #[inline]
    fn second_difference(&self, s: u32, bi: u32, bj: u32) -> i128 {
        let v = |m: u32| self.nums[m as usize];
        v(s | bi | bj) - v(s | bj) - v(s | bi) + v(s)
    }

    /// Checks that every `i ∈ A`, `j ∈ B` are disjointly productive:
    /// `v(S+i+j) - v(S+j) = v(S+i) - v(S)` for all `S ⊆ N∖{i,j}`.
    pub fn disjoint_productivity_violation(
        &self,
        a: &Coalition,
        b: &Coalition,
    ) -> Result<Option<PairWitness>, GameError> {
        self.check_coalition(a)?;
        self.check_coalition(b)?;
        if !a.is_disjoint(b) {
            return Err(GameError::OverlappingArguments(a.intersection(b).players().collect()));
        }
        let full = universe_mask(self.n);
        for i in a.players() {
            for j in b.players() {
                let (bi, bj) = (1u32 << i, 1u32 << j);
                for s in submasks(full & !bi & !bj) {
                    if self.second_difference(s, bi, bj) != 0 {
                        return Ok(Some(PairWitness {
                            i,
                            j,
                            s: Coalition::from_bits(self.n, s)?,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn are_disjointly_productive(&self, a: &Coalition, b: &Coalition) -> Result<bool, GameError> {
        Ok(self.disjoint_productivity_violation(a, b)?.is_none())
    }

    pub fn is_null_player(&self, i: usize) -> Result<bool, GameError> {
        self.check_player(i)?;
        let bi = 1usize << i;
        Ok((0..self.nums.len())
            .filter(|s| s & bi == 0)
            .all(|s| self.nums[s | bi] == self.nums[s]))
    }

    /// Pointwise comparison of two tables, `v(S) >= w(S)` for every `S`.
    /// Returns the smallest-bitmask coalition where it fails.
    pub fn dominance_violation(&self, other: &Game) -> Result<Option<Coalition>, GameError> {
        if self.n != other.n {
            return Err(GameError::UniverseMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let witness = if self.den == other.den {
            self.nums.iter().zip(&other.nums).position(|(a, b)| a < b)
        } else {
            // a/da < b/db  <=>  a*db < b*da
            let (da, db) = (BigInt::from(self.den), BigInt::from(other.den));
            self.nums
                .iter()
                .zip(&other.nums)
                .position(|(&a, &b)| BigInt::from(a) * &db < BigInt::from(b) * &da)
        };
        witness.map(|s| Coalition::from_bits(self.n, s as u32)).transpose()
    }

    /// `v(S) = w(S)` for every coalition containing `k`.
    pub fn agrees_on_coalitions_with(&self, other: &Game, k: usize) -> Result<bool, GameError> {
        if self.n != other.n {
            return Err(GameError::UniverseMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        self.check_player(k)?;
        let bk = 1usize << k;
        let (da, db) = (BigInt::from(self.den), BigInt::from(other.den));
        Ok((0..self.nums.len()).filter(|s| s & bk != 0).all(|s| {
            if self.den == other.den {
                self.nums[s] == other.nums[s]
            } else {
                BigInt::from(self.nums[s]) * &db == BigInt::from(other.nums[s]) * &da
            }
        }))
    }

    pub fn is_zero_game(&self) -> bool {
        self.nums.iter().all(Zero::is_zero)
    }
}

/// `k` keeps the worth of every coalition it belongs to when `original`
/// is replaced by `transformed`.
pub fn is_invariant_player(original: &Game, transformed: &Game, k: usize) -> Result<bool, GameError> {
    original.agrees_on_coalitions_with(transformed, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn triangle() -> Game {
        Game::from_integers(3, &[0, 0, 0, 6, 0, 6, 6, 12]).unwrap()
    }

    fn c(n: usize, players: &[usize]) -> Coalition {
        Coalition::from_players(n, players.iter().copied()).unwrap()
    }

    #[test]
    fn constructor_contract() {
        assert_eq!(triangle().n(), 3);
        let one = Game::from_integers(1, &[0, 0]).unwrap();
        assert!(one.is_null_player(0).unwrap());
        assert_eq!(
            Game::from_integers(2, &[0, 1, 1]),
            Err(GameError::LengthMismatch {
                n: 2,
                expected: 4,
                got: 3
            })
        );
        assert!(matches!(
            Game::from_integers(1, &[1, 0]),
            Err(GameError::NonzeroEmptyCoalition(_))
        ));
        assert_eq!(Game::from_integers(0, &[0]), Err(GameError::NoPlayers));
        assert_eq!(Game::new(21, vec![]), Err(GameError::SizeLimitExceeded(21)));
    }

    #[test]
    fn rational_tables_share_a_denominator() {
        let g = Game::new(2, vec![q(0, 1), q(1, 2), q(1, 3), q(5, 6)]).unwrap();
        assert_eq!(g.den(), 6);
        assert_eq!(g.table(), vec![q(0, 1), q(1, 2), q(1, 3), q(5, 6)]);
        let h = Game::new(2, vec![q(0, 1), q(2, 4), q(2, 6), q(10, 12)]).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn marginals() {
        let t = triangle();
        // players 1 and 3 of the three-player example are indices 0 and 2
        assert_eq!(t.marginal(&c(3, &[2]), &c(3, &[0])).unwrap(), q(6, 1));
        assert_eq!(t.marginal(&c(3, &[]), &c(3, &[0, 1])).unwrap(), q(0, 1));
        assert!(matches!(
            t.marginal(&c(3, &[0]), &c(3, &[0, 1])),
            Err(GameError::OverlappingArguments(p)) if p == vec![0]
        ));
    }

    #[test]
    fn subgame_of_triangle() {
        let t = triangle();
        let sub = t.subgame(&c(3, &[0, 2])).unwrap();
        assert_eq!(sub.value(&c(3, &[0, 2])), q(6, 1));
        assert_eq!(sub.value(&c(3, &[0, 1])), q(0, 1));
        assert_eq!(sub.grand_value(), q(6, 1));
        assert!(sub.is_null_player(1).unwrap());
        assert_eq!(t.subgame(&Coalition::full(3)).unwrap(), t);
        assert!(t.subgame(&Coalition::empty(3)).unwrap().is_zero_game());
    }

    #[test]
    fn restrict_reindexes() {
        let t = triangle().with_names(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let r = t.restrict(&c(3, &[0, 2])).unwrap();
        assert_eq!(r.n(), 2);
        assert_eq!(r.table(), vec![q(0, 1), q(0, 1), q(0, 1), q(6, 1)]);
        assert_eq!(r.names().unwrap(), &["a".to_string(), "c".to_string()]);
        assert_eq!(t.restrict(&Coalition::empty(3)), Err(GameError::EmptyRestriction));
    }

    #[test]
    fn supermodularity() {
        assert!(triangle().is_supermodular());
        let sub = Game::from_integers(2, &[0, 1, 1, 1]).unwrap();
        assert_eq!(
            sub.supermodularity_violation(),
            Some(PairWitness {
                i: 0,
                j: 1,
                s: Coalition::empty(2)
            })
        );
    }

    #[test]
    fn disjoint_productivity() {
        let t = triangle();
        let w = t.disjoint_productivity_violation(&c(3, &[0]), &c(3, &[1])).unwrap();
        assert_eq!(
            w,
            Some(PairWitness {
                i: 0,
                j: 1,
                s: Coalition::empty(3)
            })
        );
        assert!(t.are_disjointly_productive(&c(3, &[]), &c(3, &[1])).unwrap());
        assert!(t.disjoint_productivity_violation(&c(3, &[0]), &c(3, &[0, 1])).is_err());
    }

    #[test]
    fn invariant_players_of_identity() {
        let t = triangle();
        for k in 0..3 {
            assert!(is_invariant_player(&t, &t, k).unwrap());
        }
    }

    #[test]
    fn sums_align_denominators() {
        let a = Game::new(1, vec![q(0, 1), q(1, 2)]).unwrap();
        let b = Game::new(1, vec![q(0, 1), q(1, 3)]).unwrap();
        assert_eq!(a.sum(&b).unwrap().grand_value(), q(5, 6));
    }

    #[test]
    fn dominance_across_denominators() {
        let a = Game::new(1, vec![q(0, 1), q(1, 2)]).unwrap();
        let b = Game::new(1, vec![q(0, 1), q(1, 3)]).unwrap();
        assert_eq!(a.dominance_violation(&b).unwrap(), None);
        assert_eq!(b.dominance_violation(&a).unwrap(), Some(Coalition::full(1)));
    }
}
