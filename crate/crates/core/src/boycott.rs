//! The A,B-boycott game and pointwise comparisons between games.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::coalition::{submasks, universe_mask, Coalition};
use crate::error::GameError;
use crate::game::Game;

/// Coalition `a` boycotts coalition `b`. Either side may be empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoycottSpec {
    a: Coalition,
    b: Coalition,
}

impl BoycottSpec {
    pub fn new(a: Coalition, b: Coalition) -> Result<Self, GameError> {
        if a.universe_size() != b.universe_size() {
            return Err(GameError::UniverseMismatch {
                expected: a.universe_size(),
                got: b.universe_size(),
            });
        }
        if !a.is_disjoint(&b) {
            return Err(GameError::OverlappingArguments(a.intersection(&b).players().collect()));
        }
        Ok(Self { a, b })
    }

    /// Convenience constructor from player lists.
    pub fn from_players(n: usize, a: &[usize], b: &[usize]) -> Result<Self, GameError> {
        Self::new(
            Coalition::from_players(n, a.iter().copied())?,
            Coalition::from_players(n, b.iter().copied())?,
        )
    }

    /// One-on-one boycott of `i` against `j`.
    pub fn one_on_one(n: usize, i: usize, j: usize) -> Result<Self, GameError> {
        if i == j {
            return Err(GameError::SamePlayer(i));
        }
        Self::from_players(n, &[i], &[j])
    }

    pub fn boycotters(&self) -> Coalition {
        self.a
    }

    pub fn boycotted(&self) -> Coalition {
        self.b
    }

    pub fn universe_size(&self) -> usize {
        self.a.universe_size()
    }

    pub fn participants(&self) -> Coalition {
        self.a.union(&self.b)
    }

    pub fn bystanders(&self) -> Coalition {
        self.participants().complement()
    }

    pub fn role_of(&self, player: usize) -> Role {
        if self.a.contains(player) {
            Role::Boycotter
        } else if self.b.contains(player) {
            Role::Boycotted
        } else {
            Role::Bystander
        }
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    /// Every disjoint `(A, B)` over `n` players, ordered by `(A, B)` bitmask.
    /// There are `3^n` of them.
    pub fn enumerate_all(n: usize) -> impl Iterator<Item = BoycottSpec> {
        let full = universe_mask(n);
        (0..=full).flat_map(move |a| {
            submasks(full & !a).map(move |b| BoycottSpec {
                a: Coalition::from_bits(n, a).unwrap(),
                b: Coalition::from_bits(n, b).unwrap(),
            })
        })
    }
}

impl fmt::Display for BoycottSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} B={}", self.a, self.b)
    }
}

/// How a player takes part in a boycott.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Boycotter,
    Boycotted,
    Bystander,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Boycotter => "boycotter",
            Role::Boycotted => "boycotted",
            Role::Bystander => "bystander",
        })
    }
}

fn check_spec(g: &Game, spec: &BoycottSpec) -> Result<(), GameError> {
    g.check_coalition(&spec.a)?;
    g.check_coalition(&spec.b)
}

/// Raw boycott table: `v(S∩Ā) + v(S∩B̄) - v(S∩Ā∩B̄)` on the game's integer grid.
pub(crate) fn boycott_nums(nums: &[i128], a: u32, b: u32) -> Vec<i128> {
    let (not_a, not_b) = (!a as usize, !b as usize);
    (0..nums.len())
        .map(|s| nums[s & not_a] + nums[s & not_b] - nums[s & not_a & not_b])
        .collect()
}

/// The boycott game `v^AB = v_Ā + v_B̄ - v_{Ā∩B̄}`.
///
/// In debug builds the result is checked against both defining clauses and
/// the decomposition `v^AB(S∪A'∪B') = v(S∪A') + v(S∪B') - v(S)`.
pub fn boycott(g: &Game, spec: &BoycottSpec) -> Result<Game, GameError> {
    check_spec(g, spec)?;
    let nums = boycott_nums(g.nums(), spec.a.bits(), spec.b.bits());
    let out = Game::from_raw(g.n(), nums, g.den())?.with_names_of(g);
    #[cfg(debug_assertions)]
    if let Err(failure) = check_boycott_postconditions(g, spec, &out) {
        panic!("boycott postcondition failed for {spec}: {failure}");
    }
    Ok(out)
}

/// Which defining property of the boycott game a candidate table breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PostconditionFailure {
    /// `v^AB(S) != v(S)` although `S` misses `A` or `B`.
    Agreement(Coalition),
    /// `A` and `B` are not disjointly productive in the result.
    NotDisjointlyProductive(crate::game::PairWitness),
    /// The three-term decomposition fails at `S ∪ A' ∪ B'`.
    Decomposition(Coalition),
}

impl fmt::Display for PostconditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Agreement(s) => write!(f, "value changed on {s}, which misses A or B"),
            Self::NotDisjointlyProductive(w) => write!(f, "A and B not disjointly productive at {w}"),
            Self::Decomposition(s) => write!(f, "decomposition fails at {s}"),
        }
    }
}

/// Checks a candidate boycott table against the definition, independently
/// of how it was constructed.
pub fn check_boycott_postconditions(
    g: &Game,
    spec: &BoycottSpec,
    candidate: &Game,
) -> Result<(), PostconditionFailure> {
    let n = g.n();
    let (a, b) = (spec.a.bits(), spec.b.bits());
    let full = universe_mask(n);
    let (gn, gd) = (g.nums(), g.den());
    let (cn, cd) = (candidate.nums(), candidate.den());
    let coalition = |s: u32| Coalition::from_bits(n, s).unwrap();

    for s in 0..=full {
        if (s & a == 0 || s & b == 0) && !same_ratio(gn[s as usize], gd, cn[s as usize], cd) {
            return Err(PostconditionFailure::Agreement(coalition(s)));
        }
    }
    if let Some(w) = candidate
        .disjoint_productivity_violation(&spec.a, &spec.b)
        .expect("spec checked")
    {
        return Err(PostconditionFailure::NotDisjointlyProductive(w));
    }
    let v = |m: u32| gn[m as usize];
    for s in submasks(full & !a & !b) {
        for a_part in submasks(a) {
            for b_part in submasks(b) {
                let joined = s | a_part | b_part;
                let rhs = v(s | a_part) + v(s | b_part) - v(s);
                if !same_ratio(cn[joined as usize], cd, rhs, gd) {
                    return Err(PostconditionFailure::Decomposition(coalition(joined)));
                }
            }
        }
    }
    Ok(())
}

/// `a/da == b/db` for positive denominators.
fn same_ratio(a: i128, da: i128, b: i128, db: i128) -> bool {
    if da == db {
        return a == b;
    }
    match (a.checked_mul(db), b.checked_mul(da)) {
        (Some(x), Some(y)) => x == y,
        _ => BigInt::from(a) * BigInt::from(db) == BigInt::from(b) * BigInt::from(da),
    }
}

/// `g1(S) >= g2(S)` for all coalitions, or the smallest-bitmask `S` where `g1(S) < g2(S)`.
pub fn dominates(g1: &Game, g2: &Game) -> Result<Option<Coalition>, GameError> {
    g1.dominance_violation(g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn triangle() -> Game {
        Game::from_integers(3, &[0, 0, 0, 6, 0, 6, 6, 12]).unwrap()
    }

    #[test]
    fn triangle_boycott_zeroes_the_pair() {
        let t = triangle();
        let v12 = boycott(&t, &BoycottSpec::from_players(3, &[0], &[1]).unwrap()).unwrap();
        let expected: Vec<_> = [0, 0, 0, 0, 0, 6, 6, 12].iter().map(|&x| q(x, 1)).collect();
        assert_eq!(v12.table(), expected);
        assert_eq!(dominates(&t, &v12).unwrap(), None);
        assert_eq!(
            dominates(&v12, &t).unwrap(),
            Some(Coalition::from_bits(3, 0b011).unwrap())
        );
    }

    #[test]
    fn empty_side_is_identity() {
        let t = triangle();
        for b in 0..8u32 {
            let spec = BoycottSpec::new(Coalition::empty(3), Coalition::from_bits(3, b).unwrap()).unwrap();
            assert_eq!(boycott(&t, &spec).unwrap(), t);
        }
    }

    #[test]
    fn non_convex_pair_gains() {
        let g = Game::from_integers(2, &[0, 1, 1, 1]).unwrap();
        let v12 = boycott(&g, &BoycottSpec::one_on_one(2, 0, 1).unwrap()).unwrap();
        assert_eq!(v12.grand_value(), q(2, 1));
        assert_eq!(dominates(&g, &v12).unwrap(), Some(Coalition::full(2)));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            BoycottSpec::from_players(3, &[0, 1], &[1]),
            Err(GameError::OverlappingArguments(_))
        ));
        assert_eq!(BoycottSpec::one_on_one(3, 2, 2), Err(GameError::SamePlayer(2)));
        let spec = BoycottSpec::from_players(4, &[0], &[1]).unwrap();
        assert!(matches!(
            boycott(&triangle(), &spec),
            Err(GameError::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn enumeration_covers_three_to_the_n() {
        for n in 1..=6 {
            assert_eq!(BoycottSpec::enumerate_all(n).count(), 3usize.pow(n as u32));
        }
        let first_nontrivial = BoycottSpec::enumerate_all(2)
            .find(|s| !s.boycotters().is_empty() && !s.boycotted().is_empty())
            .unwrap();
        assert_eq!(first_nontrivial, BoycottSpec::from_players(2, &[0], &[1]).unwrap());
    }

    #[test]
    fn postcondition_checker_rejects_wrong_tables() {
        let t = triangle();
        let spec = BoycottSpec::from_players(3, &[0], &[1]).unwrap();
        assert!(matches!(
            check_boycott_postconditions(&t, &spec, &t),
            Err(PostconditionFailure::NotDisjointlyProductive(_))
        ));
        let shifted = Game::from_integers(3, &[0, 0, 0, 0, 0, 6, 6, 11]).unwrap();
        assert_eq!(
            check_boycott_postconditions(&t, &spec, &shifted),
            Err(PostconditionFailure::NotDisjointlyProductive(
                crate::game::PairWitness {
                    i: 0,
                    j: 1,
                    s: Coalition::from_bits(3, 0b100).unwrap(),
                }
            ))
        );
        let moved = Game::from_integers(3, &[0, 0, 0, 0, 0, 5, 6, 11]).unwrap();
        assert_eq!(
            check_boycott_postconditions(&t, &spec, &moved),
            Err(PostconditionFailure::Agreement(Coalition::from_bits(3, 0b101).unwrap()))
        );
    }

    #[test]
    fn roles() {
        let spec = BoycottSpec::from_players(4, &[0], &[2, 3]).unwrap();
        assert_eq!(spec.role_of(0), Role::Boycotter);
        assert_eq!(spec.role_of(1), Role::Bystander);
        assert_eq!(spec.role_of(3), Role::Boycotted);
        assert_eq!(spec.bystanders().bits(), 0b0010);
    }
}
