//! Shapley values, boycott impact, and the value axioms tied to boycotts.

use std::fmt;
use std::ops::{Deref, Index};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boycott::{boycott, BoycottSpec, Role};
use crate::coalition::universe_mask;
use crate::error::GameError;
use crate::game::Game;
use crate::rational::GameValue;

/// Per-player exact allocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueVector(Vec<GameValue>);

impl ValueVector {
    pub fn new(values: Vec<GameValue>) -> Self {
        Self(values)
    }

    pub fn total(&self) -> GameValue {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<GameValue> {
        self.0
    }

    /// Coordinatewise `self - other`.
    pub fn minus(&self, other: &ValueVector) -> ValueVector {
        assert_eq!(self.len(), other.len(), "value vectors of different lengths");
        ValueVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn plus(&self, other: &ValueVector) -> ValueVector {
        assert_eq!(self.len(), other.len(), "value vectors of different lengths");
        ValueVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Deref for ValueVector {
    type Target = [GameValue];
    fn deref(&self) -> &[GameValue] {
        &self.0
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// `s! (n-s-1)!` for `s` in `0..n`. The Shapley weight of a size-`s`
/// coalition a player joins is this over `n!`.
fn size_weights(n: usize) -> (Vec<BigInt>, BigInt) {
    let fact: Vec<BigInt> = (0..=n)
        .scan(BigInt::from(1), |acc, k| {
            if k > 0 {
                *acc *= k;
            }
            Some(acc.clone())
        })
        .collect();
    let weights = (0..n).map(|s| &fact[s] * &fact[n - s - 1]).collect();
    (weights, fact[n].clone())
}

/// Player counts from which exact Shapley fans out across threads.
const PARALLEL_FROM: usize = 12;

/// Exact Shapley value,
/// `φ_i = Σ_{S ⊆ N∖{i}} |S|!(n-|S|-1)!/n! · (v(S∪{i}) - v(S))`.
///
/// Coalitions are grouped by size so that each player needs one pass of
/// integer additions over the table followed by `n` weighted big-integer
/// terms. The result does not depend on the degree of parallelism.
pub fn shapley_exact(g: &Game) -> ValueVector {
    let n = g.n();
    let nums = g.nums();
    let (weights, n_fact) = size_weights(n);

    // Σ v(S) over |S| = s, for every s.
    let mut by_size = vec![0i128; n + 1];
    for (s, &x) in nums.iter().enumerate() {
        by_size[s.count_ones() as usize] += x;
    }

    let player_value = |i: usize| {
        let bi = 1usize << i;
        // Σ v(S) over S ∋ i with |S| = s.
        let mut containing = vec![0i128; n + 1];
        for (s, &x) in nums.iter().enumerate() {
            if s & bi != 0 {
                containing[s.count_ones() as usize] += x;
            }
        }
        let mut acc = BigInt::from(0);
        for s in 1..=n {
            acc += &weights[s - 1] * BigInt::from(containing[s]);
        }
        for s in 0..n {
            acc -= &weights[s] * BigInt::from(by_size[s] - containing[s]);
        }
        GameValue::from_bigints(acc, &n_fact * BigInt::from(g.den())).expect("positive denominator")
    };

    let values = if n >= PARALLEL_FROM {
        (0..n).into_par_iter().map(player_value).collect()
    } else {
        (0..n).map(player_value).collect()
    };
    ValueVector(values)
}

/// Monte Carlo Shapley estimate from uniformly drawn orderings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledValueVector {
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub permutations: u64,
    pub seed: u64,
}

/// Orderings per work unit. Fixed so results do not depend on thread count.
const SAMPLE_BLOCK: u64 = 512;

struct BlockStats {
    // Σ (d - shift) per player, exact.
    sum: Vec<i128>,
    // Σ (d - shift)^2 per player.
    sum_sq: Vec<f64>,
}

/// Permutation-sampling estimate of the Shapley value.
///
/// Ordering `p` is drawn from its own ChaCha stream `(seed, p)`, so the
/// output is bit-identical for a fixed `(seed, m)` however the work is split.
pub fn shapley_sampled(g: &Game, m: u64, seed: u64) -> Result<SampledValueVector, GameError> {
    if m == 0 {
        return Err(GameError::InvalidParameter(
            "permutation count must be at least 1".into(),
        ));
    }
    let n = g.n();
    let nums = g.nums();
    // Marginals are recorded relative to v({i}) so constant marginals give zero variance exactly.
    let shift: Vec<i128> = (0..n).map(|i| nums[1 << i]).collect();

    let blocks: Vec<BlockStats> = (0..m.div_ceil(SAMPLE_BLOCK))
        .into_par_iter()
        .map(|block| {
            let mut stats = BlockStats {
                sum: vec![0; n],
                sum_sq: vec![0.0; n],
            };
            let mut order: Vec<usize> = Vec::with_capacity(n);
            let end = ((block + 1) * SAMPLE_BLOCK).min(m);
            for p in block * SAMPLE_BLOCK..end {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(p);
                order.clear();
                order.extend(0..n);
                order.shuffle(&mut rng);
                let mut mask = 0usize;
                for &i in &order {
                    let d = nums[mask | (1 << i)] - nums[mask] - shift[i];
                    stats.sum[i] += d;
                    stats.sum_sq[i] += (d as f64) * (d as f64);
                    mask |= 1 << i;
                }
            }
            stats
        })
        .collect();

    let mut sum = vec![BigInt::from(0); n];
    let mut sum_sq = vec![0.0f64; n];
    for b in &blocks {
        for i in 0..n {
            sum[i] += b.sum[i];
            sum_sq[i] += b.sum_sq[i];
        }
    }

    let den = g.den();
    let mf = m as f64;
    let mut estimates = Vec::with_capacity(n);
    let mut std_errors = Vec::with_capacity(n);
    for i in 0..n {
        let total = BigInt::from(shift[i]) * BigInt::from(m) + &sum[i];
        let mean = GameValue::from_bigints(total, BigInt::from(m) * BigInt::from(den)).expect("m >= 1");
        estimates.push(mean.to_f64());
        let se = if m > 1 {
            let s = GameValue::from_bigints(sum[i].clone(), BigInt::from(1))
                .expect("unit")
                .to_f64();
            let var = ((sum_sq[i] - s * s / mf) / (mf - 1.0)).max(0.0);
            (var / mf).sqrt() / den as f64
        } else {
            0.0
        };
        std_errors.push(se);
    }
    Ok(SampledValueVector {
        estimates,
        std_errors,
        permutations: m,
        seed,
    })
}

/// Per-player impact `φ(v) - φ(v^AB)` with the player's boycott role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactVector {
    pub values: ValueVector,
    pub roles: Vec<Role>,
}

impl ImpactVector {
    fn new(values: ValueVector, spec: &BoycottSpec) -> Self {
        let roles = (0..values.len()).map(|p| spec.role_of(p)).collect();
        Self { values, roles }
    }

    /// Players attaining the largest impact, ascending.
    pub fn argmax(&self) -> Vec<usize> {
        let Some(max) = self.values.iter().max() else {
            return Vec::new();
        };
        (0..self.values.len()).filter(|&p| &self.values[p] == max).collect()
    }
}

impl Index<usize> for ImpactVector {
    type Output = GameValue;
    fn index(&self, i: usize) -> &GameValue {
        &self.values[i]
    }
}

/// `φ(v) - φ(v^AB)`.
pub fn impact(g: &Game, spec: &BoycottSpec) -> Result<ImpactVector, GameError> {
    let after = boycott(g, spec)?;
    let diff = shapley_exact(g).minus(&shapley_exact(&after));
    Ok(ImpactVector::new(diff, spec))
}

/// The same impact through additivity over subgames:
/// `φ(v) - φ(v_Ā) - φ(v_B̄) + φ(v_{Ā∩B̄})`.
pub fn impact_decomposed(g: &Game, spec: &BoycottSpec) -> Result<ImpactVector, GameError> {
    g.check_coalition(&spec.boycotters())?;
    g.check_coalition(&spec.boycotted())?;
    let not_a = spec.boycotters().complement();
    let not_b = spec.boycotted().complement();
    let phi = |c| g.subgame(&c).map(|sub| shapley_exact(&sub));
    let values = shapley_exact(g)
        .minus(&phi(not_a)?)
        .minus(&phi(not_b)?)
        .plus(&phi(not_a.intersection(&not_b))?);
    Ok(ImpactVector::new(values, spec))
}

/// A participant whose boycott-game value differs from its value in the
/// game without the opposing side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RespectingViolation {
    pub player: usize,
    pub in_boycott_game: GameValue,
    pub without_opponents: GameValue,
}

/// Checks that every `i ∈ A` gets the same Shapley value in `v^AB` as in
/// the game restricted to `N∖B`, and symmetrically for `j ∈ B` against `N∖A`.
pub fn check_boycott_respecting(g: &Game, spec: &BoycottSpec) -> Result<Option<RespectingViolation>, GameError> {
    let after = shapley_exact(&boycott(g, spec)?);
    for (side, opponents) in [
        (spec.boycotters(), spec.boycotted()),
        (spec.boycotted(), spec.boycotters()),
    ] {
        if side.is_empty() {
            continue;
        }
        let remaining = opponents.complement();
        let reduced = shapley_exact(&g.restrict(&remaining)?);
        for (pos, p) in remaining.players().enumerate() {
            if side.contains(p) && after[p] != reduced[pos] {
                return Ok(Some(RespectingViolation {
                    player: p,
                    in_boycott_game: after[p].clone(),
                    without_opponents: reduced[pos].clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Checks `φ_i(v) - φ_i(v^{ij}) = φ_j(v) - φ_j(v^{ij})`. Returns the two
/// impacts when they differ.
pub fn check_balanced_impact(g: &Game, i: usize, j: usize) -> Result<Option<(GameValue, GameValue)>, GameError> {
    g.check_player(i)?;
    g.check_player(j)?;
    let spec = BoycottSpec::one_on_one(g.n(), i, j)?;
    let imp = impact(g, &spec)?;
    if imp[i] == imp[j] {
        Ok(None)
    } else {
        Ok(Some((imp[i].clone(), imp[j].clone())))
    }
}

/// `Σ_i φ_i - v(N)`; zero for an efficient allocation.
pub fn efficiency_gap(g: &Game, phi: &ValueVector) -> GameValue {
    &phi.total() - &g.value_of_bits(universe_mask(g.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn triangle() -> Game {
        Game::from_integers(3, &[0, 0, 0, 6, 0, 6, 6, 12]).unwrap()
    }

    fn vv(xs: &[(i64, i64)]) -> ValueVector {
        ValueVector::new(xs.iter().map(|&(p, d)| q(p, d)).collect())
    }

    #[test]
    fn triangle_values() {
        assert_eq!(shapley_exact(&triangle()), vv(&[(4, 1), (4, 1), (4, 1)]));
        let spec = BoycottSpec::one_on_one(3, 0, 1).unwrap();
        let after = boycott(&triangle(), &spec).unwrap();
        assert_eq!(shapley_exact(&after), vv(&[(3, 1), (3, 1), (6, 1)]));
        let imp = impact(&triangle(), &spec).unwrap();
        assert_eq!(imp.values, vv(&[(1, 1), (1, 1), (-2, 1)]));
        assert_eq!(imp.roles, vec![Role::Boycotter, Role::Boycotted, Role::Bystander]);
        assert_eq!(impact_decomposed(&triangle(), &spec).unwrap(), imp);
        assert_eq!(imp.argmax(), vec![0, 1]);
    }

    #[test]
    fn empty_boycott_has_no_impact() {
        let spec = BoycottSpec::from_players(3, &[], &[0, 2]).unwrap();
        let imp = impact(&triangle(), &spec).unwrap();
        assert!(imp.values.iter().all(GameValue::is_zero));
        assert_eq!(impact_decomposed(&triangle(), &spec).unwrap(), imp);
    }

    #[test]
    fn rational_table() {
        // v({0}) = 1/2, v({1}) = 1/3, v(N) = 3/2
        let g = Game::new(2, vec![q(0, 1), q(1, 2), q(1, 3), q(3, 2)]).unwrap();
        // φ_0 = 1/2 (1/2 + (3/2 - 1/3)) = 5/6
        assert_eq!(shapley_exact(&g), vv(&[(5, 6), (2, 3)]));
        assert!(efficiency_gap(&g, &shapley_exact(&g)).is_zero());
    }

    #[test]
    fn balanced_impact_rejects_same_player() {
        assert_eq!(check_balanced_impact(&triangle(), 1, 1), Err(GameError::SamePlayer(1)));
        assert_eq!(check_balanced_impact(&triangle(), 0, 1).unwrap(), None);
    }

    #[test]
    fn boycott_respecting_on_triangle() {
        let spec = BoycottSpec::from_players(3, &[0], &[1]).unwrap();
        assert_eq!(check_boycott_respecting(&triangle(), &spec).unwrap(), None);
    }

    #[test]
    fn sampling_edge_cases() {
        assert!(shapley_sampled(&triangle(), 0, 1).is_err());
        let single = Game::new(1, vec![q(0, 1), q(7, 3)]).unwrap();
        let est = shapley_sampled(&single, 5, 9).unwrap();
        assert_eq!(est.estimates, vec![q(7, 3).to_f64()]);
        assert_eq!(est.std_errors, vec![0.0]);
    }

    #[test]
    fn sampling_is_exact_on_additive_games() {
        let w = [q(1, 10), q(-3, 7), q(5, 1), q(0, 1)];
        let table = (0..16usize)
            .map(|s| (0..4).filter(|i| s & (1 << i) != 0).map(|i| w[i].clone()).sum())
            .collect();
        let g = Game::new(4, table).unwrap();
        for m in [1, 3, 1000] {
            let est = shapley_sampled(&g, m, 42).unwrap();
            let want: Vec<f64> = w.iter().map(GameValue::to_f64).collect();
            assert_eq!(est.estimates, want);
            assert!(est.std_errors.iter().all(|&s| s == 0.0));
        }
    }
}
