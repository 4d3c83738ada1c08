//! Named game families, Myerson graph games, and random test games.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coalition::universe_mask;
use crate::error::GameError;
use crate::game::{Game, MAX_PLAYERS};
use crate::rational::GameValue;

/// Undirected communication graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = GameError;
    fn try_from(r: GraphRepr) -> Result<Self, GameError> {
        Graph::new(r.vertices, r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            vertices: g.n,
            edges: g.edges,
        }
    }
}

impl Graph {
    /// Edges are normalized to `(low, high)`, deduplicated and sorted.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GameError> {
        if n > MAX_PLAYERS {
            return Err(GameError::SizeLimitExceeded(n));
        }
        let mut norm = Vec::new();
        for (u, v) in edges {
            for p in [u, v] {
                if p >= n {
                    return Err(GameError::PlayerOutOfRange { player: p, n });
                }
            }
            if u == v {
                return Err(GameError::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adjacency = vec![0u32; n];
        for &(u, v) in &norm {
            adjacency[u] |= 1 << v;
            adjacency[v] |= 1 << u;
        }
        Ok(Self {
            n,
            edges: norm,
            adjacency,
        })
    }

    pub fn complete(n: usize) -> Result<Self, GameError> {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn edgeless(n: usize) -> Result<Self, GameError> {
        Self::new(n, [])
    }

    pub fn without_edge(&self, u: usize, v: usize) -> Self {
        let key = (u.min(v), u.max(v));
        Self::new(self.n, self.edges.iter().copied().filter(|&e| e != key)).expect("subgraph of a valid graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Connected components of the subgraph induced by `mask`, as bitmasks.
    pub fn components(&self, mask: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut left = mask;
        while left != 0 {
            let start = left & left.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adjacency[v] & mask & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }
}

/// `v(S) = |S| - 1` for nonempty `S`.
pub fn homogeneous_block(n: usize) -> Result<Game, GameError> {
    table_from(n, |s| {
        let size = s.count_ones() as i128;
        if size == 0 {
            0
        } else {
            size - 1
        }
    })
}

/// `v(S) = |S| - 1` without the special player `x`, `3(|S| - 1)` with it.
pub fn heterogeneous_block(n: usize, x: usize) -> Result<Game, GameError> {
    if x >= n {
        return Err(GameError::PlayerOutOfRange { player: x, n });
    }
    table_from(n, |s| {
        let size = s.count_ones() as i128;
        match (size, s & (1 << x) != 0) {
            (0, _) => 0,
            (_, true) => 3 * (size - 1),
            (_, false) => size - 1,
        }
    })
}

/// Blocks `I, J, K` of `n` players each, in index order, with key players
/// at the lowest index of each block (`0`, `n`, `2n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThreeBlockLayout {
    pub n: usize,
}

impl ThreeBlockLayout {
    pub fn players(&self) -> usize {
        3 * self.n
    }

    /// Bitmask of block `b ∈ {0, 1, 2}`.
    pub fn block(&self, b: usize) -> u32 {
        ((1u32 << self.n) - 1) << (b * self.n)
    }

    pub fn key(&self, b: usize) -> usize {
        b * self.n
    }
}

/// Three trade blocks joined by key players. With fewer than two key
/// players `v(S) = |S|`; with the keys of blocks `X, Y` only,
/// `v(S) = |S| + |S∩X| + |S∩Y|`; with all three keys `v(S) = 3|S|`.
pub fn three_block(n: usize) -> Result<Game, GameError> {
    if n < 1 {
        return Err(GameError::InvalidParameter(
            "three_block needs blocks of at least one player".into(),
        ));
    }
    let layout = ThreeBlockLayout { n };
    if layout.players() > MAX_PLAYERS {
        return Err(GameError::SizeLimitExceeded(layout.players()));
    }
    table_from(layout.players(), |s| {
        let size = s.count_ones() as i128;
        let present: Vec<usize> = (0..3).filter(|&b| s & (1 << layout.key(b)) != 0).collect();
        match present.len() {
            0 | 1 => size,
            2 => {
                size + present
                    .iter()
                    .map(|&b| (s & layout.block(b)).count_ones() as i128)
                    .sum::<i128>()
            }
            _ => 3 * size,
        }
    })
}

/// The three-player example: zero on singletons, 6 on pairs, 12 on the
/// grand coalition. Players are named `1`, `2`, `3`.
pub fn triangle_example() -> Game {
    Game::from_integers(3, &[0, 0, 0, 6, 0, 6, 6, 12])
        .and_then(|g| g.with_names(vec!["1".into(), "2".into(), "3".into()]))
        .expect("fixed table")
}

/// Graph-restricted game: the worth of `S` is the sum of base worths of the
/// connected components of `S` in the graph.
pub fn myerson_restriction(base: &Game, graph: &Graph) -> Result<Game, GameError> {
    if graph.vertex_count() != base.n() {
        return Err(GameError::UniverseMismatch {
            expected: base.n(),
            got: graph.vertex_count(),
        });
    }
    let nums = base.nums();
    let table = (0..=universe_mask(base.n()))
        .map(|s| graph.components(s).into_iter().map(|c| nums[c as usize]).sum())
        .collect();
    Ok(Game::from_raw(base.n(), table, base.den())?.with_names_of(base))
}

/// Convex game from nonnegative Harsanyi dividends on every coalition of
/// two or more players (singleton dividends may be negative).
pub fn random_convex(n: usize, seed: u64) -> Result<Game, GameError> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = universe_mask(n) as usize;
    let mut table: Vec<i128> = (0..=full)
        .map(|t| match t.count_ones() {
            0 => 0,
            1 => rng.gen_range(-3..=3),
            // about half the coalitions carry no synergy
            _ if rng.gen_bool(0.5) => 0,
            _ => rng.gen_range(1..=4),
        })
        .collect();
    // Zeta transform: v(S) = Σ_{T⊆S} d(T).
    for i in 0..n {
        for s in 0..=full {
            if s & (1 << i) != 0 {
                table[s] += table[s ^ (1 << i)];
            }
        }
    }
    let g = Game::from_raw(n, table, 1)?;
    assert!(
        g.is_supermodular(),
        "nonnegative dividends must give a convex game (n={n}, seed={seed})"
    );
    Ok(g)
}

/// Arbitrary half-integer table in `[-10, 10]`; no convexity guarantee.
pub fn random_game(n: usize, seed: u64) -> Result<Game, GameError> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = (0..=universe_mask(n))
        .map(|s| if s == 0 { 0 } else { rng.gen_range(-20..=20) })
        .collect();
    Game::from_raw(n, table, 2)
}

fn check_size(n: usize) -> Result<(), GameError> {
    if n == 0 {
        return Err(GameError::NoPlayers);
    }
    if n > MAX_PLAYERS {
        return Err(GameError::SizeLimitExceeded(n));
    }
    Ok(())
}

fn table_from(n: usize, f: impl Fn(u32) -> i128) -> Result<Game, GameError> {
    check_size(n)?;
    Game::from_raw(n, (0..=universe_mask(n)).map(f).collect(), 1)
}

/// Serializable description of a generated game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Homogeneous { n: usize },
    Heterogeneous { n: usize, x: usize },
    ThreeBlock { n: usize },
    Triangle,
    Myerson { base: Vec<GameValue>, graph: Graph },
    RandomConvex { n: usize, seed: u64 },
    RandomAny { n: usize, seed: u64 },
}

impl ScenarioSpec {
    pub fn build(&self) -> Result<Game, GameError> {
        match self {
            Self::Homogeneous { n } => homogeneous_block(*n),
            Self::Heterogeneous { n, x } => heterogeneous_block(*n, *x),
            Self::ThreeBlock { n } => three_block(*n),
            Self::Triangle => Ok(triangle_example()),
            Self::Myerson { base, graph } => {
                let n = graph.vertex_count();
                myerson_restriction(&Game::new(n, base.clone())?, graph)
            }
            Self::RandomConvex { n, seed } => random_convex(*n, *seed),
            Self::RandomAny { n, seed } => random_game(*n, *seed),
        }
    }

    /// Number of players the generated game will have.
    pub fn player_count(&self) -> usize {
        match self {
            Self::Homogeneous { n } | Self::Heterogeneous { n, .. } => *n,
            Self::ThreeBlock { n } => 3 * n,
            Self::Triangle => 3,
            Self::Myerson { graph, .. } => graph.vertex_count(),
            Self::RandomConvex { n, .. } | Self::RandomAny { n, .. } => *n,
        }
    }
}
