//! Brute-force reference implementations shared by the integration tests.
//! Everything here works from the definitions, coalition by coalition.

#![allow(dead_code)]

use tu_boycott::{Coalition, Game, GameValue};

pub fn val(g: &Game, bits: u32) -> GameValue {
    g.value_of_bits(bits)
}

/// `v(S ∩ Ā) + v(S ∩ B̄) - v(S ∩ Ā ∩ B̄)` evaluated directly.
pub fn boycott_table(g: &Game, a: u32, b: u32) -> Vec<GameValue> {
    let full = (1u32 << g.n()) - 1;
    (0..=full)
        .map(|s| {
            let no_a = s & !a;
            let no_b = s & !b;
            val(g, no_a) + val(g, no_b) - val(g, s & !a & !b)
        })
        .collect()
}

/// Shapley value by averaging marginals over every ordering.
pub fn shapley_by_permutations(g: &Game) -> Vec<GameValue> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    let mut totals = vec![GameValue::zero(); n];
    let mut count: i64 = 0;
    permute(&mut order, 0, &mut |perm| {
        count += 1;
        let mut s = 0u32;
        for &p in perm {
            let before = val(g, s);
            s |= 1 << p;
            totals[p] += &(val(g, s) - before);
        }
    });
    let scale = GameValue::new(1, count).unwrap();
    totals.into_iter().map(|t| t * scale.clone()).collect()
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// `v(S ∪ T) + v(S ∩ T) >= v(S) + v(T)` over every pair of coalitions.
pub fn supermodular_by_definition(g: &Game) -> bool {
    let full = (1u32 << g.n()) - 1;
    (0..=full).all(|s| (0..=full).all(|t| val(g, s | t) + val(g, s & t) >= val(g, s) + val(g, t)))
}

/// Coalitions `A` and `B` add exactly the sum of their separate
/// contributions to every `S` outside both.
pub fn disjointly_productive_by_definition(g: &Game, a: u32, b: u32) -> bool {
    let full = (1u32 << g.n()) - 1;
    let rest = full & !a & !b;
    (0..=full)
        .filter(|s| s & !rest == 0)
        .all(|s| val(g, s | a | b) - val(g, s) == (val(g, s | a) - val(g, s)) + (val(g, s | b) - val(g, s)))
}

pub fn is_null_by_definition(g: &Game, i: usize) -> bool {
    let full = (1u32 << g.n()) - 1;
    (0..=full)
        .filter(|s| s & (1 << i) == 0)
        .all(|s| val(g, s | 1 << i) == val(g, s))
}

pub fn integer_game(n: usize, raw: &[i64]) -> Game {
    let mut table = raw[..1 << n].to_vec();
    table[0] = 0;
    Game::from_integers(n, &table).unwrap()
}

/// Game with player `i` made null: every coalition is valued as without `i`.
pub fn nullify(g: &Game, i: usize) -> Game {
    let full = (1u32 << g.n()) - 1;
    let table = (0..=full).map(|s| val(g, s & !(1 << i))).collect();
    Game::new(g.n(), table).unwrap()
}

pub fn coalition(n: usize, bits: u32) -> Coalition {
    Coalition::from_bits(n, bits).unwrap()
}
