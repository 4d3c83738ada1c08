mod common;

use common::*;
use proptest::prelude::*;
use tu_boycott::generators::{random_convex, random_game};
use tu_boycott::harness::{verify_convexity_theorem, verify_lemma1};
use tu_boycott::{boycott, dominates, impact, impact_decomposed, shapley_exact, shapley_sampled, BoycottSpec, Game};

fn small_game(max_n: usize) -> impl Strategy<Value = Game> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(-8i64..=8, 1 << n).prop_map(move |raw| integer_game(n, &raw)))
}

/// A game together with a random disjoint pair `(A, B)` given as bitmasks.
fn game_and_spec(max_n: usize) -> impl Strategy<Value = (Game, u32, u32)> {
    small_game(max_n).prop_flat_map(|g| {
        let n = g.n();
        prop::collection::vec(0u8..3, n).prop_map(move |roles| {
            let (mut a, mut b) = (0u32, 0u32);
            for (p, r) in roles.iter().enumerate() {
                match r {
                    0 => a |= 1 << p,
                    1 => b |= 1 << p,
                    _ => {}
                }
            }
            (g.clone(), a, b)
        })
    })
}

fn spec(n: usize, a: u32, b: u32) -> BoycottSpec {
    BoycottSpec::new(coalition(n, a), coalition(n, b)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pairwise_supermodularity_matches_definition(g in small_game(5)) {
        prop_assert_eq!(g.is_supermodular(), supermodular_by_definition(&g));
    }

    #[test]
    fn convex_generator_is_supermodular_by_definition(n in 1usize..=5, seed in any::<u64>()) {
        prop_assert!(supermodular_by_definition(&random_convex(n, seed).unwrap()));
    }

    #[test]
    fn boycott_matches_direct_evaluation((g, a, b) in game_and_spec(5)) {
        let after = boycott(&g, &spec(g.n(), a, b)).unwrap();
        prop_assert_eq!(after.table(), boycott_table(&g, a, b));
    }

    #[test]
    fn boycott_satisfies_both_clauses((g, a, b) in game_and_spec(5)) {
        let after = boycott(&g, &spec(g.n(), a, b)).unwrap();
        let full = (1u32 << g.n()) - 1;
        for s in (0..=full).filter(|s| s & a == 0 || s & b == 0) {
            prop_assert_eq!(val(&after, s), val(&g, s));
        }
        prop_assert!(disjointly_productive_by_definition(&after, a, b));
        prop_assert!(after.are_disjointly_productive(&coalition(g.n(), a), &coalition(g.n(), b)).unwrap());
    }

    #[test]
    fn boycott_is_symmetric_and_idempotent((g, a, b) in game_and_spec(5)) {
        let n = g.n();
        let once = boycott(&g, &spec(n, a, b)).unwrap();
        prop_assert_eq!(&once, &boycott(&g, &spec(n, b, a)).unwrap());
        prop_assert_eq!(&once, &boycott(&once, &spec(n, a, b)).unwrap());
    }

    #[test]
    fn boycott_is_a_sum_of_subgames((g, a, b) in game_and_spec(5)) {
        let n = g.n();
        let not_a = coalition(n, a).complement();
        let not_b = coalition(n, b).complement();
        let lhs = g.subgame(&not_a).unwrap().sum(&g.subgame(&not_b).unwrap()).unwrap();
        let after = boycott(&g, &spec(n, a, b)).unwrap();
        let rhs = after.sum(&g.subgame(&not_a.intersection(&not_b)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lemma1_on_boycott_games((g, a, b) in game_and_spec(6)) {
        let n = g.n();
        let after = boycott(&g, &spec(n, a, b)).unwrap();
        let report = verify_lemma1(&after, &coalition(n, a), &coalition(n, b)).unwrap();
        prop_assert!(report.holds(), "{}", report);
        let rest = ((1u32 << n) - 1) & !a & !b;
        // spot check the identity with the full sides
        for s in (0..=rest).filter(|s| s & !rest == 0) {
            prop_assert_eq!(
                val(&after, s | a | b) - val(&after, s | a),
                val(&after, s | b) - val(&after, s)
            );
        }
    }

    #[test]
    fn nested_subgames_intersect(g in small_game(5), c in any::<u32>(), d in any::<u32>()) {
        let n = g.n();
        let mask = (1u32 << n) - 1;
        let (c, d) = (coalition(n, c & mask), coalition(n, d & mask));
        let twice = g.subgame(&c).unwrap().subgame(&d).unwrap();
        prop_assert_eq!(&twice, &g.subgame(&c.intersection(&d)).unwrap());
        let sub = g.subgame(&c).unwrap();
        for p in c.complement().players() {
            prop_assert!(is_null_by_definition(&sub, p));
            prop_assert!(sub.is_null_player(p).unwrap());
        }
    }

    #[test]
    fn shapley_matches_permutation_average(g in small_game(6)) {
        prop_assert_eq!(shapley_exact(&g).to_vec(), shapley_by_permutations(&g));
    }

    #[test]
    fn shapley_axioms(g in small_game(5), h_raw in prop::collection::vec(-8i64..=8, 32), i in 0usize..5) {
        let n = g.n();
        let phi = shapley_exact(&g);
        prop_assert_eq!(phi.total(), g.grand_value());

        let h = integer_game(n, &h_raw);
        prop_assert_eq!(shapley_exact(&g.sum(&h).unwrap()), phi.plus(&shapley_exact(&h)));

        let i = i % n;
        let nulled = nullify(&g, i);
        prop_assert!(shapley_exact(&nulled)[i].is_zero());
    }

    #[test]
    fn impact_routes_agree((g, a, b) in game_and_spec(6)) {
        let s = spec(g.n(), a, b);
        prop_assert_eq!(impact(&g, &s).unwrap(), impact_decomposed(&g, &s).unwrap());
    }

    #[test]
    fn convexity_scan_agrees_with_dominance(n in 1usize..=4, seed in any::<u64>(), convex in any::<bool>()) {
        let g = if convex { random_convex(n, seed).unwrap() } else { random_game(n, seed).unwrap() };
        let report = verify_convexity_theorem(&g).unwrap();
        let mut violations = 0u64;
        for s in BoycottSpec::enumerate_all(n) {
            if dominates(&g, &boycott(&g, &s).unwrap()).unwrap().is_some() {
                violations += 1;
            }
        }
        prop_assert_eq!(report.dominance_violations, violations);
        prop_assert_eq!(violations == 0, supermodular_by_definition(&g));
    }

    #[test]
    fn sampling_is_reproducible(n in 2usize..=5, seed in any::<u64>(), m in 1u64..2000) {
        let g = random_game(n, seed).unwrap();
        let first = shapley_sampled(&g, m, seed).unwrap();
        let second = shapley_sampled(&g, m, seed).unwrap();
        prop_assert_eq!(first, second);
    }
}

#[test]
fn impact_routes_agree_on_every_spec() {
    for n in 1..=5 {
        let g = random_game(n, 7 + n as u64).unwrap();
        for s in BoycottSpec::enumerate_all(n) {
            assert_eq!(impact(&g, &s).unwrap(), impact_decomposed(&g, &s).unwrap(), "{s:?}");
        }
    }
}

#[test]
fn sampling_error_shrinks_with_more_orderings() {
    let g = random_game(5, 3).unwrap();
    let exact: Vec<f64> = shapley_exact(&g).iter().map(|v| v.to_f64()).collect();
    let coarse = shapley_sampled(&g, 200, 11).unwrap();
    let fine = shapley_sampled(&g, 20_000, 11).unwrap();
    for (p, e) in exact.iter().enumerate() {
        let ratio = coarse.std_errors[p] / fine.std_errors[p];
        assert!((7.0..14.0).contains(&ratio), "player {p}: ratio {ratio}");
        assert!((fine.estimates[p] - e).abs() <= 4.0 * fine.std_errors[p]);
    }
}

#[test]
fn additive_games_sample_exactly() {
    let g = Game::from_integers(3, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
    let s = shapley_sampled(&g, 100, 5).unwrap();
    assert_eq!(s.estimates, vec![1.0, 2.0, 4.0]);
    assert!(s.std_errors.iter().all(|&e| e == 0.0));
}
