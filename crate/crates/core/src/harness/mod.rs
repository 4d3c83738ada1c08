//! Instance-level verification of the boycott theorems, plus the
//! trade-block scenario reports in [`scenario`].
//!
//! Every verifier walks its instances in a canonical order and reports the
//! first counterexample it meets, so reports are reproducible for a given
//! game and enumeration.

pub mod scenario;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boycott::{boycott, boycott_nums, BoycottSpec};
use crate::coalition::{submasks, universe_mask, Coalition};
use crate::error::GameError;
use crate::game::{Game, PairWitness};
use crate::rational::GameValue;
use crate::values::{impact, shapley_exact};

pub use scenario::{run_scenario, DropoutFindings, Scenario, ScenarioReport, ScenarioRow, ThreeBlockVariant};

/// Largest game the exhaustive `3^n` boycott scan accepts.
pub const EXHAUSTIVE_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// `v^AB <= v` for all disjoint `A, B` iff `v` is convex.
    Convexity,
    /// `A ⊆ C`, `B ⊆ D` implies `v^CD <= v^AB` in a convex game.
    NestedMonotonicity,
    /// In a many-on-one boycott the lone boycotter bears the largest impact.
    ManyOnOne,
    /// Participants lose, invariant players gain.
    Sign,
    /// Disjointly productive coalitions have coalition-level additive marginals.
    Lemma1,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::Convexity,
        TheoremId::NestedMonotonicity,
        TheoremId::ManyOnOne,
        TheoremId::Sign,
        TheoremId::Lemma1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Convexity => "convexity",
            Self::NestedMonotonicity => "nested-monotonicity",
            Self::ManyOnOne => "many-on-one",
            Self::Sign => "sign",
            Self::Lemma1 => "lemma1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
}

/// Concrete evidence about one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `v^AB(S) > v(S)`.
    Dominance {
        a: Coalition,
        b: Coalition,
        s: Coalition,
        original: GameValue,
        boycotted: GameValue,
    },
    /// The game is not convex, reported with its pairwise violation.
    NotConvex(PairWitness),
    /// `v^CD(S) > v^AB(S)` although `A ⊆ C`, `B ⊆ D`.
    Nested {
        a: Coalition,
        b: Coalition,
        c: Coalition,
        d: Coalition,
        s: Coalition,
        smaller: GameValue,
        larger: GameValue,
    },
    /// A player's impact exceeds the bound: the impact on `reference` when
    /// given, otherwise the constant `bound`.
    ImpactExceeds {
        a: Coalition,
        b: Coalition,
        player: usize,
        impact: GameValue,
        reference: Option<usize>,
        bound: GameValue,
    },
    /// A participant gains from the boycott.
    ImpactNegative {
        a: Coalition,
        b: Coalition,
        player: usize,
        impact: GameValue,
    },
    /// `dv_{B'}(S ∪ A') != dv_{B'}(S)`.
    Lemma1 {
        a_part: Coalition,
        b_part: Coalition,
        s: Coalition,
        joined: GameValue,
        alone: GameValue,
    },
}

impl Witness {
    /// Re-evaluates the witness on `g` from scratch; true if it still
    /// exhibits the reported inequality.
    pub fn recheck(&self, g: &Game) -> Result<bool, GameError> {
        Ok(match self {
            Self::Dominance { a, b, s, .. } => {
                let after = boycott(g, &BoycottSpec::new(*a, *b)?)?;
                after.value(s) > g.value(s)
            }
            Self::NotConvex(w) => {
                let (i, j) = (g.coalition([w.i])?, g.coalition([w.j])?);
                let ij = i.union(&j);
                g.value(&w.s.union(&ij)) - g.value(&w.s.union(&j)) < g.value(&w.s.union(&i)) - g.value(&w.s)
            }
            Self::Nested { a, b, c, d, s, .. } => {
                let inner = boycott(g, &BoycottSpec::new(*a, *b)?)?;
                let outer = boycott(g, &BoycottSpec::new(*c, *d)?)?;
                outer.value(s) > inner.value(s)
            }
            Self::ImpactExceeds {
                a,
                b,
                player,
                reference,
                bound,
                ..
            } => {
                let imp = impact(g, &BoycottSpec::new(*a, *b)?)?;
                let limit = reference.map_or(bound, |r| &imp[r]);
                &imp[*player] > limit
            }
            Self::ImpactNegative { a, b, player, .. } => impact(g, &BoycottSpec::new(*a, *b)?)?[*player].is_negative(),
            Self::Lemma1 { a_part, b_part, s, .. } => g.marginal(b_part, &s.union(a_part))? != g.marginal(b_part, s)?,
        })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dominance {
                a,
                b,
                s,
                original,
                boycotted,
            } => {
                write!(f, "A={a} B={b} S={s}: v^AB(S)={boycotted} > v(S)={original}")
            }
            Self::NotConvex(w) => write!(f, "not convex at {w}"),
            Self::Nested {
                a,
                b,
                c,
                d,
                s,
                smaller,
                larger,
            } => {
                write!(f, "A={a} B={b} C={c} D={d} S={s}: v^CD(S)={larger} > v^AB(S)={smaller}")
            }
            Self::ImpactExceeds {
                a,
                b,
                player,
                impact,
                reference,
                bound,
            } => match reference {
                Some(r) => write!(
                    f,
                    "A={a} B={b}: impact on {player} is {impact} > impact on {r} = {bound}"
                ),
                None => write!(f, "A={a} B={b}: impact on {player} is {impact} > {bound}"),
            },
            Self::ImpactNegative { a, b, player, impact } => {
                write!(f, "A={a} B={b}: participant {player} has impact {impact} < 0")
            }
            Self::Lemma1 {
                a_part,
                b_part,
                s,
                joined,
                alone,
            } => {
                write!(f, "A'={a_part} B'={b_part} S={s}: dv(S∪A')={joined} != dv(S)={alone}")
            }
        }
    }
}

/// Outcome of checking one theorem on one game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub instance: String,
    pub verdict: Verdict,
    /// Present iff the verdict is `Violated`.
    pub counterexample: Option<Witness>,
    /// Supporting evidence, e.g. the dominance witness that shows a
    /// non-convex game is caught by the converse direction.
    pub evidence: Option<Witness>,
    /// Number of boycott specifications (or spec chains) examined.
    pub instances_checked: u64,
    /// Specs `(A, B)` with some `S` where `v^AB(S) > v(S)` (convexity scan only).
    pub dominance_violations: u64,
}

impl TheoremReport {
    fn new(theorem: TheoremId, instance: String) -> Self {
        Self {
            theorem,
            instance,
            verdict: Verdict::Holds,
            counterexample: None,
            evidence: None,
            instances_checked: 0,
            dominance_violations: 0,
        }
    }

    fn violate(&mut self, w: Witness) {
        if self.counterexample.is_none() {
            self.verdict = Verdict::Violated;
            self.counterexample = Some(w);
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Holds => "HOLDS",
            Verdict::Violated => "VIOLATED",
        };
        write!(
            f,
            "{:<20} {:<8} {} [{} checked]",
            self.theorem.name(),
            verdict,
            self.instance,
            self.instances_checked
        )?;
        if let Some(w) = &self.counterexample {
            write!(f, "\n  counterexample: {w}")?;
        }
        if let Some(w) = &self.evidence {
            write!(f, "\n  evidence: {w}")?;
        }
        Ok(())
    }
}

/// Which boycott specifications a verifier visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Exhaustive,
    /// `specs` seeded random specifications.
    Random {
        specs: usize,
        seed: u64,
    },
}

fn describe(g: &Game) -> String {
    format!("{}-player game", g.n())
}

fn require_convex(g: &Game, theorem: TheoremId) -> Result<(), GameError> {
    match g.supermodularity_violation() {
        None => Ok(()),
        Some(w) => Err(GameError::Precondition(format!(
            "{theorem} needs a convex game; violated at {w}"
        ))),
    }
}

fn coalition(n: usize, bits: u32) -> Coalition {
    Coalition::from_bits(n, bits).expect("mask within universe")
}

/// Scans all `3^n` disjoint `(A, B)` for `v^AB(S) > v(S)` and confirms the
/// biconditional: a convex game admits none, a non-convex game at least one.
pub fn verify_convexity_theorem(g: &Game) -> Result<TheoremReport, GameError> {
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(GameError::InstanceTooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let full = universe_mask(n);
    let nums = g.nums();

    // Per boycotting side A: (specs checked, specs with a witness, first witness).
    type Scan = (u64, u64, Option<(u32, u32, u32)>);
    let per_a: Vec<Scan> = (0..=full)
        .into_par_iter()
        .map(|a| {
            let (mut checked, mut bad, mut first) = (0u64, 0u64, None);
            for b in submasks(full & !a) {
                checked += 1;
                let after = boycott_nums(nums, a, b);
                if let Some(s) = after.iter().zip(nums).position(|(x, y)| x > y) {
                    bad += 1;
                    first.get_or_insert((a, b, s as u32));
                }
            }
            (checked, bad, first)
        })
        .collect();

    let mut report = TheoremReport::new(TheoremId::Convexity, describe(g));
    let mut first = None;
    for (checked, bad, w) in per_a {
        report.instances_checked += checked;
        report.dominance_violations += bad;
        if first.is_none() {
            first = w;
        }
    }
    let first = first.map(|(a, b, s)| Witness::Dominance {
        a: coalition(n, a),
        b: coalition(n, b),
        s: coalition(n, s),
        original: g.value_of_bits(s),
        boycotted: GameValue::from_i128_ratio(boycott_nums(nums, a, b)[s as usize], g.den()),
    });

    match (g.supermodularity_violation(), first) {
        (None, None) => {}
        (None, Some(w)) => report.violate(w),
        (Some(_), Some(w)) => report.evidence = Some(w),
        (Some(pair), None) => report.violate(Witness::NotConvex(pair)),
    }
    Ok(report)
}

/// Random chain `A ⊆ C`, `B ⊆ D`, `C ∩ D = ∅`: each player lands in one of
/// `A`, `C∖A`, `B`, `D∖B` or outside, uniformly.
fn random_chain(n: usize, rng: &mut ChaCha8Rng) -> (u32, u32, u32, u32) {
    let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
    for p in 0..n {
        let bit = 1u32 << p;
        match rng.gen_range(0..5) {
            0 => {
                a |= bit;
                c |= bit;
            }
            1 => c |= bit,
            2 => {
                b |= bit;
                d |= bit;
            }
            3 => d |= bit,
            _ => {}
        }
    }
    (a, b, c, d)
}

/// Checks `v^CD <= v^AB` pointwise for nested boycotts of a convex game.
pub fn verify_nested_monotonicity(g: &Game, enumeration: Enumeration) -> Result<TheoremReport, GameError> {
    require_convex(g, TheoremId::NestedMonotonicity)?;
    let n = g.n();
    let full = universe_mask(n);
    let nums = g.nums();
    let mut report = TheoremReport::new(TheoremId::NestedMonotonicity, describe(g));

    let check = |report: &mut TheoremReport, a: u32, b: u32, c: u32, d: u32, outer: &[i128]| {
        report.instances_checked += 1;
        if report.counterexample.is_some() {
            return;
        }
        let inner = boycott_nums(nums, a, b);
        if let Some(s) = outer.iter().zip(&inner).position(|(o, i)| o > i) {
            report.violate(Witness::Nested {
                a: coalition(n, a),
                b: coalition(n, b),
                c: coalition(n, c),
                d: coalition(n, d),
                s: coalition(n, s as u32),
                smaller: GameValue::from_i128_ratio(inner[s], g.den()),
                larger: GameValue::from_i128_ratio(outer[s], g.den()),
            });
        }
    };

    match enumeration {
        Enumeration::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(GameError::InstanceTooLarge {
                    n,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            for c in 0..=full {
                for d in submasks(full & !c) {
                    let outer = boycott_nums(nums, c, d);
                    for a in submasks(c) {
                        for b in submasks(d) {
                            check(&mut report, a, b, c, d, &outer);
                        }
                    }
                }
            }
        }
        Enumeration::Random { specs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..specs {
                let (a, b, c, d) = random_chain(n, &mut rng);
                let outer = boycott_nums(nums, c, d);
                check(&mut report, a, b, c, d, &outer);
            }
        }
    }
    Ok(report)
}

/// Many-on-one specs `({i}, B)` with `B` nonempty and `i ∉ B`.
fn many_on_one_specs(n: usize, enumeration: Enumeration) -> Vec<(usize, u32)> {
    let full = universe_mask(n);
    match enumeration {
        Enumeration::Exhaustive => (0..n)
            .flat_map(|i| submasks(full & !(1 << i)).filter(|&b| b != 0).map(move |b| (i, b)))
            .collect(),
        Enumeration::Random { specs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..specs)
                .filter_map(|_| {
                    let i = rng.gen_range(0..n);
                    let b = rng.gen_range(0..=full) & !(1 << i);
                    (b != 0).then_some((i, b))
                })
                .collect()
        }
    }
}

/// In `v^{iB}` the impact on `i` is at least the impact on every player.
pub fn verify_many_on_one(g: &Game, enumeration: Enumeration) -> Result<TheoremReport, GameError> {
    require_convex(g, TheoremId::ManyOnOne)?;
    let n = g.n();
    let mut report = TheoremReport::new(TheoremId::ManyOnOne, describe(g));
    for (i, b) in many_on_one_specs(n, enumeration) {
        report.instances_checked += 1;
        let spec = BoycottSpec::new(coalition(n, 1 << i), coalition(n, b))?;
        let imp = impact(g, &spec)?;
        if let Some(p) = (0..n).find(|&p| imp[p] > imp[i]) {
            report.violate(Witness::ImpactExceeds {
                a: spec.boycotters(),
                b: spec.boycotted(),
                player: p,
                impact: imp[p].clone(),
                reference: Some(i),
                bound: imp[i].clone(),
            });
            break;
        }
    }
    Ok(report)
}

/// Specs with both sides nonempty.
fn two_sided_specs(n: usize, enumeration: Enumeration) -> Vec<(u32, u32)> {
    let full = universe_mask(n);
    match enumeration {
        Enumeration::Exhaustive => (1..=full)
            .flat_map(|a| submasks(full & !a).filter(|&b| b != 0).map(move |b| (a, b)))
            .collect(),
        Enumeration::Random { specs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..specs)
                .filter_map(|_| {
                    let (mut a, mut b) = (0u32, 0u32);
                    for p in 0..n {
                        match rng.gen_range(0..3) {
                            0 => a |= 1 << p,
                            1 => b |= 1 << p,
                            _ => {}
                        }
                    }
                    (a != 0 && b != 0).then_some((a, b))
                })
                .collect()
        }
    }
}

/// Impact is `>= 0` on members of `A ∪ B` and `<= 0` on invariant players.
pub fn verify_sign_theorem(g: &Game, enumeration: Enumeration) -> Result<TheoremReport, GameError> {
    require_convex(g, TheoremId::Sign)?;
    let n = g.n();
    let before = shapley_exact(g);
    let zero = GameValue::zero();
    let mut report = TheoremReport::new(TheoremId::Sign, describe(g));
    for (a, b) in two_sided_specs(n, enumeration) {
        report.instances_checked += 1;
        let spec = BoycottSpec::new(coalition(n, a), coalition(n, b))?;
        let after_game = boycott(g, &spec)?;
        let imp = before.minus(&shapley_exact(&after_game));
        let (sa, sb) = (spec.boycotters(), spec.boycotted());
        let bad = (0..n).find_map(|p| {
            if spec.participants().contains(p) {
                imp[p].is_negative().then(|| Witness::ImpactNegative {
                    a: sa,
                    b: sb,
                    player: p,
                    impact: imp[p].clone(),
                })
            } else if g.agrees_on_coalitions_with(&after_game, p).expect("same universe") && imp[p] > zero {
                Some(Witness::ImpactExceeds {
                    a: sa,
                    b: sb,
                    player: p,
                    impact: imp[p].clone(),
                    reference: None,
                    bound: zero.clone(),
                })
            } else {
                None
            }
        });
        if let Some(w) = bad {
            report.violate(w);
            break;
        }
    }
    Ok(report)
}

/// For disjointly productive `A, B`: `dv_{B'}(S ∪ A') = dv_{B'}(S)` for all
/// `A' ⊆ A`, `B' ⊆ B`, `S ⊆ N∖(A∪B)`.
pub fn verify_lemma1(g: &Game, a: &Coalition, b: &Coalition) -> Result<TheoremReport, GameError> {
    if let Some(w) = g.disjoint_productivity_violation(a, b)? {
        return Err(GameError::Precondition(format!(
            "A and B are not disjointly productive at {w}"
        )));
    }
    let n = g.n();
    let nums = g.nums();
    let rest = universe_mask(n) & !a.bits() & !b.bits();
    let mut report = TheoremReport::new(TheoremId::Lemma1, format!("{} A={a} B={b}", describe(g)));
    'outer: for a_part in submasks(a.bits()) {
        for b_part in submasks(b.bits()) {
            for s in submasks(rest) {
                report.instances_checked += 1;
                let v = |m: u32| nums[m as usize];
                let joined = v(s | a_part | b_part) - v(s | a_part);
                let alone = v(s | b_part) - v(s);
                if joined != alone {
                    report.violate(Witness::Lemma1 {
                        a_part: coalition(n, a_part),
                        b_part: coalition(n, b_part),
                        s: coalition(n, s),
                        joined: GameValue::from_i128_ratio(joined, g.den()),
                        alone: GameValue::from_i128_ratio(alone, g.den()),
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(report)
}
