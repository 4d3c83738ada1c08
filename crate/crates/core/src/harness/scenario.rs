//! Scenario reports: values before and after a boycott next to the closed
//! forms known for the triangle and trade-block families.

use std::fmt;

use serde::Serialize;

use crate::boycott::{boycott, BoycottSpec, Role};
use crate::coalition::Coalition;
use crate::error::GameError;
use crate::generators::{ScenarioSpec, ThreeBlockLayout};
use crate::rational::{q, GameValue};
use crate::values::shapley_exact;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreeBlockVariant {
    /// Block `I` boycotts block `J`.
    Blocks,
    /// As `Blocks`, but the key player of `I` stays out.
    Dropout,
}

/// The named scenarios the CLI can reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Player 1 boycotts player 2 in the three-player example.
    Triangle,
    /// Homogeneous block of `n`; players `0..a` boycott `a..a+b`.
    Homogeneous {
        n: usize,
        a: usize,
        b: usize,
    },
    /// Heterogeneous block of `n` with special player `0`; players `1..=a` boycott it.
    Heterogeneous {
        n: usize,
        a: usize,
    },
    ThreeBlock {
        n: usize,
        variant: ThreeBlockVariant,
    },
}

impl Scenario {
    pub fn id(&self) -> String {
        match self {
            Self::Triangle => "triangle".into(),
            Self::Homogeneous { n, a, b } => format!("homogeneous(n={n},a={a},b={b})"),
            Self::Heterogeneous { n, a } => format!("heterogeneous(n={n},a={a})"),
            Self::ThreeBlock {
                n,
                variant: ThreeBlockVariant::Blocks,
            } => format!("three-block(n={n},blocks)"),
            Self::ThreeBlock {
                n,
                variant: ThreeBlockVariant::Dropout,
            } => format!("three-block(n={n},dropout)"),
        }
    }

    pub fn setup(&self) -> Result<(ScenarioSpec, BoycottSpec), GameError> {
        let bad = |msg: String| Err(GameError::InvalidParameter(msg));
        match *self {
            Self::Triangle => Ok((ScenarioSpec::Triangle, BoycottSpec::one_on_one(3, 0, 1)?)),
            Self::Homogeneous { n, a, b } => {
                if a == 0 || b == 0 || a + b > n {
                    return bad(format!(
                        "homogeneous needs a, b >= 1 and a + b <= n, got n={n} a={a} b={b}"
                    ));
                }
                let spec = BoycottSpec::new(Coalition::range(n, 0, a)?, Coalition::range(n, a, a + b)?)?;
                Ok((ScenarioSpec::Homogeneous { n }, spec))
            }
            Self::Heterogeneous { n, a } => {
                if a == 0 || a >= n {
                    return bad(format!("heterogeneous needs 1 <= a < n, got n={n} a={a}"));
                }
                let spec = BoycottSpec::new(Coalition::range(n, 1, a + 1)?, Coalition::singleton(n, 0)?)?;
                Ok((ScenarioSpec::Heterogeneous { n, x: 0 }, spec))
            }
            Self::ThreeBlock { n, variant } => {
                if n == 0 {
                    return bad("three-block needs n >= 1".into());
                }
                let layout = ThreeBlockLayout { n };
                let total = layout.players();
                let mut i_side = Coalition::from_bits(total, layout.block(0))?;
                if variant == ThreeBlockVariant::Dropout {
                    i_side = i_side.without(layout.key(0));
                }
                let spec = BoycottSpec::new(i_side, Coalition::from_bits(total, layout.block(1))?)?;
                Ok((ScenarioSpec::ThreeBlock { n }, spec))
            }
        }
    }

    pub fn run(&self) -> Result<ScenarioReport, GameError> {
        let (spec, boycott) = self.setup()?;
        let mut report = run_scenario(&spec, &boycott)?;
        report.id = self.id();
        Ok(report)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioRow {
    pub player: usize,
    pub name: String,
    pub role: Role,
    pub pre: GameValue,
    pub post: GameValue,
    pub impact: GameValue,
    pub expected_pre: Option<GameValue>,
    pub expected_post: Option<GameValue>,
    /// `None` when no closed form covers this player.
    pub matches: Option<bool>,
}

/// Exact computations for the dropout boycott `(I∖{i}, J)` of the
/// three-block game. The stated value `n + 2` is compared against both
/// the impact on `i` and `j` and their post-boycott values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DropoutFindings {
    pub n: usize,
    pub key_i: usize,
    pub key_j: usize,
    pub argmax: Vec<usize>,
    /// Both `i` and `j` attain the maximal impact.
    pub keys_jointly_maximal: bool,
    pub impact_i: GameValue,
    pub impact_j: GameValue,
    pub post_i: GameValue,
    pub post_j: GameValue,
    pub n_plus_2: GameValue,
    /// `n + 2` equals the impact on both `i` and `j`.
    pub impact_reading_matches: bool,
    /// `n + 2` equals the post-boycott value of both `i` and `j`.
    pub value_reading_matches: bool,
    /// Total impact on blocks `I` and `J`.
    pub impact_on_i_block: GameValue,
    pub impact_on_j_block: GameValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub boycott: BoycottSpec,
    pub rows: Vec<ScenarioRow>,
    pub grand_pre: GameValue,
    pub grand_post: GameValue,
    pub expected_grand_pre: Option<GameValue>,
    pub expected_grand_post: Option<GameValue>,
    /// True iff every stated closed form equals the computed value exactly.
    pub matches: bool,
    pub dropout: Option<DropoutFindings>,
}

#[derive(Default)]
struct Expectations {
    pre: Vec<Option<GameValue>>,
    post: Vec<Option<GameValue>>,
    grand_pre: Option<GameValue>,
    grand_post: Option<GameValue>,
}

fn one_minus_inverse(k: usize) -> GameValue {
    q(k as i64 - 1, k as i64)
}

fn closed_forms(spec: &ScenarioSpec, boycott: &BoycottSpec, players: usize) -> Expectations {
    let mut e = Expectations {
        pre: vec![None; players],
        post: vec![None; players],
        ..Default::default()
    };
    let (a_side, b_side) = (boycott.boycotters(), boycott.boycotted());
    match spec {
        ScenarioSpec::Triangle => {
            e.pre = vec![Some(q(4, 1)); 3];
            let ones = [(0usize, 1usize), (1, 0)];
            if ones
                .iter()
                .any(|&(i, j)| *boycott == BoycottSpec::one_on_one(3, i, j).unwrap())
            {
                e.post = vec![Some(q(3, 1)), Some(q(3, 1)), Some(q(6, 1))];
            }
        }
        ScenarioSpec::Homogeneous { n } => {
            let (a, b) = (a_side.len(), b_side.len());
            e.pre = vec![Some(one_minus_inverse(*n)); *n];
            if a > 0 && b > 0 {
                for p in a_side.players() {
                    e.post[p] = Some(one_minus_inverse(n - b));
                }
                for p in b_side.players() {
                    e.post[p] = Some(one_minus_inverse(n - a));
                }
            }
        }
        ScenarioSpec::Heterogeneous { n, x } => {
            let (n, x) = (*n, *x);
            let nn = n as i64;
            for p in 0..n {
                e.pre[p] = Some(if p == x { q(nn * nn - 1, nn) } else { q(2 * nn - 1, nn) });
            }
            // many-on-one: A versus {x}, in either orientation
            let (many, one) = if b_side.len() == 1 && b_side.contains(x) {
                (a_side, b_side)
            } else {
                (b_side, a_side)
            };
            if one.len() == 1 && one.contains(x) && !many.is_empty() {
                let a = many.len() as i64;
                for p in many.players() {
                    e.post[p] = Some(one_minus_inverse(n - 1));
                }
                e.post[x] = Some(q((nn - a) * (nn - a) - 1, nn - a));
            }
        }
        ScenarioSpec::ThreeBlock { n } => {
            let layout = ThreeBlockLayout { n: *n };
            let nn = *n as i64;
            let total = layout.players();
            let is_key = |p: usize| (0..3).any(|b| layout.key(b) == p);
            let pre_of = |p: usize| if is_key(p) { q(4 * nn + 5, 3) } else { q(5, 3) };
            for p in 0..total {
                e.pre[p] = Some(pre_of(p));
            }
            e.grand_pre = Some(q(9 * nn, 1));

            let block = |b: usize| Coalition::from_bits(total, layout.block(b)).unwrap();
            let (bi, bj, bk) = (block(0), block(1), block(2));
            let dropout_i = bi.without(layout.key(0));
            let sides = (a_side, b_side);
            if sides == (bi, bj) || sides == (bj, bi) {
                e.grand_post = Some(q(7 * nn, 1));
                for p in 0..total {
                    e.post[p] = Some(if bk.contains(p) {
                        pre_of(p)
                    } else if is_key(p) {
                        q(2 * nn + 4, 3)
                    } else {
                        q(4, 3)
                    });
                }
            } else if sides == (dropout_i, bj) {
                for p in dropout_i.players() {
                    e.post[p] = Some(q(4, 3));
                }
                for p in bj.players().filter(|&p| !is_key(p)) {
                    e.post[p] = Some(q(5, 3));
                }
            }
        }
        ScenarioSpec::Myerson { .. } | ScenarioSpec::RandomConvex { .. } | ScenarioSpec::RandomAny { .. } => {}
    }
    e
}

fn dropout_findings(n: usize, rows: &[ScenarioRow], argmax: Vec<usize>) -> DropoutFindings {
    let layout = ThreeBlockLayout { n };
    let (key_i, key_j) = (layout.key(0), layout.key(1));
    let n_plus_2 = GameValue::from_integer(n as i64 + 2);
    let in_block = |b: usize| -> GameValue {
        rows.iter()
            .filter(|r| layout.block(b) & (1 << r.player) != 0)
            .map(|r| &r.impact)
            .sum()
    };
    let (ri, rj) = (&rows[key_i], &rows[key_j]);
    DropoutFindings {
        n,
        key_i,
        key_j,
        keys_jointly_maximal: argmax.contains(&key_i) && argmax.contains(&key_j),
        argmax,
        impact_i: ri.impact.clone(),
        impact_j: rj.impact.clone(),
        post_i: ri.post.clone(),
        post_j: rj.post.clone(),
        impact_reading_matches: ri.impact == n_plus_2 && rj.impact == n_plus_2,
        value_reading_matches: ri.post == n_plus_2 && rj.post == n_plus_2,
        n_plus_2,
        impact_on_i_block: in_block(0),
        impact_on_j_block: in_block(1),
    }
}

/// Computes pre- and post-boycott Shapley values for a generated game and
/// compares them with the closed forms that apply to this boycott.
pub fn run_scenario(spec: &ScenarioSpec, boycott_spec: &BoycottSpec) -> Result<ScenarioReport, GameError> {
    let game = spec.build()?;
    let after = boycott(&game, boycott_spec)?;
    let pre = shapley_exact(&game);
    let post = shapley_exact(&after);
    let n = game.n();
    let e = closed_forms(spec, boycott_spec, n);

    let rows: Vec<ScenarioRow> = (0..n)
        .map(|p| {
            let (expected_pre, expected_post) = (e.pre[p].clone(), e.post[p].clone());
            let matches = match (&expected_pre, &expected_post) {
                (None, None) => None,
                _ => Some(
                    expected_pre.as_ref().is_none_or(|x| *x == pre[p])
                        && expected_post.as_ref().is_none_or(|x| *x == post[p]),
                ),
            };
            ScenarioRow {
                player: p,
                name: game.player_name(p),
                role: boycott_spec.role_of(p),
                pre: pre[p].clone(),
                post: post[p].clone(),
                impact: &pre[p] - &post[p],
                expected_pre,
                expected_post,
                matches,
            }
        })
        .collect();

    let (grand_pre, grand_post) = (game.grand_value(), after.grand_value());
    let grand_ok =
        e.grand_pre.as_ref().is_none_or(|x| *x == grand_pre) && e.grand_post.as_ref().is_none_or(|x| *x == grand_post);
    let matches = grand_ok && rows.iter().all(|r| r.matches != Some(false));

    let dropout = match spec {
        ScenarioSpec::ThreeBlock { n: blocks } => {
            let layout = ThreeBlockLayout { n: *blocks };
            let total = layout.players();
            let dropout_i = Coalition::from_bits(total, layout.block(0) & !(1 << layout.key(0)))?;
            let bj = Coalition::from_bits(total, layout.block(1))?;
            let is_dropout = boycott_spec.boycotters() == dropout_i && boycott_spec.boycotted() == bj;
            is_dropout.then(|| {
                let impacts = crate::values::ValueVector::new(rows.iter().map(|r| r.impact.clone()).collect());
                let max = impacts.iter().max().cloned().unwrap_or_default();
                let argmax = (0..total).filter(|&p| impacts[p] == max).collect();
                dropout_findings(*blocks, &rows, argmax)
            })
        }
        _ => None,
    };

    Ok(ScenarioReport {
        id: scenario_label(spec, boycott_spec),
        boycott: *boycott_spec,
        rows,
        grand_pre,
        grand_post,
        expected_grand_pre: e.grand_pre,
        expected_grand_post: e.grand_post,
        matches,
        dropout,
    })
}

fn scenario_label(spec: &ScenarioSpec, boycott: &BoycottSpec) -> String {
    let family = match spec {
        ScenarioSpec::Homogeneous { n } => format!("homogeneous(n={n})"),
        ScenarioSpec::Heterogeneous { n, x } => format!("heterogeneous(n={n},x={x})"),
        ScenarioSpec::ThreeBlock { n } => format!("three-block(n={n})"),
        ScenarioSpec::Triangle => "triangle".into(),
        ScenarioSpec::Myerson { graph, .. } => format!("myerson({} vertices)", graph.vertex_count()),
        ScenarioSpec::RandomConvex { n, seed } => format!("random-convex(n={n},seed={seed})"),
        ScenarioSpec::RandomAny { n, seed } => format!("random(n={n},seed={seed})"),
    };
    format!("{family} {boycott}")
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}  ({})", self.id, self.boycott)?;
        writeln!(
            f,
            "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}  verdict",
            "player", "role", "pre", "post", "impact", "exp.pre", "exp.post"
        )?;
        let opt = |v: &Option<GameValue>| v.as_ref().map_or("-".to_string(), |x| x.to_string());
        for r in &self.rows {
            let verdict = match r.matches {
                Some(true) => "MATCH",
                Some(false) => "MISMATCH",
                None => "-",
            };
            writeln!(
                f,
                "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}  {verdict}",
                r.name,
                r.role.to_string(),
                r.pre.to_string(),
                r.post.to_string(),
                r.impact.to_string(),
                opt(&r.expected_pre),
                opt(&r.expected_post),
            )?;
        }
        let grand_verdict = match (&self.expected_grand_pre, &self.expected_grand_post) {
            (None, None) => "-",
            _ if self.expected_grand_pre.as_ref().is_none_or(|x| *x == self.grand_pre)
                && self.expected_grand_post.as_ref().is_none_or(|x| *x == self.grand_post) =>
            {
                "MATCH"
            }
            _ => "MISMATCH",
        };
        writeln!(
            f,
            "v(N): {} -> {}  expected {} -> {}  {grand_verdict}",
            self.grand_pre,
            self.grand_post,
            opt(&self.expected_grand_pre),
            opt(&self.expected_grand_post)
        )?;
        if let Some(d) = &self.dropout {
            let players: Vec<String> = d.argmax.iter().map(|p| p.to_string()).collect();
            writeln!(
                f,
                "largest impact on players [{}]; i={} and j={} jointly maximal: {}",
                players.join(","),
                d.key_i,
                d.key_j,
                d.keys_jointly_maximal
            )?;
            writeln!(
                f,
                "impact on i, j: {}, {}; post-boycott value of i, j: {}, {}",
                d.impact_i, d.impact_j, d.post_i, d.post_j
            )?;
            writeln!(
                f,
                "n+2 = {}: equals impact: {}; equals post-boycott value: {}",
                d.n_plus_2, d.impact_reading_matches, d.value_reading_matches
            )?;
            writeln!(
                f,
                "total impact on block I: {}, on block J: {}",
                d.impact_on_i_block, d.impact_on_j_block
            )?;
        }
        write!(f, "overall: {}", if self.matches { "MATCH" } else { "MISMATCH" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_matches() {
        let r = Scenario::Triangle.run().unwrap();
        assert!(r.matches);
        let impacts: Vec<_> = r.rows.iter().map(|row| row.impact.clone()).collect();
        assert_eq!(impacts, vec![q(1, 1), q(1, 1), q(-2, 1)]);
        assert_eq!(r.rows[0].name, "1");
    }

    #[test]
    fn invalid_parameters() {
        assert!(Scenario::Homogeneous { n: 3, a: 2, b: 2 }.setup().is_err());
        assert!(Scenario::Heterogeneous { n: 3, a: 3 }.setup().is_err());
        assert!(Scenario::ThreeBlock {
            n: 0,
            variant: ThreeBlockVariant::Blocks
        }
        .setup()
        .is_err());
    }

    #[test]
    fn dropout_findings_at_two() {
        let r = Scenario::ThreeBlock {
            n: 2,
            variant: ThreeBlockVariant::Dropout,
        }
        .run()
        .unwrap();
        let d = r.dropout.as_ref().unwrap();
        assert!(d.keys_jointly_maximal);
        assert!(d.value_reading_matches);
        assert!(!d.impact_reading_matches);
        assert!(r.matches);
    }

    #[test]
    fn display_has_verdicts() {
        let text = Scenario::Triangle.run().unwrap().to_string();
        assert!(text.contains("MATCH"));
        assert!(!text.contains("MISMATCH"));
    }
}
