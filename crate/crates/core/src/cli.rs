//! Command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input, 2 a checked property is
//! violated, 3 a size limit is exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::boycott::{boycott, BoycottSpec};
use crate::coalition::Coalition;
use crate::document::{DocumentError, GameDocument, GraphDocument};
use crate::error::GameError;
use crate::game::{is_invariant_player, Game};
use crate::generators::myerson_restriction;
use crate::harness::{
    verify_convexity_theorem, verify_lemma1, verify_many_on_one, verify_nested_monotonicity, verify_sign_theorem,
    Enumeration, Scenario, TheoremId, TheoremReport, ThreeBlockVariant,
};
use crate::values::{impact, shapley_exact, shapley_sampled};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_SIZE: i32 = 3;

/// Player counts up to which `verify` enumerates specs exhaustively by default.
const DEFAULT_EXHAUSTIVE_UP_TO: usize = 7;
const DEFAULT_TRIALS: usize = 100;

#[derive(Parser, Debug)]
#[command(
    name = "tu-boycott",
    version,
    about = "Boycott games and Shapley values for cooperative TU games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shapley value, exact or by permutation sampling.
    Shapley {
        game: PathBuf,
        /// Number of sampled orderings; selects sampling mode.
        #[arg(long)]
        sample: Option<u64>,
        /// Sampling seed (only with --sample).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Apply a boycott and write the resulting game document.
    Boycott {
        game: PathBuf,
        #[command(flatten)]
        sides: Sides,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-player values before and after a boycott.
    Impact {
        game: PathBuf,
        #[command(flatten)]
        sides: Sides,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a property of a game.
    Check {
        game: PathBuf,
        #[command(subcommand)]
        check: CheckKind,
    },
    /// Verify the boycott theorems on a game.
    Verify {
        game: PathBuf,
        /// Theorem id or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        /// Random spec count instead of exhaustive enumeration.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Boycott sides for the lemma check.
        #[command(flatten)]
        sides: Sides,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reproduce a named scenario and compare with its closed forms.
    Scenario {
        #[command(subcommand)]
        scenario: ScenarioCmd,
        #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
        format: Format,
    },
    /// Restrict a game to a communication graph.
    Myerson {
        base: PathBuf,
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Sides {
    /// Boycotting players, comma separated.
    #[arg(long = "a", value_delimiter = ',')]
    a: Vec<usize>,
    /// Boycotted players, comma separated.
    #[arg(long = "b", value_delimiter = ',')]
    b: Vec<usize>,
}

impl Sides {
    fn spec(&self, n: usize) -> Result<BoycottSpec, GameError> {
        BoycottSpec::from_players(n, &self.a, &self.b)
    }

    fn given(&self) -> bool {
        !self.a.is_empty() || !self.b.is_empty()
    }
}

#[derive(Subcommand, Debug)]
enum CheckKind {
    Convex,
    Disjoint {
        #[command(flatten)]
        sides: Sides,
    },
    Invariant {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        sides: Sides,
    },
}

#[derive(Subcommand, Debug)]
enum ScenarioCmd {
    Triangle,
    Homogeneous {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    Heterogeneous {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
    },
    ThreeBlock {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Blocks)]
        variant: VariantArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Blocks,
    Dropout,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Size(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Size(_) => EXIT_SIZE,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::SizeLimitExceeded(_) | GameError::InstanceTooLarge { .. } => CliError::Size(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Game(g) => g.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_game(path: &PathBuf) -> Result<Game, CliError> {
    Ok(GameDocument::parse(&read_input(path)?)?.into_game()?)
}

fn emit_document(doc: &GameDocument, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<(), CliError> {
    let text = doc.to_json();
    match output {
        Some(path) => fs::write(path, text + "\n")?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))?;
    Ok(())
}

/// Aligned text table, first column left-aligned.
fn write_table(header: &[&str], rows: &[Vec<String>], out: &mut dyn Write) -> Result<(), CliError> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn write_csv(header: &[&str], rows: &[Vec<String>], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_rows(format: Format, header: &[&str], rows: &[Vec<String>], out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(header, rows, out),
        _ => write_table(header, rows, out),
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Shapley {
            game,
            sample,
            seed,
            format,
        } => cmd_shapley(&load_game(&game)?, sample, seed, format, out),
        Command::Boycott { game, sides, output } => {
            let g = load_game(&game)?;
            let after = boycott(&g, &sides.spec(g.n())?)?;
            emit_document(&GameDocument::from_game(&after), &output, out)?;
            Ok(EXIT_OK)
        }
        Command::Impact { game, sides, format } => cmd_impact(&load_game(&game)?, &sides, format, out),
        Command::Check { game, check } => cmd_check(&load_game(&game)?, check, out),
        Command::Verify {
            game,
            theorem,
            trials,
            seed,
            sides,
            format,
        } => cmd_verify(&load_game(&game)?, &theorem, trials, seed, &sides, format, out),
        Command::Scenario { scenario, format } => cmd_scenario(scenario, format, out),
        Command::Myerson { base, graph, output } => {
            let g = load_game(&base)?;
            let graph = GraphDocument::parse(&read_input(&graph)?)?.into_graph()?;
            emit_document(
                &GameDocument::from_game(&myerson_restriction(&g, &graph)?),
                &output,
                out,
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_shapley(
    g: &Game,
    sample: Option<u64>,
    seed: Option<u64>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    match (sample, seed) {
        (None, None) => {
            let phi = shapley_exact(g);
            if format == Format::Json {
                write_json(&serde_json::json!({ "mode": "exact", "values": phi }), out)?;
            } else {
                let rows: Vec<Vec<String>> = (0..g.n())
                    .map(|p| vec![p.to_string(), g.player_name(p), phi[p].to_string()])
                    .collect();
                write_rows(format, &["player", "name", "value"], &rows, out)?;
            }
        }
        (Some(m), seed) => {
            let est = shapley_sampled(g, m, seed.unwrap_or(0))?;
            if format == Format::Json {
                write_json(&serde_json::json!({ "mode": "sampled", "result": est }), out)?;
            } else {
                let rows: Vec<Vec<String>> = (0..g.n())
                    .map(|p| {
                        vec![
                            p.to_string(),
                            g.player_name(p),
                            format!("{}", est.estimates[p]),
                            format!("{}", est.std_errors[p]),
                        ]
                    })
                    .collect();
                write_rows(format, &["player", "name", "estimate", "std_error"], &rows, out)?;
            }
        }
        (None, Some(_)) => return Err(CliError::Input("--seed requires --sample".into())),
    }
    Ok(EXIT_OK)
}

fn cmd_impact(g: &Game, sides: &Sides, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = sides.spec(g.n())?;
    let pre = shapley_exact(g);
    let imp = impact(g, &spec)?;
    let rows: Vec<Vec<String>> = (0..g.n())
        .map(|p| {
            vec![
                p.to_string(),
                g.player_name(p),
                imp.roles[p].to_string(),
                pre[p].to_string(),
                (&pre[p] - &imp[p]).to_string(),
                imp[p].to_string(),
            ]
        })
        .collect();
    let header = ["player", "name", "role", "pre", "post", "impact"];
    if format == Format::Json {
        let objects: Vec<_> = rows
            .iter()
            .map(|r| {
                header
                    .iter()
                    .zip(r)
                    .map(|(h, c)| (h.to_string(), serde_json::Value::from(c.as_str())))
                    .collect::<serde_json::Map<_, _>>()
            })
            .collect();
        write_json(&objects, out)?;
    } else {
        write_rows(format, &header, &rows, out)?;
    }
    Ok(EXIT_OK)
}

fn cmd_check(g: &Game, check: CheckKind, out: &mut dyn Write) -> Result<i32, CliError> {
    let violation = match check {
        CheckKind::Convex => g
            .supermodularity_violation()
            .map(|w| format!("not convex: witness {w}")),
        CheckKind::Disjoint { sides } => {
            let spec = sides.spec(g.n())?;
            g.disjoint_productivity_violation(&spec.boycotters(), &spec.boycotted())?
                .map(|w| format!("not disjointly productive: witness {w}"))
        }
        CheckKind::Invariant { k, sides } => {
            let spec = sides.spec(g.n())?;
            g.check_player(k)?;
            let after = boycott(g, &spec)?;
            if is_invariant_player(g, &after, k)? {
                None
            } else {
                let s = (0..1u32 << g.n())
                    .find(|s| s & (1 << k) != 0 && g.value_of_bits(*s) != after.value_of_bits(*s))
                    .expect("a differing coalition exists");
                Some(format!(
                    "player {k} is not invariant: witness S={} with v(S)={} and v^AB(S)={}",
                    Coalition::from_bits(g.n(), s)?,
                    g.value_of_bits(s),
                    after.value_of_bits(s)
                ))
            }
        }
    };
    match violation {
        None => {
            writeln!(out, "yes")?;
            Ok(EXIT_OK)
        }
        Some(msg) => {
            writeln!(out, "no: {msg}")?;
            Ok(EXIT_VIOLATION)
        }
    }
}

fn cmd_verify(
    g: &Game,
    theorem: &str,
    trials: Option<usize>,
    seed: u64,
    sides: &Sides,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let wanted: Vec<TheoremId> = if theorem == "all" {
        TheoremId::ALL.to_vec()
    } else {
        vec![TheoremId::parse(theorem).ok_or_else(|| CliError::Input(format!("unknown theorem {theorem:?}")))?]
    };
    let enumeration = match trials {
        Some(specs) => Enumeration::Random { specs, seed },
        None if g.n() <= DEFAULT_EXHAUSTIVE_UP_TO => Enumeration::Exhaustive,
        None => Enumeration::Random {
            specs: DEFAULT_TRIALS,
            seed,
        },
    };
    let convex = g.is_supermodular();
    let single = wanted.len() == 1;

    let mut reports: Vec<TheoremReport> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    for t in wanted {
        let report = match t {
            TheoremId::Convexity => verify_convexity_theorem(g)?,
            TheoremId::NestedMonotonicity | TheoremId::ManyOnOne | TheoremId::Sign if !convex => {
                if single {
                    return Err(GameError::Precondition(format!("{t} applies to convex games only")).into());
                }
                skipped.push(format!("{t}: game is not convex"));
                continue;
            }
            TheoremId::NestedMonotonicity => verify_nested_monotonicity(g, enumeration)?,
            TheoremId::ManyOnOne => verify_many_on_one(g, enumeration)?,
            TheoremId::Sign => verify_sign_theorem(g, enumeration)?,
            TheoremId::Lemma1 => {
                if !sides.given() {
                    if single {
                        return Err(CliError::Input("lemma1 needs --a and --b".into()));
                    }
                    skipped.push(format!("{t}: no --a/--b given"));
                    continue;
                }
                let spec = sides.spec(g.n())?;
                verify_lemma1(g, &spec.boycotters(), &spec.boycotted())?
            }
        };
        reports.push(report);
    }

    if format == Format::Json {
        write_json(&serde_json::json!({ "reports": reports, "skipped": skipped }), out)?;
    } else {
        for r in &reports {
            writeln!(out, "{r}")?;
        }
        for s in &skipped {
            writeln!(out, "skipped {s}")?;
        }
    }
    Ok(if reports.iter().all(TheoremReport::holds) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_scenario(cmd: ScenarioCmd, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let scenario = match cmd {
        ScenarioCmd::Triangle => Scenario::Triangle,
        ScenarioCmd::Homogeneous { n, a, b } => Scenario::Homogeneous { n, a, b },
        ScenarioCmd::Heterogeneous { n, a } => Scenario::Heterogeneous { n, a },
        ScenarioCmd::ThreeBlock { n, variant } => Scenario::ThreeBlock {
            n,
            variant: match variant {
                VariantArg::Blocks => ThreeBlockVariant::Blocks,
                VariantArg::Dropout => ThreeBlockVariant::Dropout,
            },
        },
    };
    let report = scenario.run()?;
    match format {
        Format::Text => writeln!(out, "{report}")?,
        Format::Json => write_json(&report, out)?,
        Format::Csv => {
            let opt = |v: &Option<crate::rational::GameValue>| v.as_ref().map(ToString::to_string).unwrap_or_default();
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.player.to_string(),
                        r.name.clone(),
                        r.role.to_string(),
                        r.pre.to_string(),
                        r.post.to_string(),
                        r.impact.to_string(),
                        opt(&r.expected_pre),
                        opt(&r.expected_post),
                        match r.matches {
                            Some(true) => "MATCH".into(),
                            Some(false) => "MISMATCH".into(),
                            None => String::new(),
                        },
                    ]
                })
                .collect();
            write_csv(
                &[
                    "player",
                    "name",
                    "role",
                    "pre",
                    "post",
                    "impact",
                    "expected_pre",
                    "expected_post",
                    "verdict",
                ],
                &rows,
                out,
            )?;
        }
    }
    Ok(EXIT_OK)
}
