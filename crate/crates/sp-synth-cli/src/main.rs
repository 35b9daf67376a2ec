use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sp_synth::arena::GameArena;
use sp_synth::objectives::{encode_boolean_buchi, parity_sp_to_muller_sp, parity_to_rabin, parity_to_streett, ObjectiveSpec, SPGame};
use sp_synth::oracle::{solve_bruteforce, solve_tree, OracleError};
use sp_synth::reductions::{build_qk, sc_to_sp, ssc_to_sp, ScInstance, SscInstance};
use sp_synth::sps_solver::{solve_with, Route, SolveOptions, SpsAnswer};
use sp_synth::verify::{check_solution, pareto_set, MooreStrategy};
use sp_synth::Caps;

const SCHEMA: u64 = 1;

#[derive(Parser)]
#[command(name = "sp-synth", version, about = "Stackelberg-Pareto synthesis on finite game graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Auto,
    Cp,
    BuchiNp,
    TreeOracle,
    Bruteforce,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    /// Every objective as a Boolean Büchi objective.
    BooleanBuchi,
    /// Parity objectives as Rabin chains.
    Rabin,
    /// Parity objectives as Streett chains.
    Streett,
    /// Parity game as a Muller game on a stretched arena.
    Muller,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether Player 0 has a solution strategy.
    Solve {
        game: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        route: RouteArg,
        /// Also run an independent route; exit 3 when the verdicts differ.
        #[arg(long)]
        cross_check: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Solve every C-P slice, so that all slice sizes are reported.
        #[arg(long)]
        exhaustive: bool,
        /// Memory states explored by the brute-force route.
        #[arg(long, default_value_t = 2)]
        memory: usize,
        /// Write the arena in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a Moore strategy against a game.
    Verify {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pareto-optimal payoffs among the plays consistent with a strategy.
    Pareto {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate games from hardness reductions.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Rewrite the objectives of a game into another acceptance condition.
    Encode {
        game: PathBuf,
        #[arg(long = "to", value_enum)]
        to: Encoding,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Set cover instance file to a tree game.
    Sc {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Succinct set cover instance file to a game.
    Ssc {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Arena with exactly `k` paths from g1 to g2.
    Qk {
        k: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    v: u64,
    #[serde(flatten)]
    body: T,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc: Versioned<T> = serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    if doc.v != SCHEMA {
        bail!("{}: schema version {} is not supported", path.display(), doc.v);
    }
    Ok(doc.body)
}

fn emit(body: impl Serialize, out: Option<&Path>) -> Result<()> {
    let mut doc = serde_json::to_value(body)?;
    if let Value::Object(m) = &mut doc {
        m.insert("v".into(), json!(SCHEMA));
    }
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Default caps, overridden field by field by the JSON object in SP_SYNTH_CAPS.
fn caps_from_env() -> Result<Caps> {
    let Ok(raw) = std::env::var("SP_SYNTH_CAPS") else {
        return Ok(Caps::default());
    };
    let caps: Caps = serde_json::from_str(&raw).context("SP_SYNTH_CAPS is not a caps object")?;
    if caps.max_t == 0 || caps.max_product == 0 || caps.max_sar_sets == 0 || caps.search_budget == 0 {
        bail!("SP_SYNTH_CAPS: caps must be positive");
    }
    Ok(caps)
}

struct Run {
    answer: SpsAnswer,
    /// False when an incomplete search found nothing.
    conclusive: bool,
}

fn run_route(game: &SPGame, route: RouteArg, opts: &SolveOptions, memory: usize) -> Result<Run> {
    let lib = |r: Route| -> Result<Run> {
        let answer = solve_with(game, &SolveOptions { route: r, ..opts.clone() })?;
        Ok(Run { answer, conclusive: true })
    };
    match route {
        RouteArg::Auto => lib(Route::Auto),
        RouteArg::Cp => lib(Route::Cp),
        RouteArg::BuchiNp => lib(Route::BuchiNp),
        RouteArg::TreeOracle => Ok(Run { answer: solve_tree(game, opts.caps.search_budget)?, conclusive: true }),
        RouteArg::Bruteforce => {
            let b = solve_bruteforce(game, memory, opts.caps.search_budget);
            Ok(Run { conclusive: b.complete || b.answer.solvable, answer: b.answer })
        }
    }
}

/// Second opinion: the witness search or C-P for Büchi games, the tree
/// oracle on trees, brute force otherwise.
fn second_route(game: &SPGame, first: RouteArg) -> RouteArg {
    let buchi = game.kind() == sp_synth::objectives::ObjectiveKind::Buchi;
    if buchi && first != RouteArg::BuchiNp && first != RouteArg::Auto {
        return RouteArg::BuchiNp;
    }
    if buchi && first != RouteArg::Cp {
        return RouteArg::Cp;
    }
    if first != RouteArg::TreeOracle && matches!(solve_tree(game, 1), Ok(_) | Err(OracleError::BudgetExceeded(_))) {
        return RouteArg::TreeOracle;
    }
    if first == RouteArg::Cp || first == RouteArg::Auto {
        RouteArg::Bruteforce
    } else {
        RouteArg::Cp
    }
}

fn route_name(r: RouteArg) -> &'static str {
    match r {
        RouteArg::Auto => "auto",
        RouteArg::Cp => "cp",
        RouteArg::BuchiNp => "buchi-np",
        RouteArg::TreeOracle => "tree-oracle",
        RouteArg::Bruteforce => "bruteforce",
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    path: &Path,
    route: RouteArg,
    cross_check: bool,
    jobs: usize,
    exhaustive: bool,
    memory: usize,
    dot: Option<&Path>,
    out: Option<&Path>,
) -> Result<u8> {
    let game: SPGame = read_json(path)?;
    if let Some(d) = dot {
        fs::write(d, game.arena().to_dot()).with_context(|| format!("cannot write {}", d.display()))?;
    }
    let opts = SolveOptions { caps: caps_from_env()?, route: Route::Auto, jobs, exhaustive };
    let first = run_route(&game, route, &opts, memory)?;
    let mut report = serde_json::to_value(&first.answer)?;
    report["conclusive"] = json!(first.conclusive);
    let mut code = if first.answer.solvable { 0 } else { 1 };
    if cross_check {
        let other = second_route(&game, route);
        let second = run_route(&game, other, &opts, memory)?;
        let agree = first.answer.solvable == second.answer.solvable || !first.conclusive || !second.conclusive;
        report["cross_check"] = json!({
            "route": route_name(other),
            "solvable": second.answer.solvable,
            "conclusive": second.conclusive,
            "agree": agree,
        });
        if !agree {
            code = 3;
        }
    }
    emit(report, out)?;
    Ok(code)
}

fn load_pair(game: &Path, strategy: &Path) -> Result<(SPGame, MooreStrategy)> {
    let game: SPGame = read_json(game)?;
    let s: MooreStrategy = read_json(strategy)?;
    s.validate(game.arena()).with_context(|| format!("{} does not fit the game", strategy.display()))?;
    Ok((game, s))
}

fn cmd_verify(game: &Path, strategy: &Path, out: Option<&Path>) -> Result<u8> {
    let (game, s) = load_pair(game, strategy)?;
    let verdict = check_solution(&game, &s, caps_from_env()?.max_product)?;
    let code = if verdict.accepted() { 0 } else { 1 };
    emit(&verdict, out)?;
    Ok(code)
}

fn cmd_pareto(game: &Path, strategy: &Path, out: Option<&Path>) -> Result<u8> {
    let (game, s) = load_pair(game, strategy)?;
    let ps = pareto_set(&game, &s, caps_from_env()?.max_product)?;
    emit(json!({ "pareto_set": ps }), out)?;
    Ok(0)
}

fn cmd_gen(what: &GenCommand) -> Result<u8> {
    match what {
        GenCommand::Sc { instance, output } => {
            let inst: ScInstance = read_json(instance)?;
            emit(sc_to_sp(&inst)?, output.as_deref())?;
        }
        GenCommand::Ssc { instance, output } => {
            let inst: SscInstance = read_json(instance)?;
            let (game, layout) = ssc_to_sp(&inst)?;
            let mut doc = serde_json::to_value(game)?;
            doc["layout"] = serde_json::to_value(layout)?;
            emit(doc, output.as_deref())?;
        }
        GenCommand::Qk { k, output } => {
            if *k == 0 {
                bail!("Q_k needs k >= 1");
            }
            let q = build_qk(*k);
            let arena: GameArena = q.arena();
            emit(json!({ "arena": arena, "g1": q.g1, "g2": q.g2 }), output.as_deref())?;
        }
    }
    Ok(0)
}

fn cmd_encode(path: &Path, to: Encoding, out: Option<&Path>) -> Result<u8> {
    let game: SPGame = read_json(path)?;
    let per_objective = |f: &dyn Fn(&ObjectiveSpec) -> Result<ObjectiveSpec>| -> Result<SPGame> {
        let o0 = f(game.objective0())?;
        let os = game.objectives1().iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(SPGame::new(game.arena().clone(), o0, os)?)
    };
    let parity = |o: &ObjectiveSpec| -> Result<Vec<u32>> {
        match o {
            ObjectiveSpec::Parity { priority } => Ok(priority.clone()),
            other => bail!("{:?} objective is not a parity objective", other.kind()),
        }
    };
    let encoded = match to {
        Encoding::BooleanBuchi => per_objective(&|o| Ok(encode_boolean_buchi(o)?))?,
        Encoding::Rabin => per_objective(&|o| Ok(parity_to_rabin(&parity(o)?)))?,
        Encoding::Streett => per_objective(&|o| Ok(parity_to_streett(&parity(o)?)))?,
        Encoding::Muller => parity_sp_to_muller_sp(&game)?.0,
    };
    emit(encoded, out)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve { game, route, cross_check, jobs, exhaustive, memory, dot, output } => {
            cmd_solve(game, *route, *cross_check, *jobs, *exhaustive, *memory, dot.as_deref(), output.as_deref())
        }
        Command::Verify { game, strategy, output } => cmd_verify(game, strategy, output.as_deref()),
        Command::Pareto { game, strategy, output } => cmd_pareto(game, strategy, output.as_deref()),
        Command::Gen { what } => cmd_gen(what),
        Command::Encode { game, to, output } => cmd_encode(game, *to, output.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
