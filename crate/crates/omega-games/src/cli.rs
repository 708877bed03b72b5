//! Command-line dispatch. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 usage or parse errors, 2 internal verification
//! failures, 3 a surviving strategy in a refutation demo.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::arena::{Arena, ChainDescriptor, FlowerVariant, Player, Priority, VertexId};
use crate::conditions::ConditionSpec;
use crate::counterexamples::{
    chain_schedule, flower_schedule, gen_chain_game, gen_flower, gen_ladder, gen_split_game,
    ladder_schedule, refute_finite_memory, split_schedule, strong_split_instance,
    union_chain_instance, CertifiedSchedule, RefutationReport,
};
use crate::io;
use crate::positionalize::{compute_alpha, compute_beta, positionalize};
use crate::random::rng_from_env;
use crate::solvers::{
    solve_muller, solve_parity_recursive, solve_parity_spm, verify_positional, MullerStrategies,
    SolveResult,
};
use crate::zielonka::{classify, reduce_to_parity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_SURVIVOR: i32 = 3;

#[derive(Parser)]
#[command(
    name = "omega-games",
    about = "Solve, classify, reduce and probe infinite-duration games on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Recursive,
    Spm,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageKindArg {
    Alpha,
    Beta,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Flower,
    Chain,
    Split,
    Ladder,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game and print regions and strategies as JSON.
    Solve {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        condition: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        algo: Algo,
    },
    /// Verify a positional strategy on a region.
    Verify {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        condition: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        /// Comma-separated vertex ids; defaults to the whole arena.
        #[arg(long)]
        region: Option<String>,
    },
    /// Reduce a path-shaped Muller condition to a parity condition.
    Reduce {
        #[arg(long)]
        condition: PathBuf,
        /// How many tail priorities to list explicitly.
        #[arg(long, default_value_t = 16)]
        window: u32,
    },
    /// Classify a condition by its closure properties and path shape.
    Classify {
        #[arg(long)]
        condition: PathBuf,
    },
    /// Extract a positional strategy from a finite-memory winning strategy.
    Positionalize {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        player: u8,
        /// Comma-separated vertex ids; defaults to the whole arena.
        #[arg(long)]
        region: Option<String>,
    },
    /// Dump a stage table as CSV.
    Stages {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        priority: u32,
        #[arg(long, value_enum)]
        kind: StageKindArg,
    },
    /// Run a counterexample family demo: refutations plus certified
    /// schedules.
    Demo {
        #[arg(value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 5)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        memory: u32,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Render an arena (optionally with solution overlays) as DOT.
    ExportDot {
        #[arg(long)]
        arena: PathBuf,
        /// Solve the arena as a min-parity game and color the regions.
        #[arg(long, default_value_t = false)]
        solve: bool,
        /// Overlay a stage table for this priority.
        #[arg(long)]
        stages_priority: Option<u32>,
        #[arg(long, value_enum, default_value = "alpha")]
        stages_kind: StageKindArg,
    },
}

/// Parses the process arguments and runs the selected command, returning
/// the intended process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's rendered help/version on stdout semantics.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_arena(path: &PathBuf) -> Result<Arena, String> {
    let text = read(path)?;
    io::parse_arena_auto(&text)
        .map(|(arena, _)| arena)
        .map_err(|e| e.to_string())
}

fn load_condition(path: &PathBuf) -> Result<ConditionSpec, String> {
    io::condition_from_json(&read(path)?).map_err(|e| e.to_string())
}

fn parse_region(arena: &Arena, spec: &Option<String>) -> Result<BTreeSet<VertexId>, String> {
    match spec {
        None => Ok(arena.vertices().collect()),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|id| arena.lookup(id).ok_or_else(|| format!("unknown vertex {id}")))
            .collect(),
    }
}

fn dispatch(command: Command) -> Result<i32, String> {
    match command {
        Command::Solve { arena, condition, algo } => {
            let arena = load_arena(&arena)?;
            let condition = load_condition(&condition)?;
            cmd_solve(&arena, &condition, algo)
        }
        Command::Verify { arena, condition, strategy, region } => {
            let arena = load_arena(&arena)?;
            let condition = load_condition(&condition)?;
            let strategy = io::positional_from_json(&read(&strategy)?).map_err(|e| e.to_string())?;
            let region = parse_region(&arena, &region)?;
            let outcome = verify_positional(&arena, &condition, &strategy, &region)
                .map_err(|e| e.to_string())?;
            if outcome.pass {
                println!("PASS");
                Ok(EXIT_OK)
            } else {
                let w = outcome.witness.expect("failures carry a witness");
                println!(
                    "FAIL: inf-set {:?} over {{{}}} is won by player {}",
                    w.inf_set,
                    w.vertices.join(" "),
                    w.winner
                );
                Ok(EXIT_VERIFICATION)
            }
        }
        Command::Reduce { condition, window } => {
            let condition = load_condition(&condition)?;
            let reduction = reduce_to_parity(&condition).map_err(|e| e.to_string())?;
            print!("{}", io::reduction_to_json(&reduction, window));
            Ok(EXIT_OK)
        }
        Command::Classify { condition } => {
            let condition = load_condition(&condition)?;
            let report = classify(&condition).map_err(|e| e.to_string())?;
            print!("{}", io::classification_to_json(&report));
            Ok(EXIT_OK)
        }
        Command::Positionalize { arena, strategy, player, region } => {
            let arena = load_arena(&arena)?;
            let player = Player::from_index(player as u64)
                .ok_or_else(|| "player must be 0 or 1".to_string())?;
            let memory = io::memory_from_json(&read(&strategy)?, player).map_err(|e| e.to_string())?;
            let region = parse_region(&arena, &region)?;
            let positional = positionalize(&arena, &ConditionSpec::MinParity, &memory, &region)
                .map_err(|e| e.to_string())?;
            let outcome = verify_positional(&arena, &ConditionSpec::MinParity, &positional, &region)
                .map_err(|e| e.to_string())?;
            if !outcome.pass {
                eprintln!("internal error: extracted strategy failed verification");
                return Ok(EXIT_VERIFICATION);
            }
            print!("{}", io::positional_to_json(&positional));
            Ok(EXIT_OK)
        }
        Command::Stages { arena, priority, kind } => {
            let arena = load_arena(&arena)?;
            let p: Vec<bool> = arena
                .vertices()
                .map(|v| arena.priority(v) == Priority::nat(priority))
                .collect();
            let table = match kind {
                StageKindArg::Alpha => compute_alpha(&arena, &p),
                StageKindArg::Beta => {
                    let q: Vec<bool> = arena
                        .vertices()
                        .map(|v| arena.priority(v) < Priority::nat(priority))
                        .collect();
                    compute_beta(&arena, &p, &q)
                }
            };
            print!("{}", io::stage_table_csv(&arena, &table));
            Ok(EXIT_OK)
        }
        Command::Demo { family, n, memory, horizon, budget } => {
            cmd_demo(family, n, memory, horizon, budget)
        }
        Command::ExportDot { arena, solve, stages_priority, stages_kind } => {
            let arena = load_arena(&arena)?;
            let result = if solve { Some(solve_parity_recursive(&arena)) } else { None };
            let table = stages_priority.map(|priority| {
                let p: Vec<bool> = arena
                    .vertices()
                    .map(|v| arena.priority(v) == Priority::nat(priority))
                    .collect();
                match stages_kind {
                    StageKindArg::Alpha => compute_alpha(&arena, &p),
                    StageKindArg::Beta => {
                        let q: Vec<bool> = arena
                            .vertices()
                            .map(|v| arena.priority(v) < Priority::nat(priority))
                            .collect();
                        compute_beta(&arena, &p, &q)
                    }
                }
            });
            let overlays = io::Overlays {
                result: result.as_ref(),
                strategies: Vec::new(),
                stages: table.as_ref(),
            };
            let dot = io::export_dot(&arena, &overlays).map_err(|e| e.to_string())?;
            print!("{dot}");
            Ok(EXIT_OK)
        }
    }
}

fn regions_match(a: &SolveResult, b: &SolveResult) -> bool {
    a.w0 == b.w0 && a.w1 == b.w1
}

fn cmd_solve(arena: &Arena, condition: &ConditionSpec, algo: Algo) -> Result<i32, String> {
    // Path-shaped conditions (including min-parity itself) go through the
    // relabelling; everything else takes the record-memory route.
    if let Ok(reduction) = reduce_to_parity(condition) {
        let relabeled = arena.relabel(|p| Priority::nat(reduction.apply(p.offset)));
        let (result, spm_used) = match algo {
            Algo::Recursive => (solve_parity_recursive(&relabeled), false),
            Algo::Spm => (solve_parity_spm(&relabeled).0, true),
            Algo::Both => {
                let recursive = solve_parity_recursive(&relabeled);
                let (spm, _) = solve_parity_spm(&relabeled);
                if !regions_match(&recursive, &spm) {
                    eprintln!("internal error: solver regions disagree");
                    return Ok(EXIT_VERIFICATION);
                }
                (recursive, false)
            }
        };
        let _ = spm_used;
        for (player, region, strategy) in [
            (Player::Zero, &result.w0, &result.strat0),
            (Player::One, &result.w1, &result.strat1),
        ] {
            let _ = player;
            if !region.is_empty() {
                let outcome = verify_positional(&relabeled, &ConditionSpec::MinParity, strategy, region)
                    .map_err(|e| e.to_string())?;
                if !outcome.pass {
                    eprintln!("internal error: solver strategy failed verification");
                    return Ok(EXIT_VERIFICATION);
                }
            }
        }
        let mapped = if reduction.role_swapped {
            SolveResult {
                w0: result.w1,
                w1: result.w0,
                strat0: crate::strategy::PositionalStrategy::from_moves(
                    Player::Zero,
                    result.strat1.moves().clone(),
                ),
                strat1: crate::strategy::PositionalStrategy::from_moves(
                    Player::One,
                    result.strat0.moves().clone(),
                ),
            }
        } else {
            result
        };
        print!("{}", io::solve_result_to_json(arena, &mapped));
        return Ok(EXIT_OK);
    }
    let solution = solve_muller(arena, condition).map_err(|e| e.to_string())?;
    let ids = |set: &BTreeSet<VertexId>| -> Vec<String> {
        set.iter().map(|&v| arena.id(v).to_string()).collect()
    };
    let (s0, s1) = match &solution.strategies {
        MullerStrategies::Memory { strat0, strat1 } => (
            serde_json::from_str::<serde_json::Value>(&io::memory_to_json(strat0)).unwrap(),
            serde_json::from_str::<serde_json::Value>(&io::memory_to_json(strat1)).unwrap(),
        ),
        MullerStrategies::Positional { strat0, strat1 } => (
            serde_json::json!(strat0.moves()),
            serde_json::json!(strat1.moves()),
        ),
    };
    let value = serde_json::json!({
        "W0": ids(&solution.w0),
        "W1": ids(&solution.w1),
        "strat0": s0,
        "strat1": s1,
        "strategy_kind": "memory",
    });
    println!("{}", serde_json::to_string_pretty(&value).expect("result serializes"));
    Ok(EXIT_OK)
}

fn print_refutation(report: &RefutationReport) {
    println!(
        "refutation [{}] truncation {} memory {} via {}: {} strategy classes checked, {} survivors",
        report.family,
        report.truncation,
        report.memory_bound,
        report.mode,
        report.checked,
        report.survivors.len()
    );
    for w in &report.witnesses {
        println!("  witness: {w}");
    }
    for s in &report.survivors {
        println!("  SURVIVOR: {s}");
    }
    println!("  note: {}", report.note);
}

fn check_schedule(schedule: &CertifiedSchedule, horizon: u64) -> Result<bool, String> {
    match schedule.check(horizon) {
        Ok(report) => {
            println!(
                "schedule [{}] horizon {}: winner player {}, {} certificate bounds hold",
                schedule.name,
                horizon,
                report.winner,
                report.checks.len()
            );
            Ok(true)
        }
        Err(e) => {
            println!("schedule [{}] horizon {}: FAILED ({e})", schedule.name, horizon);
            Ok(false)
        }
    }
}

fn cmd_demo(family: FamilyArg, n: u32, memory: u32, horizon: u64, budget: u64) -> Result<i32, String> {
    let mut rng = rng_from_env(0x0e6a);
    let mut survivors = false;
    let mut certificates_ok = true;
    match family {
        FamilyArg::Flower => {
            for variant in [FlowerVariant::MaxParity, FlowerVariant::OmegaCenter] {
                let (generated, condition) = gen_flower(n, variant);
                let report = refute_finite_memory(&generated, &condition, memory, budget, &mut rng)
                    .map_err(|e| e.to_string())?;
                print_refutation(&report);
                survivors |= !report.all_refuted();
                let schedule = flower_schedule(variant, horizon);
                certificates_ok &= check_schedule(&schedule, horizon)?;
            }
        }
        FamilyArg::Chain => {
            for finite_appearance in [false, true] {
                let (generated, condition) =
                    gen_chain_game(ChainDescriptor::max_parity(), n, finite_appearance)
                        .map_err(|e| e.to_string())?;
                let report = refute_finite_memory(&generated, &condition, memory, budget, &mut rng)
                    .map_err(|e| e.to_string())?;
                print_refutation(&report);
                survivors |= !report.all_refuted();
                if finite_appearance {
                    println!(
                        "  (finite-appearance window: every priority labels at most one vertex; \
                         the offering player's certified win needs the unbounded arena)"
                    );
                }
            }
            certificates_ok &= check_schedule(&chain_schedule(horizon), horizon)?;
        }
        FamilyArg::Split => {
            let (y, anchor, condition) = strong_split_instance();
            let (generated, spec) =
                gen_split_game(y.clone(), anchor, condition.clone()).map_err(|e| e.to_string())?;
            let report = refute_finite_memory(&generated, &spec, 1, budget, &mut rng)
                .map_err(|e| e.to_string())?;
            print_refutation(&report);
            survivors |= !report.all_refuted();
            // The two-state sweep must survive: it is the finite-memory win.
            let memory_report = refute_finite_memory(&generated, &spec, 2, budget, &mut rng)
                .map_err(|e| e.to_string())?;
            if memory_report.all_refuted() {
                println!("  ERROR: expected a winning two-state class to survive");
                certificates_ok = false;
            } else {
                println!(
                    "  memory win confirmed: {} two-state classes survive (e.g. {})",
                    memory_report.survivors.len(),
                    memory_report.survivors[0]
                );
            }
            let arena = generated.expand().map_err(|e| e.to_string())?;
            let solution = solve_muller(&arena, &spec).map_err(|e| e.to_string())?;
            if solution.w0.len() == arena.len() {
                println!("  record-memory solver confirms player 0 wins everywhere");
            } else {
                println!("  ERROR: record-memory solver disagrees with the memory win");
                certificates_ok = false;
            }
            let (yk, anchor_k, chain_condition) = union_chain_instance(3);
            let (generated_k, spec_k) =
                gen_split_game(yk.clone(), anchor_k, chain_condition.clone())
                    .map_err(|e| e.to_string())?;
            let report_k = refute_finite_memory(&generated_k, &spec_k, 2, budget, &mut rng)
                .map_err(|e| e.to_string())?;
            print_refutation(&report_k);
            survivors |= !report_k.all_refuted();
            let schedule = split_schedule(y, anchor, condition).map_err(|e| e.to_string())?;
            certificates_ok &= check_schedule(&schedule, horizon)?;
        }
        FamilyArg::Ladder => {
            let (generated, condition) = gen_ladder(n.min(6));
            let report = refute_finite_memory(&generated, &condition, memory, budget, &mut rng)
                .map_err(|e| e.to_string())?;
            print_refutation(&report);
            survivors |= !report.all_refuted();
            certificates_ok &= check_schedule(&ladder_schedule(horizon), horizon)?;
        }
    }
    if survivors {
        Ok(EXIT_SURVIVOR)
    } else if !certificates_ok {
        Ok(EXIT_VERIFICATION)
    } else {
        println!("all refutations and certifications succeeded");
        Ok(EXIT_OK)
    }
}
