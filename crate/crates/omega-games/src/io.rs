//! File formats: canonical JSON for arenas, conditions, strategies and
//! solver output, the PGSolver text format, stage-table CSV, and DOT export.
//!
//! Emission is canonical — sorted keys, sorted vertex ids, two-space
//! indentation — so parsing followed by emission is byte-stable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arena::{Arena, ArenaError, Player, Priority, VertexId};
use crate::conditions::{
    ConditionError, ConditionSpec, ExplicitMuller, SingletonLimit, ZielonkaPathSpec,
};
use crate::positionalize::{Stage, StageTable};
use crate::solvers::SolveResult;
use crate::strategy::{MemoryStrategy, PositionalStrategy};
use crate::zielonka::{
    AlphaKind, ChainVerdict, ClassificationReport, Reduction, SplitVerdict, TailRule,
};

#[derive(Error, Debug)]
pub enum IoError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("overlay references unknown vertex {0}")]
    UnknownVertexInOverlay(String),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
}

fn json_error(e: serde_json::Error) -> IoError {
    IoError::Parse { line: e.line(), message: e.to_string() }
}

// ---------------------------------------------------------------------------
// Arena JSON
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct VertexDto {
    id: String,
    owner: Player,
    priority: Priority,
}

#[derive(Serialize, Deserialize)]
struct ArenaDto {
    vertices: Vec<VertexDto>,
    edges: Vec<(String, String)>,
}

pub fn arena_to_json(arena: &Arena) -> String {
    let dto = ArenaDto {
        vertices: arena
            .vertices()
            .map(|v| VertexDto {
                id: arena.id(v).to_string(),
                owner: arena.owner(v),
                priority: arena.priority(v),
            })
            .collect(),
        edges: arena
            .edges()
            .map(|(u, v)| (arena.id(u).to_string(), arena.id(v).to_string()))
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&dto).expect("arena serializes");
    out.push('\n');
    out
}

pub fn arena_from_json(text: &str) -> Result<Arena, IoError> {
    let dto: ArenaDto = serde_json::from_str(text).map_err(json_error)?;
    Ok(Arena::build(
        dto.vertices
            .into_iter()
            .map(|v| (v.id, v.owner, v.priority))
            .collect(),
        dto.edges,
    )?)
}

// ---------------------------------------------------------------------------
// PGSolver text format
// ---------------------------------------------------------------------------

/// Where an arena came from, including what is needed to write it back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceFormat {
    Json,
    /// PGSolver input uses the max-parity convention; priorities were
    /// reflected through `base - p` (base even) to reach the house
    /// min-parity convention.
    Pgsolver { reflection_base: u32 },
}

/// Parses the PGSolver format: a `parity N;` header followed by lines
/// `id priority owner successors [name];`. Priorities are reflected from
/// the max-parity convention into min-parity; the reflection base is
/// returned for round-tripping and result metadata.
pub fn parse_pgsolver(text: &str) -> Result<(Arena, u32), IoError> {
    let mut records: Vec<(u64, u32, Player, Vec<u64>)> = Vec::new();
    let mut header_seen = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let line = line.strip_suffix(';').ok_or_else(|| IoError::Parse {
            line: lineno + 1,
            message: "missing trailing semicolon".to_string(),
        })?;
        let err = |message: String| IoError::Parse { line: lineno + 1, message };
        if !header_seen {
            let rest = line
                .trim()
                .strip_prefix("parity")
                .ok_or_else(|| err("expected 'parity N;' header".to_string()))?;
            rest.trim()
                .parse::<u64>()
                .map_err(|e| err(format!("bad header bound: {e}")))?;
            header_seen = true;
            continue;
        }
        // Drop an optional quoted name.
        let line = match line.find('"') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut parts = line.split_whitespace();
        let id = parts
            .next()
            .ok_or_else(|| err("missing vertex id".to_string()))?
            .parse::<u64>()
            .map_err(|e| err(format!("bad vertex id: {e}")))?;
        let priority = parts
            .next()
            .ok_or_else(|| err("missing priority".to_string()))?
            .parse::<u32>()
            .map_err(|e| err(format!("bad priority: {e}")))?;
        let owner_raw = parts
            .next()
            .ok_or_else(|| err("missing owner".to_string()))?
            .parse::<u64>()
            .map_err(|e| err(format!("bad owner: {e}")))?;
        let owner = Player::from_index(owner_raw)
            .ok_or_else(|| err(format!("owner must be 0 or 1, got {owner_raw}")))?;
        let succ_field = parts
            .next()
            .ok_or_else(|| err("missing successor list".to_string()))?;
        let successors = succ_field
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<Vec<u64>, _>>()
            .map_err(|e| err(format!("bad successor list: {e}")))?;
        if parts.next().is_some() {
            return Err(err("unexpected trailing tokens".to_string()));
        }
        records.push((id, priority, owner, successors));
    }
    if !header_seen {
        return Err(IoError::Parse { line: 1, message: "empty input".to_string() });
    }
    let max_priority = records.iter().map(|r| r.1).max().unwrap_or(0);
    let base = max_priority + max_priority % 2;
    let vertices = records
        .iter()
        .map(|(id, p, owner, _)| (id.to_string(), *owner, Priority::nat(base - p)))
        .collect();
    let edges = records
        .iter()
        .flat_map(|(id, _, _, succs)| succs.iter().map(move |s| (id.to_string(), s.to_string())))
        .collect();
    Ok((Arena::build(vertices, edges)?, base))
}

/// Writes an arena whose ids are decimal numbers back in PGSolver form,
/// undoing the priority reflection.
pub fn arena_to_pgsolver(arena: &Arena, reflection_base: u32) -> Result<String, IoError> {
    let mut rows: Vec<(u64, VertexId)> = arena
        .vertices()
        .map(|v| {
            arena
                .id(v)
                .parse::<u64>()
                .map(|n| (n, v))
                .map_err(|_| IoError::Parse {
                    line: 0,
                    message: format!("vertex id {} is not numeric", arena.id(v)),
                })
        })
        .collect::<Result<_, _>>()?;
    rows.sort();
    let max_id = rows.last().map(|r| r.0).unwrap_or(0);
    let mut out = format!("parity {max_id};\n");
    for (n, v) in rows {
        let p = arena.priority(v);
        if !p.is_natural() || p.offset > reflection_base {
            return Err(IoError::Parse {
                line: 0,
                message: format!("priority {p} cannot be reflected through {reflection_base}"),
            });
        }
        let succs: Vec<String> = arena
            .successors(v)
            .iter()
            .map(|t| arena.id(*t).to_string())
            .collect();
        let mut succs_sorted: Vec<u64> = succs
            .iter()
            .map(|s| s.parse::<u64>().expect("checked numeric"))
            .collect();
        succs_sorted.sort_unstable();
        let list: Vec<String> = succs_sorted.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{n} {} {} {};",
            reflection_base - p.offset,
            arena.owner(v).index(),
            list.join(",")
        )
        .expect("write to string");
    }
    Ok(out)
}

/// Detects and parses either supported arena format by content.
pub fn parse_arena_auto(text: &str) -> Result<(Arena, SourceFormat), IoError> {
    if text.trim_start().starts_with("parity") {
        let (arena, base) = parse_pgsolver(text)?;
        Ok((arena, SourceFormat::Pgsolver { reflection_base: base }))
    } else {
        Ok((arena_from_json(text)?, SourceFormat::Json))
    }
}

// ---------------------------------------------------------------------------
// Condition JSON
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum ConditionDto {
    #[serde(rename = "infinity")]
    Infinity,
    #[serde(rename = "min_parity")]
    MinParity,
    #[serde(rename = "max_parity")]
    MaxParity,
    #[serde(rename = "ordinal_parity")]
    OrdinalParity {
        #[serde(default)]
        limit: u32,
        offset: u32,
    },
    #[serde(rename = "explicit")]
    Explicit {
        #[serde(rename = "C")]
        c: Vec<u32>,
        #[serde(rename = "F0")]
        f0: Vec<Vec<u32>>,
    },
    #[serde(rename = "zielonka_path")]
    ZielonkaPath {
        root_player: Player,
        diffs: Vec<Vec<u32>>,
        ends_with_empty: bool,
    },
    #[serde(rename = "singleton_limit")]
    SingletonLimit {
        e: u32,
        #[serde(rename = "Y_window")]
        y_window: Vec<u32>,
    },
}

pub fn condition_to_json(c: &ConditionSpec) -> String {
    let dto = match c {
        ConditionSpec::Infinity => ConditionDto::Infinity,
        ConditionSpec::MinParity => ConditionDto::MinParity,
        ConditionSpec::MaxParity => ConditionDto::MaxParity,
        ConditionSpec::OrdinalParity { bound } => ConditionDto::OrdinalParity {
            limit: bound.limit,
            offset: bound.offset,
        },
        ConditionSpec::ExplicitMuller(m) => ConditionDto::Explicit {
            c: m.alphabet().to_vec(),
            f0: m
                .f0_sets()
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
        },
        ConditionSpec::ZielonkaPath(p) => ConditionDto::ZielonkaPath {
            root_player: p.root_player,
            diffs: p.diffs.iter().map(|d| d.iter().copied().collect()).collect(),
            ends_with_empty: p.ends_with_empty,
        },
        ConditionSpec::SingletonLimit(s) => ConditionDto::SingletonLimit {
            e: s.e,
            y_window: s.y_window.iter().copied().collect(),
        },
    };
    let mut out = serde_json::to_string_pretty(&dto).expect("condition serializes");
    out.push('\n');
    out
}

pub fn condition_from_json(text: &str) -> Result<ConditionSpec, IoError> {
    let dto: ConditionDto = serde_json::from_str(text).map_err(json_error)?;
    Ok(match dto {
        ConditionDto::Infinity => ConditionSpec::Infinity,
        ConditionDto::MinParity => ConditionSpec::MinParity,
        ConditionDto::MaxParity => ConditionSpec::MaxParity,
        ConditionDto::OrdinalParity { limit, offset } => ConditionSpec::OrdinalParity {
            bound: Priority { limit, offset },
        },
        ConditionDto::Explicit { c, f0 } => ConditionSpec::ExplicitMuller(ExplicitMuller::new(
            c.into_iter().collect(),
            f0.into_iter().map(|s| s.into_iter().collect()).collect(),
        )?),
        ConditionDto::ZielonkaPath { root_player, diffs, ends_with_empty } => {
            ConditionSpec::ZielonkaPath(ZielonkaPathSpec::new(
                root_player,
                diffs.into_iter().map(|d| d.into_iter().collect()).collect(),
                ends_with_empty,
            )?)
        }
        ConditionDto::SingletonLimit { e, y_window } => ConditionSpec::SingletonLimit(
            SingletonLimit { e, y_window: y_window.into_iter().collect() },
        ),
    })
}

// ---------------------------------------------------------------------------
// Strategy JSON
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PositionalDto {
    player: Player,
    moves: BTreeMap<String, String>,
}

pub fn positional_to_json(s: &PositionalStrategy) -> String {
    let dto = PositionalDto { player: s.player, moves: s.moves().clone() };
    let mut out = serde_json::to_string_pretty(&dto).expect("strategy serializes");
    out.push('\n');
    out
}

pub fn positional_from_json(text: &str) -> Result<PositionalStrategy, IoError> {
    let dto: PositionalDto = serde_json::from_str(text).map_err(json_error)?;
    Ok(PositionalStrategy::from_moves(dto.player, dto.moves))
}

#[derive(Serialize, Deserialize)]
struct MemoryDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    player: Option<Player>,
    memory: Vec<String>,
    initial: String,
    update: Vec<(String, String, String)>,
    moves: Vec<(String, String, String)>,
}

pub fn memory_to_json(s: &MemoryStrategy) -> String {
    let mut update: Vec<(String, String, String)> = s
        .updates()
        .map(|(m, v, m2)| (m.to_string(), v.to_string(), m2.to_string()))
        .collect();
    update.sort();
    let mut moves: Vec<(String, String, String)> = s
        .moves()
        .map(|(v, m, w)| (v.to_string(), m.to_string(), w.to_string()))
        .collect();
    moves.sort();
    let dto = MemoryDto {
        player: Some(s.player),
        memory: s.states.clone(),
        initial: s.initial.clone(),
        update,
        moves,
    };
    let mut out = serde_json::to_string_pretty(&dto).expect("strategy serializes");
    out.push('\n');
    out
}

/// Reads a memory strategy; `fallback_player` applies when the file does
/// not carry a player field.
pub fn memory_from_json(text: &str, fallback_player: Player) -> Result<MemoryStrategy, IoError> {
    let dto: MemoryDto = serde_json::from_str(text).map_err(json_error)?;
    let mut s = MemoryStrategy::new(
        dto.player.unwrap_or(fallback_player),
        dto.memory,
        dto.initial,
    );
    for (m, v, m2) in &dto.update {
        s.set_update(m, v, m2);
    }
    for (v, m, w) in &dto.moves {
        s.set_move(v, m, w);
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Solver output, reductions, classification
// ---------------------------------------------------------------------------

pub fn solve_result_to_json(arena: &Arena, r: &SolveResult) -> String {
    let ids = |set: &BTreeSet<VertexId>| -> Vec<String> {
        set.iter().map(|&v| arena.id(v).to_string()).collect()
    };
    let value = json!({
        "W0": ids(&r.w0),
        "W1": ids(&r.w1),
        "strat0": r.strat0.moves(),
        "strat1": r.strat1.moves(),
    });
    let mut out = serde_json::to_string_pretty(&value).expect("result serializes");
    out.push('\n');
    out
}

/// Emits a reduction as explicit pairs over the assigned priorities plus a
/// sample window of the tail, with the tail rule spelled out.
pub fn reduction_to_json(r: &Reduction, window: u32) -> String {
    let mut pairs: BTreeMap<u32, u32> = r.assignments.clone();
    for p in 0..window {
        pairs.entry(p).or_insert_with(|| r.apply(p));
    }
    let f: Vec<Value> = pairs.iter().map(|(&p, &t)| json!([p, t])).collect();
    let (default_target, tail) = match &r.tail {
        TailRule::Identity => (Value::Null, json!({"kind": "identity"})),
        TailRule::Constant(d) => (json!(d), json!({"kind": "constant", "value": d})),
        TailRule::OddAscending { j, .. } => (
            Value::Null,
            json!({"kind": "odd_ascending", "first_target": 2 * j + 1}),
        ),
    };
    let alpha = match r.alpha {
        AlphaKind::Finite(k) => json!(k),
        AlphaKind::Omega => json!("omega"),
    };
    let value = json!({
        "f": f,
        "default_target": default_target,
        "role_swapped": r.role_swapped,
        "tail": tail,
        "alpha": alpha,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("reduction serializes");
    out.push('\n');
    out
}

pub fn classification_to_json(report: &ClassificationReport) -> String {
    let p0 = match &report.p0 {
        SplitVerdict::Pass => json!({"verdict": "PASS"}),
        SplitVerdict::Fail(w) => json!({
            "verdict": "FAIL",
            "witness": {
                "side": w.side.index(),
                "x0": w.x0.iter().collect::<Vec<_>>(),
                "x1": w.x1.iter().collect::<Vec<_>>(),
            }
        }),
    };
    let chain = |v: &ChainVerdict| match v {
        ChainVerdict::Pass => json!({"verdict": "PASS"}),
        ChainVerdict::Fail(w) => json!({
            "verdict": "FAIL",
            "witness": {
                "side": w.side.index(),
                "description": w.description,
                "windows": w.windows.iter().map(|s| {
                    s.iter().map(Priority::to_string).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "limit": w.limit.to_string(),
            }
        }),
    };
    let value = json!({
        "condition": report.condition,
        "p0": p0,
        "p1": chain(&report.p1),
        "p2": chain(&report.p2),
        "path_shape": report.path_shape,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
    out.push('\n');
    out
}

pub fn stage_table_csv(arena: &Arena, table: &StageTable) -> String {
    let mut out = String::from("vertex,value\n");
    for v in arena.vertices() {
        let value = match table.value(v) {
            Stage::Finite(n) => n.to_string(),
            Stage::Infinite => "inf".to_string(),
        };
        writeln!(out, "{},{value}", arena.id(v)).expect("write to string");
    }
    out
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

/// Optional decorations for DOT export.
#[derive(Default)]
pub struct Overlays<'a> {
    pub result: Option<&'a SolveResult>,
    pub strategies: Vec<&'a PositionalStrategy>,
    pub stages: Option<&'a StageTable>,
}

/// Renders the arena as a DOT digraph: Player 0 as ellipses, Player 1 as
/// boxes, winning regions colored, strategy edges bold, stage values as
/// secondary labels.
pub fn export_dot(arena: &Arena, overlays: &Overlays) -> Result<String, IoError> {
    let mut bold: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut strategies: Vec<&PositionalStrategy> = overlays.strategies.clone();
    if let Some(result) = overlays.result {
        strategies.push(&result.strat0);
        strategies.push(&result.strat1);
    }
    for s in &strategies {
        for (from, to) in s.moves() {
            let f = arena
                .lookup(from)
                .ok_or_else(|| IoError::UnknownVertexInOverlay(from.clone()))?;
            let t = arena
                .lookup(to)
                .ok_or_else(|| IoError::UnknownVertexInOverlay(to.clone()))?;
            bold.insert((f, t));
        }
    }
    let mut out = String::from("digraph arena {\n");
    for v in arena.vertices() {
        let shape = match arena.owner(v) {
            Player::Zero => "ellipse",
            Player::One => "box",
        };
        let mut label = format!("{}\\n{}", arena.id(v), arena.priority(v));
        if let Some(table) = overlays.stages {
            label.push_str(&format!("\\n{}", table.value(v)));
        }
        let fill = overlays.result.map(|r| {
            if r.w0.contains(&v) {
                ", style=filled, fillcolor=lightblue"
            } else {
                ", style=filled, fillcolor=lightsalmon"
            }
        });
        writeln!(
            out,
            "  \"{}\" [shape={shape}, label=\"{label}\"{}];",
            arena.id(v),
            fill.unwrap_or("")
        )
        .expect("write to string");
    }
    for (u, v) in arena.edges() {
        let style = if bold.contains(&(u, v)) { " [penwidth=2.5]" } else { "" };
        writeln!(out, "  \"{}\" -> \"{}\"{style};", arena.id(u), arena.id(v))
            .expect("write to string");
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgsolver_single_vertex() {
        let (arena, base) = parse_pgsolver("parity 1;\n0 2 0 0;\n").unwrap();
        assert_eq!(arena.len(), 1);
        assert_eq!(base, 2);
        let v = arena.lookup("0").unwrap();
        // Max-parity 2 reflects to min-parity 0: still even.
        assert_eq!(arena.priority(v), Priority::nat(0));
        assert_eq!(arena.successors(v), &[v]);
    }

    #[test]
    fn pgsolver_rejects_bad_owner() {
        let err = parse_pgsolver("parity 1;\n0 2 2 0;\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { .. }));
    }

    #[test]
    fn pgsolver_round_trip_is_byte_stable() {
        let text = "parity 2;\n0 2 0 0,1;\n1 1 1 0;\n2 0 0 1,2;\n";
        let (arena, base) = parse_pgsolver(text).unwrap();
        let emitted = arena_to_pgsolver(&arena, base).unwrap();
        assert_eq!(emitted, text);
        let (again, base2) = parse_pgsolver(&emitted).unwrap();
        assert_eq!(arena_to_pgsolver(&again, base2).unwrap(), emitted);
    }

    #[test]
    fn arena_json_round_trip() {
        let arena = Arena::build(
            vec![
                ("a".into(), Player::Zero, Priority::nat(2)),
                ("b".into(), Player::One, Priority::omega()),
            ],
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
        )
        .unwrap();
        let text = arena_to_json(&arena);
        let parsed = arena_from_json(&text).unwrap();
        assert_eq!(arena_to_json(&parsed), text);
        assert!(text.contains("\"limit\": 1"));
    }

    #[test]
    fn arena_json_limit_defaults_to_zero() {
        let text = r#"{
  "vertices": [{"id": "x", "owner": 0, "priority": {"offset": 4}}],
  "edges": [["x", "x"]]
}"#;
        let arena = arena_from_json(text).unwrap();
        assert_eq!(arena.priority(VertexId(0)), Priority::nat(4));
    }

    #[test]
    fn condition_json_round_trip() {
        let specs = [
            ConditionSpec::MinParity,
            ConditionSpec::MaxParity,
            ConditionSpec::Infinity,
            ConditionSpec::OrdinalParity { bound: Priority { limit: 1, offset: 1 } },
            ConditionSpec::ExplicitMuller(
                ExplicitMuller::new(
                    BTreeSet::from([0, 1, 2]),
                    vec![BTreeSet::from([0, 1, 2]), BTreeSet::new()],
                )
                .unwrap(),
            ),
            ConditionSpec::ZielonkaPath(
                ZielonkaPathSpec::new(
                    Player::Zero,
                    vec![BTreeSet::from([0, 1]), BTreeSet::from([2, 3])],
                    false,
                )
                .unwrap(),
            ),
            ConditionSpec::SingletonLimit(SingletonLimit {
                e: 0,
                y_window: BTreeSet::from([1, 2, 3]),
            }),
        ];
        for spec in specs {
            let text = condition_to_json(&spec);
            let parsed = condition_from_json(&text).unwrap();
            assert_eq!(parsed, spec);
            assert_eq!(condition_to_json(&parsed), text);
        }
    }

    #[test]
    fn dot_export_shapes_and_overlays() {
        let arena = Arena::build(
            vec![
                ("a".into(), Player::Zero, Priority::nat(0)),
                ("b".into(), Player::One, Priority::nat(1)),
            ],
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
        )
        .unwrap();
        let dot = export_dot(&arena, &Overlays::default()).unwrap();
        assert!(dot.contains("\"a\" [shape=ellipse"));
        assert!(dot.contains("\"b\" [shape=box"));
        let mut s = PositionalStrategy::new(Player::Zero);
        s.set("a", "b");
        let dot2 = export_dot(
            &arena,
            &Overlays { strategies: vec![&s], ..Default::default() },
        )
        .unwrap();
        assert!(dot2.contains("\"a\" -> \"b\" [penwidth=2.5];"));
        let mut bad = PositionalStrategy::new(Player::Zero);
        bad.set("zz", "b");
        let err = export_dot(
            &arena,
            &Overlays { strategies: vec![&bad], ..Default::default() },
        )
        .unwrap_err();
        assert!(matches!(err, IoError::UnknownVertexInOverlay(_)));
    }
}
