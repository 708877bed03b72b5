//! Fixed-point stage ordinals, lexicographic signatures, and extraction of a
//! positional strategy from a finite-memory winning strategy.
//!
//! The stage value of a vertex bounds how often a path from it can hit a
//! predicate before being released; signatures bundle the stage values of
//! the relevant parity into lexicographically compared tuples. A positional
//! strategy is obtained by copying, for each vertex, the move of a
//! signature-minimal occurrence of that vertex in the finite quotient of the
//! strategy forest.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::arena::{Arena, ArenaError, Player, Priority, VertexId};
use crate::conditions::ConditionSpec;
use crate::strategy::{product_with_memory, MemoryStrategy, PositionalStrategy, StrategyProduct};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PositionalizeError {
    #[error("input strategy is not winning: stage value of {vertex} for priority {priority} is infinite")]
    InputStrategyNotWinning { vertex: String, priority: Priority },
    #[error("region is not closed at vertex {0}")]
    RegionNotClosed(String),
    #[error("condition {0} is not supported by positionalization")]
    UnsupportedCondition(String),
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// A stage ordinal on a finite graph: a natural number or infinity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Stage {
    Finite(u32),
    Infinite,
}

impl Stage {
    pub fn finite(self) -> Option<u32> {
        match self {
            Stage::Finite(n) => Some(n),
            Stage::Infinite => None,
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Finite(n) => write!(f, "{n}"),
            Stage::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StageKind {
    Alpha,
    Beta,
}

/// Per-vertex stage values of one fixed-point computation.
#[derive(Clone, Debug)]
pub struct StageTable {
    pub kind: StageKind,
    pub values: Vec<Stage>,
    pub p: Vec<bool>,
    pub q: Vec<bool>,
}

impl StageTable {
    pub fn value(&self, v: VertexId) -> Stage {
        self.values[v.0]
    }
}

/// Core stage iteration for `μX.νY.(¬P ∨ □X)∧(Q ∨ □Y)`: the least stage at
/// which a vertex satisfies "all paths hit P only finitely often before
/// seeing Q". A vertex in Q is released outright, so Q takes precedence
/// over P at the hitting step. With `Q = ∅` this is the plain "finitely
/// many occurrences of P" stage.
fn stage_fixpoint(arena: &Arena, p: &[bool], q: &[bool]) -> Vec<Stage> {
    let n = arena.len();
    let mut value = vec![Stage::Infinite; n];
    let mut in_prev = vec![false; n];
    let mut stage = 0u32;
    loop {
        // Greatest fixed point: start from everything, remove violators.
        let mut in_y = vec![true; n];
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if !in_y[v] {
                    continue;
                }
                let release_ok = q[v]
                    || !p[v]
                    || arena.successors(VertexId(v)).iter().all(|t| in_prev[t.0]);
                let guard_ok =
                    q[v] || arena.successors(VertexId(v)).iter().all(|t| in_y[t.0]);
                if !(release_ok && guard_ok) {
                    in_y[v] = false;
                    changed = true;
                }
            }
        }
        let mut grew = false;
        for v in 0..n {
            if in_y[v] && !in_prev[v] {
                value[v] = Stage::Finite(stage);
                grew = true;
            }
        }
        if !grew {
            return value;
        }
        in_prev = in_y;
        stage += 1;
    }
}

/// Stage values of "how often a path from each vertex can hit P".
/// Ownership of vertices is ignored; the arena is a plain transition system.
pub fn compute_alpha(arena: &Arena, p: &[bool]) -> StageTable {
    let q = vec![false; arena.len()];
    StageTable {
        kind: StageKind::Alpha,
        values: stage_fixpoint(arena, p, &q),
        p: p.to_vec(),
        q,
    }
}

/// Stage values of "how often a path from each vertex can hit P before
/// seeing Q".
pub fn compute_beta(arena: &Arena, p: &[bool], q: &[bool]) -> StageTable {
    StageTable {
        kind: StageKind::Beta,
        values: stage_fixpoint(arena, p, q),
        p: p.to_vec(),
        q: q.to_vec(),
    }
}

/// Checks the stage-table edge inequalities on all edges with finite
/// endpoints: along `(s, t)` with `s ∉ Q` the value cannot increase, and it
/// strictly decreases when `s ∈ P \ Q`. Returns the violating edge if any.
pub fn check_stage_inequalities(arena: &Arena, table: &StageTable) -> Option<(VertexId, VertexId)> {
    for (s, t) in arena.edges() {
        if table.q[s.0] {
            continue;
        }
        let Stage::Finite(vs) = table.values[s.0] else { continue };
        match table.values[t.0] {
            Stage::Infinite => return Some((s, t)),
            Stage::Finite(vt) => {
                if vt > vs || (table.p[s.0] && vt >= vs) {
                    return Some((s, t));
                }
            }
        }
    }
    None
}

/// Re-runs one more stage of the fixed-point and confirms nothing changes;
/// used by tests to pin down that reported values are least stages.
pub fn is_stage_fixpoint(arena: &Arena, table: &StageTable) -> bool {
    let recomputed = stage_fixpoint(arena, &table.p, &table.q);
    recomputed == table.values
}

/// Signature tables of one player on a graph where that player's strategy
/// has already been fixed: for each priority of the opposing parity, the
/// stage value of hitting it before anything smaller.
#[derive(Clone, Debug)]
pub struct SignatureOrder {
    pub player: Player,
    /// Priorities of the opposing parity present in the graph, ascending.
    pub priorities: Vec<Priority>,
    /// `tuples[v][i]` is the stage value of `priorities[i]` at vertex `v`.
    pub tuples: Vec<Vec<u32>>,
}

impl SignatureOrder {
    /// Number of leading components that participate in a comparison
    /// truncated at priority `n`.
    fn width_upto(&self, n: Priority) -> usize {
        self.priorities.iter().take_while(|p| **p <= n).count()
    }

    /// Lexicographic comparison of the signatures of `a` and `b`, truncated
    /// at priority `n`.
    pub fn cmp_upto(&self, a: VertexId, b: VertexId, n: Priority) -> std::cmp::Ordering {
        let w = self.width_upto(n);
        self.tuples[a.0][..w].cmp(&self.tuples[b.0][..w])
    }

    pub fn tuple(&self, v: VertexId) -> &[u32] {
        &self.tuples[v.0]
    }
}

/// Priorities of the parity relevant to `player`'s signatures: odd for
/// Player 0, even for Player 1.
fn opposing_parity(p: Priority, player: Player) -> bool {
    match player {
        Player::Zero => p.is_odd(),
        Player::One => p.is_even(),
    }
}

/// Computes the signature tables of `player` on a strategy-restricted graph.
///
/// Fails with `InputStrategyNotWinning` if any stage value is infinite,
/// i.e. if the graph contains a path hitting some opposing priority forever
/// without release.
pub fn signatures(graph: &Arena, player: Player) -> Result<SignatureOrder, PositionalizeError> {
    let priorities: Vec<Priority> = graph
        .priorities()
        .into_iter()
        .filter(|p| opposing_parity(*p, player))
        .collect();
    let mut tuples = vec![Vec::with_capacity(priorities.len()); graph.len()];
    for &n in &priorities {
        let p: Vec<bool> = graph.vertices().map(|v| graph.priority(v) == n).collect();
        let q: Vec<bool> = graph.vertices().map(|v| graph.priority(v) < n).collect();
        let table = compute_beta(graph, &p, &q);
        for v in graph.vertices() {
            match table.value(v) {
                Stage::Finite(x) => tuples[v.0].push(x),
                Stage::Infinite => {
                    return Err(PositionalizeError::InputStrategyNotWinning {
                        vertex: graph.id(v).to_string(),
                        priority: n,
                    })
                }
            }
        }
    }
    Ok(SignatureOrder { player, priorities, tuples })
}

/// Everything computed on the way to a positional strategy; exposed for
/// inspection by tests and examples.
pub struct PositionalizeTrace {
    pub product: StrategyProduct,
    pub order: SignatureOrder,
    /// The signature-minimal occurrence selected for each region vertex.
    pub selected: BTreeMap<VertexId, VertexId>,
}

fn region_closed(
    arena: &Arena,
    strategy: &MemoryStrategy,
    region: &BTreeSet<VertexId>,
    product: &StrategyProduct,
) -> Result<(), PositionalizeError> {
    let _ = strategy;
    for (pv, _) in product.arena.edges().map(|(u, v)| (u, v)) {
        let base = product.project[pv.0];
        if !region.contains(&base) {
            return Err(PositionalizeError::RegionNotClosed(arena.id(base).to_string()));
        }
    }
    for v in product.arena.vertices() {
        let base = product.project[v.0];
        if !region.contains(&base) {
            return Err(PositionalizeError::RegionNotClosed(arena.id(base).to_string()));
        }
    }
    Ok(())
}

/// Extracts a positional strategy from a finite-memory strategy that wins on
/// `region`, by selecting for each vertex a signature-minimal occurrence in
/// the strategy product and copying its move.
///
/// Supports the min-parity condition directly and the infinity condition
/// through the priority doubling `p ↦ 2p+1` that makes every priority odd.
pub fn positionalize(
    arena: &Arena,
    condition: &ConditionSpec,
    strategy: &MemoryStrategy,
    region: &BTreeSet<VertexId>,
) -> Result<PositionalStrategy, PositionalizeError> {
    positionalize_detailed(arena, condition, strategy, region).map(|(s, _)| s)
}

pub fn positionalize_detailed(
    arena: &Arena,
    condition: &ConditionSpec,
    strategy: &MemoryStrategy,
    region: &BTreeSet<VertexId>,
) -> Result<(PositionalStrategy, PositionalizeTrace), PositionalizeError> {
    let embed: fn(Priority) -> Priority = match condition {
        ConditionSpec::MinParity => |p| p,
        // Infinity games are the parity games in which every priority is odd.
        ConditionSpec::Infinity => |p| Priority::nat(2 * p.offset + 1),
        other => {
            return Err(PositionalizeError::UnsupportedCondition(other.to_string()));
        }
    };
    let player = strategy.player;
    let product = product_with_memory(arena, strategy, region)?;
    region_closed(arena, strategy, region, &product)?;
    let graph = product.arena.relabel(embed);
    let order = signatures(&graph, player)?;

    let mut selected: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&base, occs) in &product.occurrences {
        let truncation = embed(arena.priority(base));
        // Occurrence lists are ordered by product id, i.e. by memory-state
        // id for a fixed base vertex, which realizes the total tie-break.
        let mut best = occs[0];
        for &cand in &occs[1..] {
            if order.cmp_upto(cand, best, truncation) == std::cmp::Ordering::Less {
                best = cand;
            }
        }
        selected.insert(base, best);
    }

    let mut out = PositionalStrategy::new(player);
    for (&base, &occ) in &selected {
        if arena.owner(base) != player {
            continue;
        }
        let succs = product.arena.successors(occ);
        debug_assert_eq!(succs.len(), 1, "owned product vertices have a unique successor");
        let target = product.project[succs[0].0];
        out.set(arena.id(base), arena.id(target));
    }
    Ok((out, PositionalizeTrace { product, order, selected }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player;

    fn chain_arena() -> Arena {
        // s -> t -> u, u self-loop.
        Arena::build(
            vec![
                ("s".into(), Player::Zero, Priority::nat(0)),
                ("t".into(), Player::Zero, Priority::nat(1)),
                ("u".into(), Player::Zero, Priority::nat(0)),
            ],
            vec![
                ("s".into(), "t".into()),
                ("t".into(), "u".into()),
                ("u".into(), "u".into()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn alpha_on_empty_predicate_is_zero() {
        let arena = chain_arena();
        let table = compute_alpha(&arena, &[false, false, false]);
        assert!(arena.vertices().all(|v| table.value(v) == Stage::Finite(0)));
    }

    #[test]
    fn alpha_counts_hits_along_chain() {
        let arena = chain_arena();
        let p: Vec<bool> = arena.vertices().map(|v| arena.id(v) == "t").collect();
        let table = compute_alpha(&arena, &p);
        assert_eq!(table.value(arena.lookup("u").unwrap()), Stage::Finite(0));
        assert_eq!(table.value(arena.lookup("t").unwrap()), Stage::Finite(1));
        assert_eq!(table.value(arena.lookup("s").unwrap()), Stage::Finite(1));
        assert!(is_stage_fixpoint(&arena, &table));
        assert_eq!(check_stage_inequalities(&arena, &table), None);
    }

    #[test]
    fn alpha_is_infinite_on_cycles_through_p() {
        let arena = Arena::build(
            vec![
                ("a".into(), Player::Zero, Priority::nat(1)),
                ("b".into(), Player::Zero, Priority::nat(0)),
            ],
            vec![("a".into(), "b".into()), ("b".into(), "a".into())],
        )
        .unwrap();
        let p: Vec<bool> = arena.vertices().map(|v| arena.id(v) == "a").collect();
        let table = compute_alpha(&arena, &p);
        assert!(arena.vertices().all(|v| table.value(v) == Stage::Infinite));
    }

    #[test]
    fn beta_guarded_everywhere_is_zero() {
        let arena = chain_arena();
        let p = vec![true, true, true];
        let q = vec![true, true, true];
        let table = compute_beta(&arena, &p, &q);
        assert!(arena.vertices().all(|v| table.value(v) == Stage::Finite(0)));
    }

    #[test]
    fn beta_on_alternating_cycle() {
        // p-vertex and q-vertex on a 2-cycle: hitting p happens once before q.
        let arena = Arena::build(
            vec![
                ("p".into(), Player::Zero, Priority::nat(0)),
                ("q".into(), Player::Zero, Priority::nat(0)),
            ],
            vec![("p".into(), "q".into()), ("q".into(), "p".into())],
        )
        .unwrap();
        let pm: Vec<bool> = arena.vertices().map(|v| arena.id(v) == "p").collect();
        let qm: Vec<bool> = arena.vertices().map(|v| arena.id(v) == "q").collect();
        let table = compute_beta(&arena, &pm, &qm);
        assert_eq!(table.value(arena.lookup("q").unwrap()), Stage::Finite(0));
        assert_eq!(table.value(arena.lookup("p").unwrap()), Stage::Finite(1));
    }

    #[test]
    fn beta_infinite_on_unguarded_cycle() {
        let arena = Arena::build(
            vec![("p".into(), Player::Zero, Priority::nat(0))],
            vec![("p".into(), "p".into())],
        )
        .unwrap();
        let table = compute_beta(&arena, &[true], &[false]);
        assert_eq!(table.value(VertexId(0)), Stage::Infinite);
    }

    #[test]
    fn stage_values_grow_with_truncation() {
        // A spine with a tooth of k hits attached at spine position k: the
        // stage value at the spine start grows with the truncation, the
        // finite shadow of an omega-valued vertex on the infinite graph.
        let build = |n: u32| {
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            for i in 0..=n {
                vertices.push((format!("s{i:03}"), Player::Zero, Priority::nat(0)));
                if i < n {
                    edges.push((format!("s{i:03}"), format!("s{:03}", i + 1)));
                }
            }
            edges.push((format!("s{n:03}"), format!("s{n:03}")));
            for i in 1..=n {
                for j in 0..i {
                    vertices.push((format!("t{i:03}_{j:03}"), Player::Zero, Priority::nat(1)));
                    let from = if j == 0 {
                        format!("s{i:03}")
                    } else {
                        format!("t{i:03}_{:03}", j - 1)
                    };
                    edges.push((from, format!("t{i:03}_{j:03}")));
                }
                vertices.push((format!("z{i:03}"), Player::Zero, Priority::nat(0)));
                edges.push((format!("t{i:03}_{:03}", i - 1), format!("z{i:03}")));
                edges.push((format!("z{i:03}"), format!("z{i:03}")));
            }
            Arena::build(vertices, edges).unwrap()
        };
        let mut last = 0;
        for n in [2u32, 4, 8] {
            let arena = build(n);
            let p: Vec<bool> = arena.vertices().map(|v| arena.priority(v) == Priority::nat(1)).collect();
            let table = compute_alpha(&arena, &p);
            let v = table.value(arena.lookup("s000").unwrap()).finite().unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn signatures_all_zero_on_even_self_loop() {
        let arena = Arena::build(
            vec![("v".into(), Player::Zero, Priority::nat(0))],
            vec![("v".into(), "v".into())],
        )
        .unwrap();
        let order = signatures(&arena, Player::Zero).unwrap();
        assert!(order.tuple(VertexId(0)).iter().all(|&x| x == 0));
    }

    #[test]
    fn losing_graph_is_rejected() {
        let arena = Arena::build(
            vec![("v".into(), Player::Zero, Priority::nat(1))],
            vec![("v".into(), "v".into())],
        )
        .unwrap();
        let err = signatures(&arena, Player::Zero).unwrap_err();
        assert!(matches!(err, PositionalizeError::InputStrategyNotWinning { .. }));
    }

    #[test]
    fn positionalize_identity_on_positional_input() {
        let arena = chain_arena();
        let mut pos = PositionalStrategy::new(Player::Zero);
        pos.set("s", "t");
        pos.set("t", "u");
        pos.set("u", "u");
        let mem = MemoryStrategy::from_positional(&arena, &pos);
        let region: BTreeSet<VertexId> = arena.vertices().collect();
        let out = positionalize(&arena, &ConditionSpec::MinParity, &mem, &region).unwrap();
        assert_eq!(out.moves(), pos.moves());
    }

    #[test]
    fn positionalize_collapses_two_state_strategy() {
        // Vertex a (priority 1) may go to b or c (both priority 0, both
        // returning); a 2-state strategy alternates. Either move alone wins.
        let arena = Arena::build(
            vec![
                ("a".into(), Player::Zero, Priority::nat(1)),
                ("b".into(), Player::One, Priority::nat(0)),
                ("c".into(), Player::One, Priority::nat(0)),
                ("d".into(), Player::One, Priority::nat(2)),
            ],
            vec![
                ("a".into(), "b".into()),
                ("a".into(), "c".into()),
                ("b".into(), "a".into()),
                ("c".into(), "a".into()),
                ("d".into(), "a".into()),
            ],
        )
        .unwrap();
        let mut mem = MemoryStrategy::new(Player::Zero, vec!["0".into(), "1".into()], "0".into());
        for v in arena.vertices() {
            for s in ["0", "1"] {
                let next = if arena.id(v) == "a" {
                    if s == "0" { "1" } else { "0" }
                } else {
                    s
                };
                mem.set_update(s, arena.id(v), next);
            }
        }
        mem.set_move("a", "0", "b");
        mem.set_move("a", "1", "c");
        let region: BTreeSet<VertexId> = arena.vertices().collect();
        let out = positionalize(&arena, &ConditionSpec::MinParity, &mem, &region).unwrap();
        let chosen = out.get("a").unwrap();
        assert!(chosen == "b" || chosen == "c");
        // Both candidate positional strategies win; check by brute force on
        // the two resulting restrictions: the only cycles are a-b / a-c with
        // min priority 0.
        let target = arena.lookup(chosen).unwrap();
        assert!(arena.successors(arena.lookup("a").unwrap()).contains(&target));
    }

    #[test]
    fn positionalize_rejects_losing_input() {
        let arena = Arena::build(
            vec![("v".into(), Player::Zero, Priority::nat(1))],
            vec![("v".into(), "v".into())],
        )
        .unwrap();
        let mut pos = PositionalStrategy::new(Player::Zero);
        pos.set("v", "v");
        let mem = MemoryStrategy::from_positional(&arena, &pos);
        let region: BTreeSet<VertexId> = arena.vertices().collect();
        let err = positionalize(&arena, &ConditionSpec::MinParity, &mem, &region).unwrap_err();
        assert!(matches!(err, PositionalizeError::InputStrategyNotWinning { .. }));
    }
}
