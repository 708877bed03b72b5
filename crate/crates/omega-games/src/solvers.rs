//! Finite parity-game solving by two independent algorithms, strategy
//! verification, and a latest-appearance-record oracle for Muller games.
//!
//! The house convention is min-parity: the least priority occurring
//! infinitely often decides, even being good for Player 0. Arenas with
//! ordinal priorities are solved after an order- and parity-preserving
//! renaming into the naturals, which is sound on finite arenas.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::arena::{Arena, ArenaError, Player, Priority, VertexId};
use crate::conditions::{member, ConditionError, ConditionSpec, ExplicitMuller};
use crate::strategy::{MemoryStrategy, PositionalStrategy};
use crate::zielonka::{reduce_to_parity, Reduction, ZielonkaError};

#[derive(Error, Debug)]
pub enum SolveError {
    #[error("region is not closed at vertex {0}")]
    RegionNotClosed(String),
    #[error("region of {0} vertices is too large for the exhaustive Muller check (limit 14)")]
    TooLargeForMullerCheck(usize),
    #[error("alphabet of {0} priorities is too large for the record oracle (limit 8)")]
    AlphabetTooLarge(usize),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Zielonka(#[from] ZielonkaError),
}

/// Winning regions with one positional strategy per player.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub w0: BTreeSet<VertexId>,
    pub w1: BTreeSet<VertexId>,
    pub strat0: PositionalStrategy,
    pub strat1: PositionalStrategy,
}

impl SolveResult {
    pub fn region(&self, player: Player) -> &BTreeSet<VertexId> {
        match player {
            Player::Zero => &self.w0,
            Player::One => &self.w1,
        }
    }

    pub fn strategy(&self, player: Player) -> &PositionalStrategy {
        match player {
            Player::Zero => &self.strat0,
            Player::One => &self.strat1,
        }
    }
}

// ---------------------------------------------------------------------------
// Attractors
// ---------------------------------------------------------------------------

/// Attractor computation restricted to `mask`, recording one-step progress
/// moves for the attracting player into `moves`.
fn attract_within(
    arena: &Arena,
    mask: &[bool],
    player: Player,
    base: &[bool],
    moves: &mut [Option<VertexId>],
) -> Vec<bool> {
    let n = arena.len();
    let mut attr = vec![false; n];
    let mut queue = VecDeque::new();
    let mut escape_count = vec![0usize; n];
    for v in 0..n {
        if mask[v] {
            escape_count[v] = arena
                .successors(VertexId(v))
                .iter()
                .filter(|t| mask[t.0])
                .count();
            if base[v] {
                attr[v] = true;
                queue.push_back(VertexId(v));
            }
        }
    }
    while let Some(w) = queue.pop_front() {
        for &u in arena.predecessors(w) {
            if !mask[u.0] || attr[u.0] {
                continue;
            }
            if arena.owner(u) == player {
                attr[u.0] = true;
                moves[u.0] = Some(w);
                queue.push_back(u);
            } else {
                escape_count[u.0] -= 1;
                if escape_count[u.0] == 0 {
                    attr[u.0] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    attr
}

/// The least set containing `target` from which `player` can force a visit
/// to `target`, together with a one-step-progress strategy on the attractor
/// minus the target.
pub fn attractor(
    arena: &Arena,
    player: Player,
    target: &BTreeSet<VertexId>,
) -> (BTreeSet<VertexId>, PositionalStrategy) {
    let mask = vec![true; arena.len()];
    let mut base = vec![false; arena.len()];
    for &v in target {
        base[v.0] = true;
    }
    let mut moves = vec![None; arena.len()];
    let attr = attract_within(arena, &mask, player, &base, &mut moves);
    let mut strategy = PositionalStrategy::new(player);
    for v in 0..arena.len() {
        if let Some(t) = moves[v] {
            strategy.set(arena.id(VertexId(v)), arena.id(t));
        }
    }
    let set = (0..arena.len()).filter(|&v| attr[v]).map(VertexId).collect();
    (set, strategy)
}

// ---------------------------------------------------------------------------
// Recursive solver
// ---------------------------------------------------------------------------

struct RecursiveSolver<'a> {
    arena: &'a Arena,
    moves: [Vec<Option<VertexId>>; 2],
}

impl<'a> RecursiveSolver<'a> {
    fn solve(&mut self, mask: Vec<bool>) -> [Vec<bool>; 2] {
        let n = self.arena.len();
        if !mask.iter().any(|&b| b) {
            return [vec![false; n], vec![false; n]];
        }
        let least = (0..n)
            .filter(|&v| mask[v])
            .map(|v| self.arena.priority(VertexId(v)))
            .min()
            .expect("non-empty mask");
        let sigma = Player::of_parity(least);
        let mut base = vec![false; n];
        for v in 0..n {
            if mask[v] && self.arena.priority(VertexId(v)) == least {
                base[v] = true;
            }
        }
        let attr = attract_within(self.arena, &mask, sigma, &base, &mut self.moves[sigma.index()]);
        let mut rest = mask.clone();
        for v in 0..n {
            if attr[v] {
                rest[v] = false;
            }
        }
        let sub = self.solve(rest);
        let opponent_region = &sub[sigma.opponent().index()];
        if !opponent_region.iter().any(|&b| b) {
            // The whole mask is won by sigma; fix moves on the least-priority
            // vertices themselves (any successor inside the mask works).
            for v in 0..n {
                if base[v] && self.arena.owner(VertexId(v)) == sigma {
                    let target = self
                        .arena
                        .successors(VertexId(v))
                        .iter()
                        .copied()
                        .find(|t| mask[t.0])
                        .expect("subgames stay total");
                    self.moves[sigma.index()][v] = Some(target);
                }
            }
            let mut regions = [vec![false; n], vec![false; n]];
            regions[sigma.index()] = mask;
            regions
        } else {
            let escape =
                attract_within(self.arena, &mask, sigma.opponent(), opponent_region, &mut self.moves[sigma.opponent().index()]);
            let mut rest2 = mask;
            for v in 0..n {
                if escape[v] {
                    rest2[v] = false;
                }
            }
            let mut regions = self.solve(rest2);
            for v in 0..n {
                if escape[v] {
                    regions[sigma.opponent().index()][v] = true;
                }
            }
            regions
        }
    }
}

fn result_from(
    arena: &Arena,
    regions: [Vec<bool>; 2],
    moves: [Vec<Option<VertexId>>; 2],
) -> SolveResult {
    let mut strat0 = PositionalStrategy::new(Player::Zero);
    let mut strat1 = PositionalStrategy::new(Player::One);
    for v in arena.vertices() {
        if regions[0][v.0] && arena.owner(v) == Player::Zero {
            if let Some(t) = moves[0][v.0] {
                strat0.set(arena.id(v), arena.id(t));
            }
        }
        if regions[1][v.0] && arena.owner(v) == Player::One {
            if let Some(t) = moves[1][v.0] {
                strat1.set(arena.id(v), arena.id(t));
            }
        }
    }
    SolveResult {
        w0: (0..arena.len()).filter(|&v| regions[0][v]).map(VertexId).collect(),
        w1: (0..arena.len()).filter(|&v| regions[1][v]).map(VertexId).collect(),
        strat0,
        strat1,
    }
}

/// Solves a finite min-parity game by the recursive attractor decomposition.
pub fn solve_parity_recursive(arena: &Arena) -> SolveResult {
    let work = arena.naturalized();
    // Recursion depth can reach the number of vertices; run on a thread with
    // a stack sized for the record-product oracles.
    let result = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || {
            let n = work.len();
            let mut solver = RecursiveSolver {
                arena: &work,
                moves: [vec![None; n], vec![None; n]],
            };
            let regions = solver.solve(vec![true; n]);
            let moves = std::mem::take(&mut solver.moves);
            result_from(&work, regions, moves)
        })
        .expect("spawn solver thread")
        .join()
        .expect("solver thread");
    debug_assert_eq!(result.w0.len() + result.w1.len(), arena.len());
    result
}

// ---------------------------------------------------------------------------
// Small progress measures
// ---------------------------------------------------------------------------

/// The per-vertex counter tuples of the progress-measure solver, indexed by
/// the odd priorities present. `None` is the top element.
#[derive(Clone, Debug)]
pub struct ProgressMeasure {
    pub odd_priorities: Vec<Priority>,
    pub caps: Vec<u32>,
    pub rows: Vec<Option<Vec<u32>>>,
}

impl ProgressMeasure {
    /// Comparison of measures truncated at priority `p`: only counters for
    /// odd priorities `<= p` participate. `None` (top) exceeds everything.
    pub fn le_upto(&self, a: &Option<Vec<u32>>, b: &Option<Vec<u32>>, p: Priority) -> bool {
        let w = self.odd_priorities.iter().take_while(|q| **q <= p).count();
        match (a, b) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x[..w] <= y[..w],
        }
    }

    pub fn lt_upto(&self, a: &Option<Vec<u32>>, b: &Option<Vec<u32>>, p: Priority) -> bool {
        let w = self.odd_priorities.iter().take_while(|q| **q <= p).count();
        match (a, b) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(x), Some(y)) => x[..w] < y[..w],
        }
    }

    /// Least measure `m` with `m >=_p row` (strictly greater when `strict`),
    /// where `p` caps the significant prefix.
    fn prog(&self, row: &Option<Vec<u32>>, p: Priority, strict: bool) -> Option<Vec<u32>> {
        let row = row.as_ref()?;
        let k = self.odd_priorities.len();
        let w = self.odd_priorities.iter().take_while(|q| **q <= p).count();
        let mut out = vec![0u32; k];
        out[..w].copy_from_slice(&row[..w]);
        if strict {
            let mut i = w;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if out[i] < self.caps[i] {
                    out[i] += 1;
                    for slot in out.iter_mut().take(w).skip(i + 1) {
                        *slot = 0;
                    }
                    break;
                }
                out[i] = 0;
            }
        }
        Some(out)
    }
}

fn spm_player_zero(arena: &Arena) -> (Vec<bool>, Vec<Option<VertexId>>, ProgressMeasure) {
    let odd_priorities: Vec<Priority> = arena
        .priorities()
        .into_iter()
        .filter(|p| p.is_odd())
        .collect();
    let caps: Vec<u32> = odd_priorities
        .iter()
        .map(|&p| arena.vertices().filter(|&v| arena.priority(v) == p).count() as u32)
        .collect();
    let mut measure = ProgressMeasure {
        odd_priorities,
        caps,
        rows: vec![Some(vec![0; 0]); 0],
    };
    let k = measure.odd_priorities.len();
    measure.rows = vec![Some(vec![0u32; k]); arena.len()];

    let lift = |measure: &ProgressMeasure, v: VertexId| -> Option<Vec<u32>> {
        let p = arena.priority(v);
        let strict = p.is_odd();
        let candidates = arena
            .successors(v)
            .iter()
            .map(|t| measure.prog(&measure.rows[t.0], p, strict));
        if arena.owner(v) == Player::Zero {
            candidates.min_by(compare_rows).expect("total arena")
        } else {
            candidates.max_by(compare_rows).expect("total arena")
        }
    };

    let mut in_queue = vec![true; arena.len()];
    let mut queue: VecDeque<VertexId> = arena.vertices().collect();
    while let Some(v) = queue.pop_front() {
        in_queue[v.0] = false;
        let new = lift(&measure, v);
        if compare_rows(&new, &measure.rows[v.0]) == std::cmp::Ordering::Greater {
            measure.rows[v.0] = new;
            for &u in arena.predecessors(v) {
                if !in_queue[u.0] {
                    in_queue[u.0] = true;
                    queue.push_back(u);
                }
            }
        }
    }

    let w0: Vec<bool> = measure.rows.iter().map(Option::is_some).collect();
    let mut moves = vec![None; arena.len()];
    for v in arena.vertices() {
        if w0[v.0] && arena.owner(v) == Player::Zero {
            let p = arena.priority(v);
            let strict = p.is_odd();
            let best = arena
                .successors(v)
                .iter()
                .copied()
                .min_by(|a, b| {
                    compare_rows(
                        &measure.prog(&measure.rows[a.0], p, strict),
                        &measure.prog(&measure.rows[b.0], p, strict),
                    )
                })
                .expect("total arena");
            moves[v.0] = Some(best);
        }
    }
    (w0, moves, measure)
}

fn compare_rows(a: &Option<Vec<u32>>, b: &Option<Vec<u32>>) -> std::cmp::Ordering {
    match (a, b) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (Some(_), None) => std::cmp::Ordering::Less,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

/// Shifts every priority up by one and swaps ownership, exchanging the roles
/// of the two players without disturbing the priority order.
fn role_swapped_arena(arena: &Arena) -> Arena {
    let vertices = arena
        .vertices()
        .map(|v| {
            let info = arena.info(v);
            let p = Priority { limit: info.priority.limit, offset: info.priority.offset + 1 };
            (info.id.clone(), info.owner.opponent(), p)
        })
        .collect();
    let edges = arena
        .edges()
        .map(|(u, v)| (arena.id(u).to_string(), arena.id(v).to_string()))
        .collect();
    Arena::build(vertices, edges).expect("role swap preserves validity")
}

/// Solves a finite min-parity game by iterating the progress-measure lift to
/// its least simultaneous fixed point; the measure realizes, per odd
/// priority, how often a consistent play can hit it before something
/// smaller. The dual run with swapped roles yields Player 1's region.
pub fn solve_parity_spm(arena: &Arena) -> (SolveResult, ProgressMeasure) {
    let work = arena.naturalized();
    let (w0, moves0, measure) = spm_player_zero(&work);
    let dual = role_swapped_arena(&work);
    let (w1_dual, moves1_dual, _) = spm_player_zero(&dual);

    let mut strat0 = PositionalStrategy::new(Player::Zero);
    for v in work.vertices() {
        if let Some(t) = moves0[v.0] {
            strat0.set(work.id(v), work.id(t));
        }
    }
    let mut strat1 = PositionalStrategy::new(Player::One);
    for v in dual.vertices() {
        if let Some(t) = moves1_dual[v.0] {
            strat1.set(dual.id(v), dual.id(t));
        }
    }
    let w0_set: BTreeSet<VertexId> = work.vertices().filter(|v| w0[v.0]).collect();
    let w1_set: BTreeSet<VertexId> = dual
        .vertices()
        .filter(|v| w1_dual[v.0])
        .map(|v| work.lookup(dual.id(v)).expect("same ids"))
        .collect();
    debug_assert!(w0_set.is_disjoint(&w1_set));
    (
        SolveResult { w0: w0_set, w1: w1_set, strat0, strat1 },
        measure,
    )
}

// ---------------------------------------------------------------------------
// Strategy verification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Witness {
    pub vertices: Vec<String>,
    pub inf_set: BTreeSet<Priority>,
    pub winner: Player,
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub witness: Option<Witness>,
}

pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    // Iterative Tarjan.
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
            }
        }
    }
    components
}

/// Finds a cycle through `through` inside the vertex set `allowed` of the
/// graph `adj`, if one exists.
pub(crate) fn cycle_through(adj: &[Vec<usize>], allowed: &[bool], through: usize) -> Option<Vec<usize>> {
    // BFS from the successors of `through` back to it.
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &t in &adj[through] {
        if allowed[t] {
            if t == through {
                return Some(vec![through]);
            }
            if parent[t] == usize::MAX {
                parent[t] = through;
                queue.push_back(t);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &t in &adj[v] {
            if !allowed[t] {
                continue;
            }
            if t == through {
                let mut path = vec![v];
                let mut cur = v;
                while parent[cur] != through {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.push(through);
                path.reverse();
                return Some(path);
            }
            if parent[t] == usize::MAX {
                parent[t] = v;
                queue.push_back(t);
            }
        }
    }
    None
}

struct Restriction {
    verts: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
}

fn restriction_of(
    arena: &Arena,
    strategy: &PositionalStrategy,
    region: &BTreeSet<VertexId>,
) -> Result<Restriction, SolveError> {
    let verts: Vec<VertexId> = region.iter().copied().collect();
    let local: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); verts.len()];
    for (i, &v) in verts.iter().enumerate() {
        if arena.owner(v) == strategy.player {
            let t = strategy.move_at(arena, v)?;
            let j = *local
                .get(&t)
                .ok_or_else(|| SolveError::RegionNotClosed(arena.id(v).to_string()))?;
            adj[i].push(j);
        } else {
            for &t in arena.successors(v) {
                let j = *local
                    .get(&t)
                    .ok_or_else(|| SolveError::RegionNotClosed(arena.id(v).to_string()))?;
                adj[i].push(j);
            }
        }
    }
    Ok(Restriction { verts, adj })
}

/// Checks that every play consistent with the strategy inside `region` is
/// won by the strategy's player.
///
/// For parity conditions this is the opponent-optimal cycle check; for
/// Muller conditions over a finite alphabet it enumerates the realizable
/// inf-sets, i.e. the strongly connected vertex subsets of the restriction
/// (at most 14 region vertices).
pub fn verify_positional(
    arena: &Arena,
    condition: &ConditionSpec,
    strategy: &PositionalStrategy,
    region: &BTreeSet<VertexId>,
) -> Result<VerifyOutcome, SolveError> {
    let restriction = restriction_of(arena, strategy, region)?;
    match condition {
        ConditionSpec::MinParity | ConditionSpec::OrdinalParity { .. } => {
            verify_parity(arena, strategy.player, &restriction)
        }
        ConditionSpec::ExplicitMuller(_) | ConditionSpec::ZielonkaPath(_) => {
            verify_muller(arena, condition, strategy.player, &restriction)
        }
        other => Err(SolveError::Unsupported(format!(
            "verification against {other} is not supported"
        ))),
    }
}

fn verify_parity(
    arena: &Arena,
    player: Player,
    restriction: &Restriction,
) -> Result<VerifyOutcome, SolveError> {
    let n = restriction.verts.len();
    let bad_parities: BTreeSet<Priority> = restriction
        .verts
        .iter()
        .map(|&v| arena.priority(v))
        .filter(|p| Player::of_parity(*p) != player)
        .collect();
    for bad in bad_parities {
        // A cycle whose minimum is exactly `bad` lives in the subgraph of
        // priorities >= bad and passes through a bad-priority vertex.
        let allowed: Vec<bool> = restriction
            .verts
            .iter()
            .map(|&v| arena.priority(v) >= bad)
            .collect();
        let sub: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                if allowed[i] {
                    restriction.adj[i].iter().copied().filter(|&j| allowed[j]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        for component in strongly_connected_components(&sub) {
            let has_cycle = component.len() > 1
                || sub[component[0]].contains(&component[0]);
            if !has_cycle {
                continue;
            }
            if let Some(&pivot) = component
                .iter()
                .find(|&&i| arena.priority(restriction.verts[i]) == bad)
            {
                let mut in_comp = vec![false; n];
                for &i in &component {
                    in_comp[i] = true;
                }
                let cycle = cycle_through(&sub, &in_comp, pivot).expect("component has a cycle");
                let vertices: Vec<String> = cycle
                    .iter()
                    .map(|&i| arena.id(restriction.verts[i]).to_string())
                    .collect();
                let inf_set: BTreeSet<Priority> = cycle
                    .iter()
                    .map(|&i| arena.priority(restriction.verts[i]))
                    .collect();
                return Ok(VerifyOutcome {
                    pass: false,
                    witness: Some(Witness { vertices, inf_set, winner: player.opponent() }),
                });
            }
        }
    }
    Ok(VerifyOutcome { pass: true, witness: None })
}

pub(crate) fn strongly_connected_subset(adj: &[Vec<usize>], subset: &[usize]) -> bool {
    if subset.len() == 1 {
        return adj[subset[0]].contains(&subset[0]);
    }
    let in_subset = |v: usize| subset.binary_search(&v).is_ok();
    // Forward reachability from subset[0] within the subset.
    for forward in [true, false] {
        let mut seen: BTreeSet<usize> = BTreeSet::from([subset[0]]);
        let mut stack = vec![subset[0]];
        while let Some(v) = stack.pop() {
            for w in 0..adj.len() {
                let edge = if forward {
                    adj[v].contains(&w)
                } else {
                    adj[w].contains(&v)
                };
                if edge && in_subset(w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != subset.len() {
            return false;
        }
    }
    true
}

fn verify_muller(
    arena: &Arena,
    condition: &ConditionSpec,
    player: Player,
    restriction: &Restriction,
) -> Result<VerifyOutcome, SolveError> {
    let n = restriction.verts.len();
    if n > 14 {
        return Err(SolveError::TooLargeForMullerCheck(n));
    }
    for bits in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| bits & (1 << i) != 0).collect();
        if !strongly_connected_subset(&restriction.adj, &subset) {
            continue;
        }
        let inf_set: BTreeSet<Priority> = subset
            .iter()
            .map(|&i| arena.priority(restriction.verts[i]))
            .collect();
        let winner = member(condition, &inf_set)?;
        if winner != player {
            let vertices = subset
                .iter()
                .map(|&i| arena.id(restriction.verts[i]).to_string())
                .collect();
            return Ok(VerifyOutcome {
                pass: false,
                witness: Some(Witness { vertices, inf_set, winner }),
            });
        }
    }
    Ok(VerifyOutcome { pass: true, witness: None })
}

// ---------------------------------------------------------------------------
// Latest appearance records
// ---------------------------------------------------------------------------

/// Product of an arena with latest-appearance records over the priorities
/// that actually occur, labelled so that the min-parity winner of the
/// product is the Muller winner of the original game. Used as an oracle.
#[derive(Clone, Debug)]
pub struct LarProduct {
    pub product: Arena,
    /// Base vertex of each product vertex.
    pub project: Vec<VertexId>,
    /// Product vertex representing each base vertex entered with the
    /// initial record.
    pub entry: Vec<VertexId>,
    /// Initial memory state (the record before any vertex is entered).
    pub initial_record: String,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Record {
    /// Most recently seen priority first.
    perm: Vec<u32>,
    /// 1-based position from which the last priority was moved to the front.
    hit: usize,
}

impl Record {
    fn id(&self) -> String {
        let perm: Vec<String> = self.perm.iter().map(u32::to_string).collect();
        format!("{}#{}", perm.join("."), self.hit)
    }

    fn advance(&self, c: u32) -> Record {
        let pos = self.perm.iter().position(|&x| x == c).expect("priority in alphabet");
        let mut perm = self.perm.clone();
        perm.remove(pos);
        perm.insert(0, c);
        Record { perm, hit: pos + 1 }
    }
}

/// Builds the record product. The condition is first restricted to the
/// priorities occurring in the arena; at most 8 may occur.
pub fn lar_reduce(arena: &Arena, condition: &ExplicitMuller) -> Result<LarProduct, SolveError> {
    let occurring: BTreeSet<u32> = arena
        .priorities()
        .iter()
        .map(|p| {
            if p.is_natural() {
                Ok(p.offset)
            } else {
                Err(SolveError::Condition(ConditionError::OutOfAlphabet(BTreeSet::from([*p]))))
            }
        })
        .collect::<Result<_, _>>()?;
    let stray: BTreeSet<Priority> = occurring
        .iter()
        .filter(|p| !condition.alphabet_set().contains(p))
        .map(|&p| Priority::nat(p))
        .collect();
    if !stray.is_empty() {
        return Err(SolveError::Condition(ConditionError::OutOfAlphabet(stray)));
    }
    if occurring.len() > 8 {
        return Err(SolveError::AlphabetTooLarge(occurring.len()));
    }
    let restricted = condition.restricted(&occurring)?;
    let k = occurring.len();

    let initial = Record {
        perm: occurring.iter().copied().collect(),
        hit: k,
    };
    let product_priority = |r: &Record| -> Priority {
        let front: BTreeSet<u32> = r.perm[..r.hit].iter().copied().collect();
        let odd = restricted
            .winner_of_nat_set(&front)
            .expect("front within alphabet")
            == Player::One;
        Priority::nat(2 * (k as u32 - r.hit as u32) + u32::from(odd))
    };

    let compose = |v: VertexId, r: &Record| format!("{}@{}", arena.id(v), r.id());
    let mut discovered: BTreeSet<(VertexId, Record)> = BTreeSet::new();
    let mut queue: VecDeque<(VertexId, Record)> = VecDeque::new();
    let mut entries: Vec<(VertexId, Record)> = Vec::new();
    for v in arena.vertices() {
        let r = initial.advance(arena.priority(v).offset);
        entries.push((v, r.clone()));
        if discovered.insert((v, r.clone())) {
            queue.push_back((v, r));
        }
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    while let Some((v, r)) = queue.pop_front() {
        for &t in arena.successors(v) {
            let r2 = r.advance(arena.priority(t).offset);
            edges.push((compose(v, &r), compose(t, &r2)));
            if discovered.insert((t, r2.clone())) {
                queue.push_back((t, r2));
            }
        }
    }
    let vertices: Vec<(String, Player, Priority)> = discovered
        .iter()
        .map(|(v, r)| (compose(*v, r), arena.owner(*v), product_priority(r)))
        .collect();
    let product = Arena::build(vertices, edges)?;
    let mut project = vec![VertexId(0); product.len()];
    for (v, r) in &discovered {
        let pv = product.lookup(&compose(*v, r)).expect("product vertex");
        project[pv.0] = *v;
    }
    let entry: Vec<VertexId> = entries
        .iter()
        .map(|(v, r)| product.lookup(&compose(*v, r)).expect("entry vertex"))
        .collect();
    Ok(LarProduct {
        product,
        project,
        entry,
        initial_record: initial.id(),
    })
}

impl LarProduct {
    /// Converts a positional strategy on the product into a record-memory
    /// strategy on the base arena.
    pub fn memory_strategy(
        &self,
        arena: &Arena,
        product_strategy: &PositionalStrategy,
    ) -> MemoryStrategy {
        let player = product_strategy.player;
        let mut states: BTreeSet<String> = BTreeSet::from([self.initial_record.clone()]);
        for pv in self.product.vertices() {
            states.insert(record_part(self.product.id(pv)).to_string());
        }
        let mut memory =
            MemoryStrategy::new(player, states.iter().cloned().collect(), self.initial_record.clone());
        // The record transition depends only on (record, entered priority);
        // register it for every state and vertex.
        for state in &states {
            let rec = parse_record(state);
            for v in arena.vertices() {
                let next = rec.advance(arena.priority(v).offset);
                memory.set_update(state, arena.id(v), &next.id());
            }
        }
        for pv in self.product.vertices() {
            let base = self.project[pv.0];
            if arena.owner(base) != player {
                continue;
            }
            if let Some(target) = product_strategy.get(self.product.id(pv)) {
                let target_v = self.product.lookup(target).expect("strategy target");
                let base_target = self.project[target_v.0];
                memory.set_move(
                    arena.id(base),
                    record_part(self.product.id(pv)),
                    arena.id(base_target),
                );
            }
        }
        memory
    }
}

fn record_part(product_id: &str) -> &str {
    product_id.split_once('@').map(|(_, r)| r).unwrap_or(product_id)
}

fn parse_record(id: &str) -> Record {
    let (perm, hit) = id.rsplit_once('#').expect("record id");
    Record {
        perm: perm.split('.').map(|x| x.parse().expect("priority")).collect(),
        hit: hit.parse().expect("hit"),
    }
}

// ---------------------------------------------------------------------------
// Muller solving
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum MullerStrategies {
    Positional { strat0: PositionalStrategy, strat1: PositionalStrategy },
    Memory { strat0: MemoryStrategy, strat1: MemoryStrategy },
}

#[derive(Clone, Debug)]
pub struct MullerSolution {
    pub w0: BTreeSet<VertexId>,
    pub w1: BTreeSet<VertexId>,
    pub strategies: MullerStrategies,
    /// The reduction used, when the condition admitted one.
    pub reduction: Option<Reduction>,
}

/// Solves a Muller game. Conditions shaped as a Zielonka path are routed
/// through the parity reduction and yield positional strategies; other
/// explicit conditions fall back to the record oracle and yield
/// finite-memory strategies.
pub fn solve_muller(arena: &Arena, condition: &ConditionSpec) -> Result<MullerSolution, SolveError> {
    match reduce_to_parity(condition) {
        Ok(reduction) => {
            let relabeled = arena.relabel(|p| Priority::nat(reduction.apply(p.offset)));
            let parity = solve_parity_recursive(&relabeled);
            let (w0p, w1p, s0p, s1p) = (parity.w0, parity.w1, parity.strat0, parity.strat1);
            let (w0, w1, moves0, moves1) = if reduction.role_swapped {
                (w1p, w0p, s1p, s0p)
            } else {
                (w0p, w1p, s0p, s1p)
            };
            Ok(MullerSolution {
                w0,
                w1,
                strategies: MullerStrategies::Positional {
                    strat0: PositionalStrategy::from_moves(Player::Zero, moves0.moves().clone()),
                    strat1: PositionalStrategy::from_moves(Player::One, moves1.moves().clone()),
                },
                reduction: Some(reduction),
            })
        }
        Err(ZielonkaError::NotAPath(_)) | Err(ZielonkaError::UnsupportedInfinitePath) => {
            let ConditionSpec::ExplicitMuller(muller) = condition else {
                return Err(SolveError::Unsupported(format!(
                    "cannot solve {condition} without an explicit alphabet"
                )));
            };
            let lar = lar_reduce(arena, muller)?;
            let (parity, _) = solve_parity_spm(&lar.product);
            let w0: BTreeSet<VertexId> = arena
                .vertices()
                .filter(|v| parity.w0.contains(&lar.entry[v.0]))
                .collect();
            let w1: BTreeSet<VertexId> = arena
                .vertices()
                .filter(|v| parity.w1.contains(&lar.entry[v.0]))
                .collect();
            let strat0 = lar.memory_strategy(arena, &parity.strat0);
            let strat1 = lar.memory_strategy(arena, &parity.strat1);
            Ok(MullerSolution {
                w0,
                w1,
                strategies: MullerStrategies::Memory { strat0, strat1 },
                reduction: None,
            })
        }
        Err(other) => Err(other.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player;

    fn nat_arena(
        vertices: &[(&str, Player, u32)],
        edges: &[(&str, &str)],
    ) -> Arena {
        Arena::build(
            vertices
                .iter()
                .map(|&(id, o, p)| (id.to_string(), o, Priority::nat(p)))
                .collect(),
            edges.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn attractor_of_everything_and_nothing() {
        let arena = nat_arena(
            &[("a", Player::Zero, 0), ("b", Player::One, 1)],
            &[("a", "b"), ("b", "a")],
        );
        let all: BTreeSet<VertexId> = arena.vertices().collect();
        let (attr, _) = attractor(&arena, Player::Zero, &all);
        assert_eq!(attr, all);
        let (empty, _) = attractor(&arena, Player::Zero, &BTreeSet::new());
        assert!(empty.is_empty());
    }

    #[test]
    fn attractor_walks_owned_chain() {
        let arena = nat_arena(
            &[
                ("a", Player::Zero, 0),
                ("b", Player::Zero, 0),
                ("c", Player::Zero, 0),
            ],
            &[("a", "b"), ("b", "c"), ("c", "c")],
        );
        let target = BTreeSet::from([arena.lookup("c").unwrap()]);
        let (attr, strat) = attractor(&arena, Player::Zero, &target);
        assert_eq!(attr.len(), 3);
        assert_eq!(strat.get("a"), Some("b"));
        assert_eq!(strat.get("b"), Some("c"));
    }

    #[test]
    fn single_even_self_loop_is_won_by_zero() {
        let arena = nat_arena(&[("v", Player::Zero, 0)], &[("v", "v")]);
        let r = solve_parity_recursive(&arena);
        assert_eq!(r.w0.len(), 1);
        assert!(r.w1.is_empty());
        let (s, _) = solve_parity_spm(&arena);
        assert_eq!(s.w0.len(), 1);
    }

    #[test]
    fn single_odd_self_loop_is_won_by_one() {
        let arena = nat_arena(&[("v", Player::Zero, 1)], &[("v", "v")]);
        let r = solve_parity_recursive(&arena);
        assert!(r.w0.is_empty());
        assert_eq!(r.w1.len(), 1);
        let (s, measure) = solve_parity_spm(&arena);
        assert_eq!(s.w1.len(), 1);
        assert!(measure.rows[0].is_none(), "measure lifts to top");
    }

    #[test]
    fn verify_rejects_strategy_entering_odd_loop() {
        let arena = nat_arena(
            &[("a", Player::Zero, 0), ("bad", Player::Zero, 1), ("ok", Player::Zero, 2)],
            &[("a", "bad"), ("a", "ok"), ("bad", "bad"), ("ok", "a")],
        );
        let mut s = PositionalStrategy::new(Player::Zero);
        s.set("a", "bad");
        s.set("bad", "bad");
        s.set("ok", "a");
        let region: BTreeSet<VertexId> = arena.vertices().collect();
        let out = verify_positional(&arena, &ConditionSpec::MinParity, &s, &region).unwrap();
        assert!(!out.pass);
        let w = out.witness.unwrap();
        assert_eq!(w.inf_set, BTreeSet::from([Priority::nat(1)]));
    }

    #[test]
    fn verify_accepts_solver_output() {
        let arena = nat_arena(
            &[
                ("a", Player::Zero, 2),
                ("b", Player::One, 1),
                ("c", Player::Zero, 0),
                ("d", Player::One, 3),
            ],
            &[("a", "b"), ("b", "c"), ("b", "d"), ("c", "a"), ("d", "a"), ("a", "c")],
        );
        let r = solve_parity_recursive(&arena);
        if !r.w0.is_empty() {
            let out = verify_positional(&arena, &ConditionSpec::MinParity, &r.strat0, &r.w0).unwrap();
            assert!(out.pass);
        }
        if !r.w1.is_empty() {
            let out = verify_positional(&arena, &ConditionSpec::MinParity, &r.strat1, &r.w1).unwrap();
            assert!(out.pass);
        }
    }

    #[test]
    fn lar_reduction_trivial_alphabet() {
        let arena = nat_arena(&[("v", Player::Zero, 0)], &[("v", "v")]);
        let condition = ExplicitMuller::new(BTreeSet::from([0]), vec![BTreeSet::from([0])]).unwrap();
        let lar = lar_reduce(&arena, &condition).unwrap();
        assert_eq!(lar.product.len(), 1, "one record over a single priority");
        let (solved, _) = solve_parity_spm(&lar.product);
        assert_eq!(solved.w0.len(), 1);
    }

    #[test]
    fn muller_solver_falls_back_to_memory_route() {
        // F0 = {{0,1}}: a weak split, not a path; Player 0 needs memory.
        let arena = nat_arena(
            &[("z", Player::Zero, 0), ("o", Player::One, 1)],
            &[("z", "o"), ("o", "z"), ("z", "z"), ("o", "o")],
        );
        let condition = ConditionSpec::ExplicitMuller(
            ExplicitMuller::new(
                BTreeSet::from([0, 1]),
                vec![BTreeSet::from([0, 1])],
            )
            .unwrap(),
        );
        let solution = solve_muller(&arena, &condition).unwrap();
        assert!(matches!(solution.strategies, MullerStrategies::Memory { .. }));
        assert!(solution.reduction.is_none());
    }
}
