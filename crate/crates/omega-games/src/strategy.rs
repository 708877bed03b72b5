//! Strategies and the finite machinery built on them: the product of an
//! arena with a memory strategy (a finite quotient of the tree of consistent
//! plays) and ultimately periodic plays induced by a pair of strategies.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::arena::{Arena, ArenaError, Player, Priority, VertexId};

/// A strategy whose moves depend only on the current vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionalStrategy {
    pub player: Player,
    moves: BTreeMap<String, String>,
}

impl PositionalStrategy {
    pub fn new(player: Player) -> Self {
        PositionalStrategy { player, moves: BTreeMap::new() }
    }

    pub fn from_moves(player: Player, moves: BTreeMap<String, String>) -> Self {
        PositionalStrategy { player, moves }
    }

    pub fn set(&mut self, from: &str, to: &str) {
        self.moves.insert(from.to_string(), to.to_string());
    }

    pub fn get(&self, from: &str) -> Option<&str> {
        self.moves.get(from).map(String::as_str)
    }

    pub fn moves(&self) -> &BTreeMap<String, String> {
        &self.moves
    }

    pub fn move_at(&self, arena: &Arena, v: VertexId) -> Result<VertexId, ArenaError> {
        let to = self.moves.get(arena.id(v)).ok_or_else(|| ArenaError::StrategyIncomplete {
            vertex: arena.id(v).to_string(),
            memory: "-".to_string(),
        })?;
        arena.lookup(to).ok_or_else(|| ArenaError::StrategyIncomplete {
            vertex: arena.id(v).to_string(),
            memory: "-".to_string(),
        })
    }
}

/// A finite-memory strategy `(M, m0, update, next_move)`.
///
/// The memory is updated on every vertex the play enters, including the
/// first: after `v0 … vk` the state is `U(…U(U(m0, v0), v1)…, vk)`, and the
/// move taken at `vk` is `next_move(vk, that state)`.
#[derive(Clone, Debug)]
pub struct MemoryStrategy {
    pub player: Player,
    pub states: Vec<String>,
    pub initial: String,
    update: HashMap<(String, String), String>,
    moves: HashMap<(String, String), String>,
}

impl MemoryStrategy {
    pub fn new(player: Player, states: Vec<String>, initial: String) -> Self {
        MemoryStrategy {
            player,
            states,
            initial,
            update: HashMap::new(),
            moves: HashMap::new(),
        }
    }

    /// Registers `U(state, vertex) = next_state`.
    pub fn set_update(&mut self, state: &str, vertex: &str, next_state: &str) {
        self.update
            .insert((state.to_string(), vertex.to_string()), next_state.to_string());
    }

    /// Registers `next_move(vertex, state) = target`.
    pub fn set_move(&mut self, vertex: &str, state: &str, target: &str) {
        self.moves
            .insert((vertex.to_string(), state.to_string()), target.to_string());
    }

    pub fn updates(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.update
            .iter()
            .map(|((m, v), m2)| (m.as_str(), v.as_str(), m2.as_str()))
    }

    pub fn moves(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.moves
            .iter()
            .map(|((v, m), w)| (v.as_str(), m.as_str(), w.as_str()))
    }

    pub fn update_of(&self, state: &str, vertex: &str) -> Option<&str> {
        self.update
            .get(&(state.to_string(), vertex.to_string()))
            .map(String::as_str)
    }

    pub fn move_of(&self, vertex: &str, state: &str) -> Option<&str> {
        self.moves
            .get(&(vertex.to_string(), state.to_string()))
            .map(String::as_str)
    }

    /// Wraps a positional strategy as a one-state machine.
    pub fn from_positional(arena: &Arena, s: &PositionalStrategy) -> Self {
        let mut m = MemoryStrategy::new(s.player, vec!["m0".to_string()], "m0".to_string());
        for v in arena.vertices() {
            m.set_update("m0", arena.id(v), "m0");
        }
        for (from, to) in s.moves() {
            m.set_move(from, "m0", to);
        }
        m
    }
}

/// Either kind of strategy, for simulation entry points.
#[derive(Clone, Debug)]
pub enum Strategy {
    Positional(PositionalStrategy),
    Memory(MemoryStrategy),
}

impl Strategy {
    pub fn player(&self) -> Player {
        match self {
            Strategy::Positional(s) => s.player,
            Strategy::Memory(s) => s.player,
        }
    }
}

/// The product of an arena with a memory strategy: the finite quotient of
/// the forest of plays consistent with the strategy.
///
/// Product vertices are the pairs `(v, m)` reachable from the seeds; at
/// vertices owned by the strategy's player only the prescribed edge
/// survives, while opponent vertices keep their full out-degree. The product
/// is itself an [`Arena`] (ids `base@state`), so every graph algorithm in
/// the crate applies to it directly.
#[derive(Clone, Debug)]
pub struct StrategyProduct {
    pub arena: Arena,
    /// Canonical homomorphism: product vertex to base vertex.
    pub project: Vec<VertexId>,
    /// Occurrences of each base vertex among the product vertices.
    pub occurrences: BTreeMap<VertexId, Vec<VertexId>>,
    /// Product vertices corresponding to the seed positions.
    pub seeds: Vec<VertexId>,
}

pub fn product_with_memory(
    arena: &Arena,
    strategy: &MemoryStrategy,
    seeds: &BTreeSet<VertexId>,
) -> Result<StrategyProduct, ArenaError> {
    let missing = |v: VertexId, m: &str| ArenaError::StrategyIncomplete {
        vertex: arena.id(v).to_string(),
        memory: m.to_string(),
    };
    // Explore reachable (vertex, state) pairs.
    let mut discovered: BTreeSet<(VertexId, String)> = BTreeSet::new();
    let mut queue: VecDeque<(VertexId, String)> = VecDeque::new();
    for &v in seeds {
        let m = strategy
            .update_of(&strategy.initial, arena.id(v))
            .ok_or_else(|| missing(v, &strategy.initial))?
            .to_string();
        if discovered.insert((v, m.clone())) {
            queue.push_back((v, m));
        }
    }
    let mut product_edges: Vec<((VertexId, String), (VertexId, String))> = Vec::new();
    while let Some((v, m)) = queue.pop_front() {
        let targets: Vec<VertexId> = if arena.owner(v) == strategy.player {
            let t = strategy.move_of(arena.id(v), &m).ok_or_else(|| missing(v, &m))?;
            let ti = arena.lookup(t).ok_or_else(|| missing(v, &m))?;
            if !arena.successors(v).contains(&ti) {
                return Err(missing(v, &m));
            }
            vec![ti]
        } else {
            arena.successors(v).to_vec()
        };
        for t in targets {
            let m2 = strategy.update_of(&m, arena.id(t)).ok_or_else(|| missing(t, &m))?.to_string();
            product_edges.push(((v, m.clone()), (t, m2.clone())));
            if discovered.insert((t, m2.clone())) {
                queue.push_back((t, m2));
            }
        }
    }
    let compose = |v: VertexId, m: &str| format!("{}@{}", arena.id(v), m);
    let vertices: Vec<(String, Player, Priority)> = discovered
        .iter()
        .map(|(v, m)| (compose(*v, m), arena.owner(*v), arena.priority(*v)))
        .collect();
    let edges: Vec<(String, String)> = product_edges
        .iter()
        .map(|((v, m), (t, m2))| (compose(*v, m), compose(*t, m2)))
        .collect();
    let product = Arena::build(vertices, edges)?;
    let mut project = vec![VertexId(0); product.len()];
    let mut occurrences: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (v, m) in &discovered {
        let pv = product.lookup(&compose(*v, m)).expect("product vertex exists");
        project[pv.0] = *v;
        occurrences.entry(*v).or_default().push(pv);
    }
    let mut seeds_prod = Vec::new();
    for &v in seeds {
        let m = strategy.update_of(&strategy.initial, arena.id(v)).expect("checked above");
        seeds_prod.push(product.lookup(&compose(v, m)).expect("seed in product"));
    }
    Ok(StrategyProduct {
        arena: product,
        project,
        occurrences,
        seeds: seeds_prod,
    })
}

/// An ultimately periodic play: a finite prefix followed by a non-empty loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<VertexId>,
    pub cycle: Vec<VertexId>,
}

impl Lasso {
    /// The priorities occurring on the loop, i.e. the inf-set of the play.
    pub fn inf_set(&self, arena: &Arena) -> BTreeSet<Priority> {
        self.cycle.iter().map(|&v| arena.priority(v)).collect()
    }

    /// Checks that consecutive vertices, the wrap-around, and the junction
    /// are all edges of the arena.
    pub fn is_valid(&self, arena: &Arena) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let has_edge = |u: VertexId, v: VertexId| arena.successors(u).contains(&v);
        for w in self.prefix.windows(2) {
            if !has_edge(w[0], w[1]) {
                return false;
            }
        }
        if let (Some(&last), Some(&first)) = (self.prefix.last(), self.cycle.first()) {
            if !has_edge(last, first) {
                return false;
            }
        }
        for w in self.cycle.windows(2) {
            if !has_edge(w[0], w[1]) {
                return false;
            }
        }
        has_edge(*self.cycle.last().unwrap(), self.cycle[0])
    }

    pub fn rotated(&self, by: usize) -> Lasso {
        let mut cycle = self.cycle.clone();
        let shift = by % cycle.len();
        cycle.rotate_left(shift);
        let mut prefix = self.prefix.clone();
        prefix.extend(self.cycle.iter().take(by % self.cycle.len()).copied());
        Lasso { prefix, cycle }
    }

    pub fn unrolled(&self) -> Lasso {
        let mut cycle = self.cycle.clone();
        cycle.extend(self.cycle.iter().copied());
        Lasso { prefix: self.prefix.clone(), cycle }
    }

    pub fn display(&self, arena: &Arena) -> String {
        let fmt = |vs: &[VertexId]| {
            vs.iter().map(|&v| arena.id(v).to_string()).collect::<Vec<_>>().join(" ")
        };
        format!("[{}]({})*", fmt(&self.prefix), fmt(&self.cycle))
    }
}

struct Simulation<'a> {
    arena: &'a Arena,
    strategy: &'a Strategy,
    state: Option<String>,
}

impl<'a> Simulation<'a> {
    fn new(arena: &'a Arena, strategy: &'a Strategy) -> Self {
        let state = match strategy {
            Strategy::Positional(_) => None,
            Strategy::Memory(m) => Some(m.initial.clone()),
        };
        Simulation { arena, strategy, state }
    }

    fn enter(&mut self, v: VertexId) -> Result<(), ArenaError> {
        if let (Strategy::Memory(m), Some(state)) = (self.strategy, &mut self.state) {
            let next = m
                .update_of(state, self.arena.id(v))
                .ok_or_else(|| ArenaError::StrategyIncomplete {
                    vertex: self.arena.id(v).to_string(),
                    memory: state.clone(),
                })?;
            *state = next.to_string();
        }
        Ok(())
    }

    fn choose(&self, v: VertexId) -> Result<VertexId, ArenaError> {
        match (self.strategy, &self.state) {
            (Strategy::Positional(s), _) => s.move_at(self.arena, v),
            (Strategy::Memory(m), Some(state)) => {
                let t = m.move_of(self.arena.id(v), state).ok_or_else(|| {
                    ArenaError::StrategyIncomplete {
                        vertex: self.arena.id(v).to_string(),
                        memory: state.clone(),
                    }
                })?;
                self.arena.lookup(t).ok_or_else(|| ArenaError::StrategyIncomplete {
                    vertex: self.arena.id(v).to_string(),
                    memory: state.clone(),
                })
            }
            (Strategy::Memory(_), None) => unreachable!("memory simulation always has a state"),
        }
    }

    fn key(&self) -> String {
        self.state.clone().unwrap_or_default()
    }
}

/// Runs both strategies against each other from `start` and returns the
/// unique induced play, with the loop cut at the first repeated
/// (vertex, memory, memory) triple. Deterministic in all inputs.
pub fn induced_lasso(
    arena: &Arena,
    for_zero: &Strategy,
    for_one: &Strategy,
    start: VertexId,
) -> Result<Lasso, ArenaError> {
    let mut sim0 = Simulation::new(arena, for_zero);
    let mut sim1 = Simulation::new(arena, for_one);
    let mut seen: HashMap<(VertexId, String, String), usize> = HashMap::new();
    let mut path: Vec<VertexId> = Vec::new();
    let mut v = start;
    loop {
        sim0.enter(v)?;
        sim1.enter(v)?;
        let key = (v, sim0.key(), sim1.key());
        if let Some(&at) = seen.get(&key) {
            let cycle = path[at..].to_vec();
            let prefix = path[..at].to_vec();
            return Ok(Lasso { prefix, cycle });
        }
        seen.insert(key, path.len());
        path.push(v);
        let chooser = if arena.owner(v) == Player::Zero { &sim0 } else { &sim1 };
        let next = chooser.choose(v)?;
        if !arena.successors(v).contains(&next) {
            return Err(ArenaError::StrategyIncomplete {
                vertex: arena.id(v).to_string(),
                memory: chooser.key(),
            });
        }
        v = next;
    }
}
