//! Game arenas: directed graphs whose vertices are owned by one of two
//! players and labelled with ordinal priorities.
//!
//! An arena is the board on which an infinite play unfolds. Vertices of the
//! bundled counterexample families are produced through [`GeneratedArena`],
//! which expands a parameterised infinite family to a finite window.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A priority `ω·limit + offset`.
///
/// Games over plain `ω` use `limit == 0` everywhere. The ordinal variants of
/// the counterexample families additionally use `ω` itself (`limit == 1`,
/// `offset == 0`) and its successors.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Priority {
    /// Coefficient of `ω`.
    #[serde(default)]
    pub limit: u32,
    /// Finite offset above the limit part; the parity of a priority is the
    /// parity of this offset.
    pub offset: u32,
}

impl Priority {
    pub const fn nat(n: u32) -> Self {
        Priority { limit: 0, offset: n }
    }

    pub const fn omega() -> Self {
        Priority { limit: 1, offset: 0 }
    }

    pub const fn is_natural(self) -> bool {
        self.limit == 0
    }

    pub const fn is_even(self) -> bool {
        self.offset % 2 == 0
    }

    pub const fn is_odd(self) -> bool {
        self.offset % 2 == 1
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.limit, self.offset) {
            (0, n) => write!(f, "{n}"),
            (1, 0) => write!(f, "w"),
            (1, n) => write!(f, "w+{n}"),
            (k, 0) => write!(f, "w*{k}"),
            (k, n) => write!(f, "w*{k}+{n}"),
        }
    }
}

impl fmt::Debug for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One of the two players. Player 0 is the "even" player throughout.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Player {
    Zero,
    One,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Zero => Player::One,
            Player::One => Player::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Zero => 0,
            Player::One => 1,
        }
    }

    pub fn from_index(i: u64) -> Option<Player> {
        match i {
            0 => Some(Player::Zero),
            1 => Some(Player::One),
            _ => None,
        }
    }

    /// The player who wins when `p` is the least priority seen infinitely
    /// often under the min-parity rule.
    pub fn of_parity(p: Priority) -> Player {
        if p.is_even() {
            Player::Zero
        } else {
            Player::One
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl Serialize for Player {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.index() as u64)
    }
}

impl<'de> Deserialize<'de> for Player {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = u64::deserialize(d)?;
        Player::from_index(raw).ok_or_else(|| D::Error::custom(format!("owner must be 0 or 1, got {raw}")))
    }
}

/// Index of a vertex inside a particular [`Arena`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub usize);

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("vertex {0} has no successor")]
    NoSuccessor(String),
    #[error("edge ({0}, {1}) references an undeclared vertex")]
    DanglingEdge(String, String),
    #[error("duplicate vertex id {0}")]
    DuplicateId(String),
    #[error("unknown generated family {0}")]
    UnknownFamily(String),
    #[error("bad family parameters: {0}")]
    BadParams(String),
    #[error("strategy undefined at vertex {vertex} in memory state {memory}")]
    StrategyIncomplete { vertex: String, memory: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexInfo {
    pub id: String,
    pub owner: Player,
    pub priority: Priority,
}

/// A finite game arena. Immutable once built; building validates that every
/// vertex has at least one successor and that edges reference declared ids.
///
/// Vertices are stored sorted by id, so vertex indices follow the
/// lexicographic order on ids. All deterministic tie-breaking in the crate
/// relies on that order.
#[derive(Clone, Debug)]
pub struct Arena {
    verts: Vec<VertexInfo>,
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
    index: HashMap<String, VertexId>,
}

impl Arena {
    /// Validates a raw description and builds the arena. Parallel edges are
    /// collapsed; self-loops are allowed.
    pub fn build(
        vertices: Vec<(String, Player, Priority)>,
        edges: Vec<(String, String)>,
    ) -> Result<Arena, ArenaError> {
        let mut verts: Vec<VertexInfo> = vertices
            .into_iter()
            .map(|(id, owner, priority)| VertexInfo { id, owner, priority })
            .collect();
        verts.sort_by(|a, b| a.id.cmp(&b.id));
        for w in verts.windows(2) {
            if w[0].id == w[1].id {
                return Err(ArenaError::DuplicateId(w[0].id.clone()));
            }
        }
        let mut index = HashMap::with_capacity(verts.len());
        for (i, v) in verts.iter().enumerate() {
            index.insert(v.id.clone(), VertexId(i));
        }
        let mut succ_sets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); verts.len()];
        for (u, v) in &edges {
            let ui = *index
                .get(u)
                .ok_or_else(|| ArenaError::DanglingEdge(u.clone(), v.clone()))?;
            let vi = *index
                .get(v)
                .ok_or_else(|| ArenaError::DanglingEdge(u.clone(), v.clone()))?;
            succ_sets[ui.0].insert(vi);
        }
        let mut pred: Vec<Vec<VertexId>> = vec![Vec::new(); verts.len()];
        let mut succ: Vec<Vec<VertexId>> = Vec::with_capacity(verts.len());
        for (i, set) in succ_sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(ArenaError::NoSuccessor(verts[i].id.clone()));
            }
            for &t in &set {
                pred[t.0].push(VertexId(i));
            }
            succ.push(set.into_iter().collect());
        }
        Ok(Arena { verts, succ, pred, index })
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.verts.len()).map(VertexId)
    }

    pub fn info(&self, v: VertexId) -> &VertexInfo {
        &self.verts[v.0]
    }

    pub fn id(&self, v: VertexId) -> &str {
        &self.verts[v.0].id
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.verts[v.0].owner
    }

    pub fn priority(&self, v: VertexId) -> Priority {
        self.verts[v.0].priority
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v.0]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v.0]
    }

    pub fn lookup(&self, id: &str) -> Option<VertexId> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |v| self.successors(v).iter().map(move |&t| (v, t)))
    }

    /// Distinct priorities occurring in the arena, ascending.
    pub fn priorities(&self) -> Vec<Priority> {
        let set: BTreeSet<Priority> = self.verts.iter().map(|v| v.priority).collect();
        set.into_iter().collect()
    }

    /// Relabels every priority through `f`, keeping ids and ownership.
    pub fn relabel(&self, f: impl Fn(Priority) -> Priority) -> Arena {
        let mut out = self.clone();
        for v in &mut out.verts {
            v.priority = f(v.priority);
        }
        out
    }

    /// Maps non-natural priorities to fresh naturals above everything else,
    /// preserving order and parity. Sound for min-parity winners on finite
    /// arenas, where only finitely many priorities occur.
    pub fn naturalized(&self) -> Arena {
        let ordinals: BTreeSet<Priority> = self
            .verts
            .iter()
            .map(|v| v.priority)
            .filter(|p| !p.is_natural())
            .collect();
        if ordinals.is_empty() {
            return self.clone();
        }
        let max_nat = self
            .verts
            .iter()
            .map(|v| v.priority)
            .filter(|p| p.is_natural())
            .map(|p| p.offset)
            .max()
            .unwrap_or(0);
        let mut table: BTreeMap<Priority, Priority> = BTreeMap::new();
        let mut next = max_nat + 2;
        for p in ordinals {
            if next % 2 != p.offset % 2 {
                next += 1;
            }
            table.insert(p, Priority::nat(next));
            next += 2;
        }
        self.relabel(|p| table.get(&p).copied().unwrap_or(p))
    }
}

/// Which infinite family a [`GeneratedArena`] expands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// A centre vertex of Player 0 connected back and forth to petals of
    /// ascending odd priorities.
    Flower { variant: FlowerVariant },
    /// The descending-chain game: the protagonist repeatedly offers the
    /// opponent a choice set, then sweeps a fixed finite set.
    ChainGame {
        descriptor: ChainDescriptor,
        finite_appearance: bool,
    },
    /// The two-oval loop in which both players alternately pick elements of
    /// a fixed set `Y` with a designated anchor element.
    SplitGame {
        y: BTreeSet<u32>,
        anchor: u32,
        sigma: Player,
    },
    /// The degree-two solitaire ladder with rails of priorities 1 and 2 and
    /// branch cells of ascending odd priorities.
    Ladder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowerVariant {
    /// Centre priority 0, evaluated under the max-parity condition.
    MaxParity,
    /// Centre priority `ω`, evaluated under min-parity over ordinals.
    OmegaCenter,
}

/// Parameters of the chain game. The choice sets are `Y ∪ {n : n > i}` for
/// `i = 1, 2, …`; `sigma` is the player making the offers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDescriptor {
    pub y: BTreeSet<u32>,
    pub sigma: Player,
}

impl ChainDescriptor {
    /// The max-parity instantiation with `Y = {1}`, offered by Player 1.
    pub fn max_parity() -> Self {
        ChainDescriptor {
            y: BTreeSet::from([1]),
            sigma: Player::One,
        }
    }

    pub fn anchor(&self) -> Option<u32> {
        self.y.iter().next().copied()
    }
}

/// A finite window onto one of the paper-scale infinite arenas.
///
/// `truncation` bounds the explored index range; expanding with a larger
/// truncation yields an induced supergraph of the smaller expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedArena {
    pub family: Family,
    pub truncation: u32,
}

impl GeneratedArena {
    pub fn expand(&self) -> Result<Arena, ArenaError> {
        if self.truncation == 0 {
            return Err(ArenaError::BadParams("truncation must be at least 1".into()));
        }
        let n = self.truncation;
        match &self.family {
            Family::Flower { variant } => expand_flower(n, *variant),
            Family::ChainGame { descriptor, finite_appearance } => {
                if *finite_appearance {
                    expand_chain_finite_appearance(n, descriptor)
                } else {
                    expand_chain(n, descriptor)
                }
            }
            Family::SplitGame { y, anchor, sigma } => expand_split(y, *anchor, *sigma),
            Family::Ladder => expand_ladder(n),
        }
    }
}

fn expand_flower(n: u32, variant: FlowerVariant) -> Result<Arena, ArenaError> {
    let center_priority = match variant {
        FlowerVariant::MaxParity => Priority::nat(0),
        FlowerVariant::OmegaCenter => Priority::omega(),
    };
    let mut vertices = vec![("c".to_string(), Player::Zero, center_priority)];
    let mut edges = Vec::new();
    for k in 1..=n {
        let id = format!("p{k:03}");
        vertices.push((id.clone(), Player::One, Priority::nat(2 * k - 1)));
        edges.push(("c".to_string(), id.clone()));
        edges.push((id, "c".to_string()));
    }
    Arena::build(vertices, edges)
}

/// The `i`-th choice set truncated to `Y` plus the first `n` tail elements.
fn chain_window(y: &BTreeSet<u32>, i: u32, n: u32) -> BTreeSet<u32> {
    let mut window = y.clone();
    let mut candidate = i + 1;
    let mut taken = 0;
    while taken < n {
        if !y.contains(&candidate) {
            window.insert(candidate);
            taken += 1;
        }
        candidate += 1;
    }
    window
}

fn expand_chain(n: u32, d: &ChainDescriptor) -> Result<Arena, ArenaError> {
    let anchor = d
        .anchor()
        .ok_or_else(|| ArenaError::BadParams("chain descriptor needs a non-empty Y".into()))?;
    let sigma = d.sigma;
    let a = Priority::nat(anchor);
    let mut vertices = vec![
        ("c".to_string(), sigma, a),
        ("f".to_string(), sigma, a),
    ];
    let mut edges = Vec::new();
    for i in 1..=n {
        let gate = format!("g{i:03}");
        vertices.push((gate.clone(), sigma.opponent(), a));
        edges.push(("c".to_string(), gate.clone()));
        for v in chain_window(&d.y, i, n) {
            let elem = format!("x{i:03}_{v:04}");
            vertices.push((elem.clone(), sigma.opponent(), Priority::nat(v)));
            edges.push((gate.clone(), elem.clone()));
            edges.push((elem, "f".to_string()));
        }
    }
    for &v in &d.y {
        let id = format!("y{v:04}");
        vertices.push((id.clone(), sigma.opponent(), Priority::nat(v)));
        edges.push(("f".to_string(), id.clone()));
        edges.push((id, "c".to_string()));
    }
    Arena::build(vertices, edges)
}

/// Finite-appearance variant: every priority labels at most one vertex.
///
/// Requires a singleton `Y = {a}`. The entry vertex carries `a` itself, the
/// return vertex carries 0, and the gate for the `i`-th choice set carries
/// the even priority `4(i+1)`: an element of that very set, so a gate
/// revisited forever only hands the opponent an element it could have
/// forced anyway. Choice windows skip the multiples of four reserved for
/// gates, keeping labels truncation-independent.
fn expand_chain_finite_appearance(n: u32, d: &ChainDescriptor) -> Result<Arena, ArenaError> {
    let anchor = d
        .anchor()
        .ok_or_else(|| ArenaError::BadParams("chain descriptor needs a non-empty Y".into()))?;
    if d.y.len() != 1 {
        return Err(ArenaError::BadParams(
            "finite-appearance chain game requires a singleton Y".into(),
        ));
    }
    if anchor == 0 || anchor % 4 == 0 {
        return Err(ArenaError::BadParams(
            "finite-appearance chain game reserves 0 and the multiples of four".into(),
        ));
    }
    let sigma = d.sigma;
    let window = |i: u32| -> BTreeSet<u32> {
        let mut out = d.y.clone();
        let mut candidate = i + 1;
        let mut taken = 0;
        while taken < n {
            if !d.y.contains(&candidate) && candidate % 4 != 0 {
                out.insert(candidate);
                taken += 1;
            }
            candidate += 1;
        }
        out
    };
    let mut windows: Vec<BTreeSet<u32>> = Vec::new();
    let mut all_elements: BTreeSet<u32> = BTreeSet::new();
    for i in 1..=n {
        let w = window(i);
        all_elements.extend(w.iter().copied());
        windows.push(w);
    }
    let mut vertices = vec![
        ("c".to_string(), sigma, Priority::nat(anchor)),
        ("f".to_string(), sigma, Priority::nat(0)),
    ];
    let mut edges = vec![("f".to_string(), "c".to_string())];
    for v in &all_elements {
        if *v == anchor {
            continue;
        }
        let id = format!("e{v:04}");
        vertices.push((id.clone(), sigma.opponent(), Priority::nat(*v)));
        edges.push((id, "f".to_string()));
    }
    for (idx, w) in windows.iter().enumerate() {
        let i = idx as u32 + 1;
        let gate = format!("g{i:03}");
        vertices.push((gate.clone(), sigma.opponent(), Priority::nat(4 * (i + 1))));
        edges.push(("c".to_string(), gate.clone()));
        for v in w {
            if *v == anchor {
                edges.push((gate.clone(), "f".to_string()));
            } else {
                edges.push((gate.clone(), format!("e{v:04}")));
            }
        }
    }
    Arena::build(vertices, edges)
}

fn expand_split(y: &BTreeSet<u32>, anchor: u32, sigma: Player) -> Result<Arena, ArenaError> {
    if !y.contains(&anchor) {
        return Err(ArenaError::BadParams(format!(
            "split game anchor {anchor} must be an element of Y"
        )));
    }
    let a = Priority::nat(anchor);
    let mut vertices = vec![
        ("top".to_string(), sigma, a),
        ("mid".to_string(), sigma.opponent(), a),
    ];
    let mut edges = Vec::new();
    for &v in y {
        let up = format!("u{v:04}");
        let down = format!("w{v:04}");
        vertices.push((up.clone(), sigma.opponent(), Priority::nat(v)));
        vertices.push((down.clone(), sigma.opponent(), Priority::nat(v)));
        edges.push(("top".to_string(), up.clone()));
        edges.push((up, "mid".to_string()));
        edges.push(("mid".to_string(), down.clone()));
        edges.push((down, "top".to_string()));
    }
    Arena::build(vertices, edges)
}

fn expand_ladder(n: u32) -> Result<Arena, ArenaError> {
    let mut vertices = vec![("a".to_string(), Player::Zero, Priority::nat(2))];
    let mut edges = vec![("a".to_string(), "t001".to_string())];
    for j in 1..=n {
        let top = format!("t{j:03}");
        let branch = format!("b{j:03}");
        let bottom = format!("d{j:03}");
        vertices.push((top.clone(), Player::Zero, Priority::nat(1)));
        vertices.push((branch.clone(), Player::Zero, Priority::nat(2 * j + 1)));
        vertices.push((bottom.clone(), Player::Zero, Priority::nat(2)));
        edges.push((top.clone(), branch.clone()));
        edges.push((branch, bottom.clone()));
        if j < n {
            edges.push((top, format!("t{:03}", j + 1)));
        }
        if j > 1 {
            edges.push((bottom, format!("d{:03}", j - 1)));
        } else {
            edges.push((bottom, "a".to_string()));
        }
    }
    Arena::build(vertices, edges)
}
