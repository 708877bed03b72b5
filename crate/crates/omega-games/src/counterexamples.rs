//! Generators for the gadget arenas on which finite memory fails, plus the
//! harnesses that refute bounded-memory strategies at desk scale and check
//! the certified schedules realizing the infinite-memory wins.
//!
//! Every refutation is a statement about the generated truncation and the
//! stated memory bound; the full infinite-arena claims are theorems, not
//! empirical results, and each report says so.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::arena::{
    Arena, ArenaError, ChainDescriptor, Family, FlowerVariant, GeneratedArena, Player, Priority,
    VertexId,
};
use crate::conditions::{
    member, winner_of_lasso, winner_of_scheduled, CertificateReport, ConditionError, ConditionSpec,
    ExplicitMuller, OccurrenceBound, ScheduledPlay, SetDescriptor,
};
use crate::random::random_machine;
use crate::solvers::{cycle_through, strongly_connected_components, strongly_connected_subset, SolveError};
use crate::strategy::{induced_lasso, product_with_memory, Lasso, MemoryStrategy, PositionalStrategy, Strategy};

#[derive(Error, Debug)]
pub enum DemoError {
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("budget {budget} exceeded: {what}")]
    BudgetExceeded { budget: u64, what: String },
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// The one-centre many-petals game: Player 0 owns the centre (priority 0 or
/// ω), Player 1 the petals of ascending odd priorities.
pub fn gen_flower(n: u32, variant: FlowerVariant) -> (GeneratedArena, ConditionSpec) {
    let condition = match variant {
        FlowerVariant::MaxParity => ConditionSpec::MaxParity,
        FlowerVariant::OmegaCenter => ConditionSpec::OrdinalParity {
            bound: Priority { limit: 1, offset: 1 },
        },
    };
    (
        GeneratedArena { family: Family::Flower { variant }, truncation: n },
        condition,
    )
}

/// The descending-chain game under the max-parity condition: the offering
/// player must change choice sets forever to win.
pub fn gen_chain_game(
    descriptor: ChainDescriptor,
    n: u32,
    finite_appearance: bool,
) -> Result<(GeneratedArena, ConditionSpec), ArenaError> {
    if descriptor.y.is_empty() {
        return Err(ArenaError::BadParams("chain descriptor needs a non-empty Y".into()));
    }
    let generated = GeneratedArena {
        family: Family::ChainGame { descriptor, finite_appearance },
        truncation: n,
    };
    generated.expand()?;
    Ok((generated, ConditionSpec::MaxParity))
}

/// The two-oval loop over `y` with anchor `a`, under an explicit Muller
/// condition; the protagonist is whoever wins with all of `y`.
pub fn gen_split_game(
    y: BTreeSet<u32>,
    anchor: u32,
    condition: ExplicitMuller,
) -> Result<(GeneratedArena, ConditionSpec), DemoError> {
    let sigma = condition.winner_of_nat_set(&y)?;
    let generated = GeneratedArena {
        family: Family::SplitGame { y, anchor, sigma },
        truncation: 1,
    };
    generated.expand()?;
    Ok((generated, ConditionSpec::ExplicitMuller(condition)))
}

/// The degree-two solitaire ladder under max-parity.
pub fn gen_ladder(n: u32) -> (GeneratedArena, ConditionSpec) {
    (
        GeneratedArena { family: Family::Ladder, truncation: n },
        ConditionSpec::MaxParity,
    )
}

/// The strong-split instance: priorities {0,1,2} with {0,1} and {1,2} on
/// Player 1's side but their union on Player 0's. Player 0 wins the loop
/// game over Y = {0,1,2} with memory, never positionally.
pub fn strong_split_instance() -> (BTreeSet<u32>, u32, ExplicitMuller) {
    let c: BTreeSet<u32> = BTreeSet::from([0, 1, 2]);
    let f0 = (0u32..8)
        .map(|mask| (0..3).filter(|b| mask & (1 << b) != 0).collect::<BTreeSet<u32>>())
        .filter(|s| *s != BTreeSet::from([0, 1]) && *s != BTreeSet::from([1, 2]))
        .collect();
    (c.clone(), 1, ExplicitMuller::new(c, f0).unwrap())
}

/// A finite stand-in for a union of an ascending chain: over {0,…,2k+1},
/// Player 1 keeps every proper subset with odd maximum, so the chain
/// `{0..3} ⊆ {0..5} ⊆ …` sits on Player 1's side while the full set (the
/// truncated union) belongs to Player 0.
pub fn union_chain_instance(k: u32) -> (BTreeSet<u32>, u32, ExplicitMuller) {
    let top = 2 * k + 1;
    let c: BTreeSet<u32> = (0..=top).collect();
    let full = c.clone();
    let f0 = (0u64..1 << (top + 1))
        .map(|mask| {
            (0..=top)
                .filter(|b| mask & (1 << b) != 0)
                .collect::<BTreeSet<u32>>()
        })
        .filter(|s| s == &full || s.iter().next_back().map(|m| m % 2 == 0).unwrap_or(true))
        .collect();
    (c.clone(), 0, ExplicitMuller::new(c, f0).unwrap())
}

// ---------------------------------------------------------------------------
// Certified schedules
// ---------------------------------------------------------------------------

/// A named scheduled play bundled with its arena and condition.
pub struct CertifiedSchedule {
    pub name: String,
    pub arena: Arena,
    pub condition: ConditionSpec,
    pub play: ScheduledPlay,
    pub expected_winner: Player,
}

impl CertifiedSchedule {
    pub fn check(&self, horizon: u64) -> Result<CertificateReport, ConditionError> {
        let report = winner_of_scheduled(&self.condition, &self.arena, &self.play, horizon)?;
        if report.winner != self.expected_winner {
            return Err(ConditionError::BadSpec(format!(
                "schedule {} declares a win for the wrong player",
                self.name
            )));
        }
        Ok(report)
    }
}

/// Round-robin flower schedule: a fresh petal every round, so only the
/// centre priority repeats within the horizon.
pub fn flower_schedule(variant: FlowerVariant, horizon: u64) -> CertifiedSchedule {
    let n = (horizon / 2 + 2) as u32;
    let (generated, condition) = gen_flower(n, variant);
    let arena = generated.expand().expect("flower expands");
    let center = arena.lookup("c").unwrap();
    let petals: Vec<VertexId> = (1..=n)
        .map(|k| arena.lookup(&format!("p{k:03}")).unwrap())
        .collect();
    let center_priority = arena.priority(center);
    let step = move |i: u64| {
        if i % 2 == 0 {
            center
        } else {
            petals[((i / 2) as usize) % petals.len()]
        }
    };
    let mut stabilization = BTreeMap::new();
    for k in 1..=n as u64 {
        stabilization.insert(Priority::nat(2 * k as u32 - 1), 2 * k - 1);
    }
    let occurrence = BTreeMap::from([(center_priority, OccurrenceBound { slope: 2, intercept: 2 })]);
    let declared = SetDescriptor::Finite(BTreeSet::from([center_priority]));
    CertifiedSchedule {
        name: format!("flower round-robin ({variant:?})"),
        arena,
        condition,
        play: ScheduledPlay::new(step, declared, stabilization, occurrence),
        expected_winner: Player::Zero,
    }
}

/// Chain-game schedule: sweep the gates round-robin and return through Y.
/// The scripted opponent samples one fresh tail element per gate during the
/// first sweep (those occurrences stabilize) and the anchor copy, whose
/// priority is declared, afterwards.
pub fn chain_schedule(horizon: u64) -> CertifiedSchedule {
    let n = 16u32;
    let descriptor = ChainDescriptor::max_parity();
    let (generated, condition) =
        gen_chain_game(descriptor, n, false).expect("built-in descriptor is valid");
    let arena = generated.expand().expect("chain expands");
    let c = arena.lookup("c").unwrap();
    let f = arena.lookup("f").unwrap();
    let y1 = arena.lookup("y0001").unwrap();
    let gates: Vec<VertexId> = (1..=n)
        .map(|i| arena.lookup(&format!("g{i:03}")).unwrap())
        .collect();
    let fresh_picks: Vec<VertexId> = (1..=n)
        .map(|i| arena.lookup(&format!("x{i:03}_{:04}", i + 1)).expect("window element"))
        .collect();
    let anchor_picks: Vec<VertexId> = (1..=n)
        .map(|i| arena.lookup(&format!("x{i:03}_0001")).expect("anchor copy"))
        .collect();
    let step = move |i: u64| {
        let round = (i / 5) as usize;
        let gate = round % gates.len();
        match i % 5 {
            0 => c,
            1 => gates[gate],
            2 => {
                if round < fresh_picks.len() {
                    fresh_picks[round]
                } else {
                    anchor_picks[gate]
                }
            }
            3 => f,
            _ => y1,
        }
    };
    let mut stabilization = BTreeMap::new();
    for r in 1..=n as u64 {
        stabilization.insert(Priority::nat(r as u32 + 1), 5 * (r - 1) + 2);
    }
    let occurrence = BTreeMap::from([(Priority::nat(1), OccurrenceBound { slope: 2, intercept: 8 })]);
    let _ = horizon;
    CertifiedSchedule {
        name: "chain-game gate sweep".to_string(),
        arena,
        condition,
        play: ScheduledPlay::new(step, SetDescriptor::finite_nat([1]), stabilization, occurrence),
        expected_winner: Player::One,
    }
}

/// Two-oval schedule: both players sweep Y in lockstep, so the inf-set is
/// exactly Y.
pub fn split_schedule(
    y: BTreeSet<u32>,
    anchor: u32,
    condition: ExplicitMuller,
) -> Result<CertifiedSchedule, DemoError> {
    let expected = condition.winner_of_nat_set(&y)?;
    let (generated, spec) = gen_split_game(y.clone(), anchor, condition)?;
    let arena = generated.expand()?;
    let top = arena.lookup("top").unwrap();
    let mid = arena.lookup("mid").unwrap();
    let ups: Vec<VertexId> = y
        .iter()
        .map(|v| arena.lookup(&format!("u{v:04}")).unwrap())
        .collect();
    let downs: Vec<VertexId> = y
        .iter()
        .map(|v| arena.lookup(&format!("w{v:04}")).unwrap())
        .collect();
    let l = ups.len() as u64;
    let step = move |i: u64| {
        let round = (i / 4 % l) as usize;
        match i % 4 {
            0 => top,
            1 => ups[round],
            2 => mid,
            _ => downs[round],
        }
    };
    let occurrence = y
        .iter()
        .map(|&v| {
            (Priority::nat(v), OccurrenceBound { slope: 4 * l, intercept: 4 * l })
        })
        .collect();
    Ok(CertifiedSchedule {
        name: "two-oval sweep of Y".to_string(),
        arena,
        condition: spec,
        play: ScheduledPlay::new(
            step,
            SetDescriptor::Finite(y.iter().map(|&v| Priority::nat(v)).collect()),
            BTreeMap::new(),
            occurrence,
        ),
        expected_winner: expected,
    })
}

/// Ladder schedule: descend one column deeper every round, so every branch
/// priority occurs once and the inf-set is {1, 2}.
pub fn ladder_schedule(horizon: u64) -> CertifiedSchedule {
    let mut rounds = 1u64;
    while (rounds * rounds + 3 * rounds) < horizon + 4 {
        rounds += 1;
    }
    let n = (rounds + 1) as u32;
    let (generated, condition) = gen_ladder(n);
    let arena = generated.expand().expect("ladder expands");
    let a = arena.lookup("a").unwrap();
    let tops: Vec<VertexId> = (1..=n)
        .map(|j| arena.lookup(&format!("t{j:03}")).unwrap())
        .collect();
    let branches: Vec<VertexId> = (1..=n)
        .map(|j| arena.lookup(&format!("b{j:03}")).unwrap())
        .collect();
    let bottoms: Vec<VertexId> = (1..=n)
        .map(|j| arena.lookup(&format!("d{j:03}")).unwrap())
        .collect();
    // Round r (1-based) is: a, t1..tr, b_r, d_r..d_1 — length 2r+2,
    // starting at step (r-1)r + 2(r-1).
    let starts: Vec<u64> = (1..=rounds + 2).map(|r| (r - 1) * r + 2 * (r - 1)).collect();
    let mut stabilization = BTreeMap::new();
    for r in 1..=rounds + 1 {
        // Branch priority 2r+1 occurs once, at offset r+1 of round r.
        stabilization.insert(Priority::nat(2 * r as u32 + 1), starts[(r - 1) as usize] + r + 1);
    }
    let step = move |i: u64| {
        let r = match starts.partition_point(|&s| s <= i) {
            0 => 1,
            k => k as u64,
        };
        let offset = i - starts[(r - 1) as usize];
        let cols = r as usize;
        match offset {
            0 => a,
            o if (o as usize) <= cols => tops[o as usize - 1],
            o if (o as usize) == cols + 1 => branches[cols - 1],
            o => bottoms[cols - (o as usize - cols - 1)],
        }
    };
    let occurrence = BTreeMap::from([
        (Priority::nat(1), OccurrenceBound { slope: 3, intercept: 40 }),
        (Priority::nat(2), OccurrenceBound { slope: 3, intercept: 40 }),
    ]);
    CertifiedSchedule {
        name: "ladder descending sweep".to_string(),
        arena,
        condition,
        play: ScheduledPlay::new(step, SetDescriptor::finite_nat([1, 2]), stabilization, occurrence),
        expected_winner: Player::Zero,
    }
}

// ---------------------------------------------------------------------------
// Refutation harness
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefutationMode {
    /// Every memory machine within the bound was enumerated.
    ExhaustiveMachines,
    /// Random machines within the bound were sampled.
    SampledMachines,
    /// Every realizable inf-set (strongly connected vertex subset) was
    /// enumerated; complete for all finite-memory strategies.
    ClosedWalks,
    /// Every recurring-choice class (set of moves picked forever) was
    /// enumerated; complete for the stated memory bound.
    ChoiceClasses,
}

impl std::fmt::Display for RefutationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RefutationMode::ExhaustiveMachines => "exhaustive machine enumeration",
            RefutationMode::SampledMachines => "sampled machines",
            RefutationMode::ClosedWalks => "exhaustive realizable inf-sets",
            RefutationMode::ChoiceClasses => "exhaustive recurring-choice classes",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct RefutationReport {
    pub family: String,
    pub truncation: u32,
    pub memory_bound: u32,
    pub mode: RefutationMode,
    pub checked: u64,
    pub survivors: Vec<String>,
    pub witnesses: Vec<String>,
    pub note: String,
}

impl RefutationReport {
    pub fn all_refuted(&self) -> bool {
        self.survivors.is_empty()
    }
}

const TRUNCATION_NOTE: &str = "refutes strategies whose memory and alphabet support fit this \
truncation; the infinite-arena claim is a theorem, not an empirical result";

/// Refutes all finite-memory strategies of the protagonist within the given
/// memory bound, on the truncated expansion of the family.
///
/// The enumeration strategy depends on the family: machine enumeration for
/// the flower (sampling beyond the budget), realizable-inf-set enumeration
/// for the solitaire ladder, recurring-choice classes for the two-oval
/// games, and scripted machines against a best-response opponent for the
/// chain game (exhaustive for one state, sampled beyond).
pub fn refute_finite_memory(
    generated: &GeneratedArena,
    condition: &ConditionSpec,
    memory_bound: u32,
    budget: u64,
    rng: &mut impl Rng,
) -> Result<RefutationReport, DemoError> {
    let arena = generated.expand()?;
    match &generated.family {
        Family::Flower { .. } => {
            refute_flower(generated, condition, &arena, memory_bound, budget, rng)
        }
        Family::Ladder => refute_ladder(generated, condition, &arena, memory_bound, budget),
        Family::SplitGame { y, anchor, sigma } => refute_split(
            generated,
            condition,
            *sigma,
            y,
            *anchor,
            memory_bound,
        ),
        Family::ChainGame { descriptor, .. } => refute_chain(
            generated,
            condition,
            &arena,
            descriptor.sigma,
            memory_bound,
            budget,
            rng,
        ),
    }
}

/// Upper bound on the number of machines with `states` states for `player`
/// on this arena, or `None` on overflow.
fn machine_space(arena: &Arena, player: Player, states: u32) -> Option<u128> {
    let mut total: u128 = states as u128; // initial state
    for _ in 0..arena.len() as u64 * states as u64 {
        total = total.checked_mul(states as u128)?;
    }
    for v in arena.vertices() {
        if arena.owner(v) == player {
            for _ in 0..states {
                total = total.checked_mul(arena.successors(v).len() as u128)?;
            }
        }
    }
    Some(total)
}

struct MachineOdometer<'a> {
    arena: &'a Arena,
    player: Player,
    states: u32,
    /// Digits: initial state, then update table entries, then move choices.
    digits: Vec<u32>,
    radices: Vec<u32>,
    owned: Vec<VertexId>,
    done: bool,
}

impl<'a> MachineOdometer<'a> {
    fn new(arena: &'a Arena, player: Player, states: u32) -> Self {
        let owned: Vec<VertexId> = arena.vertices().filter(|&v| arena.owner(v) == player).collect();
        let mut radices = vec![states];
        radices.extend(std::iter::repeat(states).take(arena.len() * states as usize));
        for &v in &owned {
            for _ in 0..states {
                radices.push(arena.successors(v).len() as u32);
            }
        }
        MachineOdometer {
            arena,
            player,
            states,
            digits: vec![0; radices.len()],
            radices,
            owned,
            done: false,
        }
    }

    fn build(&self) -> MemoryStrategy {
        let names: Vec<String> = (0..self.states).map(|s| s.to_string()).collect();
        let mut machine = MemoryStrategy::new(
            self.player,
            names.clone(),
            names[self.digits[0] as usize].clone(),
        );
        let mut cursor = 1;
        for s in 0..self.states {
            for v in self.arena.vertices() {
                machine.set_update(
                    &names[s as usize],
                    self.arena.id(v),
                    &names[self.digits[cursor] as usize],
                );
                cursor += 1;
            }
        }
        for &v in &self.owned {
            for s in 0..self.states {
                let succ = self.arena.successors(v)[self.digits[cursor] as usize];
                machine.set_move(self.arena.id(v), &names[s as usize], self.arena.id(succ));
                cursor += 1;
            }
        }
        machine
    }

    fn advance(&mut self) {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

impl Iterator for MachineOdometer<'_> {
    type Item = MemoryStrategy;

    fn next(&mut self) -> Option<MemoryStrategy> {
        if self.done {
            return None;
        }
        let machine = self.build();
        self.advance();
        Some(machine)
    }
}

fn refute_flower(
    generated: &GeneratedArena,
    condition: &ConditionSpec,
    arena: &Arena,
    memory_bound: u32,
    budget: u64,
    rng: &mut impl Rng,
) -> Result<RefutationReport, DemoError> {
    // Petals have a single successor; fix the forced opponent.
    let mut back = PositionalStrategy::new(Player::One);
    for v in arena.vertices() {
        if arena.owner(v) == Player::One {
            back.set(arena.id(v), "c");
        }
    }
    let opponent = Strategy::Positional(back);
    let start = arena.lookup("c").unwrap();
    let mut survivors = Vec::new();
    let mut witnesses = Vec::new();
    let mut checked = 0u64;
    let mut check = |machine: &MemoryStrategy| -> Result<(), DemoError> {
        let lasso = induced_lasso(arena, &Strategy::Memory(machine.clone()), &opponent, start)?;
        let winner = winner_of_lasso(condition, arena, &lasso)?;
        checked += 1;
        if winner == Player::Zero {
            survivors.push(format!("machine #{checked} wins via {}", lasso.display(arena)));
        } else if witnesses.len() < 3 {
            witnesses.push(format!(
                "inf-set {:?} refutes its class via {}",
                lasso.inf_set(arena),
                lasso.display(arena)
            ));
        }
        Ok(())
    };
    let mut mode = RefutationMode::ExhaustiveMachines;
    for states in 1..=memory_bound {
        let space = machine_space(arena, Player::Zero, states);
        if space.map(|s| s <= budget as u128).unwrap_or(false) {
            for machine in MachineOdometer::new(arena, Player::Zero, states) {
                check(&machine)?;
            }
        } else {
            mode = RefutationMode::SampledMachines;
            for _ in 0..budget {
                let machine = random_machine(rng, arena, Player::Zero, states);
                check(&machine)?;
            }
        }
    }
    Ok(RefutationReport {
        family: "flower".to_string(),
        truncation: generated.truncation,
        memory_bound,
        mode,
        checked,
        survivors,
        witnesses,
        note: TRUNCATION_NOTE.to_string(),
    })
}

fn refute_ladder(
    generated: &GeneratedArena,
    condition: &ConditionSpec,
    arena: &Arena,
    memory_bound: u32,
    budget: u64,
) -> Result<RefutationReport, DemoError> {
    let n = arena.len();
    if n > 22 {
        return Err(DemoError::BudgetExceeded {
            budget,
            what: format!("{n} vertices exceed the exhaustive inf-set enumeration"),
        });
    }
    let adj: Vec<Vec<usize>> = arena
        .vertices()
        .map(|v| arena.successors(v).iter().map(|t| t.0).collect())
        .collect();
    let mut survivors = Vec::new();
    let mut witnesses = Vec::new();
    let mut checked = 0u64;
    for bits in 1u64..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| bits & (1 << i) != 0).collect();
        if !strongly_connected_subset(&adj, &subset) {
            continue;
        }
        checked += 1;
        let inf_set: BTreeSet<Priority> = subset.iter().map(|&i| arena.priority(VertexId(i))).collect();
        let winner = member(condition, &inf_set)?;
        if winner == Player::Zero {
            survivors.push(format!("realizable inf-set {inf_set:?} wins for player 0"));
        } else if witnesses.len() < 3 {
            let ids: Vec<&str> = subset.iter().map(|&i| arena.id(VertexId(i))).collect();
            witnesses.push(format!("inf-set {inf_set:?} over {{{}}} loses", ids.join(" ")));
        }
    }
    Ok(RefutationReport {
        family: "ladder".to_string(),
        truncation: generated.truncation,
        memory_bound,
        mode: RefutationMode::ClosedWalks,
        checked,
        survivors,
        witnesses,
        note: format!("{TRUNCATION_NOTE}; inf-set enumeration covers every finite memory bound"),
    })
}

fn refute_split(
    generated: &GeneratedArena,
    condition: &ConditionSpec,
    sigma: Player,
    y: &BTreeSet<u32>,
    anchor: u32,
    memory_bound: u32,
) -> Result<RefutationReport, DemoError> {
    let ConditionSpec::ExplicitMuller(muller) = condition else {
        return Err(DemoError::Condition(ConditionError::BadSpec(
            "split-game refutation needs an explicit condition".to_string(),
        )));
    };
    let arena = generated.expand()?;
    let elements: Vec<u32> = y.iter().copied().collect();
    let mut survivors = Vec::new();
    let mut witnesses = Vec::new();
    let mut checked = 0u64;
    // A machine with m states picks at most m distinct elements forever;
    // enumerate those recurring-choice sets B and let the opponent complete
    // {a} ∪ B to an opposing set inside Y.
    for bits in 1u64..(1 << elements.len()) {
        let b: BTreeSet<u32> = elements
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        if b.len() > memory_bound as usize {
            continue;
        }
        checked += 1;
        let mut need: BTreeSet<u32> = b.clone();
        need.insert(anchor);
        let response = muller.f0_masks().map(|m| (m, Player::Zero))
            .chain(opposing_masks(muller))
            .filter(|(_, side)| *side == sigma.opponent())
            .map(|(m, _)| muller.set_of_mask(m))
            .find(|x| need.is_subset(x) && x.is_subset(y));
        match response {
            Some(x) => {
                let lasso = split_class_lasso(&arena, &b, &x);
                let winner = winner_of_lasso(condition, &arena, &lasso)?;
                debug_assert_eq!(winner, sigma.opponent());
                if witnesses.len() < 3 {
                    witnesses.push(format!(
                        "recurring picks {b:?} are completed to {x:?} via {}",
                        lasso.display(&arena)
                    ));
                }
            }
            None => survivors.push(format!(
                "recurring picks {b:?} admit no opposing completion inside Y"
            )),
        }
    }
    Ok(RefutationReport {
        family: "split-game".to_string(),
        truncation: generated.truncation,
        memory_bound,
        mode: RefutationMode::ChoiceClasses,
        checked,
        survivors,
        witnesses,
        note: format!(
            "{TRUNCATION_NOTE}; a machine with at most {memory_bound} states realizes one of the \
             enumerated recurring-choice classes"
        ),
    })
}

fn opposing_masks(m: &ExplicitMuller) -> Vec<(u32, Player)> {
    let bits = m.alphabet().len();
    (0u32..1 << bits)
        .filter(|mask| !m.holds_for_zero_mask(*mask))
        .map(|mask| (mask, Player::One))
        .collect()
}

/// A lasso realizing the inf-set `x` while the protagonist keeps picking
/// the elements of `b` from the top oval.
fn split_class_lasso(arena: &Arena, b: &BTreeSet<u32>, x: &BTreeSet<u32>) -> Lasso {
    let top = arena.lookup("top").unwrap();
    let mid = arena.lookup("mid").unwrap();
    let bs: Vec<u32> = b.iter().copied().collect();
    let xs: Vec<u32> = x.iter().copied().collect();
    let rounds = lcm(bs.len(), xs.len());
    let mut cycle = Vec::with_capacity(4 * rounds);
    for i in 0..rounds {
        cycle.push(top);
        cycle.push(arena.lookup(&format!("u{:04}", bs[i % bs.len()])).unwrap());
        cycle.push(mid);
        cycle.push(arena.lookup(&format!("w{:04}", xs[i % xs.len()])).unwrap());
    }
    Lasso { prefix: Vec::new(), cycle }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn refute_chain(
    generated: &GeneratedArena,
    condition: &ConditionSpec,
    arena: &Arena,
    sigma: Player,
    memory_bound: u32,
    budget: u64,
    rng: &mut impl Rng,
) -> Result<RefutationReport, DemoError> {
    let start = arena.lookup("c").unwrap();
    let seeds = BTreeSet::from([start]);
    let mut survivors = Vec::new();
    let mut witnesses = Vec::new();
    let mut checked = 0u64;
    let mut check = |machine: &MemoryStrategy| -> Result<(), DemoError> {
        checked += 1;
        let product = product_with_memory(arena, machine, &seeds)?;
        match best_response_cycle(&product.arena, condition, sigma)? {
            Some(lasso) => {
                if witnesses.len() < 3 {
                    let inf = lasso.inf_set(&product.arena);
                    witnesses.push(format!("opponent forces inf-set {inf:?} in the product"));
                }
            }
            None => survivors.push(format!("machine #{checked} survives every opponent response")),
        }
        Ok(())
    };
    let mut mode = RefutationMode::ExhaustiveMachines;
    for states in 1..=memory_bound {
        let space = machine_space(arena, sigma, states);
        if space.map(|s| s <= budget as u128).unwrap_or(false) {
            for machine in MachineOdometer::new(arena, sigma, states) {
                check(&machine)?;
            }
        } else {
            mode = RefutationMode::SampledMachines;
            for _ in 0..budget {
                let machine = random_machine(rng, arena, sigma, states);
                check(&machine)?;
            }
        }
    }
    Ok(RefutationReport {
        family: "chain-game".to_string(),
        truncation: generated.truncation,
        memory_bound,
        mode,
        checked,
        survivors,
        witnesses,
        note: format!(
            "{TRUNCATION_NOTE}; opponent responses are exhausted per reachable cycle structure"
        ),
    })
}

/// Searches the protagonist-restricted product for a reachable cycle whose
/// priorities lose for `sigma`; all remaining choices in the product belong
/// to the opponent, so such a cycle is an opponent-enforceable play.
fn best_response_cycle(
    product: &Arena,
    condition: &ConditionSpec,
    sigma: Player,
) -> Result<Option<Lasso>, DemoError> {
    let adj: Vec<Vec<usize>> = product
        .vertices()
        .map(|v| product.successors(v).iter().map(|t| t.0).collect())
        .collect();
    let priorities = product.priorities();
    for &pivot in &priorities {
        let allowed: Vec<bool> = match condition {
            ConditionSpec::MaxParity => product
                .vertices()
                .map(|v| product.priority(v) <= pivot)
                .collect(),
            ConditionSpec::MinParity | ConditionSpec::OrdinalParity { .. } => product
                .vertices()
                .map(|v| product.priority(v) >= pivot)
                .collect(),
            other => {
                return Err(DemoError::Condition(ConditionError::BadSpec(format!(
                    "best-response search does not handle {other}"
                ))))
            }
        };
        if Player::of_parity(pivot) == sigma {
            continue;
        }
        let sub: Vec<Vec<usize>> = (0..adj.len())
            .map(|i| {
                if allowed[i] {
                    adj[i].iter().copied().filter(|&j| allowed[j]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        for component in strongly_connected_components(&sub) {
            let has_cycle = component.len() > 1 || sub[component[0]].contains(&component[0]);
            if !has_cycle {
                continue;
            }
            if let Some(&entry) = component
                .iter()
                .find(|&&i| product.priority(VertexId(i)) == pivot)
            {
                let mut in_comp = vec![false; adj.len()];
                for &i in &component {
                    in_comp[i] = true;
                }
                let cycle = cycle_through(&sub, &in_comp, entry).expect("component has a cycle");
                return Ok(Some(Lasso {
                    prefix: Vec::new(),
                    cycle: cycle.into_iter().map(VertexId).collect(),
                }));
            }
        }
    }
    Ok(None)
}
