//! Finitely described winning conditions and their evaluation on the
//! inf-sets that actually arise in this crate: finite sets (from lassos) and
//! certified schedules with finite or co-finite declared inf-sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::arena::{Arena, Player, Priority, VertexId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("priorities outside the alphabet: {0:?}")]
    OutOfAlphabet(BTreeSet<Priority>),
    #[error("certificate violated at step {step}: priority {priority}")]
    CertificateViolated { step: u64, priority: Priority },
    #[error("schedule is not a play of the arena at step {0}")]
    InvalidSchedule(u64),
    #[error("alphabet too large: {0} priorities (limit {1})")]
    AlphabetTooLarge(usize, usize),
    #[error("{0}")]
    BadSpec(String),
}

/// An explicit Muller condition over a finite set `C` of natural priorities.
/// `F1` is implicitly the complement of `F0` within the powerset of `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitMuller {
    alphabet: Vec<u32>,
    f0: BTreeSet<u32>,
}

/// Hard cap on alphabet size, keeping powerset enumeration near 65k sets.
pub const MAX_MULLER_ALPHABET: usize = 16;

impl ExplicitMuller {
    pub fn new(c: BTreeSet<u32>, f0: Vec<BTreeSet<u32>>) -> Result<Self, ConditionError> {
        if c.len() > MAX_MULLER_ALPHABET {
            return Err(ConditionError::AlphabetTooLarge(c.len(), MAX_MULLER_ALPHABET));
        }
        let alphabet: Vec<u32> = c.iter().copied().collect();
        let mut masks = BTreeSet::new();
        for set in f0 {
            let stray: BTreeSet<Priority> = set
                .iter()
                .filter(|x| !c.contains(x))
                .map(|&x| Priority::nat(x))
                .collect();
            if !stray.is_empty() {
                return Err(ConditionError::OutOfAlphabet(stray));
            }
            masks.insert(Self::mask_of(&alphabet, &set));
        }
        Ok(ExplicitMuller { alphabet, f0: masks })
    }

    fn mask_of(alphabet: &[u32], set: &BTreeSet<u32>) -> u32 {
        let mut mask = 0u32;
        for (bit, p) in alphabet.iter().enumerate() {
            if set.contains(p) {
                mask |= 1 << bit;
            }
        }
        mask
    }

    pub fn alphabet(&self) -> &[u32] {
        &self.alphabet
    }

    pub fn alphabet_set(&self) -> BTreeSet<u32> {
        self.alphabet.iter().copied().collect()
    }

    pub fn set_of_mask(&self, mask: u32) -> BTreeSet<u32> {
        self.alphabet
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &p)| p)
            .collect()
    }

    pub fn mask(&self, set: &BTreeSet<u32>) -> Option<u32> {
        if set.iter().all(|x| self.alphabet.binary_search(x).is_ok()) {
            Some(Self::mask_of(&self.alphabet, set))
        } else {
            None
        }
    }

    pub fn holds_for_zero_mask(&self, mask: u32) -> bool {
        self.f0.contains(&mask)
    }

    pub fn f0_masks(&self) -> impl Iterator<Item = u32> + '_ {
        self.f0.iter().copied()
    }

    pub fn f0_sets(&self) -> Vec<BTreeSet<u32>> {
        self.f0.iter().map(|&m| self.set_of_mask(m)).collect()
    }

    pub fn winner_of_nat_set(&self, set: &BTreeSet<u32>) -> Result<Player, ConditionError> {
        let mask = self.mask(set).ok_or_else(|| {
            ConditionError::OutOfAlphabet(
                set.iter()
                    .filter(|x| self.alphabet.binary_search(x).is_err())
                    .map(|&x| Priority::nat(x))
                    .collect(),
            )
        })?;
        Ok(if self.f0.contains(&mask) { Player::Zero } else { Player::One })
    }

    /// Restricts the condition to `C ∩ keep`.
    pub fn restricted(&self, keep: &BTreeSet<u32>) -> Result<ExplicitMuller, ConditionError> {
        let c: BTreeSet<u32> = self.alphabet.iter().filter(|p| keep.contains(p)).copied().collect();
        let f0 = self
            .f0_sets()
            .into_iter()
            .filter(|s| s.iter().all(|p| c.contains(p)))
            .collect();
        ExplicitMuller::new(c, f0)
    }
}

/// A condition given directly as a descending path of co-finite sets over
/// `ω`: `Z0 = ω`, `Z_{i+1} = Z_i \ D_i`, with alternating owners starting at
/// `root_player`, optionally ending in the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZielonkaPathSpec {
    pub root_player: Player,
    pub diffs: Vec<BTreeSet<u32>>,
    pub ends_with_empty: bool,
}

impl ZielonkaPathSpec {
    pub fn new(
        root_player: Player,
        diffs: Vec<BTreeSet<u32>>,
        ends_with_empty: bool,
    ) -> Result<Self, ConditionError> {
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for d in &diffs {
            if d.is_empty() {
                return Err(ConditionError::BadSpec("path differences must be non-empty".into()));
            }
            if d.iter().any(|x| !seen.insert(*x)) {
                return Err(ConditionError::BadSpec("path differences must be pairwise disjoint".into()));
            }
        }
        Ok(ZielonkaPathSpec { root_player, diffs, ends_with_empty })
    }

    /// Player labelling the `i`-th path node (the root is node 0).
    pub fn node_player(&self, i: usize) -> Player {
        if i % 2 == 0 {
            self.root_player
        } else {
            self.root_player.opponent()
        }
    }

    /// Number of co-finite nodes on the path.
    pub fn cofinite_nodes(&self) -> usize {
        self.diffs.len() + 1
    }

    /// Index of the deepest path node whose label contains the finite set.
    fn deepest_node(&self, set: &BTreeSet<Priority>) -> usize {
        if set.is_empty() && self.ends_with_empty {
            return self.cofinite_nodes();
        }
        for (i, d) in self.diffs.iter().enumerate() {
            let hit = set.iter().any(|p| p.is_natural() && d.contains(&p.offset));
            if hit {
                return i;
            }
        }
        self.diffs.len()
    }

    /// Deepest node containing a co-finite set with the given finite
    /// complement (such a set misses `D_i` exactly when `D_i ⊆ excluded`).
    fn deepest_node_cofinite(&self, excluded: &BTreeSet<Priority>) -> usize {
        for (i, d) in self.diffs.iter().enumerate() {
            let subsumed = d.iter().all(|x| excluded.contains(&Priority::nat(*x)));
            if !subsumed {
                return i;
            }
        }
        self.diffs.len()
    }
}

/// The singleton-limit family `F0 = P(Y) ∪ {{e}} ∪ {∅}` with `Y = ω \ {e}`.
/// Not reducible to any parity condition; kept as data for finite
/// experiments (`y_window` is the finite window those experiments use).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonLimit {
    pub e: u32,
    pub y_window: BTreeSet<u32>,
}

/// A finitely described winning condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionSpec {
    /// Player 0 wins exactly the plays whose inf-set is empty.
    Infinity,
    /// Player 0 wins iff the least priority seen infinitely often is even,
    /// or no priority repeats forever.
    MinParity,
    /// Player 0 wins iff the greatest priority seen infinitely often is
    /// even, or none exists.
    MaxParity,
    /// Min-parity over the ordinals below `bound` (exclusive).
    OrdinalParity { bound: Priority },
    ExplicitMuller(ExplicitMuller),
    ZielonkaPath(ZielonkaPathSpec),
    SingletonLimit(SingletonLimit),
}

impl fmt::Display for ConditionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionSpec::Infinity => write!(f, "infinity"),
            ConditionSpec::MinParity => write!(f, "min-parity"),
            ConditionSpec::MaxParity => write!(f, "max-parity"),
            ConditionSpec::OrdinalParity { bound } => write!(f, "min-parity below {bound}"),
            ConditionSpec::ExplicitMuller(m) => write!(f, "muller over {} priorities", m.alphabet().len()),
            ConditionSpec::ZielonkaPath(p) => write!(f, "zielonka path of {} nodes", p.cofinite_nodes()),
            ConditionSpec::SingletonLimit(s) => write!(f, "singleton-limit around {}", s.e),
        }
    }
}

/// Decides which player wins a play whose inf-set is the finite set `X`.
pub fn member(c: &ConditionSpec, x: &BTreeSet<Priority>) -> Result<Player, ConditionError> {
    match c {
        ConditionSpec::Infinity => Ok(if x.is_empty() { Player::Zero } else { Player::One }),
        ConditionSpec::MinParity | ConditionSpec::OrdinalParity { .. } => {
            Ok(match x.iter().next() {
                None => Player::Zero,
                Some(min) => Player::of_parity(*min),
            })
        }
        ConditionSpec::MaxParity => Ok(match x.iter().next_back() {
            None => Player::Zero,
            Some(max) => Player::of_parity(*max),
        }),
        ConditionSpec::ExplicitMuller(m) => {
            let mut nats = BTreeSet::new();
            let mut stray = BTreeSet::new();
            for p in x {
                if p.is_natural() {
                    nats.insert(p.offset);
                } else {
                    stray.insert(*p);
                }
            }
            if !stray.is_empty() {
                return Err(ConditionError::OutOfAlphabet(stray));
            }
            m.winner_of_nat_set(&nats)
        }
        ConditionSpec::ZielonkaPath(p) => Ok(p.node_player(p.deepest_node(x))),
        ConditionSpec::SingletonLimit(s) => {
            let e = Priority::nat(s.e);
            let touches_y = x.iter().any(|p| *p != e);
            Ok(if x.contains(&e) && touches_y { Player::One } else { Player::Zero })
        }
    }
}

/// A finite or co-finite set of priorities, as used by declared inf-sets of
/// scheduled plays and by classification witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetDescriptor {
    Finite(BTreeSet<Priority>),
    /// All natural priorities except `excluded`.
    Cofinite { excluded: BTreeSet<Priority> },
}

impl SetDescriptor {
    pub fn finite_nat(nats: impl IntoIterator<Item = u32>) -> Self {
        SetDescriptor::Finite(nats.into_iter().map(Priority::nat).collect())
    }

    pub fn contains(&self, p: Priority) -> bool {
        match self {
            SetDescriptor::Finite(s) => s.contains(&p),
            SetDescriptor::Cofinite { excluded } => p.is_natural() && !excluded.contains(&p),
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<Priority>| {
            s.iter().map(Priority::to_string).collect::<Vec<_>>().join(", ")
        };
        match self {
            SetDescriptor::Finite(s) => write!(f, "{{{}}}", list(s)),
            SetDescriptor::Cofinite { excluded } if excluded.is_empty() => write!(f, "w (all naturals)"),
            SetDescriptor::Cofinite { excluded } => write!(f, "w \\ {{{}}}", list(excluded)),
        }
    }
}

/// Evaluates a condition on a finite or co-finite inf-set descriptor.
pub fn member_descriptor(c: &ConditionSpec, d: &SetDescriptor) -> Result<Player, ConditionError> {
    match d {
        SetDescriptor::Finite(x) => member(c, x),
        SetDescriptor::Cofinite { excluded } => match c {
            // A co-finite inf-set is infinite, so no priority "exists" as a
            // maximum and some priority certainly repeats forever.
            ConditionSpec::Infinity => Ok(Player::One),
            ConditionSpec::MaxParity => Ok(Player::Zero),
            ConditionSpec::MinParity | ConditionSpec::OrdinalParity { .. } => {
                let mut n = 0u32;
                while excluded.contains(&Priority::nat(n)) {
                    n += 1;
                }
                Ok(Player::of_parity(Priority::nat(n)))
            }
            ConditionSpec::ZielonkaPath(p) => Ok(p.node_player(p.deepest_node_cofinite(excluded))),
            ConditionSpec::SingletonLimit(s) => {
                Ok(if excluded.contains(&Priority::nat(s.e)) {
                    Player::Zero
                } else {
                    Player::One
                })
            }
            ConditionSpec::ExplicitMuller(_) => Err(ConditionError::OutOfAlphabet(BTreeSet::new())),
        },
    }
}

/// Winner of the ultimately periodic play described by a lasso: evaluate the
/// condition on the priorities of the loop.
pub fn winner_of_lasso(
    c: &ConditionSpec,
    arena: &Arena,
    lasso: &crate::strategy::Lasso,
) -> Result<Player, ConditionError> {
    member(c, &lasso.inf_set(arena))
}

/// Occurrence requirement `T(k) = slope·k + intercept` for a declared
/// priority: its k-th occurrence must happen within the first `T(k)` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OccurrenceBound {
    pub slope: u64,
    pub intercept: u64,
}

impl OccurrenceBound {
    pub fn at(&self, k: u64) -> u64 {
        self.slope.saturating_mul(k).saturating_add(self.intercept)
    }
}

/// A deterministic infinite play given by a step function, together with a
/// declared inf-set and certificate bounds that make the declaration
/// checkable on any finite prefix.
pub struct ScheduledPlay {
    step: Box<dyn Fn(u64) -> VertexId + Send + Sync>,
    pub declared: SetDescriptor,
    /// For each priority outside the declared inf-set that may occur at all:
    /// the last step at which it is allowed to occur.
    pub stabilization: BTreeMap<Priority, u64>,
    /// Occurrence-rate bounds for declared priorities.
    pub occurrence: BTreeMap<Priority, OccurrenceBound>,
}

impl ScheduledPlay {
    pub fn new(
        step: impl Fn(u64) -> VertexId + Send + Sync + 'static,
        declared: SetDescriptor,
        stabilization: BTreeMap<Priority, u64>,
        occurrence: BTreeMap<Priority, OccurrenceBound>,
    ) -> Self {
        ScheduledPlay { step: Box::new(step), declared, stabilization, occurrence }
    }

    pub fn vertex_at(&self, i: u64) -> VertexId {
        (self.step)(i)
    }
}

impl fmt::Debug for ScheduledPlay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScheduledPlay")
            .field("declared", &self.declared)
            .finish_non_exhaustive()
    }
}

/// One line of a certificate report.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub priority: Priority,
    pub description: String,
}

/// Outcome of checking a scheduled play on a finite horizon. The check is a
/// consistency certificate for the declared inf-set up to the horizon, never
/// a claim about the full infinite play.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub horizon: u64,
    pub winner: Player,
    pub checks: Vec<BoundCheck>,
}

/// Validates the certificate bounds of a scheduled play on the first
/// `horizon` steps and, on success, evaluates the condition on the declared
/// inf-set descriptor.
pub fn winner_of_scheduled(
    c: &ConditionSpec,
    arena: &Arena,
    play: &ScheduledPlay,
    horizon: u64,
) -> Result<CertificateReport, ConditionError> {
    let mut occurrences: BTreeMap<Priority, Vec<u64>> = BTreeMap::new();
    let mut previous: Option<VertexId> = None;
    for i in 0..horizon {
        let v = play.vertex_at(i);
        if v.0 >= arena.len() {
            return Err(ConditionError::InvalidSchedule(i));
        }
        if let Some(u) = previous {
            if !arena.successors(u).contains(&v) {
                return Err(ConditionError::InvalidSchedule(i));
            }
        }
        previous = Some(v);
        let p = arena.priority(v);
        if play.declared.contains(p) {
            occurrences.entry(p).or_default().push(i);
        } else {
            match play.stabilization.get(&p) {
                Some(&bound) if i <= bound => {}
                _ => return Err(ConditionError::CertificateViolated { step: i, priority: p }),
            }
        }
    }
    let mut checks = Vec::new();
    for (&p, bound) in &play.occurrence {
        if !play.declared.contains(p) {
            return Err(ConditionError::CertificateViolated { step: 0, priority: p });
        }
        let steps = occurrences.get(&p).map(Vec::as_slice).unwrap_or(&[]);
        let mut k = 1u64;
        loop {
            let t = bound.at(k);
            if t >= horizon {
                break;
            }
            match steps.get((k - 1) as usize) {
                Some(&step) if step <= t => {}
                _ => return Err(ConditionError::CertificateViolated { step: t, priority: p }),
            }
            k += 1;
        }
        checks.push(BoundCheck {
            priority: p,
            description: format!(
                "priority {p}: {} occurrences, k-th within {}k+{} steps, consistent up to {horizon}",
                steps.len(),
                bound.slope,
                bound.intercept
            ),
        });
    }
    for (&p, &bound) in &play.stabilization {
        let last = occurrences.get(&p).and_then(|s| s.last().copied());
        checks.push(BoundCheck {
            priority: p,
            description: format!(
                "priority {p}: stabilizes by step {bound} (last seen {:?}), consistent up to {horizon}",
                last
            ),
        });
    }
    let winner = member_descriptor(c, &play.declared)?;
    Ok(CertificateReport { horizon, winner, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nats(xs: &[u32]) -> BTreeSet<Priority> {
        xs.iter().map(|&x| Priority::nat(x)).collect()
    }

    #[test]
    fn min_parity_examples() {
        assert_eq!(member(&ConditionSpec::MinParity, &nats(&[1, 2, 4])).unwrap(), Player::One);
        assert_eq!(member(&ConditionSpec::MinParity, &nats(&[0])).unwrap(), Player::Zero);
        assert_eq!(member(&ConditionSpec::MinParity, &nats(&[])).unwrap(), Player::Zero);
    }

    #[test]
    fn max_parity_empty_set_is_for_zero() {
        assert_eq!(member(&ConditionSpec::MaxParity, &nats(&[])).unwrap(), Player::Zero);
        assert_eq!(member(&ConditionSpec::MaxParity, &nats(&[0, 3])).unwrap(), Player::One);
    }

    #[test]
    fn infinity_condition() {
        assert_eq!(member(&ConditionSpec::Infinity, &nats(&[])).unwrap(), Player::Zero);
        assert_eq!(member(&ConditionSpec::Infinity, &nats(&[7])).unwrap(), Player::One);
    }

    #[test]
    fn zielonka_path_walks_to_deepest_node() {
        let p = ZielonkaPathSpec::new(
            Player::Zero,
            vec![BTreeSet::from([0, 1]), BTreeSet::from([2, 3])],
            false,
        )
        .unwrap();
        let spec = ConditionSpec::ZielonkaPath(p);
        // {2,7} avoids D0 but hits D1, so its deepest containing node is Z1.
        assert_eq!(member(&spec, &nats(&[2, 7])).unwrap(), Player::One);
        assert_eq!(member(&spec, &nats(&[0])).unwrap(), Player::Zero);
        assert_eq!(member(&spec, &nats(&[7])).unwrap(), Player::Zero);
    }

    #[test]
    fn explicit_muller_membership_and_alphabet() {
        let m = ExplicitMuller::new(
            BTreeSet::from([0, 1]),
            vec![BTreeSet::from([0, 1])],
        )
        .unwrap();
        let spec = ConditionSpec::ExplicitMuller(m);
        assert_eq!(member(&spec, &nats(&[0, 1])).unwrap(), Player::Zero);
        assert_eq!(member(&spec, &nats(&[0])).unwrap(), Player::One);
        let err = member(&spec, &nats(&[5])).unwrap_err();
        assert_eq!(err, ConditionError::OutOfAlphabet(nats(&[5])));
    }

    #[test]
    fn singleton_limit_each_priority_alone_wins_for_zero() {
        let spec = ConditionSpec::SingletonLimit(SingletonLimit {
            e: 0,
            y_window: BTreeSet::from([1, 2, 3]),
        });
        assert_eq!(member(&spec, &nats(&[0])).unwrap(), Player::Zero);
        assert_eq!(member(&spec, &nats(&[4])).unwrap(), Player::Zero);
        assert_eq!(member(&spec, &nats(&[1, 2])).unwrap(), Player::Zero);
        assert_eq!(member(&spec, &nats(&[0, 2])).unwrap(), Player::One);
    }

    #[test]
    fn parity_duality_on_singletons() {
        for n in 0..16 {
            let x = nats(&[n]);
            let min = member(&ConditionSpec::MinParity, &x).unwrap();
            let max = member(&ConditionSpec::MaxParity, &x).unwrap();
            assert_eq!(min, max);
            assert_eq!(min, Player::of_parity(Priority::nat(n)));
        }
    }

    #[test]
    fn cofinite_descriptor_rules() {
        let d = SetDescriptor::Cofinite { excluded: nats(&[0, 2]) };
        assert_eq!(member_descriptor(&ConditionSpec::MaxParity, &d).unwrap(), Player::Zero);
        assert_eq!(member_descriptor(&ConditionSpec::Infinity, &d).unwrap(), Player::One);
        // least element of the co-finite set is 1
        assert_eq!(member_descriptor(&ConditionSpec::MinParity, &d).unwrap(), Player::One);
        let p = ZielonkaPathSpec::new(
            Player::Zero,
            vec![BTreeSet::from([0, 1]), BTreeSet::from([2, 3])],
            false,
        )
        .unwrap();
        // w \ {0,1} is contained in Z1 but not Z2.
        let d2 = SetDescriptor::Cofinite { excluded: nats(&[0, 1]) };
        assert_eq!(
            member_descriptor(&ConditionSpec::ZielonkaPath(p), &d2).unwrap(),
            Player::One
        );
    }

    #[test]
    fn scheduled_play_certificate() {
        use crate::arena::{Family, FlowerVariant, GeneratedArena};
        let n = 600u32;
        let arena = GeneratedArena {
            family: Family::Flower { variant: FlowerVariant::MaxParity },
            truncation: n,
        }
        .expand()
        .unwrap();
        let center = arena.lookup("c").unwrap();
        let petals: Vec<VertexId> = (1..=n).map(|k| arena.lookup(&format!("p{k:03}")).unwrap()).collect();
        let step = move |i: u64| {
            if i % 2 == 0 {
                center
            } else {
                petals[(i / 2) as usize % petals.len()]
            }
        };
        let mut stabilization = BTreeMap::new();
        for k in 1..=n as u64 {
            stabilization.insert(Priority::nat(2 * k as u32 - 1), 2 * k - 1);
        }
        let occurrence = BTreeMap::from([(
            Priority::nat(0),
            OccurrenceBound { slope: 2, intercept: 2 },
        )]);
        let play = ScheduledPlay::new(
            step,
            SetDescriptor::finite_nat([0]),
            stabilization,
            occurrence,
        );
        let report = winner_of_scheduled(&ConditionSpec::MaxParity, &arena, &play, 1000).unwrap();
        assert_eq!(report.winner, Player::Zero);

        // Declaring {0, 3} contradicts the schedule: 3 occurs exactly once.
        let petals2: Vec<VertexId> = (1..=n).map(|k| arena.lookup(&format!("p{k:03}")).unwrap()).collect();
        let step2 = move |i: u64| {
            if i % 2 == 0 {
                center
            } else {
                petals2[(i / 2) as usize % petals2.len()]
            }
        };
        let mut stab2 = BTreeMap::new();
        for k in 1..=n as u64 {
            if 2 * k - 1 != 3 {
                stab2.insert(Priority::nat(2 * k as u32 - 1), 2 * k - 1);
            }
        }
        let occ2 = BTreeMap::from([
            (Priority::nat(0), OccurrenceBound { slope: 2, intercept: 2 }),
            (Priority::nat(3), OccurrenceBound { slope: 4, intercept: 4 }),
        ]);
        let bad = ScheduledPlay::new(step2, SetDescriptor::finite_nat([0, 3]), stab2, occ2);
        let err = winner_of_scheduled(&ConditionSpec::MaxParity, &arena, &bad, 1000).unwrap_err();
        assert!(matches!(err, ConditionError::CertificateViolated { .. }));
    }
}
