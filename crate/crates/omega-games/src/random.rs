//! Seeded generators for randomized sweeps: arenas, explicit Muller
//! conditions, path conditions, and memory machines.
//!
//! Every generator takes the RNG explicitly; `rng_from_env` wires in the
//! `OMEGAGAMES_SEED` environment variable so sweeps are reproducible.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arena::{Arena, Player, Priority, VertexId};
use crate::conditions::ExplicitMuller;
use crate::positionalize::signatures;
use crate::strategy::{product_with_memory, MemoryStrategy, PositionalStrategy};

pub const SEED_ENV: &str = "OMEGAGAMES_SEED";

/// A ChaCha RNG seeded from `OMEGAGAMES_SEED` when set, else from the
/// given default.
pub fn rng_from_env(default_seed: u64) -> ChaCha8Rng {
    let seed = std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default_seed);
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random total arena with `n` vertices, priorities in `0..=max_priority`
/// and out-degrees in `1..=max_degree`.
pub fn random_arena(rng: &mut impl Rng, n: usize, max_priority: u32, max_degree: usize) -> Arena {
    assert!(n > 0);
    let vertices = (0..n)
        .map(|i| {
            let owner = if rng.gen_bool(0.5) { Player::Zero } else { Player::One };
            (format!("v{i:03}"), owner, Priority::nat(rng.gen_range(0..=max_priority)))
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let degree = rng.gen_range(1..=max_degree.clamp(1, n));
        let mut targets = BTreeSet::new();
        while targets.len() < degree {
            targets.insert(rng.gen_range(0..n));
        }
        for t in targets {
            edges.push((format!("v{i:03}"), format!("v{t:03}")));
        }
    }
    Arena::build(vertices, edges).expect("generated arena is valid")
}

/// A random explicit Muller condition: every subset lands on a uniformly
/// random side.
pub fn random_explicit_muller(rng: &mut impl Rng, alphabet: u32) -> ExplicitMuller {
    let c: BTreeSet<u32> = (0..alphabet).collect();
    let subsets = 1u32 << alphabet;
    let f0 = (0..subsets)
        .filter(|_| rng.gen_bool(0.5))
        .map(|mask| (0..alphabet).filter(|b| mask & (1 << b) != 0).collect())
        .collect();
    ExplicitMuller::new(c, f0).expect("alphabet within bounds")
}

/// A random condition whose Zielonka tree is a path: the alphabet is cut
/// into a descending chain of labels and membership follows the deepest
/// containing node.
pub fn random_path_condition(rng: &mut impl Rng, alphabet: u32) -> ExplicitMuller {
    let shuffled: Vec<u32> = {
        let mut v: Vec<u32> = (0..alphabet).collect();
        v.shuffle(rng);
        v
    };
    let ends_with_empty = rng.gen_bool(0.5);
    // When the path keeps a non-empty final label, reserve a tail that no
    // difference segment may consume.
    let reserved = if ends_with_empty { 0 } else { rng.gen_range(1..=shuffled.len()) };
    let available = shuffled.len() - reserved;
    let mut diffs: Vec<BTreeSet<u32>> = Vec::new();
    let mut consumed = 0usize;
    while consumed < available {
        let take = rng.gen_range(1..=available - consumed);
        diffs.push(shuffled[consumed..consumed + take].iter().copied().collect());
        consumed += take;
    }
    let ends_with_empty = ends_with_empty && !diffs.is_empty();
    let root_player = if rng.gen_bool(0.5) { Player::Zero } else { Player::One };
    let full: BTreeSet<u32> = (0..alphabet).collect();
    let deepest = |x: &BTreeSet<u32>| -> usize {
        if x.is_empty() {
            return diffs.len() + usize::from(ends_with_empty);
        }
        for (i, d) in diffs.iter().enumerate() {
            if !x.is_disjoint(d) {
                return i;
            }
        }
        diffs.len()
    };
    let f0 = (0u32..1 << alphabet)
        .map(|mask| {
            (0..alphabet)
                .filter(|b| mask & (1 << b) != 0)
                .collect::<BTreeSet<u32>>()
        })
        .filter(|x| {
            let node = deepest(x);
            let player = if node % 2 == 0 { root_player } else { root_player.opponent() };
            player == Player::Zero
        })
        .collect();
    ExplicitMuller::new(full, f0).expect("alphabet within bounds")
}

/// A random total memory machine for `player`: arbitrary update table and
/// arbitrary moves among successors.
pub fn random_machine(
    rng: &mut impl Rng,
    arena: &Arena,
    player: Player,
    states: u32,
) -> MemoryStrategy {
    let names: Vec<String> = (0..states).map(|s| s.to_string()).collect();
    let initial = names[rng.gen_range(0..states) as usize].clone();
    let mut machine = MemoryStrategy::new(player, names.clone(), initial);
    for s in &names {
        for v in arena.vertices() {
            let t = &names[rng.gen_range(0..states) as usize];
            machine.set_update(s, arena.id(v), t);
        }
    }
    for v in arena.vertices() {
        if arena.owner(v) == player {
            for s in &names {
                let succs = arena.successors(v);
                let t = succs[rng.gen_range(0..succs.len())];
                machine.set_move(arena.id(v), s, arena.id(t));
            }
        }
    }
    machine
}

/// Wraps a winning positional strategy into a random `states`-state machine
/// that deviates to other region-internal successors where it can do so
/// without losing; each candidate is validated through the strategy
/// product. Falls back to a memory-dressed copy of the base strategy.
pub fn random_winning_wrapper(
    rng: &mut impl Rng,
    arena: &Arena,
    base: &PositionalStrategy,
    region: &BTreeSet<VertexId>,
    states: u32,
    attempts: u32,
) -> MemoryStrategy {
    let player = base.player;
    let names: Vec<String> = (0..states).map(|s| s.to_string()).collect();
    for _ in 0..attempts {
        let mut machine = MemoryStrategy::new(player, names.clone(), names[0].clone());
        for s in &names {
            for v in arena.vertices() {
                machine.set_update(s, arena.id(v), &names[rng.gen_range(0..states) as usize]);
            }
        }
        for &v in region {
            if arena.owner(v) != player {
                continue;
            }
            let inside: Vec<VertexId> = arena
                .successors(v)
                .iter()
                .copied()
                .filter(|t| region.contains(t))
                .collect();
            for s in &names {
                let target = if rng.gen_bool(0.3) && !inside.is_empty() {
                    inside[rng.gen_range(0..inside.len())]
                } else {
                    arena
                        .lookup(base.get(arena.id(v)).expect("base covers region"))
                        .expect("base strategy targets exist")
                };
                machine.set_move(arena.id(v), s, arena.id(target));
            }
        }
        if let Ok(product) = product_with_memory(arena, &machine, region) {
            if signatures(&product.arena, player).is_ok() {
                return machine;
            }
        }
    }
    let mut fallback = MemoryStrategy::new(player, names.clone(), names[0].clone());
    for s in &names {
        for v in arena.vertices() {
            fallback.set_update(s, arena.id(v), &names[rng.gen_range(0..states) as usize]);
        }
    }
    for (from, to) in base.moves() {
        for s in &names {
            fallback.set_move(from, s, to);
        }
    }
    fallback
}

/// Uniformly random sample sets within an alphabet.
pub fn random_subsets(rng: &mut impl Rng, alphabet: u32, count: usize) -> Vec<BTreeSet<u32>> {
    (0..count)
        .map(|_| (0..alphabet).filter(|_| rng.gen_bool(0.5)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_arena_is_total_and_deterministic() {
        let mut a = rng_from_seed(7);
        let mut b = rng_from_seed(7);
        let x = random_arena(&mut a, 9, 5, 3);
        let y = random_arena(&mut b, 9, 5, 3);
        assert_eq!(x.len(), y.len());
        for v in x.vertices() {
            assert!(!x.successors(v).is_empty());
            assert_eq!(x.successors(v), y.successors(v));
            assert_eq!(x.priority(v), y.priority(v));
        }
    }

    #[test]
    fn path_condition_has_path_tree() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let m = random_path_condition(&mut rng, 6);
            let tree = crate::zielonka::build_tree(&m).unwrap();
            assert!(tree.is_path(), "tree must be a path");
        }
    }
}
