//! Shared oracles for integration tests: a brute-force min-parity solver
//! over all positional strategy pairs, sound by positional determinacy.

use std::collections::BTreeSet;

use omega_games::{Arena, Player, VertexId};

/// All choice vectors: one successor index per vertex.
struct ChoiceIter {
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl ChoiceIter {
    fn new(radices: Vec<usize>) -> Self {
        let digits = vec![0; radices.len()];
        ChoiceIter { radices, digits, done: false }
    }
}

impl Iterator for ChoiceIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        self.done = true;
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// Min-parity winner of the unique play induced by a full choice vector.
fn play_winner(arena: &Arena, choice: &[usize], start: VertexId) -> Player {
    let mut position = vec![usize::MAX; arena.len()];
    let mut path = Vec::new();
    let mut v = start;
    loop {
        if position[v.0] != usize::MAX {
            let cycle = &path[position[v.0]..];
            let min = cycle
                .iter()
                .map(|&u| arena.priority(u))
                .min()
                .expect("cycle is non-empty");
            return Player::of_parity(min);
        }
        position[v.0] = path.len();
        path.push(v);
        v = arena.successors(v)[choice[v.0]];
    }
}

/// Winning regions of the min-parity game by enumerating every positional
/// strategy pair. Feasible for small, sparse arenas only.
pub fn brute_force_regions(arena: &Arena) -> (BTreeSet<VertexId>, BTreeSet<VertexId>) {
    let radices_for = |player: Player| -> Vec<usize> {
        arena
            .vertices()
            .map(|v| {
                if arena.owner(v) == player {
                    arena.successors(v).len()
                } else {
                    1
                }
            })
            .collect()
    };
    let zero_choices: Vec<Vec<usize>> = ChoiceIter::new(radices_for(Player::Zero)).collect();
    let one_choices: Vec<Vec<usize>> = ChoiceIter::new(radices_for(Player::One)).collect();
    let mut w0 = BTreeSet::new();
    for start in arena.vertices() {
        let zero_wins = zero_choices.iter().any(|c0| {
            one_choices.iter().all(|c1| {
                let mut joint = c0.clone();
                for v in arena.vertices() {
                    if arena.owner(v) == Player::One {
                        joint[v.0] = c1[v.0];
                    }
                }
                play_winner(arena, &joint, start) == Player::Zero
            })
        });
        if zero_wins {
            w0.insert(start);
        }
    }
    let w1 = arena.vertices().filter(|v| !w0.contains(v)).collect();
    (w0, w1)
}
