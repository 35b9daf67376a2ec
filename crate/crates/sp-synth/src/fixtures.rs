//! Small hand-built games used by tests, examples and the CLI.

use std::collections::BTreeMap;

use crate::arena::{GameArena, Player};
use crate::objectives::{ObjectiveSpec, SPGame};
use crate::verify::MooreStrategy;

/// Reachability game with three Player-1 objectives where every solution of
/// Player 0 needs memory: from `v3` he must first go to `v5` and on the
/// second visit to `v7`.
pub fn memory_game() -> SPGame {
    use Player::{P0, P1};
    let owner = vec![P1, P0, P1, P0, P0, P1, P0, P0];
    let succ = vec![vec![1, 2], vec![1], vec![3, 4], vec![5, 7], vec![4], vec![3, 6], vec![6], vec![7]];
    let labels: BTreeMap<String, usize> = (0..8).map(|i| (format!("v{i}"), i)).collect();
    let arena = GameArena::new(owner, succ, 0).unwrap().with_labels(labels).unwrap();
    let reach = |t: &[usize]| ObjectiveSpec::Reach { target: t.to_vec() };
    SPGame::new(arena, reach(&[6, 7]), vec![reach(&[4, 7]), reach(&[3]), reach(&[1, 6])]).unwrap()
}

/// Two-state solution of [`memory_game`].
pub fn memory_game_solution() -> MooreStrategy {
    let g = memory_game();
    let a = g.arena();
    let mut s = MooreStrategy::memoryless(a, &[]);
    s.update = vec![vec![0, 0, 0, 1, 0, 0, 0, 0], vec![1; 8]];
    s.output = vec![s.output[0].clone(), s.output[0].clone()];
    s.output[0][3] = Some(5);
    s.output[1][3] = Some(7);
    s
}

/// Memoryless strategy of [`memory_game`] that always moves from `v3` to `to`.
pub fn memory_game_memoryless(to: usize) -> MooreStrategy {
    let g = memory_game();
    let mut choice = vec![None; 8];
    choice[3] = Some(to);
    MooreStrategy::memoryless(g.arena(), &choice)
}
