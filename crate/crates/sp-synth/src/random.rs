//! Seeded generators of small games for cross-checking solvers.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arena::{GameArena, Player};
use crate::objectives::{ObjectiveKind, ObjectiveSpec, SPGame};

pub fn random_player<R: Rng>(rng: &mut R) -> Player {
    if rng.gen_bool(0.5) {
        Player::P0
    } else {
        Player::P1
    }
}

/// Arena on `n` vertices, each with 1 to `max_out` distinct successors.
pub fn random_arena<R: Rng>(rng: &mut R, n: usize, max_out: usize) -> GameArena {
    let all: Vec<usize> = (0..n).collect();
    let owner = (0..n).map(|_| random_player(rng)).collect();
    let succ = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_out.min(n));
            let mut s: Vec<usize> = all.choose_multiple(rng, d).copied().collect();
            s.sort_unstable();
            s
        })
        .collect();
    GameArena::new(owner, succ, 0).expect("random arena is well formed")
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

/// Random objective of the given kind; parity priorities stay in `0..=max_priority`.
pub fn random_objective<R: Rng>(rng: &mut R, kind: ObjectiveKind, n: usize, max_priority: u32) -> ObjectiveSpec {
    match kind {
        ObjectiveKind::Reach => ObjectiveSpec::Reach { target: random_subset(rng, n, 0.3) },
        ObjectiveKind::Safe => ObjectiveSpec::Safe { safe: random_subset(rng, n, 0.7) },
        ObjectiveKind::Buchi => ObjectiveSpec::Buchi { set: random_subset(rng, n, 0.4) },
        ObjectiveKind::CoBuchi => ObjectiveSpec::CoBuchi { set: random_subset(rng, n, 0.3) },
        ObjectiveKind::Parity => ObjectiveSpec::Parity { priority: (0..n).map(|_| rng.gen_range(0..=max_priority)).collect() },
        _ => panic!("no random generator for {kind:?}"),
    }
}

pub fn random_game<R: Rng>(rng: &mut R, kind: ObjectiveKind, n: usize, t: usize) -> SPGame {
    let arena = random_arena(rng, n, 3);
    let o0 = random_objective(rng, kind, n, 4);
    let os = (0..t).map(|_| random_objective(rng, kind, n, 4)).collect();
    SPGame::new(arena, o0, os).expect("random game is well formed")
}

/// Reachability game on a random tree with at most `max_vertices` vertices;
/// leaves carry self loops.
pub fn random_tree_game<R: Rng>(rng: &mut R, max_vertices: usize, t: usize) -> SPGame {
    let mut owner = vec![random_player(rng)];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0];
    while let Some(v) = frontier.pop() {
        let room = max_vertices - owner.len();
        let kids = if room == 0 || (v > 0 && rng.gen_bool(0.35)) { 0 } else { rng.gen_range(1..=room.min(3)) };
        if kids == 0 {
            succ[v].push(v);
            continue;
        }
        for _ in 0..kids {
            let c = owner.len();
            owner.push(random_player(rng));
            succ.push(Vec::new());
            succ[v].push(c);
            frontier.insert(0, c);
        }
    }
    let n = owner.len();
    let arena = GameArena::new(owner, succ, 0).expect("random tree is well formed");
    let o0 = random_objective(rng, ObjectiveKind::Reach, n, 0);
    let os = (0..t).map(|_| random_objective(rng, ObjectiveKind::Reach, n, 0)).collect();
    SPGame::new(arena, o0, os).expect("random tree game is well formed")
}
