use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sp_synth::arena::{enumerate_simple_lassos, normalize_two_successors, simple_lassos_from, GameArena, Lasso, Player};
use sp_synth::cpgame::{build_cp_reach_safe, enumerate_antichains, CpNode};
use sp_synth::objectives::{
    encode_boolean_buchi, eval_lasso, is_antichain, parity_to_rabin, parity_to_streett, ObjectiveKind, ObjectiveSpec, Payoff,
};
use sp_synth::oracle::payoff_closure;
use sp_synth::random::{random_arena, random_game, random_objective, random_subset};
use sp_synth::sar::build_sar_product;
use sp_synth::verify::{pareto_set, MooreStrategy};
use sp_synth::zerosum::{attractor, solve_boolean_buchi, solve_cobuchi_and_genbuchi, solve_parity};
use sp_synth::objectives::{maximal_elements, BoolFormula};

const CAP: usize = 1 << 20;

fn lassos(arena: &GameArena, max_len: usize) -> Vec<Lasso> {
    (0..arena.n()).flat_map(|v| simple_lassos_from(v, max_len, |u| arena.successors(u).to_vec())).collect()
}

fn with_prefix(rng: &mut ChaCha8Rng, arena: &GameArena, l: &Lasso) -> Option<Lasso> {
    // some predecessor chain into the lasso's first vertex
    let preds = arena.predecessors();
    let mut prefix = Vec::new();
    let mut v = l.first();
    for _ in 0..rng.gen_range(1..=3) {
        let ps = &preds[v];
        if ps.is_empty() {
            break;
        }
        v = ps[rng.gen_range(0..ps.len())];
        prefix.insert(0, v);
    }
    if prefix.is_empty() {
        return None;
    }
    prefix.extend(&l.prefix);
    Some(Lasso::new(prefix, l.cycle.clone()))
}

/// Play of two memoryless strategies from `v`, as a lasso.
fn play(arena: &GameArena, s0: &[usize], s1: &[usize], v: usize) -> Lasso {
    let mut seen = vec![usize::MAX; arena.n()];
    let mut walk = Vec::new();
    let mut u = v;
    while seen[u] == usize::MAX {
        seen[u] = walk.len();
        walk.push(u);
        u = match arena.owner(u) {
            Player::P0 => s0[u],
            Player::P1 => s1[u],
        };
    }
    let cycle = walk.split_off(seen[u]);
    Lasso::new(walk, cycle)
}

fn all_memoryless(arena: &GameArena, p: Player) -> Vec<Vec<usize>> {
    let mut out = vec![(0..arena.n()).map(|v| arena.successors(v)[0]).collect::<Vec<_>>()];
    for v in (0..arena.n()).filter(|&v| arena.owner(v) == p) {
        out = out
            .into_iter()
            .flat_map(|s| {
                arena.successors(v).iter().map(move |&w| {
                    let mut t = s.clone();
                    t[v] = w;
                    t
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_is_idempotent_and_small(seed: u64, n in 1usize..=6, out in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arena(&mut rng, n, out);
        let (once, map) = normalize_two_successors(&a);
        let (twice, map2) = normalize_two_successors(&once);
        prop_assert_eq!(&twice, &once);
        prop_assert_eq!(map2.inserted_count(), 0);
        prop_assert!(once.n() <= (a.n() * a.n()).max(a.n()));
        // original lassos lift uniquely and project back
        for l in enumerate_simple_lassos(&a, a.n()) {
            let up = map.lift_lasso(&l);
            prop_assert!(up.check(&once, true).is_ok());
            prop_assert!(map.project_lasso(&up).same_play(&l));
        }
        for l in enumerate_simple_lassos(&once, once.n()) {
            prop_assert!(l.check(&once, true).is_ok());
            prop_assert!(map.project_lasso(&l).check(&a, true).is_ok());
        }
    }

    #[test]
    fn encodings_agree_on_lassos(seed: u64, n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arena(&mut rng, n, 3);
        let prio: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let mut objs = vec![
            random_objective(&mut rng, ObjectiveKind::Buchi, n, 0),
            random_objective(&mut rng, ObjectiveKind::CoBuchi, n, 0),
            ObjectiveSpec::Parity { priority: prio.clone() },
            parity_to_rabin(&prio),
            parity_to_streett(&prio),
        ];
        let family: Vec<Vec<u32>> = (0..3).map(|_| (0..=4).filter(|_| rng.gen_bool(0.5)).collect()).collect();
        objs.push(ObjectiveSpec::Muller { priority: prio.clone(), family });
        let parity = ObjectiveSpec::Parity { priority: prio };
        let ls = lassos(&a, 10);
        for o in &objs {
            let enc = encode_boolean_buchi(o).unwrap();
            for l in &ls {
                let v = eval_lasso(o, l).unwrap();
                prop_assert_eq!(v, eval_lasso(&enc, l).unwrap(), "{:?} on {:?}", o, l);
                // prefix independence
                if let Some(longer) = with_prefix(&mut rng, &a, l) {
                    prop_assert_eq!(v, eval_lasso(o, &longer).unwrap());
                }
            }
        }
        // Rabin and Streett chains express the parity condition itself
        for l in &ls {
            let want = eval_lasso(&parity, l).unwrap();
            prop_assert_eq!(want, eval_lasso(&objs[3], l).unwrap());
            prop_assert_eq!(want, eval_lasso(&objs[4], l).unwrap());
        }
    }

    #[test]
    fn sar_product_keeps_out_degree(seed: u64, n in 1usize..=6, m in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arena(&mut rng, n, 3);
        let sets: Vec<Vec<usize>> = (0..m).map(|_| random_subset(&mut rng, n, 0.4)).collect();
        let p = build_sar_product(&a, &sets, CAP).unwrap();
        for x in 0..p.len() {
            prop_assert_eq!(p.arena.successors(x).len(), a.successors(p.base[x]).len());
            prop_assert!(p.state(x).is_valid());
        }
    }

    #[test]
    fn attractor_is_monotone_and_idempotent(seed: u64, n in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arena(&mut rng, n, 3);
        let t = random_subset(&mut rng, n, 0.3);
        for p in [Player::P0, Player::P1] {
            let (attr, _) = attractor(&a, p, &t);
            prop_assert!(t.iter().all(|v| attr.contains(v)));
            prop_assert_eq!(attractor(&a, p, &attr).0, attr);
        }
    }

    #[test]
    fn parity_strategies_win(seed: u64, n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arena(&mut rng, n, 2);
        let prio: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let r = solve_parity(&a, &prio);
        let obj = ObjectiveSpec::Parity { priority: prio };
        let s0: Vec<usize> = (0..n).map(|v| r.strategy0()[v].unwrap_or(a.successors(v)[0])).collect();
        let s1: Vec<usize> = (0..n).map(|v| r.strategy1()[v].unwrap_or(a.successors(v)[0])).collect();
        for v in 0..n {
            let mine = r.winner[v];
            for other in all_memoryless(&a, mine.opponent()) {
                let l = match mine {
                    Player::P0 => play(&a, &s0, &other, v),
                    Player::P1 => play(&a, &other, &s1, v),
                };
                prop_assert_eq!(eval_lasso(&obj, &l).unwrap(), mine == Player::P0, "from {}", v);
            }
        }
    }

    #[test]
    fn genbuchi_matches_its_encoding(seed: u64, n in 1usize..=6, k in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_arena(&mut rng, n, 3);
        let avoid = random_subset(&mut rng, n, 0.2);
        let bs: Vec<Vec<usize>> = (0..k).map(|_| random_subset(&mut rng, n, 0.5)).collect();
        let direct = solve_cobuchi_and_genbuchi(&a, Player::P0, &avoid, &bs);
        let mut sets = vec![avoid];
        sets.extend(bs);
        let mut conj = vec![BoolFormula::not(BoolFormula::var(1))];
        conj.extend((0..k).map(|i| BoolFormula::var(i + 2)));
        let enc = solve_boolean_buchi(&a, &BoolFormula::and(conj), &sets, CAP).unwrap();
        prop_assert_eq!(direct.winner, enc.result.winner);
    }

    #[test]
    fn cp_slices_split_w(seed: u64, n in 2usize..=5, t in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, ObjectiveKind::Reach, n, t);
        let (norm, _) = g.normalized();
        let chains = enumerate_antichains(t, 1000).unwrap();
        let pareto = &chains[rng.gen_range(0..chains.len())];
        let s = build_cp_reach_safe(&norm, pareto, CAP).unwrap();
        for x in 0..s.len() {
            for &y in s.arena.successors(x) {
                match (s.nodes[x], s.nodes[y]) {
                    (CpNode::Prover { w, .. }, CpNode::Challenger { wl, wr, .. }) => {
                        prop_assert_eq!(wl & wr, 0);
                        prop_assert_eq!(wl | wr, w);
                    }
                    (CpNode::Challenger { wl, wr, .. }, CpNode::Prover { w, .. }) => {
                        prop_assert!(w == wl || w == wr);
                    }
                    // Prover moves alone at Player-0 vertices
                    (CpNode::Prover { v, w, .. }, CpNode::Prover { w: w2, .. }) => {
                        prop_assert_eq!(norm.arena().owner(v), Player::P0);
                        prop_assert_eq!(w, w2);
                    }
                    (a, b) => prop_assert!(false, "{:?} -> {:?}", a, b),
                }
            }
        }
    }

    #[test]
    fn closure_maximum_is_the_pareto_set(seed: u64, n in 2usize..=5, t in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = [ObjectiveKind::Reach, ObjectiveKind::Safe, ObjectiveKind::Buchi][rng.gen_range(0..3)];
        let g = random_game(&mut rng, kind, n, t);
        let a = g.arena();
        let choice: Vec<Option<usize>> = (0..n).map(|v| {
            let s = a.successors(v);
            Some(s[rng.gen_range(0..s.len())])
        }).collect();
        let s = MooreStrategy::memoryless(a, &choice);
        let ps = pareto_set(&g, &s, CAP).unwrap();
        prop_assert!(!ps.is_empty() && is_antichain(&ps));
        let closure = payoff_closure(&g, &s, 2 * n).unwrap();
        prop_assert_eq!(maximal_elements(closure.iter().map(|e| e.payoff)), ps);
    }
}

#[test]
fn payoff_order_is_partial() {
    for t in 0..=4 {
        let all: Vec<Payoff> = Payoff::all(t).collect();
        for &a in &all {
            assert!(a.leq(a) && !a.lt(a));
            for &b in &all {
                if a.leq(b) && b.leq(a) {
                    assert_eq!(a, b);
                }
                assert_eq!(a.lt(b), a.leq(b) && a != b);
                for &c in &all {
                    if a.leq(b) && b.leq(c) {
                        assert!(a.leq(c));
                    }
                }
            }
        }
    }
}

#[test]
fn antichain_check_is_pairwise() {
    let all: Vec<Payoff> = Payoff::all(3).collect();
    for mask in 0u32..(1 << all.len()) {
        let set: Vec<Payoff> = (0..all.len()).filter(|&i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let pairwise = set.iter().all(|&a| set.iter().all(|&b| a == b || !a.comparable(b)));
        assert_eq!(is_antichain(&set), pairwise);
    }
}
