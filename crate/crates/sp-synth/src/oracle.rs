//! Brute-force reference solvers used to cross-check the main procedures.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::arena::{GameArena, Lasso, Player};
use crate::objectives::{maximal_elements, ExtendedPayoff, SPGame};
use crate::sps_solver::{SolveStats, SpsAnswer};
use crate::verify::{check_solution, MooreStrategy, ProductGraph};
use crate::SizeLimit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("arena is not a tree with self-looping leaves: {0}")]
    NotATree(String),
    #[error("oracle gave up after {0} candidates")]
    BudgetExceeded(usize),
    #[error(transparent)]
    SizeLimit(#[from] SizeLimit),
}

/// Whether `outcomes`, the extended payoffs of all consistent plays, make the
/// strategy a solution.
pub fn outcomes_solve(outcomes: &BTreeSet<ExtendedPayoff>) -> bool {
    let pareto = maximal_elements(outcomes.iter().map(|e| e.payoff));
    outcomes.iter().all(|e| e.won || !pareto.contains(&e.payoff))
}

fn tree_check(arena: &GameArena) -> Result<(), OracleError> {
    let n = arena.n();
    let root = arena.initial();
    let preds = arena.predecessors();
    for v in 0..n {
        let succ = arena.successors(v);
        let leaf = succ.contains(&v);
        if leaf && succ.len() != 1 {
            return Err(OracleError::NotATree(format!("vertex {v} has a self loop and other successors")));
        }
        let others: Vec<usize> = preds[v].iter().copied().filter(|&u| u != v).collect();
        if v == root && !others.is_empty() {
            return Err(OracleError::NotATree(format!("root {v} has a predecessor")));
        }
        if v != root && others.len() != 1 {
            return Err(OracleError::NotATree(format!("vertex {v} has {} parents", others.len())));
        }
    }
    if arena.reachable().iter().any(|&r| !r) {
        return Err(OracleError::NotATree("some vertex is not below the root".into()));
    }
    Ok(())
}

type Alt = (BTreeSet<ExtendedPayoff>, Vec<(usize, usize)>);

struct TreeSearch<'a> {
    game: &'a SPGame,
    work: usize,
    budget: usize,
}

impl TreeSearch<'_> {
    /// Distinct outcome sets reachable below `v` with one choice list each.
    fn alternatives(&mut self, v: usize, path: &mut Vec<usize>) -> Result<Vec<Alt>, OracleError> {
        let arena = self.game.arena();
        path.push(v);
        let succ = arena.successors(v);
        let out = if succ == [v] {
            let mut occ = path.clone();
            occ.sort_unstable();
            occ.dedup();
            vec![(BTreeSet::from([self.game.payoff_from_sets(&occ, &[v])]), Vec::new())]
        } else if arena.owner(v) == Player::P0 {
            let mut acc: Vec<Alt> = Vec::new();
            for &s in succ {
                for (set, mut ch) in self.alternatives(s, path)? {
                    if !acc.iter().any(|(x, _)| *x == set) {
                        ch.push((v, s));
                        acc.push((set, ch));
                    }
                }
            }
            acc
        } else {
            let mut acc: Vec<Alt> = vec![(BTreeSet::new(), Vec::new())];
            for &s in succ {
                let sub = self.alternatives(s, path)?;
                let mut next: Vec<Alt> = Vec::new();
                for (a, ca) in &acc {
                    for (b, cb) in &sub {
                        self.work += 1;
                        if self.work > self.budget {
                            return Err(OracleError::BudgetExceeded(self.budget));
                        }
                        let set: BTreeSet<ExtendedPayoff> = a.union(b).copied().collect();
                        if !next.iter().any(|(x, _)| *x == set) {
                            next.push((set, ca.iter().chain(cb).copied().collect()));
                        }
                    }
                }
                acc = next;
            }
            acc
        };
        path.pop();
        Ok(out)
    }
}

/// Exact answer on tree arenas: memoryless strategies suffice, and each is
/// judged by the extended payoffs of the leaves it lets Player 1 reach.
pub fn solve_tree(game: &SPGame, budget: usize) -> Result<SpsAnswer, OracleError> {
    tree_check(game.arena())?;
    let mut s = TreeSearch { game, work: 0, budget };
    let alts = s.alternatives(game.arena().initial(), &mut Vec::new())?;
    let stats = SolveStats { antichains: alts.len(), ..SolveStats::default() };
    for (set, choices) in alts {
        if outcomes_solve(&set) {
            let mut choice = vec![None; game.arena().n()];
            for (v, w) in choices {
                choice[v] = Some(w);
            }
            let strategy = MooreStrategy::memoryless(game.arena(), &choice);
            return Ok(SpsAnswer {
                solvable: true,
                pareto_set: Some(maximal_elements(set.iter().map(|e| e.payoff))),
                strategy: Some(strategy),
                route: "tree-oracle",
                stats,
            });
        }
    }
    Ok(SpsAnswer { solvable: false, strategy: None, pareto_set: None, route: "tree-oracle", stats })
}

#[derive(Debug, Clone)]
pub struct BruteAnswer {
    pub answer: SpsAnswer,
    /// Every machine with at most `memory_cap` states was examined.
    pub complete: bool,
    pub examined: usize,
}

/// Partially filled Moore machine; entries are assigned in the order the
/// exploration from the initial vertex needs them.
#[derive(Clone)]
struct Partial {
    states: usize,
    update: Vec<Vec<Option<usize>>>,
    output: Vec<Vec<Option<usize>>>,
}

enum Need {
    Update(usize, usize),
    Output(usize, usize),
}

impl Partial {
    fn first_need(&self, arena: &GameArena) -> Option<Need> {
        let n = arena.n();
        let mut seen = vec![false; self.states.max(1) * n];
        let start = (0, arena.initial());
        seen[start.1] = true;
        let mut queue = VecDeque::from([start]);
        while let Some((m, v)) = queue.pop_front() {
            let succ = arena.successors(v);
            let moves: Vec<usize> = if arena.owner(v) == Player::P0 && succ.len() > 1 {
                match self.output[m][v] {
                    Some(w) => vec![w],
                    None => return Some(Need::Output(m, v)),
                }
            } else {
                succ.to_vec()
            };
            let Some(m2) = self.update[m][v] else {
                return Some(Need::Update(m, v));
            };
            for w in moves {
                if !seen[m2 * n + w] {
                    seen[m2 * n + w] = true;
                    queue.push_back((m2, w));
                }
            }
        }
        None
    }

    fn finish(&self, arena: &GameArena) -> MooreStrategy {
        let k = self.states;
        let update = (0..k).map(|m| self.update[m].iter().map(|u| u.unwrap_or(m)).collect()).collect();
        let output = (0..k)
            .map(|m| {
                (0..arena.n())
                    .map(|v| match arena.owner(v) {
                        Player::P0 => Some(self.output[m][v].unwrap_or(arena.successors(v)[0])),
                        Player::P1 => None,
                    })
                    .collect()
            })
            .collect();
        MooreStrategy { initial: 0, update, output }
    }
}

struct Brute<'a> {
    game: &'a SPGame,
    cap: usize,
    budget: usize,
    examined: usize,
    max_product: usize,
}

impl Brute<'_> {
    fn search(&mut self, p: &mut Partial) -> Result<Option<MooreStrategy>, OracleError> {
        let arena = self.game.arena();
        match p.first_need(arena) {
            None => {
                self.examined += 1;
                if self.examined > self.budget {
                    return Err(OracleError::BudgetExceeded(self.budget));
                }
                let s = p.finish(arena);
                Ok(check_solution(self.game, &s, self.max_product)?.accepted().then_some(s))
            }
            Some(Need::Output(m, v)) => {
                for &w in arena.successors(v) {
                    p.output[m][v] = Some(w);
                    if let Some(s) = self.search(p)? {
                        return Ok(Some(s));
                    }
                }
                p.output[m][v] = None;
                Ok(None)
            }
            Some(Need::Update(m, v)) => {
                // a fresh state gets the next free number, which keeps the
                // enumeration free of renamings
                let fresh = p.states < self.cap;
                for m2 in 0..p.states + usize::from(fresh) {
                    let grew = m2 == p.states;
                    if grew {
                        p.states += 1;
                        p.update.push(vec![None; arena.n()]);
                        p.output.push(vec![None; arena.n()]);
                    }
                    p.update[m][v] = Some(m2);
                    let r = self.search(p)?;
                    if grew {
                        p.states -= 1;
                        p.update.pop();
                        p.output.pop();
                    }
                    if let Some(s) = r {
                        return Ok(Some(s));
                    }
                }
                p.update[m][v] = None;
                Ok(None)
            }
        }
    }
}

/// Searches all Moore machines with at most `memory_cap` states. A negative
/// answer only covers that memory size, and only if `complete` is set.
pub fn solve_bruteforce(game: &SPGame, memory_cap: usize, budget: usize) -> BruteAnswer {
    let n = game.arena().n();
    let mut b = Brute { game, cap: memory_cap.max(1), budget, examined: 0, max_product: 1 << 20 };
    let mut p = Partial { states: 1, update: vec![vec![None; n]], output: vec![vec![None; n]] };
    let (found, complete) = match b.search(&mut p) {
        Ok(s) => (s, true),
        Err(_) => (None, false),
    };
    let solvable = found.is_some();
    let pareto_set = found.as_ref().map(|s| check_solution(game, s, 1 << 20).expect("checked before").pareto_set().to_vec());
    let states = found.as_ref().map_or(0, MooreStrategy::states);
    BruteAnswer {
        answer: SpsAnswer {
            solvable,
            strategy: found,
            pareto_set,
            route: "bruteforce",
            stats: SolveStats { strategy_states: states, ..SolveStats::default() },
        },
        complete: complete || solvable,
        examined: b.examined,
    }
}

/// Extended payoffs of the consistent plays `h·ℓ^ω` whose walk `h·ℓ` in the
/// strategy product has at most `max_len` nodes.
pub fn payoff_closure(game: &SPGame, s: &MooreStrategy, max_len: usize) -> Result<BTreeSet<ExtendedPayoff>, SizeLimit> {
    let g = ProductGraph::of_strategy(game.arena(), s, 1 << 20)?;
    let mut out = BTreeSet::new();
    if g.is_empty() || max_len == 0 {
        return Ok(out);
    }
    let proj = |w: &[usize]| w.iter().map(|&x| g.nodes[x].0).collect::<Vec<usize>>();
    let mut walk = vec![0usize];
    let mut idx = vec![0usize];
    while let Some(&i) = idx.last() {
        let top = *walk.last().unwrap();
        if i >= g.succ[top].len() {
            idx.pop();
            walk.pop();
            continue;
        }
        *idx.last_mut().unwrap() += 1;
        let next = g.succ[top][i];
        for j in (0..walk.len()).filter(|&j| walk[j] == next) {
            let l = Lasso::new(proj(&walk[..j]), proj(&walk[j..]));
            out.insert(game.payoff_from_sets(&l.occ(), &l.inf()));
        }
        if walk.len() < max_len {
            walk.push(next);
            idx.push(0);
        }
    }
    Ok(out)
}

/// Every memoryless choice function of `player`, over the vertices it owns.
fn memoryless_choices(arena: &GameArena, player: Player) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![(0..arena.n()).map(|v| arena.successors(v)[0]).collect()];
    for v in (0..arena.n()).filter(|&v| arena.owner(v) == player) {
        let mut next = Vec::new();
        for c in &out {
            for &w in arena.successors(v) {
                let mut c = c.clone();
                c[v] = w;
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Winners of the parity game (minimal priority seen infinitely often must
/// be even) by trying every pair of memoryless strategies.
pub fn parity_winners_by_enumeration(arena: &GameArena, priority: &[u32]) -> Vec<Player> {
    let s0 = memoryless_choices(arena, Player::P0);
    let s1 = memoryless_choices(arena, Player::P1);
    (0..arena.n())
        .map(|v| {
            let wins = s0.iter().any(|a| {
                s1.iter().all(|b| {
                    let next = |u: usize| if arena.owner(u) == Player::P0 { a[u] } else { b[u] };
                    let mut pos = vec![usize::MAX; arena.n()];
                    let mut path = Vec::new();
                    let mut u = v;
                    while pos[u] == usize::MAX {
                        pos[u] = path.len();
                        path.push(u);
                        u = next(u);
                    }
                    path[pos[u]..].iter().map(|&x| priority[x]).min().unwrap() % 2 == 0
                })
            });
            if wins {
                Player::P0
            } else {
                Player::P1
            }
        })
        .collect()
}
