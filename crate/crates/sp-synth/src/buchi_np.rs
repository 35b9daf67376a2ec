//! Witness-based procedure for Büchi games.
//!
//! A solution is described by one lasso per Pareto-optimal payoff plus a
//! punishing strategy against deviations. The search for such witnesses is
//! exact: `Good(v, W)` holds when the payoffs of `W` can all be realized
//! from `v` by plays that branch only at Player-1 vertices and leave Player 1
//! nothing but punishable deviations.

use std::collections::HashMap;
use std::time::Instant;

use log::debug;
use serde::Serialize;
use thiserror::Error;

use crate::arena::{GameArena, Lasso, Player};
use crate::cpgame::antichains_over;
use crate::graph::Digraph;
use crate::objectives::{BoolFormula, ObjectiveError, ObjectiveSpec, Payoff, SPGame};
use crate::sps_solver::{won_payoffs, SolveStats, SpsAnswer};
use crate::verify::{check_solution, materialize, StrategyAutomaton};
use crate::zerosum::{solve_cobuchi_and_genbuchi, SolveResult};
use crate::{Caps, SolveError};

/// Witness lassos, `witnesses[k]` realizing `payoffs[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    pub witnesses: Vec<Lasso>,
    pub payoffs: Vec<Payoff>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Improper {
    #[error("witness {0} is not a play from the initial vertex")]
    NotAPlay(usize),
    #[error("witnesses {0} and {1} describe the same play")]
    SamePlay(usize, usize),
    #[error("witnesses {a} and {b} separate at vertex {vertex} of Player 0")]
    SplitAtPlayer0 { a: usize, b: usize, vertex: usize },
    #[error("payoffs of witnesses {0} and {1} are comparable")]
    Comparable(usize, usize),
    #[error("witness {0} is lost by Player 0")]
    Lost(usize),
    #[error("witness {k} has payoff {actual}, not {claimed}")]
    WrongPayoff { k: usize, claimed: Payoff, actual: Payoff },
    #[error("{0} witnesses but {1} payoffs")]
    Arity(usize, usize),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Upper bound on `|prefix| + |cycle|` of the witnesses built here.
pub fn lasso_size_bound(n: usize) -> usize {
    3 * n * n
}

/// Index of the first position where the two plays differ, if any.
fn first_difference(a: &Lasso, b: &Lasso) -> Option<usize> {
    let horizon = a.prefix.len().max(b.prefix.len()) + a.cycle.len() * b.cycle.len();
    (0..horizon).find(|&i| a.at(i) != b.at(i))
}

/// Checks that the witnesses start at the initial vertex, separate only at
/// Player-1 vertices, are won and carry the claimed, pairwise incomparable
/// payoffs.
pub fn check_proper(ws: &WitnessSet, game: &SPGame) -> Result<(), Improper> {
    let arena = game.arena();
    if ws.witnesses.len() != ws.payoffs.len() {
        return Err(Improper::Arity(ws.witnesses.len(), ws.payoffs.len()));
    }
    for (k, w) in ws.witnesses.iter().enumerate() {
        if w.check(arena, true).is_err() {
            return Err(Improper::NotAPlay(k));
        }
        let ext = game.payoff_of(w)?;
        if !ext.won {
            return Err(Improper::Lost(k));
        }
        if ext.payoff != ws.payoffs[k] {
            return Err(Improper::WrongPayoff { k, claimed: ws.payoffs[k], actual: ext.payoff });
        }
    }
    for a in 0..ws.witnesses.len() {
        for b in a + 1..ws.witnesses.len() {
            if ws.payoffs[a].comparable(ws.payoffs[b]) {
                return Err(Improper::Comparable(a, b));
            }
            let Some(d) = first_difference(&ws.witnesses[a], &ws.witnesses[b]) else {
                return Err(Improper::SamePlay(a, b));
            };
            // both start at the initial vertex, so d >= 1
            let vertex = ws.witnesses[a].at(d - 1);
            if arena.owner(vertex) == Player::P0 {
                return Err(Improper::SplitAtPlayer0 { a, b, vertex });
            }
        }
    }
    Ok(())
}

fn buchi_set(o: &ObjectiveSpec) -> &[usize] {
    match o {
        ObjectiveSpec::Buchi { set } => set,
        _ => panic!("witness search needs Büchi objectives"),
    }
}

/// Vertices from which Player 0 can force a play that is won or has a
/// payoff strictly below some element of `pareto`, with his strategy there.
/// Player 1 has `CoBuchi(B0) ∧ ⋀ Buchi(B_j ∪ ⋃_{p_i=0} B_i)` over the pairs
/// `p ∈ pareto`, `p_j = 1`.
pub fn punishing_region(game: &SPGame, pareto: &[Payoff]) -> SolveResult {
    let arena = game.arena();
    let b0 = buchi_set(game.objective0());
    let sets: Vec<&[usize]> = game.objectives1().iter().map(buchi_set).collect();
    let mut bs: Vec<Vec<usize>> = Vec::new();
    for p in pareto {
        let zeros: Vec<usize> = (0..sets.len()).filter(|&i| !p.get(i)).flat_map(|i| sets[i].iter().copied()).collect();
        for j in (0..sets.len()).filter(|&j| p.get(j)) {
            let mut b: Vec<usize> = sets[j].iter().chain(&zeros).copied().collect();
            b.sort_unstable();
            b.dedup();
            bs.push(b);
        }
    }
    if bs.is_empty() {
        bs.push((0..arena.n()).collect());
    }
    solve_cobuchi_and_genbuchi(arena, Player::P1, b0, &bs)
}

/// Deviations from the witnesses: successors of Player-1 vertices on a
/// witness that no witness with the same history takes.
pub fn deviation_vertices(ws: &WitnessSet, arena: &GameArena) -> Vec<usize> {
    let mut out = Vec::new();
    for w in &ws.witnesses {
        let horizon = w.len() + ws.witnesses.iter().map(Lasso::len).max().unwrap_or(0);
        for i in 0..horizon {
            let u = w.at(i);
            if arena.owner(u) != Player::P1 {
                continue;
            }
            let same: Vec<&Lasso> = ws.witnesses.iter().filter(|x| (0..=i).all(|j| x.at(j) == w.at(j))).collect();
            for &s in arena.successors(u) {
                if !same.iter().any(|x| x.at(i + 1) == s) {
                    out.push(s);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// First deviation vertex outside the punishing region, if any.
pub fn check_punishable(ws: &WitnessSet, game: &SPGame) -> Result<(), usize> {
    let pun = punishing_region(game, &ws.payoffs);
    match deviation_vertices(ws, game.arena()).into_iter().find(|&v| !pun.wins(Player::P0, v)) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
enum Decision {
    Move(usize),
    /// Successors of a Player-1 vertex with the nonempty parts they carry.
    Split(Vec<(usize, u64)>),
}

struct Single {
    /// Allowed edges restricted to vertices outside the forbidden sets.
    graph: Digraph,
    /// Component id per vertex, for components usable as a witness cycle.
    comp: Vec<Option<usize>>,
    comps: Vec<Vec<usize>>,
    reach: Vec<bool>,
}

struct Search<'a> {
    game: &'a SPGame,
    pareto: &'a [Payoff],
    pun: Vec<bool>,
    allowed: Digraph,
    singles: Vec<Single>,
    table: HashMap<u64, Vec<Option<Decision>>>,
    steps: usize,
    budget: usize,
}

impl<'a> Search<'a> {
    fn new(game: &'a SPGame, pareto: &'a [Payoff], pun: Vec<bool>, budget: usize) -> Self {
        let arena = game.arena();
        let n = arena.n();
        let allowed: Vec<Vec<usize>> = (0..n)
            .map(|u| {
                let succ = arena.successors(u);
                succ.iter()
                    .copied()
                    .filter(|&s| arena.owner(u) == Player::P0 || succ.iter().all(|&o| o == s || pun[o]))
                    .collect()
            })
            .collect();
        Search {
            game,
            pareto,
            pun,
            allowed: Digraph::new(allowed),
            singles: Vec::new(),
            table: HashMap::new(),
            steps: 0,
            budget,
        }
    }

    fn tick(&mut self, k: usize) -> Result<(), SolveError> {
        self.steps += k;
        if self.steps > self.budget {
            return Err(SolveError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn build_singles(&mut self) -> Result<(), SolveError> {
        let n = self.game.arena().n();
        let b0 = buchi_set(self.game.objective0()).to_vec();
        let sets: Vec<Vec<usize>> = self.game.objectives1().iter().map(|o| buchi_set(o).to_vec()).collect();
        for &p in self.pareto {
            self.tick(n + self.allowed.succ.iter().map(Vec::len).sum::<usize>())?;
            let mut keep = vec![true; n];
            for i in (0..sets.len()).filter(|&i| !p.get(i)) {
                for &v in &sets[i] {
                    keep[v] = false;
                }
            }
            let restricted: Vec<Vec<usize>> = (0..n)
                .map(|u| if keep[u] { self.allowed.succ[u].iter().copied().filter(|&s| keep[s]).collect() } else { Vec::new() })
                .collect();
            let graph = Digraph::new(restricted);
            let mut comp = vec![None; n];
            let mut comps = Vec::new();
            for c in graph.nontrivial_sccs_within(&keep) {
                let meets = |s: &[usize]| c.iter().any(|v| s.contains(v));
                if meets(&b0) && (0..sets.len()).filter(|&j| p.get(j)).all(|j| meets(&sets[j])) {
                    for &v in &c {
                        comp[v] = Some(comps.len());
                    }
                    comps.push(c);
                }
            }
            // backward closure over allowed edges
            let mut reach: Vec<bool> = comp.iter().map(Option::is_some).collect();
            let mut changed = true;
            while changed {
                changed = false;
                for u in 0..n {
                    if !reach[u] && self.allowed.succ[u].iter().any(|&s| reach[s]) {
                        reach[u] = true;
                        changed = true;
                    }
                }
            }
            self.singles.push(Single { graph, comp, comps, reach });
        }
        Ok(())
    }

    fn good(&self, v: usize, w: u64) -> bool {
        if w.count_ones() == 1 {
            self.singles[w.trailing_zeros() as usize].reach[v]
        } else {
            self.table.get(&w).is_some_and(|t| t[v].is_some())
        }
    }

    /// Assigns the payoffs `rest` to the successors `succ[i..]`.
    fn assign(&mut self, succ: &[usize], i: usize, rest: u64, memo: &mut HashMap<(usize, u64), bool>) -> Result<bool, SolveError> {
        if i == succ.len() {
            return Ok(rest == 0);
        }
        if let Some(&b) = memo.get(&(i, rest)) {
            return Ok(b);
        }
        let s = succ[i];
        let mut ok = self.pun[s] && self.assign(succ, i + 1, rest, memo)?;
        let mut part = rest;
        while !ok && part != 0 {
            self.tick(1)?;
            if self.good(s, part) {
                ok = self.assign(succ, i + 1, rest & !part, memo)?;
            }
            part = (part - 1) & rest;
        }
        memo.insert((i, rest), ok);
        Ok(ok)
    }

    /// Parts of a successful assignment, read back from the memo.
    fn split(&self, succ: &[usize], w: u64, memo: &HashMap<(usize, u64), bool>) -> Vec<(usize, u64)> {
        let done = |i: usize, r: u64| if i == succ.len() { r == 0 } else { memo.get(&(i, r)).copied() == Some(true) };
        let mut out = Vec::new();
        let mut rest = w;
        for (i, &s) in succ.iter().enumerate() {
            if self.pun[s] && done(i + 1, rest) {
                continue;
            }
            let mut part = rest;
            while part != 0 {
                if self.good(s, part) && done(i + 1, rest & !part) {
                    break;
                }
                part = (part - 1) & rest;
            }
            debug_assert!(part != 0);
            out.push((s, part));
            rest &= !part;
        }
        out
    }

    /// Least fixpoint of `Good(·, w)` once all proper subsets are known.
    fn solve_mask(&mut self, w: u64) -> Result<(), SolveError> {
        let arena = self.game.arena();
        let n = arena.n();
        self.table.insert(w, vec![None; n]);
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if self.table[&w][v].is_some() {
                    continue;
                }
                let succ = arena.successors(v).to_vec();
                self.tick(succ.len())?;
                let d = if arena.owner(v) == Player::P0 {
                    succ.iter().copied().find(|&s| self.good(s, w)).map(Decision::Move)
                } else {
                    let mut memo = HashMap::new();
                    if self.assign(&succ, 0, w, &mut memo)? {
                        Some(Decision::Split(self.split(&succ, w, &memo)))
                    } else {
                        None
                    }
                };
                if d.is_some() {
                    self.table.get_mut(&w).unwrap()[v] = d;
                    changed = true;
                }
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<bool, SolveError> {
        self.build_singles()?;
        let m = self.pareto.len();
        let full = (1u64 << m) - 1;
        let mut masks: Vec<u64> = (1..=full).filter(|w| w.count_ones() >= 2).collect();
        masks.sort_by_key(|w| w.count_ones());
        for w in masks {
            self.solve_mask(w)?;
        }
        Ok(self.good(self.game.arena().initial(), full))
    }

    fn single_lasso(&self, k: usize, v: usize) -> (Vec<usize>, Vec<usize>) {
        let s = &self.singles[k];
        let path = self.allowed.path(v, &|x| s.comp[x].is_some(), &|_| true).expect("a witness cycle is reachable");
        let e = *path.last().unwrap();
        let c = &s.comps[s.comp[e].unwrap()];
        let mut within = vec![false; s.comp.len()];
        for &x in c {
            within[x] = true;
        }
        let p = self.pareto[k];
        let mut targets: Vec<usize> = Vec::new();
        let b0 = buchi_set(self.game.objective0());
        let mut pick = |set: &[usize]| {
            if !set.iter().any(|x| targets.contains(x)) {
                targets.push(*c.iter().find(|x| set.contains(x)).unwrap());
            }
        };
        pick(b0);
        for (j, o) in self.game.objectives1().iter().enumerate() {
            if p.get(j) {
                pick(buchi_set(o));
            }
        }
        let cycle = s.graph.tour(e, &targets, &within);
        (path[..path.len() - 1].to_vec(), cycle)
    }

    fn expand(&self, v: usize, w: u64, hist: &mut Vec<usize>, out: &mut [Option<Lasso>]) {
        hist.push(v);
        if w.count_ones() == 1 {
            let k = w.trailing_zeros() as usize;
            let (path, cycle) = self.single_lasso(k, v);
            let mut prefix = hist[..hist.len() - 1].to_vec();
            prefix.extend(path);
            out[k] = Some(Lasso::new(prefix, cycle));
        } else {
            match self.table[&w][v].as_ref().expect("expanding a good state") {
                Decision::Move(s) => self.expand(*s, w, hist, out),
                Decision::Split(parts) => {
                    for &(s, part) in parts {
                        self.expand(s, part, hist, out);
                    }
                }
            }
        }
        hist.pop();
    }

    fn witnesses(&self) -> WitnessSet {
        let mut out = vec![None; self.pareto.len()];
        let v0 = self.game.arena().initial();
        if self.pareto.len() == 1 {
            let (prefix, cycle) = self.single_lasso(0, v0);
            out[0] = Some(Lasso::new(prefix, cycle));
        } else {
            self.expand(v0, (1u64 << self.pareto.len()) - 1, &mut Vec::new(), &mut out);
        }
        WitnessSet { witnesses: out.into_iter().map(Option::unwrap).collect(), payoffs: self.pareto.to_vec() }
    }
}

/// Proper, punishable witnesses for `pareto` if there are any, together with
/// the punishing region.
pub fn find_witnesses(game: &SPGame, pareto: &[Payoff], budget: usize) -> Result<Option<(WitnessSet, SolveResult)>, SolveError> {
    let pun = punishing_region(game, pareto);
    let region: Vec<bool> = (0..game.arena().n()).map(|v| pun.wins(Player::P0, v)).collect();
    let mut s = Search::new(game, pareto, region, budget);
    if !s.run()? {
        return Ok(None);
    }
    let ws = s.witnesses();
    Ok(Some((ws, pun)))
}

/// Player 0 follows the witnesses consistent with the history and punishes
/// once the history leaves all of them.
pub struct WitnessStrategy<'a> {
    arena: &'a GameArena,
    ws: &'a WitnessSet,
    punish: &'a SolveResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WitnessMem {
    Start,
    /// Witnesses agreeing with the history, whose last vertex is at `pos`.
    Follow { w: u64, pos: usize },
    Punish,
}

impl<'a> WitnessStrategy<'a> {
    pub fn new(arena: &'a GameArena, ws: &'a WitnessSet, punish: &'a SolveResult) -> Self {
        WitnessStrategy { arena, ws, punish }
    }

    fn current(&self, m: &WitnessMem, v: usize) -> WitnessMem {
        let (w, pos) = match *m {
            WitnessMem::Punish => return WitnessMem::Punish,
            WitnessMem::Start => ((1u64 << self.ws.witnesses.len()) - 1, 0),
            WitnessMem::Follow { w, pos } => (w, pos + 1),
        };
        let keep = (0..self.ws.witnesses.len())
            .filter(|&k| w >> k & 1 == 1 && self.ws.witnesses[k].at(pos) == v)
            .fold(0u64, |acc, k| acc | 1 << k);
        match keep.count_ones() {
            0 => WitnessMem::Punish,
            1 => {
                let l = &self.ws.witnesses[keep.trailing_zeros() as usize];
                let p = l.prefix.len();
                let pos = if pos >= p { p + (pos - p) % l.cycle.len() } else { pos };
                WitnessMem::Follow { w: keep, pos }
            }
            _ => WitnessMem::Follow { w: keep, pos },
        }
    }
}

impl StrategyAutomaton for WitnessStrategy<'_> {
    type Mem = WitnessMem;

    fn initial(&self) -> WitnessMem {
        WitnessMem::Start
    }

    fn output(&self, m: &WitnessMem, v: usize) -> usize {
        match self.current(m, v) {
            WitnessMem::Follow { w, pos } => self.ws.witnesses[w.trailing_zeros() as usize].at(pos + 1),
            _ => self.punish.choice(Player::P0, v).unwrap_or(self.arena.successors(v)[0]),
        }
    }

    fn update(&self, m: &WitnessMem, v: usize) -> WitnessMem {
        self.current(m, v)
    }
}

/// The punishing objective as a Boolean Büchi formula: variable 1 stands
/// for `B0` and variable `j+1` for the set of objective `j`.
pub fn punishment_formula(game: &SPGame, pareto: &[Payoff]) -> (BoolFormula, Vec<Vec<usize>>) {
    let mut sets = vec![buchi_set(game.objective0()).to_vec()];
    sets.extend(game.objectives1().iter().map(|o| buchi_set(o).to_vec()));
    let t = game.t();
    let mut alts = vec![BoolFormula::var(1)];
    for p in pareto {
        for j in (0..t).filter(|&j| p.get(j)) {
            let mut conj = vec![BoolFormula::not(BoolFormula::var(j + 2))];
            conj.extend((0..t).filter(|&i| !p.get(i)).map(|i| BoolFormula::not(BoolFormula::var(i + 2))));
            alts.push(BoolFormula::and(conj));
        }
    }
    (BoolFormula::or(alts), sets)
}

/// Witnesses and punishing strategy of the first candidate Pareto set, in
/// the order of [`antichains_over`], that admits them.
pub fn solve_buchi_certificate(game: &SPGame, caps: &Caps) -> Result<(Option<(WitnessSet, SolveResult)>, SolveStats), SolveError> {
    if game.kind() != crate::objectives::ObjectiveKind::Buchi {
        return Err(SolveError::Unsupported(format!("witness search needs Büchi objectives, got {:?}", game.kind())));
    }
    if game.t() > caps.max_t {
        return Err(SolveError::CapExceeded { what: "number of objectives t", value: game.t(), cap: caps.max_t });
    }
    let n = game.arena().n();
    let cands = won_payoffs(game);
    let chains: Vec<Vec<Payoff>> = antichains_over(&cands).into_iter().filter(|p| p.len() <= n).collect();
    let stats = SolveStats { normalized_vertices: n, candidates: cands.len(), antichains: chains.len(), ..SolveStats::default() };
    let mut budget = caps.search_budget;
    for pareto in &chains {
        let pun = punishing_region(game, pareto);
        let region = (0..n).map(|v| pun.wins(Player::P0, v)).collect();
        let mut s = Search::new(game, pareto, region, budget);
        let found = s.run().map_err(|_| SolveError::BudgetExceeded(caps.search_budget))?;
        budget -= s.steps.min(budget);
        debug!("witness search for {pareto:?}: {found} after {} steps", s.steps);
        if found {
            return Ok((Some((s.witnesses(), pun)), stats));
        }
    }
    Ok((None, stats))
}

/// Decides the synthesis problem for a Büchi game by searching witnesses for
/// each candidate Pareto set with at most `|V|` elements.
pub fn solve_buchi_sp(game: &SPGame, caps: &Caps) -> Result<SpsAnswer, SolveError> {
    let start = Instant::now();
    let (cert, mut stats) = solve_buchi_certificate(game, caps)?;
    if let Some((ws, pun)) = cert {
        debug_assert_eq!(check_proper(&ws, game), Ok(()));
        debug_assert_eq!(check_punishable(&ws, game), Ok(()));
        let pareto = &ws.payoffs;
        let a = WitnessStrategy::new(game.arena(), &ws, &pun);
        let strategy = materialize(&a, game.arena(), caps.max_product)?;
        let verdict = check_solution(game, &strategy, caps.max_product)?;
        assert!(verdict.accepted(), "witness strategy for {pareto:?} is not a solution");
        stats.strategy_states = strategy.states();
        stats.millis = start.elapsed().as_millis();
        return Ok(SpsAnswer {
            solvable: true,
            pareto_set: Some(verdict.pareto_set().to_vec()),
            strategy: Some(strategy),
            route: "buchi-np",
            stats,
        });
    }
    stats.millis = start.elapsed().as_millis();
    Ok(SpsAnswer { solvable: false, strategy: None, pareto_set: None, route: "buchi-np", stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buchi(s: &[usize]) -> ObjectiveSpec {
        ObjectiveSpec::Buchi { set: s.to_vec() }
    }

    #[test]
    fn split_at_player1() {
        use Player::{P0, P1};
        // v0 (P1) -> v1 | v2, both self loops
        let arena = GameArena::new(vec![P1, P0, P0], vec![vec![1, 2], vec![1], vec![2]], 0).unwrap();
        let g = SPGame::new(arena, buchi(&[1, 2]), vec![buchi(&[1]), buchi(&[2])]).unwrap();
        let ans = solve_buchi_sp(&g, &Caps::default()).unwrap();
        assert!(ans.solvable);
        let p = Payoff::from_bools;
        assert_eq!(ans.pareto_set.unwrap(), vec![p(&[true, false]), p(&[false, true])]);
        let pareto = vec![p(&[true, false]), p(&[false, true])];
        let (ws, _) = find_witnesses(&g, &pareto, 1000).unwrap().unwrap();
        assert_eq!(check_proper(&ws, &g), Ok(()));
        assert_eq!(check_punishable(&ws, &g), Ok(()));
        assert!(ws.witnesses.iter().all(|l| l.len() <= lasso_size_bound(3)));
    }

    #[test]
    fn unpunishable_deviation() {
        use Player::{P0, P1};
        // Player 1 can escape to v2, which is lost with payoff 1
        let arena = GameArena::new(vec![P1, P0, P0], vec![vec![1, 2], vec![1], vec![2]], 0).unwrap();
        let g = SPGame::new(arena, buchi(&[1]), vec![buchi(&[2])]).unwrap();
        let ans = solve_buchi_sp(&g, &Caps::default()).unwrap();
        assert!(!ans.solvable);
    }
}
