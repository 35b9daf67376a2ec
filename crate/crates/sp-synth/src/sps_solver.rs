//! Decision procedure for the synthesis problem and strategy extraction.

use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arena::{GameArena, Player, VertexMapping};
use crate::cpgame::{antichains_over, build_slice, per_slice_bound, CpNode, CpSlice};
use crate::objectives::{ObjectiveKind, Payoff, SPGame};
use crate::verify::{materialize, realizable_payoffs, MooreStrategy, ProductGraph, StrategyAutomaton};
use crate::zerosum::SolveResult;
use crate::{Caps, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Witness search for Büchi games, Challenger-Prover otherwise.
    #[default]
    Auto,
    Cp,
    BuchiNp,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub caps: Caps,
    pub route: Route,
    /// Worker threads for slice solving; 0 or 1 is sequential.
    pub jobs: usize,
    /// Solve every slice instead of stopping at the first win.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceStat {
    pub pareto: Vec<Payoff>,
    pub nodes: usize,
    pub prover_nodes: usize,
    /// `|V|·2^(t+1)·4^|P|` over the normalized arena.
    pub bound: u128,
    pub won: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub normalized_vertices: usize,
    pub candidates: usize,
    pub antichains: usize,
    pub slices: Vec<SliceStat>,
    pub strategy_states: usize,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpsAnswer {
    pub solvable: bool,
    pub strategy: Option<MooreStrategy>,
    pub pareto_set: Option<Vec<Payoff>>,
    pub route: &'static str,
    pub stats: SolveStats,
}

pub fn solve(game: &SPGame) -> Result<SpsAnswer, SolveError> {
    solve_with(game, &SolveOptions::default())
}

pub fn solve_with(game: &SPGame, opts: &SolveOptions) -> Result<SpsAnswer, SolveError> {
    let buchi = game.kind() == ObjectiveKind::Buchi;
    match opts.route {
        Route::BuchiNp => crate::buchi_np::solve_buchi_sp(game, &opts.caps),
        Route::Auto if buchi => match crate::buchi_np::solve_buchi_sp(game, &opts.caps) {
            Err(SolveError::BudgetExceeded(b)) => {
                info!("witness search ran out of its {b} step budget, falling back to the C-P route");
                solve_cp(game, opts)
            }
            other => other,
        },
        _ => solve_cp(game, opts),
    }
}

/// Payoffs of plays won by Player 0; every Pareto set of a solution lies in it.
pub fn won_payoffs(game: &SPGame) -> Vec<Payoff> {
    let g = ProductGraph::of_arena(game.arena());
    let mut out: Vec<Payoff> = realizable_payoffs(game, &g)
        .into_iter()
        .filter(|r| r.payoff.won)
        .map(|r| r.payoff.payoff)
        .collect();
    out.sort();
    out.dedup();
    out
}

struct SliceOutcome {
    slice: CpSlice,
    result: SolveResult,
    won: bool,
}

fn run_slice(norm: &SPGame, pareto: &[Payoff], caps: &Caps) -> Result<SliceOutcome, SolveError> {
    let slice = build_slice(norm, pareto, caps)?;
    let result = slice.solve();
    let won = result.wins(Player::P0, 0);
    debug!("slice {:?}: {} nodes, won={won}", pareto, slice.len());
    Ok(SliceOutcome { slice, result, won })
}

fn stat(norm: &SPGame, o: &SliceOutcome) -> SliceStat {
    SliceStat {
        pareto: o.slice.pareto.clone(),
        nodes: o.slice.len(),
        prover_nodes: o.slice.prover_count(),
        bound: per_slice_bound(norm.arena().n(), norm.t(), o.slice.pareto.len()),
        won: o.won,
    }
}

fn check_caps(game: &SPGame, caps: &Caps) -> Result<(), SolveError> {
    if game.t() > caps.max_t {
        return Err(SolveError::CapExceeded { what: "number of objectives t", value: game.t(), cap: caps.max_t });
    }
    Ok(())
}

pub fn solve_cp(game: &SPGame, opts: &SolveOptions) -> Result<SpsAnswer, SolveError> {
    let start = Instant::now();
    check_caps(game, &opts.caps)?;
    let (norm, mapping) = game.normalized();
    let cands = won_payoffs(game);
    let chains = antichains_over(&cands);
    let mut stats = SolveStats {
        normalized_vertices: norm.arena().n(),
        candidates: cands.len(),
        antichains: chains.len(),
        ..SolveStats::default()
    };
    let mut winner: Option<SliceOutcome> = None;
    let batch = opts.jobs.max(1) * 4;
    let pool = if opts.jobs > 1 {
        Some(rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().map_err(|e| SolveError::Unsupported(e.to_string()))?)
    } else {
        None
    };
    for chunk in chains.chunks(if pool.is_some() { batch } else { 1 }) {
        let outs: Vec<Result<SliceOutcome, SolveError>> = match &pool {
            Some(p) => p.install(|| chunk.par_iter().map(|pset| run_slice(&norm, pset, &opts.caps)).collect()),
            None => chunk.iter().map(|pset| run_slice(&norm, pset, &opts.caps)).collect(),
        };
        for o in outs {
            let o = o?;
            stats.slices.push(stat(&norm, &o));
            if o.won && winner.is_none() {
                winner = Some(o);
            }
        }
        if winner.is_some() && !opts.exhaustive {
            break;
        }
    }
    let mut answer = SpsAnswer { solvable: false, strategy: None, pareto_set: None, route: "cp", stats };
    if let Some(o) = winner {
        let s = extract_strategy(game, norm.arena(), &mapping, &o.slice, &o.result, opts.caps.max_product)?;
        answer.stats.strategy_states = s.states();
        answer.solvable = true;
        answer.pareto_set = Some(o.slice.pareto.clone());
        answer.strategy = Some(s);
    }
    answer.stats.millis = start.elapsed().as_millis();
    Ok(answer)
}

/// Whether Prover wins the slice of `pareto`, with Player 0's strategy if so.
pub fn solve_fixed_pareto(game: &SPGame, pareto: &[Payoff], caps: &Caps) -> Result<(bool, Option<MooreStrategy>, SliceStat), SolveError> {
    check_caps(game, caps)?;
    let mut pareto = pareto.to_vec();
    pareto.sort();
    let (norm, mapping) = game.normalized();
    let o = run_slice(&norm, &pareto, caps)?;
    let st = stat(&norm, &o);
    if !o.won {
        return Ok((false, None, st));
    }
    let s = extract_strategy(game, norm.arena(), &mapping, &o.slice, &o.result, caps.max_product)?;
    Ok((true, Some(s), st))
}

/// Player 0's strategy read off Prover's positional strategy: the memory is
/// the Prover node of the vertex just left.
struct CpStrategy<'a> {
    norm: &'a GameArena,
    mapping: &'a VertexMapping,
    slice: &'a CpSlice,
    result: &'a SolveResult,
}

impl CpStrategy<'_> {
    fn prover_move(&self, x: usize) -> usize {
        self.result.choice(Player::P0, x).expect("Prover keeps to his winning region")
    }

    /// Prover node reached at original vertex `w` from node `x`.
    fn resolve(&self, x: usize, w: usize) -> usize {
        let u = self.slice.nodes[x].vertex();
        let path = self.mapping.path(u, w).expect("consecutive vertices form an edge");
        let mut cur = x;
        for &b in &path[1..] {
            cur = self.step_towards(cur, b);
        }
        debug_assert_eq!(self.slice.nodes[cur].vertex(), w);
        cur
    }

    fn step_towards(&self, x: usize, b: usize) -> usize {
        let a = self.slice.nodes[x].vertex();
        if self.norm.owner(a) == Player::P0 {
            let y = self.prover_move(x);
            debug_assert_eq!(self.slice.nodes[y].vertex(), b);
            y
        } else {
            let c = self.prover_move(x);
            *self
                .slice
                .arena
                .successors(c)
                .iter()
                .find(|&&y| self.slice.nodes[y].vertex() == b)
                .expect("Challenger can follow every edge")
        }
    }

    fn current(&self, m: &Option<usize>, v: usize) -> usize {
        match *m {
            None => 0,
            Some(x) => self.resolve(x, v),
        }
    }
}

impl StrategyAutomaton for CpStrategy<'_> {
    type Mem = Option<usize>;

    fn initial(&self) -> Option<usize> {
        None
    }

    fn output(&self, m: &Option<usize>, v: usize) -> usize {
        let mut x = self.current(m, v);
        // follow Prover through the inserted tree until an original vertex
        loop {
            x = self.prover_move(x);
            if matches!(self.slice.nodes[x], CpNode::Prover { .. }) && !self.mapping.is_internal(self.slice.nodes[x].vertex()) {
                return self.slice.nodes[x].vertex();
            }
        }
    }

    fn update(&self, m: &Option<usize>, v: usize) -> Option<usize> {
        Some(self.current(m, v))
    }
}

fn extract_strategy(
    game: &SPGame,
    norm: &GameArena,
    mapping: &VertexMapping,
    slice: &CpSlice,
    result: &SolveResult,
    max_states: usize,
) -> Result<MooreStrategy, SolveError> {
    let a = CpStrategy { norm, mapping, slice, result };
    Ok(materialize(&a, game.arena(), max_states)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::memory_game;
    use crate::verify::check_solution;

    #[test]
    fn memory_game_is_solvable() {
        let g = memory_game();
        let ans = solve(&g).unwrap();
        assert!(ans.solvable);
        let p = |b: &[bool]| Payoff::from_bools(b);
        assert_eq!(ans.pareto_set.unwrap(), vec![p(&[true, true, false]), p(&[false, true, true])]);
        let v = check_solution(&g, ans.strategy.as_ref().unwrap(), 10_000).unwrap();
        assert!(v.accepted());
    }
}
