//! Finite-memory strategies for Player 0 and their verification.
//!
//! A Moore strategy reads the vertex being left: at vertex `v` with memory
//! `m`, Player 0 (if he owns `v`) moves to `output(m, v)` and the memory
//! becomes `update(m, v)`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{GameArena, Lasso, Player};
use crate::graph::Digraph;
use crate::objectives::{maximal_elements, ExtendedPayoff, ObjectiveSpec, Payoff, SPGame};
use crate::SizeLimit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy has {found} update rows for {states} states")]
    Shape { states: usize, found: usize },
    #[error("initial state {0} does not exist")]
    BadInitial(usize),
    #[error("update row {state} has {found} entries for {n} vertices")]
    RowLength { state: usize, found: usize, n: usize },
    #[error("update ({state}, {vertex}) leads to unknown state {to}")]
    BadUpdate { state: usize, vertex: usize, to: usize },
    #[error("output ({state}, {vertex}) -> {to} is not an edge")]
    NotAnEdge { state: usize, vertex: usize, to: usize },
    #[error("output ({state}, {vertex}) is missing")]
    MissingOutput { state: usize, vertex: usize },
    #[error("output given for vertex {0}, which Player 0 does not own")]
    NotOwned(usize),
}

/// Moore machine; `output[m][v]` is set exactly for Player-0 vertices `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MooreStrategy {
    pub initial: usize,
    pub update: Vec<Vec<usize>>,
    pub output: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMoore {
    states: usize,
    initial: usize,
    update: Vec<Vec<usize>>,
    /// `[state, vertex, successor]` triples.
    output: Vec<[usize; 3]>,
}

impl Serialize for MooreStrategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut output = Vec::new();
        for (m, row) in self.output.iter().enumerate() {
            for (v, o) in row.iter().enumerate() {
                if let Some(w) = o {
                    output.push([m, v, *w]);
                }
            }
        }
        RawMoore { states: self.states(), initial: self.initial, update: self.update.clone(), output }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MooreStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawMoore::deserialize(d)?;
        if raw.update.len() != raw.states {
            return Err(serde::de::Error::custom(StrategyError::Shape { states: raw.states, found: raw.update.len() }));
        }
        let n = raw.update.first().map_or(0, Vec::len);
        let mut output = vec![vec![None; n]; raw.states];
        for [m, v, w] in raw.output {
            if m >= raw.states || v >= n {
                return Err(serde::de::Error::custom(format!("output entry ({m}, {v}) out of range")));
            }
            output[m][v] = Some(w);
        }
        Ok(MooreStrategy { initial: raw.initial, update: raw.update, output })
    }
}

impl MooreStrategy {
    pub fn states(&self) -> usize {
        self.update.len()
    }

    /// One-state strategy; `choice[v]` is used at Player-0 vertices and
    /// defaults to the first successor.
    pub fn memoryless(arena: &GameArena, choice: &[Option<usize>]) -> Self {
        let n = arena.n();
        let output = (0..n)
            .map(|v| match arena.owner(v) {
                Player::P0 => Some(choice.get(v).copied().flatten().unwrap_or(arena.successors(v)[0])),
                Player::P1 => None,
            })
            .collect();
        MooreStrategy { initial: 0, update: vec![vec![0; n]], output: vec![output] }
    }

    pub fn next(&self, m: usize, v: usize) -> Option<usize> {
        self.output[m][v]
    }

    /// Checks shape and that every output is an edge of `arena`, defined
    /// exactly at Player-0 vertices.
    pub fn validate(&self, arena: &GameArena) -> Result<(), StrategyError> {
        let n = arena.n();
        let k = self.states();
        if self.output.len() != k {
            return Err(StrategyError::Shape { states: k, found: self.output.len() });
        }
        if self.initial >= k {
            return Err(StrategyError::BadInitial(self.initial));
        }
        for m in 0..k {
            if self.update[m].len() != n {
                return Err(StrategyError::RowLength { state: m, found: self.update[m].len(), n });
            }
            if self.output[m].len() != n {
                return Err(StrategyError::RowLength { state: m, found: self.output[m].len(), n });
            }
            for v in 0..n {
                let to = self.update[m][v];
                if to >= k {
                    return Err(StrategyError::BadUpdate { state: m, vertex: v, to });
                }
                match (arena.owner(v), self.output[m][v]) {
                    (Player::P0, None) => return Err(StrategyError::MissingOutput { state: m, vertex: v }),
                    (Player::P0, Some(w)) if !arena.is_edge(v, w) => {
                        return Err(StrategyError::NotAnEdge { state: m, vertex: v, to: w })
                    }
                    (Player::P1, Some(_)) => return Err(StrategyError::NotOwned(v)),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Follows the strategy along a history, returning the memory after it.
    pub fn memory_after(&self, history: &[usize]) -> usize {
        history.iter().fold(self.initial, |m, &v| self.update[m][v])
    }

    /// Whether a lasso is a play consistent with the strategy.
    pub fn consistent(&self, arena: &GameArena, rho: &Lasso) -> bool {
        if rho.check(arena, true).is_err() {
            return false;
        }
        // run until the (memory, cycle position) pair repeats
        let mut m = self.initial;
        let ok = |m: usize, v: usize, w: usize| arena.owner(v) == Player::P1 || self.output[m][v] == Some(w);
        let word: Vec<usize> = rho.prefix.iter().chain(rho.cycle.iter().take(1)).copied().collect();
        for w in word.windows(2) {
            if !ok(m, w[0], w[1]) {
                return false;
            }
            m = self.update[m][w[0]];
        }
        let k = rho.cycle.len();
        let mut seen = BTreeSet::new();
        let mut i = 0;
        while seen.insert((m, i)) {
            let v = rho.cycle[i];
            let w = rho.cycle[(i + 1) % k];
            if !ok(m, v, w) {
                return false;
            }
            m = self.update[m][v];
            i = (i + 1) % k;
        }
        true
    }
}

/// A strategy given by an abstract memory type, turned into a Moore machine
/// by [`materialize`].
pub trait StrategyAutomaton {
    type Mem: Clone + Eq + Hash;
    fn initial(&self) -> Self::Mem;
    /// Successor chosen at Player-0 vertex `v`.
    fn output(&self, m: &Self::Mem, v: usize) -> usize;
    fn update(&self, m: &Self::Mem, v: usize) -> Self::Mem;
}

/// Explores the memory states reachable along plays and numbers them in
/// discovery order. Unreachable table entries stay in the same state and
/// pick the first successor.
pub fn materialize<A: StrategyAutomaton>(a: &A, arena: &GameArena, max_states: usize) -> Result<MooreStrategy, SizeLimit> {
    let n = arena.n();
    let mut ids: HashMap<A::Mem, usize> = HashMap::new();
    let mut mems: Vec<A::Mem> = Vec::new();
    let mut update: Vec<Vec<Option<usize>>> = Vec::new();
    let mut output: Vec<Vec<Option<usize>>> = Vec::new();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let m0 = a.initial();
    ids.insert(m0.clone(), 0);
    mems.push(m0);
    update.push(vec![None; n]);
    output.push(vec![None; n]);
    queue.push_back((0usize, arena.initial()));
    seen.insert((0, arena.initial()));
    while let Some((m, v)) = queue.pop_front() {
        let next_mem = a.update(&mems[m], v);
        let id = match ids.get(&next_mem) {
            Some(&i) => i,
            None => {
                if mems.len() >= max_states {
                    return Err(SizeLimit { what: "strategy memory", limit: max_states });
                }
                ids.insert(next_mem.clone(), mems.len());
                mems.push(next_mem);
                update.push(vec![None; n]);
                output.push(vec![None; n]);
                mems.len() - 1
            }
        };
        update[m][v] = Some(id);
        let succs: Vec<usize> = if arena.owner(v) == Player::P0 {
            let w = a.output(&mems[m], v);
            output[m][v] = Some(w);
            vec![w]
        } else {
            arena.successors(v).to_vec()
        };
        for w in succs {
            if seen.insert((id, w)) {
                queue.push_back((id, w));
            }
        }
    }
    let update = update
        .into_iter()
        .enumerate()
        .map(|(m, row)| row.into_iter().map(|x| x.unwrap_or(m)).collect())
        .collect();
    let output = output
        .into_iter()
        .map(|row| {
            (0..n)
                .map(|v| match arena.owner(v) {
                    Player::P0 => Some(row[v].unwrap_or(arena.successors(v)[0])),
                    Player::P1 => None,
                })
                .collect()
        })
        .collect();
    Ok(MooreStrategy { initial: 0, update, output })
}

/// Nodes `(v, m)` reachable from `(v0, m0)`, with Player 0's moves fixed.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    pub nodes: Vec<(usize, usize)>,
    pub succ: Vec<Vec<usize>>,
}

impl ProductGraph {
    pub fn of_strategy(arena: &GameArena, s: &MooreStrategy, max_nodes: usize) -> Result<ProductGraph, SizeLimit> {
        Self::explore(arena.initial(), s.initial, max_nodes, |v, m| {
            let m2 = s.update[m][v];
            match arena.owner(v) {
                Player::P0 => vec![(s.output[m][v].expect("validated strategy"), m2)],
                Player::P1 => arena.successors(v).iter().map(|&w| (w, m2)).collect(),
            }
        })
    }

    /// The arena itself: every play is a path.
    pub fn of_arena(arena: &GameArena) -> ProductGraph {
        Self::explore(arena.initial(), 0, usize::MAX, |v, _| arena.successors(v).iter().map(|&w| (w, 0)).collect())
            .expect("no cap")
    }

    fn explore(
        v0: usize,
        m0: usize,
        max_nodes: usize,
        mut next: impl FnMut(usize, usize) -> Vec<(usize, usize)>,
    ) -> Result<ProductGraph, SizeLimit> {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut nodes = vec![(v0, m0)];
        index.insert((v0, m0), 0);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let (v, m) = nodes[i];
            let mut out = Vec::new();
            for key in next(v, m) {
                let id = *index.entry(key).or_insert_with(|| {
                    nodes.push(key);
                    nodes.len() - 1
                });
                if !out.contains(&id) {
                    out.push(id);
                }
            }
            succ.push(out);
            if nodes.len() > max_nodes {
                return Err(SizeLimit { what: "strategy product", limit: max_nodes });
            }
            i += 1;
        }
        Ok(ProductGraph { nodes, succ })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn project(g: &ProductGraph, xs: &[usize]) -> Vec<usize> {
    xs.iter().map(|&x| g.nodes[x].0).collect()
}

/// Sets of vertices seen infinitely often along plays of the product.
/// Every entry comes with a strongly connected node set realizing it.
pub fn inf_occ_sets_of(g: &ProductGraph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let d = Digraph::new(g.succ.clone());
    let mut found: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut projections: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut done: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack: Vec<Vec<usize>> = vec![(0..g.len()).collect()];
    while let Some(part) = stack.pop() {
        if !done.insert(part.clone()) {
            continue;
        }
        let mut keep = vec![false; g.len()];
        for &x in &part {
            keep[x] = true;
        }
        for c in d.nontrivial_sccs_within(&keep) {
            let mut proj: Vec<usize> = project(g, &c);
            proj.sort_unstable();
            proj.dedup();
            if projections.insert(proj.clone()) {
                found.push((proj.clone(), c.clone()));
            }
            if proj.len() > 1 {
                for &x in &proj {
                    let rest: Vec<usize> = c.iter().copied().filter(|&y| g.nodes[y].0 != x).collect();
                    if !rest.is_empty() {
                        stack.push(rest);
                    }
                }
            }
        }
    }
    found.sort();
    found
}

pub fn inf_occ_sets(game: &SPGame, s: &MooreStrategy, max_nodes: usize) -> Result<Vec<Vec<usize>>, SizeLimit> {
    let g = ProductGraph::of_strategy(game.arena(), s, max_nodes)?;
    Ok(inf_occ_sets_of(&g).into_iter().map(|(i, _)| i).collect())
}

/// One realizable extended payoff together with a play producing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realized {
    pub payoff: ExtendedPayoff,
    pub play: Lasso,
}

fn tracker_bits(game: &SPGame, v: usize) -> u64 {
    std::iter::once(game.objective0())
        .chain(game.objectives1())
        .enumerate()
        .fold(0, |acc, (i, o)| match o {
            ObjectiveSpec::Reach { target } if target.binary_search(&v).is_ok() => acc | (1 << i),
            ObjectiveSpec::Safe { safe } if safe.binary_search(&v).is_ok() => acc | (1 << i),
            _ => acc,
        })
}

/// Every extended payoff of a play of the product, one witness play each.
pub fn realizable_payoffs(game: &SPGame, g: &ProductGraph) -> Vec<Realized> {
    let t = game.t();
    let mut out: Vec<Realized> = Vec::new();
    if game.kind().is_prefix_independent() {
        let d = Digraph::new(g.succ.clone());
        let mut seen = BTreeSet::new();
        for (inf, comp) in inf_occ_sets_of(g) {
            let ext = game.payoff_from_sets(&inf, &inf);
            if !seen.insert(ext) {
                continue;
            }
            let entry = d.path(0, &|x| comp.binary_search(&x).is_ok(), &|_| true).expect("component is reachable");
            let start = *entry.last().unwrap();
            let cycle = d.covering_cycle(start, &comp);
            let play = Lasso::new(project(g, &entry[..entry.len() - 1]), project(g, &cycle));
            out.push(Realized { payoff: ext, play });
        }
    } else {
        // extend with the tracker, which is constant on every component
        let reach = game.kind() == crate::objectives::ObjectiveKind::Reach;
        let full = (1u64 << (t + 1)) - 1;
        let upd = |tr: u64, v: usize| if reach { tr | tracker_bits(game, v) } else { tr & tracker_bits(game, v) };
        let mut index: HashMap<(usize, u64), usize> = HashMap::new();
        let mut nodes: Vec<(usize, u64)> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let root = (0usize, upd(if reach { 0 } else { full }, g.nodes[0].0));
        index.insert(root, 0);
        nodes.push(root);
        let mut i = 0;
        while i < nodes.len() {
            let (x, tr) = nodes[i];
            let mut out_i = Vec::new();
            for &y in &g.succ[x] {
                let key = (y, upd(tr, g.nodes[y].0));
                let id = *index.entry(key).or_insert_with(|| {
                    nodes.push(key);
                    nodes.len() - 1
                });
                out_i.push(id);
            }
            succ.push(out_i);
            i += 1;
        }
        let d = Digraph::new(succ);
        let mut seen = BTreeSet::new();
        for comp in d.nontrivial_sccs_within(&vec![true; nodes.len()]) {
            let tr = nodes[comp[0]].1;
            let ext = ExtendedPayoff { won: tr & 1 == 1, payoff: Payoff::new(tr >> 1, t) };
            if !seen.insert(ext) {
                continue;
            }
            let entry = d.path(0, &|x| comp.binary_search(&x).is_ok(), &|_| true).expect("component is reachable");
            let start = *entry.last().unwrap();
            let cycle = d.covering_cycle(start, &comp);
            let base = |xs: &[usize]| -> Vec<usize> { xs.iter().map(|&x| g.nodes[nodes[x].0].0).collect() };
            out.push(Realized { payoff: ext, play: Lasso::new(base(&entry[..entry.len() - 1]), base(&cycle)) });
        }
    }
    out.sort_by_key(|r| r.payoff);
    out
}

/// Maximal payoffs, swept from the largest popcount down.
fn sweep_maximal(payoffs: impl IntoIterator<Item = Payoff>) -> Vec<Payoff> {
    let mut all: Vec<Payoff> = payoffs.into_iter().collect();
    all.sort_by(|a, b| b.ones().cmp(&a.ones()).then(a.cmp(b)));
    all.dedup();
    let mut kept: Vec<Payoff> = Vec::new();
    for p in all {
        if !kept.iter().any(|&q| p.leq(q)) {
            kept.push(p);
        }
    }
    kept.sort();
    debug_assert_eq!(kept, maximal_elements(kept.clone()));
    kept
}

pub fn pareto_set(game: &SPGame, s: &MooreStrategy, max_nodes: usize) -> Result<Vec<Payoff>, SizeLimit> {
    let g = ProductGraph::of_strategy(game.arena(), s, max_nodes)?;
    Ok(sweep_maximal(realizable_payoffs(game, &g).into_iter().map(|r| r.payoff.payoff)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accepted {
        pareto_set: Vec<Payoff>,
    },
    /// A consistent play with a Pareto-optimal payoff that Player 0 loses.
    Rejected {
        pareto_set: Vec<Payoff>,
        payoff: Payoff,
        #[serde(serialize_with = "ser_lasso")]
        play: Lasso,
    },
}

fn ser_lasso<S: serde::Serializer>(l: &Lasso, s: S) -> Result<S::Ok, S::Error> {
    serde_json::json!({"prefix": l.prefix, "cycle": l.cycle}).serialize(s)
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }

    pub fn pareto_set(&self) -> &[Payoff] {
        match self {
            Verdict::Accepted { pareto_set } | Verdict::Rejected { pareto_set, .. } => pareto_set,
        }
    }
}

pub fn check_solution(game: &SPGame, s: &MooreStrategy, max_nodes: usize) -> Result<Verdict, SizeLimit> {
    let g = ProductGraph::of_strategy(game.arena(), s, max_nodes)?;
    let real = realizable_payoffs(game, &g);
    let pareto = sweep_maximal(real.iter().map(|r| r.payoff.payoff));
    for &p in &pareto {
        if let Some(r) = real.iter().find(|r| !r.payoff.won && r.payoff.payoff == p) {
            return Ok(Verdict::Rejected { pareto_set: pareto, payoff: p, play: r.play.clone() });
        }
    }
    Ok(Verdict::Accepted { pareto_set: pareto })
}
