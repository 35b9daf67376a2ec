//! Challenger-Prover slices.
//!
//! Prover announces an antichain `P` of payoffs and then follows the play,
//! splitting the set `W ⊆ P` of still-tracked witness payoffs at every
//! Player-1 vertex. Challenger picks the branch. Each `P` is built as its own
//! game rooted at `(v0, P, P)`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde_json::{json, Value};

use crate::arena::{GameArena, Lasso, Player};
use crate::objectives::{encode_boolean_buchi, BoolFormula, ExtendedPayoff, ObjectiveKind, ObjectiveSpec, Payoff, SPGame};
use crate::sar::SarTable;
use crate::zerosum::{solve_buchi, solve_parity, SolveResult};
use crate::{Caps, SizeLimit, SolveError};

/// Default largest `t` for [`enumerate_antichains`].
pub const DEFAULT_ANTICHAIN_CAP: usize = 4;

/// All nonempty antichains of `cands`, by increasing size, then
/// lexicographically on the sorted payoff list.
pub fn antichains_over(cands: &[Payoff]) -> Vec<Vec<Payoff>> {
    let mut cands = cands.to_vec();
    cands.sort();
    cands.dedup();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(i: usize, cands: &[Payoff], cur: &mut Vec<Payoff>, out: &mut Vec<Vec<Payoff>>) {
        for j in i..cands.len() {
            let p = cands[j];
            if cur.iter().all(|&q: &Payoff| !q.comparable(p)) {
                cur.push(p);
                out.push(cur.clone());
                go(j + 1, cands, cur, out);
                cur.pop();
            }
        }
    }
    go(0, &cands, &mut cur, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every nonempty antichain of `{0,1}^t`.
pub fn enumerate_antichains(t: usize, cap: usize) -> Result<Vec<Vec<Payoff>>, SolveError> {
    if t > cap {
        return Err(SolveError::CapExceeded { what: "antichain width t", value: t, cap });
    }
    Ok(antichains_over(&Payoff::all(t).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CpNode {
    /// `w` is a bitmask over indices of `P`; `mem` is the tracker or record.
    Prover { v: usize, w: u64, mem: u64 },
    Challenger { v: usize, wl: u64, wr: u64, mem: u64 },
}

impl CpNode {
    pub fn vertex(&self) -> usize {
        match *self {
            CpNode::Prover { v, .. } | CpNode::Challenger { v, .. } => v,
        }
    }

    pub fn mem(&self) -> u64 {
        match *self {
            CpNode::Prover { mem, .. } | CpNode::Challenger { mem, .. } => mem,
        }
    }

    pub fn is_prover(&self) -> bool {
        matches!(self, CpNode::Prover { .. })
    }
}

/// Winning condition of Prover on a slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CpCondition {
    Buchi(Vec<usize>),
    Parity(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct CpSlice {
    pub pareto: Vec<Payoff>,
    pub nodes: Vec<CpNode>,
    /// Prover nodes belong to Player 0, Challenger nodes to Player 1.
    pub arena: GameArena,
    pub condition: CpCondition,
    /// Shared record for prefix-independent slices.
    pub record: Option<SharedRecord>,
    index: HashMap<CpNode, usize>,
}

impl CpSlice {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, n: &CpNode) -> Option<usize> {
        self.index.get(n).copied()
    }

    pub fn prover_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_prover()).count()
    }

    /// The `W` component at the limit of a lasso of slice nodes.
    pub fn lim_w(&self, rho: &Lasso) -> Vec<Payoff> {
        let w = rho
            .cycle
            .iter()
            .find_map(|&x| match self.nodes[x] {
                CpNode::Prover { w, .. } => Some(w),
                CpNode::Challenger { .. } => None,
            })
            .expect("a slice cycle passes through Prover nodes");
        self.payoffs_of(w)
    }

    pub fn payoffs_of(&self, w: u64) -> Vec<Payoff> {
        (0..self.pareto.len()).filter(|i| (w >> i) & 1 == 1).map(|i| self.pareto[i]).collect()
    }

    /// Erases Challenger nodes and components, keeping base vertices.
    pub fn project(&self, rho: &Lasso) -> Lasso {
        let keep = |xs: &[usize]| -> Vec<usize> {
            xs.iter().filter(|&&x| self.nodes[x].is_prover()).map(|&x| self.nodes[x].vertex()).collect()
        };
        Lasso { prefix: keep(&rho.prefix), cycle: keep(&rho.cycle) }
    }

    pub fn solve(&self) -> SolveResult {
        match &self.condition {
            CpCondition::Buchi(b) => solve_buchi(&self.arena, b),
            CpCondition::Parity(c) => solve_parity(&self.arena, c),
        }
    }

    /// Annotated dump in the arena JSON format.
    pub fn to_json(&self) -> Value {
        let fmt_w = |w: u64| -> Vec<String> { self.payoffs_of(w).iter().map(|p| p.to_string()).collect() };
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| match *n {
                CpNode::Prover { v, w, mem } => json!({"role": "prover", "v": v, "W": fmt_w(w), "mem": mem}),
                CpNode::Challenger { v, wl, wr, mem } => {
                    json!({"role": "challenger", "v": v, "Wl": fmt_w(wl), "Wr": fmt_w(wr), "mem": mem})
                }
            })
            .collect();
        let cond = match &self.condition {
            CpCondition::Buchi(b) => json!({"buchi": b}),
            CpCondition::Parity(c) => json!({"parity": c}),
        };
        json!({
            "pareto": self.pareto,
            "arena": serde_json::to_value(&self.arena).expect("arena serializes"),
            "nodes": nodes,
            "condition": cond,
        })
    }
}

/// Bound `|V|·2^(t+1)·4^|P|` on the size of one reach/safety slice.
pub fn per_slice_bound(n: usize, t: usize, p: usize) -> u128 {
    (n as u128) << (t + 1 + 2 * p)
}

/// Prover's condition on the limit: `W = {p}` with a won play of payoff `p`,
/// or `W = ∅` with a won play whose payoff is in `P` or a play dominated by
/// some element of `P`.
pub fn prover_accepts(pareto: &[Payoff], w: u64, ext: ExtendedPayoff) -> bool {
    match w.count_ones() {
        1 => ext.won && pareto[w.trailing_zeros() as usize] == ext.payoff,
        0 => (ext.won && pareto.contains(&ext.payoff)) || pareto.iter().any(|&p| ext.payoff.lt(p)),
        _ => false,
    }
}

fn submasks_ascending(w: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut s = w;
    loop {
        out.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & w;
    }
    out.reverse();
    out
}

struct Built {
    nodes: Vec<CpNode>,
    succ: Vec<Vec<usize>>,
    index: HashMap<CpNode, usize>,
}

fn build(
    arena: &GameArena,
    m: usize,
    root_mem: u64,
    step: &mut dyn FnMut(u64, usize, usize) -> u64,
    max_nodes: usize,
) -> Result<Built, SizeLimit> {
    let mut nodes = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<CpNode, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |n: CpNode, nodes: &mut Vec<CpNode>, queue: &mut VecDeque<usize>| -> usize {
        *index.entry(n).or_insert_with(|| {
            nodes.push(n);
            queue.push_back(nodes.len() - 1);
            nodes.len() - 1
        })
    };
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    intern(CpNode::Prover { v: arena.initial(), w: full, mem: root_mem }, &mut nodes, &mut queue);
    while let Some(x) = queue.pop_front() {
        if nodes.len() > max_nodes {
            return Err(SizeLimit { what: "C-P slice", limit: max_nodes });
        }
        let out: Vec<usize> = match nodes[x] {
            CpNode::Prover { v, w, mem } if arena.owner(v) == Player::P0 => arena
                .successors(v)
                .iter()
                .map(|&u| {
                    let mem2 = step(mem, v, u);
                    intern(CpNode::Prover { v: u, w, mem: mem2 }, &mut nodes, &mut queue)
                })
                .collect(),
            CpNode::Prover { v, w, mem } => {
                if arena.successors(v).len() == 1 {
                    vec![intern(CpNode::Challenger { v, wl: w, wr: 0, mem }, &mut nodes, &mut queue)]
                } else {
                    submasks_ascending(w)
                        .into_iter()
                        .map(|wl| intern(CpNode::Challenger { v, wl, wr: w ^ wl, mem }, &mut nodes, &mut queue))
                        .collect()
                }
            }
            CpNode::Challenger { v, wl, wr, mem } => arena
                .successors(v)
                .iter()
                .zip([wl, wr])
                .map(|(&u, w)| {
                    let mem2 = step(mem, v, u);
                    intern(CpNode::Prover { v: u, w, mem: mem2 }, &mut nodes, &mut queue)
                })
                .collect(),
        };
        if succ.len() <= x {
            succ.resize(x + 1, Vec::new());
        }
        succ[x] = out;
    }
    succ.resize(nodes.len(), Vec::new());
    Ok(Built { nodes, succ, index })
}

fn check_input(game: &SPGame, pareto: &[Payoff]) -> Result<(), SolveError> {
    if game.arena().max_out_degree() > 2 {
        return Err(SolveError::Unsupported("C-P slices need an arena with at most two successors per vertex".into()));
    }
    if pareto.is_empty() || pareto.len() > 64 || pareto.iter().any(|p| p.width() != game.t()) {
        return Err(SolveError::Unsupported("P must be a nonempty antichain of width t".into()));
    }
    Ok(())
}

fn finish(game: &SPGame, pareto: &[Payoff], b: Built, condition: CpCondition, record: Option<SharedRecord>) -> CpSlice {
    let owner = b.nodes.iter().map(|n| if n.is_prover() { Player::P0 } else { Player::P1 }).collect();
    let _ = game;
    CpSlice {
        pareto: pareto.to_vec(),
        arena: GameArena::from_parts(owner, b.succ, 0),
        nodes: b.nodes,
        condition,
        record,
        index: b.index,
    }
}

/// Tracker masks: bit 0 for Player 0's objective, bit `i` for objective `i`.
fn tracker_masks(game: &SPGame) -> Vec<u64> {
    let objs: Vec<&ObjectiveSpec> = std::iter::once(game.objective0()).chain(game.objectives1()).collect();
    (0..game.arena().n())
        .map(|v| {
            objs.iter().enumerate().fold(0u64, |acc, (i, o)| {
                let inside = match o {
                    ObjectiveSpec::Reach { target } => target.binary_search(&v).is_ok(),
                    ObjectiveSpec::Safe { safe } => safe.binary_search(&v).is_ok(),
                    _ => false,
                };
                if inside {
                    acc | (1 << i)
                } else {
                    acc
                }
            })
        })
        .collect()
}

pub fn tracker_payoff(tr: u64, t: usize) -> ExtendedPayoff {
    ExtendedPayoff { won: tr & 1 == 1, payoff: Payoff::new(tr >> 1, t) }
}

/// Slice for reachability or safety objectives; the tracker holds the
/// extended payoff accumulated so far.
pub fn build_cp_reach_safe(game: &SPGame, pareto: &[Payoff], max_nodes: usize) -> Result<CpSlice, SolveError> {
    check_input(game, pareto)?;
    let reach = match game.kind() {
        ObjectiveKind::Reach => true,
        ObjectiveKind::Safe => false,
        k => return Err(SolveError::Unsupported(format!("{k:?} is not a reachability or safety kind"))),
    };
    let t = game.t();
    let masks = tracker_masks(game);
    let upd = move |tr: u64, v: usize| if reach { tr | masks[v] } else { tr & masks[v] };
    let tr0 = if reach { 0 } else { (1u64 << (t + 1)) - 1 };
    let root = upd(tr0, game.arena().initial());
    let b = build(game.arena(), pareto.len(), root, &mut |tr, _, to| upd(tr, to), max_nodes)?;
    let bstar = (0..b.nodes.len())
        .filter(|&x| match b.nodes[x] {
            CpNode::Prover { w, mem, .. } => prover_accepts(pareto, w, tracker_payoff(mem, t)),
            CpNode::Challenger { .. } => false,
        })
        .collect();
    Ok(finish(game, pareto, b, CpCondition::Buchi(bstar), None))
}

/// One family of sets shared by every objective, and each objective's formula
/// rewritten over it (variable `i` stands for set `i`).
#[derive(Debug, Clone)]
pub struct SharedRecord {
    pub sets: Vec<Vec<usize>>,
    /// Player 0's formula first, then Player 1's.
    pub formulas: Vec<BoolFormula>,
    pub table: SarTable,
}

impl SharedRecord {
    pub fn new(game: &SPGame) -> Result<SharedRecord, SolveError> {
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut pos: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut formulas = Vec::new();
        for o in std::iter::once(game.objective0()).chain(game.objectives1()) {
            let ObjectiveSpec::BooleanBuchi { formula, sets: own } = encode_boolean_buchi(o)? else {
                unreachable!("encoding always yields a Boolean Büchi objective")
            };
            let rename: Vec<BoolFormula> = own
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        BoolFormula::False
                    } else {
                        let i = *pos.entry(s.clone()).or_insert_with(|| {
                            sets.push(s.clone());
                            sets.len() - 1
                        });
                        BoolFormula::Var(i + 1)
                    }
                })
                .collect();
            formulas.push(formula.map_vars(&|i| rename[i - 1].clone()));
        }
        let table = SarTable::new(sets.clone(), game.arena().n());
        Ok(SharedRecord { sets, formulas, table })
    }

    /// Extended payoff read off a record state with sets `suffix` at or after the hit.
    pub fn payoff(&self, suffix: u64, t: usize) -> ExtendedPayoff {
        let val = |i: usize| i >= 1 && (suffix >> (i - 1)) & 1 == 1;
        let bits: Vec<bool> = self.formulas[1..].iter().map(|f| f.eval(&val)).collect();
        debug_assert_eq!(bits.len(), t);
        ExtendedPayoff { won: self.formulas[0].eval(&val), payoff: Payoff::from_bools(&bits) }
    }
}

/// Slice for prefix-independent objectives: the memory is a shared record over
/// all objectives' sets, read once for every base vertex left.
pub fn build_cp_prefix_independent(game: &SPGame, pareto: &[Payoff], caps: &Caps) -> Result<CpSlice, SolveError> {
    check_input(game, pareto)?;
    if !game.kind().is_prefix_independent() {
        return Err(SolveError::Unsupported(format!("{:?} is not prefix independent", game.kind())));
    }
    let mut rec = SharedRecord::new(game)?;
    let m = rec.sets.len();
    if m > caps.max_sar_sets {
        return Err(SolveError::CapExceeded { what: "tracked sets", value: m, cap: caps.max_sar_sets });
    }
    let root = rec.table.initial() as u64;
    let b = {
        let table = &mut rec.table;
        build(game.arena(), pareto.len(), root, &mut |s, from, _| table.step(s as u32, from) as u64, caps.max_product)?
    };
    let t = game.t();
    let mut cache: HashMap<u32, ExtendedPayoff> = HashMap::new();
    let prio = b
        .nodes
        .iter()
        .map(|n| match *n {
            CpNode::Prover { w, mem, .. } => {
                let s = mem as u32;
                let ext = *cache.entry(s).or_insert_with(|| rec.payoff(rec.table.suffix_mask(s), t));
                let r = rec.table.hit(s) as u32;
                if prover_accepts(pareto, w, ext) {
                    2 * r - 2
                } else {
                    2 * r - 1
                }
            }
            CpNode::Challenger { .. } => 2 * m as u32 + 2,
        })
        .collect();
    Ok(finish(game, pareto, b, CpCondition::Parity(prio), Some(rec)))
}

/// Builds the slice matching the game's kind.
pub fn build_slice(game: &SPGame, pareto: &[Payoff], caps: &Caps) -> Result<CpSlice, SolveError> {
    match game.kind() {
        ObjectiveKind::Reach | ObjectiveKind::Safe => build_cp_reach_safe(game, pareto, caps.max_product),
        _ => build_cp_prefix_independent(game, pareto, caps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antichain_counts() {
        assert_eq!(enumerate_antichains(1, 4).unwrap().len(), 2);
        assert_eq!(enumerate_antichains(2, 4).unwrap().len(), 5);
        assert_eq!(enumerate_antichains(3, 4).unwrap().len(), 19);
        assert_eq!(enumerate_antichains(4, 4).unwrap().len(), 167);
        assert!(enumerate_antichains(5, 4).is_err());
    }

    #[test]
    fn submasks_are_ascending() {
        assert_eq!(submasks_ascending(0b101), vec![0, 1, 4, 5]);
        assert_eq!(submasks_ascending(0), vec![0]);
    }

    #[test]
    fn acceptance_cases() {
        let p = [Payoff::from_bools(&[true, false]), Payoff::from_bools(&[false, true])];
        let e = |won, a, b| ExtendedPayoff { won, payoff: Payoff::from_bools(&[a, b]) };
        assert!(prover_accepts(&p, 0b01, e(true, true, false)));
        assert!(!prover_accepts(&p, 0b01, e(false, true, false)));
        assert!(!prover_accepts(&p, 0b10, e(true, true, false)));
        assert!(prover_accepts(&p, 0, e(false, false, false)));
        assert!(!prover_accepts(&p, 0, e(false, true, false)));
        assert!(!prover_accepts(&p, 0b11, e(true, true, false)));
    }
}
