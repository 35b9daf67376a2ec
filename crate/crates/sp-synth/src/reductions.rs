//! Games built from set cover and succinct set cover instances.
//!
//! Element, set and variable numbers are 1-based as in the usual statement
//! of these problems; vertex labels follow the same numbering.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{GameArena, Player};
use crate::objectives::{ObjectiveSpec, SPGame};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("{0}")]
    Invalid(String),
    #[error("exhaustive search gave up after {0} steps")]
    BudgetExceeded(usize),
}

/// Cover the elements `1..=n` with at most `k` of the sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScInstance {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
}

impl ScInstance {
    pub fn check(&self) -> Result<(), InstanceError> {
        let bad = |m: String| Err(InstanceError::Invalid(m));
        if self.n == 0 {
            return bad("no elements to cover".into());
        }
        if self.k == 0 || self.k > self.sets.len() {
            return bad(format!("k = {} must lie in 1..={}", self.k, self.sets.len()));
        }
        for (j, s) in self.sets.iter().enumerate() {
            if let Some(e) = s.iter().find(|&&e| e == 0 || e > self.n) {
                return bad(format!("set {} mentions element {e} outside 1..={}", j + 1, self.n));
            }
        }
        Ok(())
    }
}

/// `m` variables `x1..xm`, `n` variables `y1..yn`. Literals are signed
/// integers: `±i` for `x_i` and, in `psi` only, `±(m+i)` for `y_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SscInstance {
    pub m: usize,
    pub n: usize,
    pub phi: Vec<Vec<i64>>,
    pub psi: Vec<Vec<i64>>,
    pub k: u64,
}

impl SscInstance {
    pub fn check(&self) -> Result<(), InstanceError> {
        let bad = |m: String| Err(InstanceError::Invalid(m));
        if self.m == 0 {
            return bad("need at least one x variable".into());
        }
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        for c in &self.phi {
            if let Some(l) = c.iter().find(|l| l.unsigned_abs() == 0 || l.unsigned_abs() as usize > self.m) {
                return bad(format!("literal {l} of phi is not over x1..x{}", self.m));
            }
        }
        for c in &self.psi {
            if let Some(l) = c.iter().find(|l| l.unsigned_abs() == 0 || l.unsigned_abs() as usize > self.m + self.n) {
                return bad(format!("literal {l} of psi is not over the {} variables", self.m + self.n));
            }
        }
        Ok(())
    }

    /// The example instance with `phi = (x1 ∨ ¬x2) ∧ (x2 ∨ x3)` and
    /// `psi = (y1 ∨ y2) ∧ (x1 ∨ y2) ∧ (x2 ∨ x3 ∨ y1)`.
    pub fn example() -> SscInstance {
        SscInstance { m: 3, n: 2, phi: vec![vec![1, -2], vec![2, 3]], psi: vec![vec![4, 5], vec![1, 5], vec![2, 3, 4]], k: 1 }
    }
}

/// Value of a clause under `val`, where `val[i]` is variable `i+1`.
pub fn clause_holds(clause: &[i64], val: &[bool]) -> bool {
    clause.iter().any(|&l| val[l.unsigned_abs() as usize - 1] == (l > 0))
}

pub fn cnf_holds(cnf: &[Vec<i64>], val: &[bool]) -> bool {
    cnf.iter().all(|c| clause_holds(c, val))
}

/// The valuations of `m` variables with bit `i` of the index for variable `i+1`.
pub fn valuations(m: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << m).map(move |b| (0..m).map(|i| b >> i & 1 == 1).collect())
}

struct Builder {
    owner: Vec<Player>,
    succ: Vec<Vec<usize>>,
    labels: BTreeMap<String, usize>,
}

impl Builder {
    fn new() -> Self {
        Builder { owner: Vec::new(), succ: Vec::new(), labels: BTreeMap::new() }
    }

    fn add(&mut self, label: String, owner: Player) -> usize {
        let v = self.owner.len();
        self.owner.push(owner);
        self.succ.push(Vec::new());
        self.labels.insert(label, v);
        v
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.succ[u].push(v);
    }

    fn finish(self, initial: usize) -> GameArena {
        GameArena::new(self.owner, self.succ, initial)
            .and_then(|a| a.with_labels(self.labels))
            .expect("generated arenas are well formed")
    }
}

/// Tree game in which Player 0 wins iff the instance has a cover: Player 1
/// either picks an element `e_i` or lets Player 0 pick `k` sets.
pub fn sc_to_sp(inst: &ScInstance) -> Result<SPGame, InstanceError> {
    use Player::{P0, P1};
    inst.check()?;
    let mut b = Builder::new();
    let v0 = b.add("v0".into(), P1);
    let v1 = b.add("v1".into(), P1);
    let v2 = b.add("v2".into(), P1);
    b.edge(v0, v1);
    b.edge(v0, v2);
    let mut targets: Vec<Vec<usize>> = vec![Vec::new(); inst.n];
    for i in 1..=inst.n {
        let e = b.add(format!("e{i}"), P0);
        b.edge(v1, e);
        b.edge(e, e);
        targets[i - 1].push(e);
    }
    for c in 1..=inst.k {
        let cv = b.add(format!("c{c}"), P0);
        b.edge(v2, cv);
        for (j, set) in inst.sets.iter().enumerate() {
            let s = b.add(format!("c{c}.S{}", j + 1), P0);
            b.edge(cv, s);
            b.edge(s, s);
            for &e in set {
                targets[e - 1].push(s);
            }
        }
    }
    let arena = b.finish(v0);
    let reach = |t: Vec<usize>| ObjectiveSpec::Reach { target: t };
    let mut objs: Vec<ObjectiveSpec> = targets.into_iter().map(reach).collect();
    objs.push(reach(vec![v2]));
    Ok(SPGame::new(arena, reach(vec![v2]), objs).expect("generated objectives are well formed"))
}

/// Fragment of Player-1 vertices with exactly `k` paths from `g1` to `g2`;
/// `g2` has no successors.
#[derive(Debug, Clone)]
pub struct QkGadget {
    pub owner: Vec<Player>,
    pub succ: Vec<Vec<usize>>,
    pub labels: BTreeMap<String, usize>,
    pub g1: usize,
    pub g2: usize,
}

fn add_qk(b: &mut Builder, k: u64) -> (usize, usize) {
    let g1 = b.add("g1".into(), Player::P1);
    let g2 = b.add("g2".into(), Player::P1);
    for i in (0..64).filter(|&i| k >> i & 1 == 1) {
        if i == 0 {
            b.edge(g1, g2);
            continue;
        }
        // a chain of i diamonds gives 2^i paths
        let mut d = b.add(format!("q{i}.d0"), Player::P1);
        b.edge(g1, d);
        for j in 0..i {
            let up = b.add(format!("q{i}.u{j}"), Player::P1);
            let lo = b.add(format!("q{i}.l{j}"), Player::P1);
            let next = b.add(format!("q{i}.d{}", j + 1), Player::P1);
            b.edge(d, up);
            b.edge(d, lo);
            b.edge(up, next);
            b.edge(lo, next);
            d = next;
        }
        b.edge(d, g2);
    }
    (g1, g2)
}

pub fn build_qk(k: u64) -> QkGadget {
    assert!(k >= 1, "Q_k needs k >= 1");
    let mut b = Builder::new();
    let (g1, g2) = add_qk(&mut b, k);
    QkGadget { owner: b.owner, succ: b.succ, labels: b.labels, g1, g2 }
}

impl QkGadget {
    /// The gadget as an arena from `g1`, with a self loop on `g2`.
    pub fn arena(&self) -> GameArena {
        let mut succ = self.succ.clone();
        succ[self.g2].push(self.g2);
        GameArena::new(self.owner.clone(), succ, self.g1)
            .and_then(|a| a.with_labels(self.labels.clone()))
            .expect("gadget is well formed")
    }
}

/// Vertex and objective numbering of a game built by [`ssc_to_sp`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SscLayout {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub v1: usize,
    pub v2: usize,
    pub v3: usize,
}

impl SscLayout {
    pub fn t(&self) -> usize {
        1 + 2 * self.m + self.p + self.q
    }

    /// Objective index of `x_i` (`positive`) or `¬x_i`, for 1-based `i`.
    pub fn x_obj(&self, i: usize, positive: bool) -> usize {
        2 * i - usize::from(positive)
    }

    pub fn c_obj(&self, j: usize) -> usize {
        2 * self.m + j
    }

    pub fn d_obj(&self, j: usize) -> usize {
        2 * self.m + self.p + j
    }
}

/// Literal vertices `(x_i, ¬x_i)` per variable, after a Player-1 choice
/// vertex each, ending in self loops; returns the literal vertices.
fn add_x_chain(b: &mut Builder, part: &str, first: usize, m: usize) -> Vec<(usize, usize)> {
    let mut lits = Vec::new();
    let mut choice = first;
    for i in 1..=m {
        let pos = b.add(format!("{part}.x{i}"), Player::P1);
        let neg = b.add(format!("{part}.!x{i}"), Player::P1);
        b.edge(choice, pos);
        b.edge(choice, neg);
        lits.push((pos, neg));
        if i < m {
            choice = b.add(format!("{part}.choose{}", i + 1), Player::P1);
            b.edge(pos, choice);
            b.edge(neg, choice);
        } else {
            b.edge(pos, pos);
            b.edge(neg, neg);
        }
    }
    lits
}

/// Reachability game that Player 0 can solve iff the succinct instance is
/// positive. Objective order: `Ω1`, then `x1, ¬x1, …, xm, ¬xm`, then the
/// clauses of `phi`, then the clauses of `psi`.
pub fn ssc_to_sp(inst: &SscInstance) -> Result<(SPGame, SscLayout), InstanceError> {
    use Player::{P0, P1};
    inst.check()?;
    if inst.phi.is_empty() {
        return Err(InstanceError::Invalid("the game needs phi to have at least one clause".into()));
    }
    let (m, n, p, q) = (inst.m, inst.n, inst.phi.len(), inst.psi.len());
    let mut b = Builder::new();
    let v0 = b.add("v0".into(), P1);
    let v1 = b.add("v1".into(), P1);
    let v2 = b.add("v2".into(), P1);
    let v3 = b.add("v3".into(), P0);
    b.edge(v0, v1);
    b.edge(v0, v2);

    let g1_lits = add_x_chain(&mut b, "G1", v1, m);

    let mut a = Vec::new();
    let g2_first = b.add("G2.choose1".into(), P1);
    for j in 1..=p {
        let aj = b.add(format!("G2.a{j}"), P1);
        b.edge(v2, aj);
        b.edge(aj, g2_first);
        a.push(aj);
    }
    let g2_lits = add_x_chain(&mut b, "G2", g2_first, m);

    let (q1, q2) = add_qk(&mut b, inst.k);
    b.edge(v0, q1);
    b.edge(q2, v3);
    let mut y_lits = Vec::new();
    let mut choice = v3;
    for i in 1..=n {
        let pos = b.add(format!("G3.y{i}"), P1);
        let neg = b.add(format!("G3.!y{i}"), P1);
        b.edge(choice, pos);
        b.edge(choice, neg);
        y_lits.push((pos, neg));
        if i < n {
            choice = b.add(format!("G3.pick{}", i + 1), P0);
            b.edge(pos, choice);
            b.edge(neg, choice);
        }
    }
    let g3_first = b.add("G3.choose1".into(), P1);
    match y_lits.last() {
        Some(&(pos, neg)) => {
            b.edge(pos, g3_first);
            b.edge(neg, g3_first);
        }
        None => b.edge(v3, g3_first),
    }
    let g3_lits = add_x_chain(&mut b, "G3", g3_first, m);
    let arena = b.finish(v0);

    let layout = SscLayout { m, n, p, q, v1, v2, v3 };
    let mut targets: Vec<Vec<usize>> = vec![Vec::new(); layout.t()];
    targets[0] = vec![v2, v3];
    for i in 1..=m {
        for lits in [&g1_lits, &g2_lits, &g3_lits] {
            let (pos, neg) = lits[i - 1];
            targets[layout.x_obj(i, true)].push(pos);
            targets[layout.x_obj(i, false)].push(neg);
        }
    }
    let pick = |lits: &[(usize, usize)], l: i64| {
        let (pos, neg) = lits[l.unsigned_abs() as usize - 1];
        if l > 0 {
            pos
        } else {
            neg
        }
    };
    for (j, clause) in inst.phi.iter().enumerate() {
        let t = &mut targets[layout.c_obj(j + 1)];
        for &l in clause {
            t.push(pick(&g1_lits, l));
            t.push(pick(&g3_lits, l));
        }
        t.extend(a.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
    }
    for (j, clause) in inst.psi.iter().enumerate() {
        let t = &mut targets[layout.d_obj(j + 1)];
        for &l in clause {
            let var = l.unsigned_abs() as usize;
            if var <= m {
                t.push(pick(&g3_lits, l));
            } else {
                t.push(pick(&y_lits, l.signum() * (var - m) as i64));
            }
        }
        t.push(v1);
        t.push(v2);
    }
    let reach = |t: Vec<usize>| ObjectiveSpec::Reach { target: t };
    let game = SPGame::new(arena, reach(vec![v2, v3]), targets.into_iter().map(reach).collect())
        .map_err(|e| InstanceError::Invalid(e.to_string()))?;
    Ok((game, layout))
}

/// Exact cover search: branch on the sets containing the first uncovered
/// element, at most `k` deep.
fn cover_search(universe: &[usize], sets: &[Vec<bool>], k: usize, steps: &mut usize, budget: usize) -> Result<bool, InstanceError> {
    fn go(unc: &[usize], sets: &[Vec<bool>], k: usize, steps: &mut usize, budget: usize) -> Result<bool, InstanceError> {
        let Some(&e) = unc.first() else {
            return Ok(true);
        };
        if k == 0 {
            return Ok(false);
        }
        for s in sets.iter().filter(|s| s[e]) {
            *steps += 1;
            if *steps > budget {
                return Err(InstanceError::BudgetExceeded(budget));
            }
            let rest: Vec<usize> = unc.iter().copied().filter(|&x| !s[x]).collect();
            if go(&rest, sets, k - 1, steps, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    go(universe, sets, k, steps, budget)
}

pub fn solve_sc_brute(inst: &ScInstance, budget: usize) -> Result<bool, InstanceError> {
    inst.check()?;
    let sets: Vec<Vec<bool>> = inst
        .sets
        .iter()
        .map(|s| (0..inst.n).map(|e| s.contains(&(e + 1))).collect())
        .collect();
    let universe: Vec<usize> = (0..inst.n).collect();
    cover_search(&universe, &sets, inst.k, &mut 0, budget)
}

pub fn solve_ssc_brute(inst: &SscInstance, budget: usize) -> Result<bool, InstanceError> {
    inst.check()?;
    if inst.m + inst.n > 20 {
        return Err(InstanceError::BudgetExceeded(budget));
    }
    let xs: Vec<Vec<bool>> = valuations(inst.m).collect();
    let universe: Vec<usize> = (0..xs.len()).filter(|&i| cnf_holds(&inst.phi, &xs[i])).collect();
    let sets: Vec<Vec<bool>> = valuations(inst.n)
        .map(|y| {
            xs.iter()
                .map(|x| {
                    let full: Vec<bool> = x.iter().chain(&y).copied().collect();
                    cnf_holds(&inst.psi, &full)
                })
                .collect()
        })
        .collect();
    let k = usize::try_from(inst.k).unwrap_or(usize::MAX).min(sets.len());
    cover_search(&universe, &sets, k, &mut 0, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sc_sizes() {
        let inst = ScInstance { n: 1, sets: vec![vec![1]], k: 1 };
        let g = sc_to_sp(&inst).unwrap();
        assert_eq!(g.arena().n(), 6);
        assert_eq!(g.t(), 2);
        assert!(solve_sc_brute(&inst, 100).unwrap());
        let two = ScInstance { n: 2, sets: vec![vec![1], vec![2]], k: 1 };
        assert!(!solve_sc_brute(&two, 100).unwrap());
    }

    #[test]
    fn example_instance() {
        let inst = SscInstance::example();
        assert!(solve_ssc_brute(&inst, 1000).unwrap());
        let sat: Vec<Vec<bool>> = valuations(3).filter(|x| cnf_holds(&inst.phi, x)).collect();
        assert_eq!(sat.len(), 4);
        let (g, layout) = ssc_to_sp(&inst).unwrap();
        assert_eq!(g.t(), 1 + 6 + 2 + 3);
        assert_eq!(layout.t(), g.t());
    }

    #[test]
    fn unsatisfiable_set_formula() {
        // empty phi asks to cover everything; psi = y1 ∧ ¬y1 covers nothing
        let inst = SscInstance { m: 1, n: 1, phi: vec![], psi: vec![vec![2], vec![-2]], k: 1 };
        assert!(!solve_ssc_brute(&inst, 1000).unwrap());
    }
}
