//! Zero-sum solvers: attractors, Büchi, co-Büchi, min-parity, generalized
//! Büchi with co-Büchi, and Boolean Büchi through a record product.

use crate::arena::{GameArena, Player};
use crate::objectives::BoolFormula;
use crate::sar::{build_sar_product_from, SarProductArena};
use crate::SizeLimit;

/// Winner of every vertex plus one positional choice for each vertex owned by
/// its winner (`None` where the solver does not provide one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<usize>>,
}

impl SolveResult {
    pub fn winning(&self, p: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == p).collect()
    }

    pub fn winning0(&self) -> Vec<usize> {
        self.winning(Player::P0)
    }

    pub fn winning1(&self) -> Vec<usize> {
        self.winning(Player::P1)
    }

    pub fn wins(&self, p: Player, v: usize) -> bool {
        self.winner[v] == p
    }

    /// Positional choice of `p` at `v`, if `p` owns and wins `v`.
    pub fn choice(&self, p: Player, v: usize) -> Option<usize> {
        if self.winner[v] == p {
            self.strategy[v]
        } else {
            None
        }
    }

    pub fn strategy0(&self) -> Vec<Option<usize>> {
        self.restricted(Player::P0)
    }

    pub fn strategy1(&self) -> Vec<Option<usize>> {
        self.restricted(Player::P1)
    }

    fn restricted(&self, p: Player) -> Vec<Option<usize>> {
        (0..self.winner.len()).map(|v| self.choice(p, v)).collect()
    }

    fn clean(mut self, arena: &GameArena) -> Self {
        for v in 0..self.winner.len() {
            if arena.owner(v) != self.winner[v] {
                self.strategy[v] = None;
            }
        }
        self
    }
}

/// Reusable solver context over one arena.
struct Ctx<'a> {
    arena: &'a GameArena,
    preds: Vec<Vec<usize>>,
}

impl<'a> Ctx<'a> {
    fn new(arena: &'a GameArena) -> Self {
        Ctx { arena, preds: arena.predecessors() }
    }

    /// Attractor of `player` to `target` inside the subgame `alive`, written
    /// as a mask; strategy entries for `player` vertices outside the target
    /// point to a successor closer to it (lowest id among those).
    fn attr(&self, alive: &[bool], player: Player, target: &[bool], strat: &mut [Option<usize>]) -> Vec<bool> {
        let n = self.arena.n();
        let mut inside = vec![false; n];
        let mut rank = vec![usize::MAX; n];
        let mut count: Vec<usize> = (0..n)
            .map(|v| if alive[v] { self.arena.successors(v).iter().filter(|&&w| alive[w]).count() } else { 0 })
            .collect();
        let mut frontier: Vec<usize> = (0..n).filter(|&v| alive[v] && target[v]).collect();
        for &v in &frontier {
            inside[v] = true;
            rank[v] = 0;
        }
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &w in &frontier {
                for &u in &self.preds[w] {
                    if !alive[u] || inside[u] {
                        continue;
                    }
                    let join = if self.arena.owner(u) == player {
                        true
                    } else {
                        count[u] -= 1;
                        count[u] == 0
                    };
                    if join {
                        inside[u] = true;
                        rank[u] = level;
                        next.push(u);
                    }
                }
            }
            frontier = next;
        }
        for v in 0..n {
            if inside[v] && rank[v] > 0 && self.arena.owner(v) == player {
                strat[v] = self.arena.successors(v).iter().copied().filter(|&w| alive[w] && rank[w] < rank[v]).min();
            }
        }
        inside
    }

    fn stay(&self, v: usize, region: &[bool]) -> Option<usize> {
        self.arena.successors(v).iter().copied().filter(|&w| region[w]).min()
    }

    /// Büchi for `player` inside `alive`; fills `winner` and `strat` there.
    fn buchi(&self, alive: &[bool], player: Player, b: &[bool], winner: &mut [Player], strat: &mut [Option<usize>]) {
        let n = self.arena.n();
        let opp = player.opponent();
        let mut alive = alive.to_vec();
        loop {
            let target: Vec<bool> = (0..n).map(|v| alive[v] && b[v]).collect();
            let mut s = vec![None; n];
            let reach = self.attr(&alive, player, &target, &mut s);
            let rest: Vec<bool> = (0..n).map(|v| alive[v] && !reach[v]).collect();
            if !rest.iter().any(|&x| x) {
                for v in 0..n {
                    if alive[v] {
                        winner[v] = player;
                        strat[v] = if target[v] { self.stay(v, &alive) } else { s[v] };
                    }
                }
                return;
            }
            let mut s2 = vec![None; n];
            let lost = self.attr(&alive, opp, &rest, &mut s2);
            for v in 0..n {
                if lost[v] {
                    winner[v] = opp;
                    strat[v] = if rest[v] { self.stay(v, &rest) } else { s2[v] };
                    alive[v] = false;
                }
            }
            if !alive.iter().any(|&x| x) {
                return;
            }
        }
    }

    fn zielonka(&self, alive: &[bool], prio: &[u32], winner: &mut [Player], strat: &mut [Option<usize>]) {
        let n = self.arena.n();
        let mut alive = alive.to_vec();
        loop {
            let Some(p) = (0..n).filter(|&v| alive[v]).map(|v| prio[v]).min() else { return };
            let player = Player::of_parity(p);
            let opp = player.opponent();
            let top: Vec<bool> = (0..n).map(|v| alive[v] && prio[v] == p).collect();
            let mut sa = vec![None; n];
            let a = self.attr(&alive, player, &top, &mut sa);
            let sub: Vec<bool> = (0..n).map(|v| alive[v] && !a[v]).collect();
            self.zielonka(&sub, prio, winner, strat);
            let w_opp: Vec<bool> = (0..n).map(|v| sub[v] && winner[v] == opp).collect();
            if !w_opp.iter().any(|&x| x) {
                for v in 0..n {
                    if a[v] {
                        winner[v] = player;
                        strat[v] = if top[v] { self.stay(v, &alive) } else { sa[v] };
                    }
                }
                return;
            }
            let mut sb = vec![None; n];
            let b = self.attr(&alive, opp, &w_opp, &mut sb);
            for v in 0..n {
                if b[v] {
                    winner[v] = opp;
                    if !w_opp[v] {
                        strat[v] = sb[v];
                    }
                    alive[v] = false;
                }
            }
        }
    }
}

/// Attractor set of `player` towards `target` together with a positional
/// strategy for `player` on the attractor minus the target.
pub fn attractor(arena: &GameArena, player: Player, target: &[usize]) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = arena.n();
    let ctx = Ctx::new(arena);
    let mut t = vec![false; n];
    for &v in target {
        t[v] = true;
    }
    let mut strat = vec![None; n];
    let a = ctx.attr(&vec![true; n], player, &t, &mut strat);
    ((0..n).filter(|&v| a[v]).collect(), strat)
}

fn mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Player 0 wants to visit `b` infinitely often.
pub fn solve_buchi(arena: &GameArena, b: &[usize]) -> SolveResult {
    solve_buchi_for(arena, Player::P0, b)
}

/// Büchi game where `player` wants to visit `b` infinitely often.
pub fn solve_buchi_for(arena: &GameArena, player: Player, b: &[usize]) -> SolveResult {
    let n = arena.n();
    let ctx = Ctx::new(arena);
    let mut winner = vec![player.opponent(); n];
    let mut strat = vec![None; n];
    ctx.buchi(&vec![true; n], player, &mask(n, b), &mut winner, &mut strat);
    SolveResult { winner, strategy: strat }.clean(arena)
}

/// Player 0 wants to visit `avoid` only finitely often.
pub fn solve_cobuchi(arena: &GameArena, avoid: &[usize]) -> SolveResult {
    solve_buchi_for(arena, Player::P1, avoid)
}

/// Min-parity game: Player 0 wins iff the least priority seen infinitely
/// often is even.
pub fn solve_parity(arena: &GameArena, prio: &[u32]) -> SolveResult {
    assert_eq!(prio.len(), arena.n(), "one priority per vertex");
    let n = arena.n();
    let ctx = Ctx::new(arena);
    let mut winner = vec![Player::P0; n];
    let mut strat = vec![None; n];
    ctx.zielonka(&vec![true; n], prio, &mut winner, &mut strat);
    SolveResult { winner, strategy: strat }.clean(arena)
}

/// `protagonist` wants `CoBuchi(avoid) ∧ ⋀ Buchi(B_i)`. Only the opponent's
/// positional strategy is filled in; the protagonist's needs memory.
pub fn solve_cobuchi_and_genbuchi(arena: &GameArena, protagonist: Player, avoid: &[usize], bs: &[Vec<usize>]) -> SolveResult {
    assert!(!bs.is_empty(), "need at least one Büchi set");
    let n = arena.n();
    let ctx = Ctx::new(arena);
    let opp = protagonist.opponent();
    let avoid = mask(n, avoid);
    let bs: Vec<Vec<bool>> = bs.iter().map(|b| mask(n, b)).collect();
    let mut winner = vec![opp; n];
    let mut strat = vec![None; n];
    let mut alive = vec![true; n];
    loop {
        if !alive.iter().any(|&x| x) {
            break;
        }
        let target: Vec<bool> = (0..n).map(|v| alive[v] && avoid[v]).collect();
        let mut sx = vec![None; n];
        let x = ctx.attr(&alive, opp, &target, &mut sx);
        for v in 0..n {
            if x[v] {
                strat[v] = if target[v] { ctx.stay(v, &alive) } else { sx[v] };
            }
        }
        // generalized Büchi for the protagonist on what is left
        let mut g: Vec<bool> = (0..n).map(|v| alive[v] && !x[v]).collect();
        'restart: loop {
            for b in &bs {
                let tb: Vec<bool> = (0..n).map(|v| g[v] && b[v]).collect();
                let mut dummy = vec![None; n];
                let y = ctx.attr(&g, protagonist, &tb, &mut dummy);
                let rest: Vec<bool> = (0..n).map(|v| g[v] && !y[v]).collect();
                if rest.iter().any(|&r| r) {
                    let mut sc = vec![None; n];
                    let c = ctx.attr(&g, opp, &rest, &mut sc);
                    for v in 0..n {
                        if c[v] {
                            strat[v] = if rest[v] { ctx.stay(v, &rest) } else { sc[v] };
                            g[v] = false;
                        }
                    }
                    continue 'restart;
                }
            }
            break;
        }
        if !g.iter().any(|&z| z) {
            break;
        }
        let mut sz = vec![None; n];
        let won = ctx.attr(&alive, protagonist, &g, &mut sz);
        for v in 0..n {
            if won[v] {
                winner[v] = protagonist;
                strat[v] = None;
                alive[v] = false;
            }
        }
    }
    for v in 0..n {
        if winner[v] == protagonist {
            strat[v] = None;
        }
    }
    SolveResult { winner, strategy: strat }.clean(arena)
}

/// Boolean Büchi game solved on the record product.
#[derive(Debug, Clone)]
pub struct BooleanBuchiSolution {
    /// Regions on the base arena; strategies are left empty.
    pub result: SolveResult,
    pub product: SarProductArena,
    pub priority: Vec<u32>,
    pub product_result: SolveResult,
}

impl BooleanBuchiSolution {
    /// Next base vertex for Player 0 at product node `x`.
    pub fn product_choice(&self, x: usize) -> Option<usize> {
        self.product_result.choice(Player::P0, x).map(|y| self.product.base[y])
    }
}

/// Priority of a product node: `2r-2` if the formula holds on the sets at or
/// after the hit, `2r-1` otherwise.
pub fn record_priority(formula: &BoolFormula, hit: usize, suffix: u64) -> u32 {
    let ok = formula.eval(&|i| (1..=64).contains(&i) && (suffix >> (i - 1)) & 1 == 1);
    (2 * hit - if ok { 2 } else { 1 }) as u32
}

pub fn solve_boolean_buchi(
    arena: &GameArena,
    formula: &BoolFormula,
    sets: &[Vec<usize>],
    max_states: usize,
) -> Result<BooleanBuchiSolution, SizeLimit> {
    let n = arena.n();
    let mut roots = vec![arena.initial()];
    roots.extend((0..n).filter(|&v| v != arena.initial()));
    let product = build_sar_product_from(arena, sets, &roots, max_states)?;
    let priority: Vec<u32> = (0..product.len())
        .map(|x| {
            let r = product.record[x];
            record_priority(formula, product.table.hit(r), product.table.suffix_mask(r))
        })
        .collect();
    let product_result = solve_parity(&product.arena, &priority);
    let s0 = product.table.initial();
    let winner = (0..n)
        .map(|v| product_result.winner[product.node(v, s0).expect("every vertex is a root")])
        .collect();
    let result = SolveResult { winner, strategy: vec![None; n] };
    Ok(BooleanBuchiSolution { result, product, priority, product_result })
}

/// PGSolver-style text: a `parity N;` header then `id priority owner successors;`.
pub fn to_pgsolver(arena: &GameArena, prio: &[u32]) -> String {
    let mut out = format!("parity {};\n", arena.n().saturating_sub(1));
    for v in 0..arena.n() {
        let succ: Vec<String> = arena.successors(v).iter().map(|w| w.to_string()).collect();
        out.push_str(&format!("{} {} {} {};\n", v, prio[v], arena.owner(v).index(), succ.join(",")));
    }
    out
}

/// Inverse of [`to_pgsolver`]; vertex names and the header are optional.
pub fn from_pgsolver(text: &str) -> Result<(GameArena, Vec<u32>), String> {
    let mut rows: Vec<(usize, u32, Player, Vec<usize>)> = Vec::new();
    for line in text.lines() {
        let line = line.trim().trim_end_matches(';').trim();
        if line.is_empty() || line.starts_with("parity") || line.starts_with("start") {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut field = |name: &str| parts.next().ok_or_else(|| format!("missing {name} in '{line}'"));
        let id = field("id")?.parse::<usize>().map_err(|e| e.to_string())?;
        let p = field("priority")?.parse::<u32>().map_err(|e| e.to_string())?;
        let owner = match field("owner")? {
            "0" => Player::P0,
            "1" => Player::P1,
            o => return Err(format!("bad owner {o}")),
        };
        let succ = field("successors")?
            .split(',')
            .map(|s| s.parse::<usize>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((id, p, owner, succ));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
        return Err("vertex ids must be 0..n".into());
    }
    let prio = rows.iter().map(|r| r.1).collect();
    let owner = rows.iter().map(|r| r.2).collect();
    let succ = rows.into_iter().map(|r| r.3).collect();
    let arena = GameArena::new(owner, succ, 0).map_err(|e| e.to_string())?;
    Ok((arena, prio))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> GameArena {
        GameArena::new(vec![Player::P0; 3], vec![vec![1], vec![2], vec![2]], 0).unwrap()
    }

    #[test]
    fn attractor_on_a_chain() {
        let (a, s) = attractor(&chain(), Player::P0, &[2]);
        assert_eq!(a, vec![0, 1, 2]);
        assert_eq!(s[0], Some(1));
        assert_eq!(attractor(&chain(), Player::P1, &[]).0, Vec::<usize>::new());
    }

    #[test]
    fn buchi_basics() {
        let a = chain();
        assert!(solve_buchi(&a, &[]).winning0().is_empty());
        assert_eq!(solve_buchi(&a, &[2]).winning0(), vec![0, 1, 2]);
        assert!(solve_buchi(&a, &[1]).winning0().is_empty());
    }

    #[test]
    fn parity_extremes() {
        let a = GameArena::new(vec![Player::P0, Player::P1], vec![vec![1], vec![0, 1]], 0).unwrap();
        assert_eq!(solve_parity(&a, &[0, 2]).winning0(), vec![0, 1]);
        assert!(solve_parity(&a, &[1, 3]).winning0().is_empty());
        // Player 1 stays on her self-loop with priority 1
        assert!(solve_parity(&a, &[0, 1]).winning0().is_empty());
    }

    #[test]
    fn genbuchi_extremes() {
        let a = chain();
        let all = vec![0, 1, 2];
        let r = solve_cobuchi_and_genbuchi(&a, Player::P0, &[], std::slice::from_ref(&all));
        assert_eq!(r.winning0(), all);
        let r = solve_cobuchi_and_genbuchi(&a, Player::P0, &all, std::slice::from_ref(&all));
        assert!(r.winning0().is_empty());
    }

    #[test]
    fn pgsolver_round_trip() {
        let a = chain();
        let text = to_pgsolver(&a, &[0, 1, 2]);
        let (b, p) = from_pgsolver(&text).unwrap();
        assert_eq!(b, a);
        assert_eq!(p, vec![0, 1, 2]);
    }
}
