//! Set appearance records and their product with arenas.
//!
//! A record over sets `T_1..T_m` is a permutation of the set indices plus a hit
//! position. Reading a vertex moves the sets containing it to the right end;
//! the hit is the old position of the leftmost of them. Along any play, the
//! sets at or after the least hit seen infinitely often are exactly the sets
//! visited infinitely often.

use std::collections::{HashMap, VecDeque};

use crate::arena::{GameArena, Lasso};
use crate::SizeLimit;

/// Largest number of sets a record can track.
pub const MAX_SETS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SarState {
    /// Set indices (0-based), leftmost first.
    pub perm: Vec<u8>,
    /// 1-based position, `m + 1` when the last vertex was in no set.
    pub hit: u8,
}

impl SarState {
    pub fn initial(m: usize) -> Self {
        assert!(m <= MAX_SETS, "too many sets for a record");
        SarState { perm: (0..m as u8).collect(), hit: 1 }
    }

    pub fn m(&self) -> usize {
        self.perm.len()
    }

    pub fn is_valid(&self) -> bool {
        let m = self.m();
        let mut seen = vec![false; m];
        for &x in &self.perm {
            if x as usize >= m || seen[x as usize] {
                return false;
            }
            seen[x as usize] = true;
        }
        (1..=m + 1).contains(&(self.hit as usize))
    }

    /// Bitmask of the set indices at positions `hit..=m`.
    pub fn suffix_mask(&self) -> u64 {
        self.perm[(self.hit as usize - 1).min(self.m())..]
            .iter()
            .fold(0, |acc, &i| acc | (1u64 << i))
    }
}

/// Bitmask of the sets containing `v`.
pub fn membership(v: usize, sets: &[Vec<usize>]) -> u64 {
    sets.iter().enumerate().fold(0, |acc, (i, s)| if s.contains(&v) { acc | (1 << i) } else { acc })
}

fn step_mask(state: &SarState, mask: u64) -> SarState {
    let inside = |i: &u8| (mask >> i) & 1 == 1;
    let hit = state.perm.iter().position(inside).map_or(state.m() + 1, |p| p + 1);
    let mut perm: Vec<u8> = state.perm.iter().copied().filter(|i| !inside(i)).collect();
    perm.extend(state.perm.iter().copied().filter(inside));
    SarState { perm, hit: hit as u8 }
}

pub fn sar_step(state: &SarState, v: usize, sets: &[Vec<usize>]) -> SarState {
    debug_assert_eq!(state.m(), sets.len());
    step_mask(state, membership(v, sets))
}

/// Indices (0-based) of the sets the record reports as visited infinitely often.
pub fn sets_visited_infinitely(rho: &Lasso, sets: &[Vec<usize>]) -> Vec<usize> {
    let mut s = SarState::initial(sets.len());
    for &v in &rho.prefix {
        s = sar_step(&s, v, sets);
    }
    let k = rho.cycle.len();
    let mut seen: HashMap<SarState, usize> = HashMap::new();
    let mut trace: Vec<SarState> = Vec::new();
    // one entry per full pass over the cycle until the state at position 0 repeats
    let start = loop {
        if let Some(&i) = seen.get(&s) {
            break i;
        }
        seen.insert(s.clone(), trace.len() / k.max(1));
        for &v in &rho.cycle {
            s = sar_step(&s, v, sets);
            trace.push(s.clone());
        }
    };
    let period = &trace[start * k..];
    let best = period.iter().min_by_key(|st| st.hit).expect("cycle is nonempty");
    let mask = best.suffix_mask();
    (0..sets.len()).filter(|i| (mask >> i) & 1 == 1).collect()
}

/// Interned records with memoized transitions over a fixed family of sets.
#[derive(Debug, Clone)]
pub struct SarTable {
    sets: Vec<Vec<usize>>,
    member: Vec<u64>,
    states: Vec<SarState>,
    index: HashMap<SarState, u32>,
    trans: HashMap<(u32, usize), u32>,
}

impl SarTable {
    pub fn new(sets: Vec<Vec<usize>>, n: usize) -> Self {
        let member = (0..n).map(|v| membership(v, &sets)).collect();
        let mut t = SarTable { sets, member, states: Vec::new(), index: HashMap::new(), trans: HashMap::new() };
        let s0 = SarState::initial(t.sets.len());
        t.intern(s0);
        t
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn initial(&self) -> u32 {
        0
    }

    pub fn intern(&mut self, s: SarState) -> u32 {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.states.len() as u32;
        self.states.push(s.clone());
        self.index.insert(s, i);
        i
    }

    pub fn state(&self, id: u32) -> &SarState {
        &self.states[id as usize]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn step(&mut self, id: u32, v: usize) -> u32 {
        if let Some(&j) = self.trans.get(&(id, v)) {
            return j;
        }
        let next = step_mask(&self.states[id as usize], self.member[v]);
        let j = self.intern(next);
        self.trans.insert((id, v), j);
        j
    }

    pub fn hit(&self, id: u32) -> usize {
        self.states[id as usize].hit as usize
    }

    pub fn suffix_mask(&self, id: u32) -> u64 {
        self.states[id as usize].suffix_mask()
    }
}

/// Reachable part of `arena × SAR`; node `(v, s)` moves to `(v', δ(s, v))`.
#[derive(Debug, Clone)]
pub struct SarProductArena {
    pub arena: GameArena,
    pub base: Vec<usize>,
    pub record: Vec<u32>,
    pub table: SarTable,
    index: HashMap<(usize, u32), usize>,
}

impl SarProductArena {
    pub fn node(&self, v: usize, record: u32) -> Option<usize> {
        self.index.get(&(v, record)).copied()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn state(&self, node: usize) -> &SarState {
        self.table.state(self.record[node])
    }
}

/// Product reachable from `(v0, s0)`.
pub fn build_sar_product(arena: &GameArena, sets: &[Vec<usize>], max_states: usize) -> Result<SarProductArena, SizeLimit> {
    build_sar_product_from(arena, sets, &[arena.initial()], max_states)
}

/// Product reachable from `(r, s0)` for every root `r`; the first root is initial.
pub fn build_sar_product_from(
    arena: &GameArena,
    sets: &[Vec<usize>],
    roots: &[usize],
    max_states: usize,
) -> Result<SarProductArena, SizeLimit> {
    let mut table = SarTable::new(sets.to_vec(), arena.n());
    let mut base = Vec::new();
    let mut record = Vec::new();
    let mut index = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut add = |v: usize, r: u32, base: &mut Vec<usize>, record: &mut Vec<u32>, queue: &mut VecDeque<usize>| {
        *index.entry((v, r)).or_insert_with(|| {
            base.push(v);
            record.push(r);
            queue.push_back(base.len() - 1);
            base.len() - 1
        })
    };
    for &r in roots {
        add(r, table.initial(), &mut base, &mut record, &mut queue);
    }
    while let Some(x) = queue.pop_front() {
        if base.len() > max_states {
            return Err(SizeLimit { what: "SAR product", limit: max_states });
        }
        let v = base[x];
        let next = table.step(record[x], v);
        let out: Vec<usize> = arena
            .successors(v)
            .iter()
            .map(|&w| add(w, next, &mut base, &mut record, &mut queue))
            .collect();
        if succ.len() <= x {
            succ.resize(x + 1, Vec::new());
        }
        succ[x] = out;
    }
    succ.resize(base.len(), Vec::new());
    let owner = base.iter().map(|&v| arena.owner(v)).collect();
    let prod = GameArena::from_parts(owner, succ, 0);
    Ok(SarProductArena { arena: prod, base, record, table, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_moves_containing_sets_right() {
        let sets = vec![vec![0], vec![1]];
        let s = SarState::initial(2);
        let s1 = sar_step(&s, 0, &sets);
        assert_eq!(s1, SarState { perm: vec![1, 0], hit: 1 });
        let s2 = sar_step(&s1, 1, &sets);
        assert_eq!(s2, SarState { perm: vec![0, 1], hit: 1 });
        assert_eq!(sar_step(&s, 2, &sets), SarState { perm: vec![0, 1], hit: 3 });
        let both = vec![vec![0], vec![0]];
        assert_eq!(sar_step(&s, 0, &both), SarState { perm: vec![0, 1], hit: 1 });
    }

    #[test]
    fn alternating_cycle_reports_both_sets() {
        let sets = vec![vec![0], vec![1]];
        assert_eq!(sets_visited_infinitely(&Lasso::new(vec![], vec![0, 1]), &sets), vec![0, 1]);
        assert_eq!(sets_visited_infinitely(&Lasso::new(vec![1], vec![0]), &sets), vec![0]);
        assert!(sets_visited_infinitely(&Lasso::new(vec![0, 1], vec![2]), &sets).is_empty());
    }

    #[test]
    fn empty_family_gives_isomorphic_product() {
        let a = GameArena::new(
            vec![crate::arena::Player::P0; 3],
            vec![vec![1], vec![2, 0], vec![0]],
            0,
        )
        .unwrap();
        let p = build_sar_product(&a, &[], 100).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.arena.edge_count(), a.edge_count());
        assert!(build_sar_product(&a, &[vec![0], vec![1], vec![2]], 2).is_err());
    }
}
