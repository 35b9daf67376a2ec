//! Game arenas, lassos and the two-successor normalization.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Player {
    P0,
    P1,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P0 => Player::P1,
            Player::P1 => Player::P0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::P0 => 0,
            Player::P1 => 1,
        }
    }

    /// Owner of an even priority in min-parity games.
    pub fn of_parity(p: u32) -> Player {
        if p.is_multiple_of(2) {
            Player::P0
        } else {
            Player::P1
        }
    }
}

impl From<Player> for u8 {
    fn from(p: Player) -> u8 {
        p.index() as u8
    }
}

impl TryFrom<u8> for Player {
    type Error = String;
    fn try_from(x: u8) -> Result<Self, Self::Error> {
        match x {
            0 => Ok(Player::P0),
            1 => Ok(Player::P1),
            _ => Err(format!("unknown player {x}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("vertex {0} has no successor")]
    DeadEnd(usize),
    #[error("vertex {0} has no valid owner")]
    UnknownOwner(usize),
    #[error("initial vertex is not in the arena")]
    BadInitial,
    #[error("edge {0} -> {1} points outside the arena")]
    BadSuccessor(usize, usize),
    #[error("vertex {0} lists successor {1} twice")]
    DuplicateEdge(usize, usize),
    #[error("label {0} points outside the arena")]
    BadLabel(String),
    #[error("arena declares {declared} vertices but has {found} edge lists")]
    EdgeCount { declared: usize, found: usize },
}

/// Every violation found while validating an arena.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub errors: Vec<ArenaError>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.errors.iter().map(|e| e.to_string()).collect();
        write!(f, "invalid arena: {}", msgs.join("; "))
    }
}

/// Unvalidated arena as it appears in JSON files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArena {
    pub vertices: usize,
    pub owner: Vec<i64>,
    pub edges: Vec<Vec<usize>>,
    pub initial: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, usize>,
}

pub fn validate(raw: &RawArena) -> Result<(), ValidationReport> {
    let n = raw.vertices;
    let mut errors = Vec::new();
    if raw.edges.len() != n {
        errors.push(ArenaError::EdgeCount { declared: n, found: raw.edges.len() });
    }
    for v in 0..n {
        match raw.owner.get(v) {
            Some(0) | Some(1) => {}
            _ => errors.push(ArenaError::UnknownOwner(v)),
        }
    }
    for (v, succ) in raw.edges.iter().enumerate().take(n) {
        if succ.is_empty() {
            errors.push(ArenaError::DeadEnd(v));
        }
        for (i, &w) in succ.iter().enumerate() {
            if w >= n {
                errors.push(ArenaError::BadSuccessor(v, w));
            } else if succ[..i].contains(&w) {
                errors.push(ArenaError::DuplicateEdge(v, w));
            }
        }
    }
    if raw.initial >= n {
        errors.push(ArenaError::BadInitial);
    }
    for (name, &v) in &raw.labels {
        if v >= n {
            errors.push(ArenaError::BadLabel(name.clone()));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { errors })
    }
}

/// A validated game graph. Vertices are `0..n`, successor lists are ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RawArena", try_from = "RawArena")]
pub struct GameArena {
    owner: Vec<Player>,
    succ: Vec<Vec<usize>>,
    initial: usize,
    labels: BTreeMap<String, usize>,
}

impl TryFrom<RawArena> for GameArena {
    type Error = ValidationReport;
    fn try_from(raw: RawArena) -> Result<Self, Self::Error> {
        validate(&raw)?;
        Ok(GameArena {
            owner: raw
                .owner
                .iter()
                .map(|&o| if o == 0 { Player::P0 } else { Player::P1 })
                .collect(),
            succ: raw.edges,
            initial: raw.initial,
            labels: raw.labels,
        })
    }
}

impl From<GameArena> for RawArena {
    fn from(a: GameArena) -> RawArena {
        RawArena {
            vertices: a.owner.len(),
            owner: a.owner.iter().map(|p| p.index() as i64).collect(),
            edges: a.succ,
            initial: a.initial,
            labels: a.labels,
        }
    }
}

impl GameArena {
    pub fn new(owner: Vec<Player>, succ: Vec<Vec<usize>>, initial: usize) -> Result<Self, ValidationReport> {
        let raw = RawArena {
            vertices: owner.len(),
            owner: owner.iter().map(|p| p.index() as i64).collect(),
            edges: succ,
            initial,
            labels: BTreeMap::new(),
        };
        GameArena::try_from(raw)
    }

    /// Builds an arena the caller guarantees to be valid (product constructions).
    pub(crate) fn from_parts(owner: Vec<Player>, succ: Vec<Vec<usize>>, initial: usize) -> Self {
        debug_assert!(succ.iter().all(|s| !s.is_empty()));
        debug_assert!(initial < owner.len());
        GameArena { owner, succ, initial, labels: BTreeMap::new() }
    }

    pub fn with_labels(mut self, labels: BTreeMap<String, usize>) -> Result<Self, ValidationReport> {
        let bad: Vec<ArenaError> = labels
            .iter()
            .filter(|(_, &v)| v >= self.n())
            .map(|(k, _)| ArenaError::BadLabel(k.clone()))
            .collect();
        if !bad.is_empty() {
            return Err(ValidationReport { errors: bad });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_initial(&self, v: usize) -> Self {
        assert!(v < self.n(), "initial vertex out of range");
        let mut a = self.clone();
        a.initial = v;
        a
    }

    pub fn n(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owner
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn labels(&self) -> &BTreeMap<String, usize> {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.labels.get(label).copied()
    }

    pub fn label_of(&self, v: usize) -> Option<&str> {
        self.labels.iter().find(|(_, &w)| w == v).map(|(k, _)| k.as_str())
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.succ[u].contains(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn max_out_degree(&self) -> usize {
        self.succ.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.n()];
        for (u, s) in self.succ.iter().enumerate() {
            for &v in s {
                pred[v].push(u);
            }
        }
        pred
    }

    /// Vertices reachable from the initial vertex, as a membership mask.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Graphviz rendering; meant for small arenas.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.n() {
            let shape = match self.owner[v] {
                Player::P0 => "circle",
                Player::P1 => "box",
            };
            let name = self.label_of(v).map(str::to_string).unwrap_or_else(|| format!("v{v}"));
            let extra = if v == self.initial { ", penwidth=2" } else { "" };
            out.push_str(&format!("  {v} [label=\"{name}\", shape={shape}{extra}];\n"));
        }
        for (u, s) in self.succ.iter().enumerate() {
            for v in s {
                out.push_str(&format!("  {u} -> {v};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("lasso has an empty cycle")]
    EmptyCycle,
    #[error("lasso mentions vertex {0} outside the arena")]
    UnknownVertex(usize),
    #[error("lasso uses non-edge {0} -> {1}")]
    NotAnEdge(usize, usize),
    #[error("lasso does not start at the initial vertex")]
    WrongStart,
}

/// Ultimately periodic play `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Lasso {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Self {
        Lasso { prefix, cycle }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn first(&self) -> usize {
        self.prefix.first().copied().unwrap_or(self.cycle[0])
    }

    /// The vertex at position `i` of the infinite play.
    pub fn at(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Vertices occurring somewhere in the play, sorted.
    pub fn occ(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.prefix.iter().chain(self.cycle.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Vertices occurring infinitely often, sorted.
    pub fn inf(&self) -> Vec<usize> {
        let mut v = self.cycle.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn check(&self, arena: &GameArena, from_initial: bool) -> Result<(), LassoError> {
        if self.cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        if let Some(&v) = self.prefix.iter().chain(&self.cycle).find(|&&v| v >= arena.n()) {
            return Err(LassoError::UnknownVertex(v));
        }
        if from_initial && self.first() != arena.initial() {
            return Err(LassoError::WrongStart);
        }
        let word: Vec<usize> = self.prefix.iter().chain(&self.cycle).copied().collect();
        for w in word.windows(2) {
            if !arena.is_edge(w[0], w[1]) {
                return Err(LassoError::NotAnEdge(w[0], w[1]));
            }
        }
        let last = *self.cycle.last().unwrap();
        if !arena.is_edge(last, self.cycle[0]) {
            return Err(LassoError::NotAnEdge(last, self.cycle[0]));
        }
        Ok(())
    }

    /// Same play with a primitive cycle and the shortest possible prefix.
    pub fn canonical(&self) -> Lasso {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| cycle[i] == cycle[i - p]) {
                cycle.truncate(p);
                break;
            }
        }
        let mut prefix = self.prefix.clone();
        while let (Some(&a), Some(&b)) = (prefix.last(), cycle.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        Lasso { prefix, cycle }
    }

    pub fn same_play(&self, other: &Lasso) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Every lasso from `start` whose vertices are pairwise distinct and whose
/// length `|prefix| + |cycle|` is at most `max_len`, over an arbitrary graph.
pub fn simple_lassos_from<F, I>(start: usize, max_len: usize, mut succ: F) -> Vec<Lasso>
where
    F: FnMut(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    let mut path = vec![start];
    let mut on_path: HashMap<usize, usize> = HashMap::from([(start, 0)]);
    let mut stack: Vec<Vec<usize>> = vec![succ(start).into_iter().collect::<Vec<_>>()];
    let mut idx = vec![0usize];
    while let Some(top) = stack.last() {
        let d = stack.len() - 1;
        if idx[d] >= top.len() {
            stack.pop();
            idx.pop();
            let v = path.pop().unwrap();
            on_path.remove(&v);
            continue;
        }
        let s = top[idx[d]];
        idx[d] += 1;
        if let Some(&j) = on_path.get(&s) {
            out.push(Lasso { prefix: path[..j].to_vec(), cycle: path[j..].to_vec() });
        } else if path.len() < max_len {
            on_path.insert(s, path.len());
            path.push(s);
            stack.push(succ(s).into_iter().collect());
            idx.push(0);
        }
    }
    out
}

pub fn enumerate_simple_lassos(arena: &GameArena, max_len: usize) -> impl Iterator<Item = Lasso> {
    simple_lassos_from(arena.initial(), max_len, |v| arena.successors(v).to_vec()).into_iter()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexRole {
    Original(usize),
    /// Inserted tree vertex; `root` is the original vertex owning the tree.
    Internal { root: usize },
}

/// Bookkeeping linking a normalized arena to the arena it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMapping {
    pub forward: Vec<usize>,
    pub roles: Vec<VertexRole>,
    paths: BTreeMap<(usize, usize), Vec<usize>>,
}

impl VertexMapping {
    pub fn identity(arena: &GameArena) -> Self {
        let n = arena.n();
        let mut paths = BTreeMap::new();
        for u in 0..n {
            for &v in arena.successors(u) {
                paths.insert((u, v), vec![u, v]);
            }
        }
        VertexMapping { forward: (0..n).collect(), roles: (0..n).map(VertexRole::Original).collect(), paths }
    }

    /// Mapping for a rewrite that kept original ids `0..n` and appended the
    /// vertices described by `roles[n..]`.
    pub fn from_paths(n: usize, roles: Vec<VertexRole>, paths: Vec<((usize, usize), Vec<usize>)>) -> Self {
        VertexMapping { forward: (0..n).collect(), roles, paths: paths.into_iter().collect() }
    }

    pub fn original_count(&self) -> usize {
        self.forward.len()
    }

    pub fn inserted_count(&self) -> usize {
        self.roles.len() - self.forward.len()
    }

    /// Original vertex represented by a normalized vertex, if any.
    pub fn project(&self, v: usize) -> Option<usize> {
        match self.roles[v] {
            VertexRole::Original(o) => Some(o),
            VertexRole::Internal { .. } => None,
        }
    }

    pub fn is_internal(&self, v: usize) -> bool {
        matches!(self.roles[v], VertexRole::Internal { .. })
    }

    /// Normalized path (both ends included) replacing the original edge `u -> v`.
    pub fn path(&self, u: usize, v: usize) -> Option<&[usize]> {
        self.paths.get(&(u, v)).map(Vec::as_slice)
    }

    /// Erases inserted vertices from a normalized lasso.
    pub fn project_lasso(&self, l: &Lasso) -> Lasso {
        let keep = |xs: &[usize]| xs.iter().filter_map(|&v| self.project(v)).collect::<Vec<_>>();
        Lasso { prefix: keep(&l.prefix), cycle: keep(&l.cycle) }
    }

    /// Replaces every edge of an original lasso by its normalized path.
    pub fn lift_lasso(&self, l: &Lasso) -> Lasso {
        let expand = |from: usize, to: usize, out: &mut Vec<usize>| {
            let p = &self.paths[&(from, to)];
            out.extend_from_slice(&p[..p.len() - 1]);
        };
        let mut prefix = Vec::new();
        let word: Vec<usize> = l.prefix.iter().chain(l.cycle.iter().take(1)).copied().collect();
        for w in word.windows(2) {
            expand(self.forward[w[0]], self.forward[w[1]], &mut prefix);
        }
        let mut cycle = Vec::new();
        let k = l.cycle.len();
        for i in 0..k {
            expand(self.forward[l.cycle[i]], self.forward[l.cycle[(i + 1) % k]], &mut cycle);
        }
        Lasso { prefix, cycle }
    }
}

/// Rewrites the arena so that every vertex has at most two successors.
///
/// A vertex with `ℓ > 2` successors becomes the root of a binary tree whose
/// leaves are its successors; with a self-loop the loop stays and the other
/// `ℓ - 1` successors hang below a fresh tree. Original vertices keep their ids.
pub fn normalize_two_successors(arena: &GameArena) -> (GameArena, VertexMapping) {
    let n = arena.n();
    let mut owner: Vec<Player> = arena.owners().to_vec();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roles: Vec<VertexRole> = (0..n).map(VertexRole::Original).collect();
    let mut paths: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    fn build(
        leaves: &[usize],
        root: usize,
        at: Option<usize>,
        owner: &mut Vec<Player>,
        succ: &mut Vec<Vec<usize>>,
        roles: &mut Vec<VertexRole>,
        trail: &mut Vec<usize>,
        paths: &mut BTreeMap<(usize, usize), Vec<usize>>,
    ) -> usize {
        if leaves.len() == 1 {
            let mut p = trail.clone();
            p.push(leaves[0]);
            paths.insert((root, leaves[0]), p);
            return leaves[0];
        }
        let node = match at {
            Some(v) => v,
            None => {
                owner.push(owner[root]);
                succ.push(Vec::new());
                roles.push(VertexRole::Internal { root });
                owner.len() - 1
            }
        };
        trail.push(node);
        let mid = leaves.len().div_ceil(2);
        let l = build(&leaves[..mid], root, None, owner, succ, roles, trail, paths);
        let r = build(&leaves[mid..], root, None, owner, succ, roles, trail, paths);
        trail.pop();
        succ[node] = vec![l, r];
        node
    }

    for v in 0..n {
        let s = arena.successors(v);
        if s.len() <= 2 {
            succ[v] = s.to_vec();
            for &w in s {
                paths.insert((v, w), vec![v, w]);
            }
            continue;
        }
        if let Some(loop_pos) = s.iter().position(|&w| w == v) {
            let others: Vec<usize> = s.iter().copied().filter(|&w| w != v).collect();
            paths.insert((v, v), vec![v, v]);
            let mut trail = vec![v];
            let sub = build(&others, v, None, &mut owner, &mut succ, &mut roles, &mut trail, &mut paths);
            succ[v] = if loop_pos == 0 { vec![v, sub] } else { vec![sub, v] };
        } else {
            let mut trail = Vec::new();
            build(s, v, Some(v), &mut owner, &mut succ, &mut roles, &mut trail, &mut paths);
        }
    }
    let out = GameArena {
        owner,
        succ,
        initial: arena.initial(),
        labels: arena.labels().clone(),
    };
    let mapping = VertexMapping { forward: (0..n).collect(), roles, paths };
    (out, mapping)
}
