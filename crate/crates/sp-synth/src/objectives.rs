//! Objectives, payoffs and SP games.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arena::{GameArena, Lasso, LassoError, VertexMapping, VertexRole};

/// Largest number of Player-1 objectives a payoff word can hold.
pub const MAX_T: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectiveError {
    #[error("objective refers to vertex {vertex} but the arena has {n} vertices")]
    KindMismatch { vertex: usize, n: usize },
    #[error("objective kind {0:?} has no Boolean Büchi encoding")]
    KindUnsupported(ObjectiveKind),
    #[error("all objectives of an SP game must share one kind, found {0:?} and {1:?}")]
    Heterogeneous(ObjectiveKind, ObjectiveKind),
    #[error("an SP game needs at least one Player-1 objective")]
    NoObjectives,
    #[error("{0} Player-1 objectives exceed the supported maximum")]
    TooManyObjectives(usize),
    #[error("formula uses variable x{var} but only {sets} sets are given")]
    BadVariable { var: usize, sets: usize },
    #[error("malformed formula: {0}")]
    BadFormula(String),
    #[error(transparent)]
    Lasso(#[from] LassoError),
}

/// Boolean formula over variables `x1..xm`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolFormula {
    True,
    False,
    Var(usize),
    Not(Box<BoolFormula>),
    And(Vec<BoolFormula>),
    Or(Vec<BoolFormula>),
}

impl BoolFormula {
    pub fn var(i: usize) -> Self {
        BoolFormula::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: BoolFormula) -> Self {
        BoolFormula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<BoolFormula>) -> Self {
        match fs.len() {
            0 => BoolFormula::True,
            1 => fs.into_iter().next().unwrap(),
            _ => BoolFormula::And(fs),
        }
    }

    pub fn or(fs: Vec<BoolFormula>) -> Self {
        match fs.len() {
            0 => BoolFormula::False,
            1 => fs.into_iter().next().unwrap(),
            _ => BoolFormula::Or(fs),
        }
    }

    pub fn eval(&self, val: &dyn Fn(usize) -> bool) -> bool {
        match self {
            BoolFormula::True => true,
            BoolFormula::False => false,
            BoolFormula::Var(i) => val(*i),
            BoolFormula::Not(f) => !f.eval(val),
            BoolFormula::And(fs) => fs.iter().all(|f| f.eval(val)),
            BoolFormula::Or(fs) => fs.iter().any(|f| f.eval(val)),
        }
    }

    /// Evaluates against a bitmask where bit `i-1` holds `xi`.
    pub fn eval_mask(&self, mask: u128) -> bool {
        self.eval(&|i| (1..=128).contains(&i) && (mask >> (i - 1)) & 1 == 1)
    }

    /// Number of connective and variable symbols, n-ary connectives counted as
    /// their binary expansion.
    pub fn size(&self) -> usize {
        match self {
            BoolFormula::True | BoolFormula::False | BoolFormula::Var(_) => 1,
            BoolFormula::Not(f) => 1 + f.size(),
            BoolFormula::And(fs) | BoolFormula::Or(fs) => {
                fs.len().saturating_sub(1) + fs.iter().map(BoolFormula::size).sum::<usize>()
            }
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            BoolFormula::True | BoolFormula::False => 0,
            BoolFormula::Var(i) => *i,
            BoolFormula::Not(f) => f.max_var(),
            BoolFormula::And(fs) | BoolFormula::Or(fs) => fs.iter().map(BoolFormula::max_var).max().unwrap_or(0),
        }
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, f: &dyn Fn(usize) -> BoolFormula) -> BoolFormula {
        match self {
            BoolFormula::True => BoolFormula::True,
            BoolFormula::False => BoolFormula::False,
            BoolFormula::Var(i) => f(*i),
            BoolFormula::Not(g) => BoolFormula::not(g.map_vars(f)),
            BoolFormula::And(gs) => BoolFormula::And(gs.iter().map(|g| g.map_vars(f)).collect()),
            BoolFormula::Or(gs) => BoolFormula::Or(gs.iter().map(|g| g.map_vars(f)).collect()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            BoolFormula::True => json!(["true"]),
            BoolFormula::False => json!(["false"]),
            BoolFormula::Var(i) => json!(["var", i]),
            BoolFormula::Not(f) => json!(["not", f.to_json()]),
            BoolFormula::And(fs) | BoolFormula::Or(fs) => {
                let op = if matches!(self, BoolFormula::And(_)) { "and" } else { "or" };
                let mut v = vec![json!(op)];
                v.extend(fs.iter().map(BoolFormula::to_json));
                Value::Array(v)
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, ObjectiveError> {
        let bad = |m: &str| ObjectiveError::BadFormula(m.to_string());
        let arr = v.as_array().ok_or_else(|| bad("expected an array"))?;
        let op = arr.first().and_then(Value::as_str).ok_or_else(|| bad("missing operator"))?;
        let args = &arr[1..];
        match op {
            "true" => Ok(BoolFormula::True),
            "false" => Ok(BoolFormula::False),
            "var" => {
                let i = args
                    .first()
                    .and_then(Value::as_u64)
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| bad("var needs an index >= 1"))?;
                Ok(BoolFormula::Var(i as usize))
            }
            "not" => {
                if args.len() != 1 {
                    return Err(bad("not takes one argument"));
                }
                Ok(BoolFormula::not(BoolFormula::from_json(&args[0])?))
            }
            "and" | "or" => {
                let fs = args.iter().map(BoolFormula::from_json).collect::<Result<Vec<_>, _>>()?;
                Ok(if op == "and" { BoolFormula::And(fs) } else { BoolFormula::Or(fs) })
            }
            other => Err(bad(&format!("unknown operator {other}"))),
        }
    }
}

impl Serialize for BoolFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoolFormula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        BoolFormula::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveKind {
    Reach,
    Safe,
    Buchi,
    CoBuchi,
    BooleanBuchi,
    Parity,
    Muller,
    Streett,
    Rabin,
}

impl ObjectiveKind {
    pub fn is_prefix_independent(self) -> bool {
        !matches!(self, ObjectiveKind::Reach | ObjectiveKind::Safe)
    }
}

/// One objective; vertex sets are lists of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ObjectiveSpec {
    Reach { target: Vec<usize> },
    Safe { safe: Vec<usize> },
    Buchi { set: Vec<usize> },
    CoBuchi { set: Vec<usize> },
    BooleanBuchi { formula: BoolFormula, sets: Vec<Vec<usize>> },
    /// Min-parity: won iff the least priority seen infinitely often is even.
    Parity { priority: Vec<u32> },
    /// Won iff the set of priorities seen infinitely often belongs to `family`.
    Muller { priority: Vec<u32>, family: Vec<Vec<u32>> },
    Streett { pairs: Vec<(Vec<usize>, Vec<usize>)> },
    Rabin { pairs: Vec<(Vec<usize>, Vec<usize>)> },
}

fn meets(set: &[usize], sorted: &[usize]) -> bool {
    set.iter().any(|v| sorted.binary_search(v).is_ok())
}

fn subset(sorted: &[usize], set: &[usize]) -> bool {
    sorted.iter().all(|v| set.contains(v))
}

/// Smallest even number at least the largest priority.
pub fn even_ceiling(priority: &[u32]) -> u32 {
    let m = priority.iter().copied().max().unwrap_or(0);
    m + (m & 1)
}

impl ObjectiveSpec {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            ObjectiveSpec::Reach { .. } => ObjectiveKind::Reach,
            ObjectiveSpec::Safe { .. } => ObjectiveKind::Safe,
            ObjectiveSpec::Buchi { .. } => ObjectiveKind::Buchi,
            ObjectiveSpec::CoBuchi { .. } => ObjectiveKind::CoBuchi,
            ObjectiveSpec::BooleanBuchi { .. } => ObjectiveKind::BooleanBuchi,
            ObjectiveSpec::Parity { .. } => ObjectiveKind::Parity,
            ObjectiveSpec::Muller { .. } => ObjectiveKind::Muller,
            ObjectiveSpec::Streett { .. } => ObjectiveKind::Streett,
            ObjectiveSpec::Rabin { .. } => ObjectiveKind::Rabin,
        }
    }

    fn vertex_sets(&self) -> Vec<&Vec<usize>> {
        match self {
            ObjectiveSpec::Reach { target: s }
            | ObjectiveSpec::Safe { safe: s }
            | ObjectiveSpec::Buchi { set: s }
            | ObjectiveSpec::CoBuchi { set: s } => vec![s],
            ObjectiveSpec::BooleanBuchi { sets, .. } => sets.iter().collect(),
            ObjectiveSpec::Streett { pairs } | ObjectiveSpec::Rabin { pairs } => {
                pairs.iter().flat_map(|(e, f)| [e, f]).collect()
            }
            ObjectiveSpec::Parity { .. } | ObjectiveSpec::Muller { .. } => vec![],
        }
    }

    /// Checks that the objective fits an arena with `n` vertices.
    pub fn check(&self, n: usize) -> Result<(), ObjectiveError> {
        for s in self.vertex_sets() {
            if let Some(&v) = s.iter().find(|&&v| v >= n) {
                return Err(ObjectiveError::KindMismatch { vertex: v, n });
            }
        }
        match self {
            ObjectiveSpec::Parity { priority } | ObjectiveSpec::Muller { priority, .. } if priority.len() != n => {
                Err(ObjectiveError::KindMismatch { vertex: priority.len().max(n) - 1, n })
            }
            ObjectiveSpec::BooleanBuchi { formula, sets } if formula.max_var() > sets.len() => {
                Err(ObjectiveError::BadVariable { var: formula.max_var(), sets: sets.len() })
            }
            _ => Ok(()),
        }
    }

    /// Sorted, deduplicated copy of every vertex set.
    pub fn normalized(&self) -> ObjectiveSpec {
        let norm = |s: &Vec<usize>| {
            let b: BTreeSet<usize> = s.iter().copied().collect();
            b.into_iter().collect::<Vec<_>>()
        };
        match self {
            ObjectiveSpec::Reach { target } => ObjectiveSpec::Reach { target: norm(target) },
            ObjectiveSpec::Safe { safe } => ObjectiveSpec::Safe { safe: norm(safe) },
            ObjectiveSpec::Buchi { set } => ObjectiveSpec::Buchi { set: norm(set) },
            ObjectiveSpec::CoBuchi { set } => ObjectiveSpec::CoBuchi { set: norm(set) },
            ObjectiveSpec::BooleanBuchi { formula, sets } => {
                ObjectiveSpec::BooleanBuchi { formula: formula.clone(), sets: sets.iter().map(norm).collect() }
            }
            ObjectiveSpec::Parity { priority } => ObjectiveSpec::Parity { priority: priority.clone() },
            ObjectiveSpec::Muller { priority, family } => {
                let mut fam: Vec<Vec<u32>> = family
                    .iter()
                    .map(|q| q.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
                    .collect();
                fam.sort();
                fam.dedup();
                ObjectiveSpec::Muller { priority: priority.clone(), family: fam }
            }
            ObjectiveSpec::Streett { pairs } => {
                ObjectiveSpec::Streett { pairs: pairs.iter().map(|(e, f)| (norm(e), norm(f))).collect() }
            }
            ObjectiveSpec::Rabin { pairs } => {
                ObjectiveSpec::Rabin { pairs: pairs.iter().map(|(e, f)| (norm(e), norm(f))).collect() }
            }
        }
    }

    /// Verdict on a play with sorted occurrence set `occ` and sorted
    /// infinity set `inf`.
    pub fn holds(&self, occ: &[usize], inf: &[usize]) -> bool {
        match self {
            ObjectiveSpec::Reach { target } => meets(target, occ),
            ObjectiveSpec::Safe { safe } => subset(occ, safe),
            ObjectiveSpec::Buchi { set } => meets(set, inf),
            ObjectiveSpec::CoBuchi { set } => !meets(set, inf),
            ObjectiveSpec::BooleanBuchi { formula, sets } => {
                formula.eval(&|i| i >= 1 && i <= sets.len() && meets(&sets[i - 1], inf))
            }
            ObjectiveSpec::Parity { priority } => {
                inf.iter().map(|&v| priority[v]).min().is_some_and(|p| p % 2 == 0)
            }
            ObjectiveSpec::Muller { priority, family } => {
                let seen: BTreeSet<u32> = inf.iter().map(|&v| priority[v]).collect();
                family.iter().any(|q| q.len() == seen.len() && q.iter().all(|p| seen.contains(p)))
            }
            ObjectiveSpec::Streett { pairs } => pairs.iter().all(|(e, f)| meets(e, inf) || !meets(f, inf)),
            ObjectiveSpec::Rabin { pairs } => pairs.iter().any(|(e, f)| !meets(e, inf) && meets(f, inf)),
        }
    }
}

pub fn eval_lasso(obj: &ObjectiveSpec, rho: &Lasso) -> Result<bool, ObjectiveError> {
    if rho.cycle.is_empty() {
        return Err(LassoError::EmptyCycle.into());
    }
    let occ = rho.occ();
    let bound = match obj {
        ObjectiveSpec::Parity { priority } | ObjectiveSpec::Muller { priority, .. } => priority.len(),
        _ => usize::MAX,
    };
    if let Some(&v) = occ.iter().find(|&&v| v >= bound) {
        return Err(ObjectiveError::KindMismatch { vertex: v, n: bound });
    }
    Ok(obj.normalized().holds(&occ, &rho.inf()))
}

/// Player 1's payoff vector; bit `i` is objective `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payoff {
    bits: u64,
    t: u8,
}

impl Payoff {
    pub fn new(bits: u64, t: usize) -> Self {
        assert!(t <= MAX_T, "payoff width exceeds {MAX_T}");
        let mask = if t == 64 { u64::MAX } else { (1u64 << t) - 1 };
        Payoff { bits: bits & mask, t: t as u8 }
    }

    pub fn from_bools(bs: &[bool]) -> Self {
        let bits = bs.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
        Payoff::new(bits, bs.len())
    }

    pub fn zero(t: usize) -> Self {
        Payoff::new(0, t)
    }

    pub fn top(t: usize) -> Self {
        Payoff::new(u64::MAX, t)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.t as usize
    }

    pub fn get(self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn ones(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn leq(self, other: Payoff) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn lt(self, other: Payoff) -> bool {
        self.leq(other) && self.bits != other.bits
    }

    pub fn comparable(self, other: Payoff) -> bool {
        self.leq(other) || other.leq(self)
    }

    pub fn to_bools(self) -> Vec<bool> {
        (0..self.width()).map(|i| self.get(i)).collect()
    }

    /// All `2^t` payoffs in increasing bit order.
    pub fn all(t: usize) -> impl Iterator<Item = Payoff> {
        assert!(t < 32, "too many payoffs to enumerate");
        (0..(1u64 << t)).map(move |b| Payoff::new(b, t))
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.to_bools().iter().map(|&b| if b { "1" } else { "0" }).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Serialize for Payoff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<u8> = self.to_bools().iter().map(|&b| b as u8).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Payoff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        if v.len() > MAX_T || v.iter().any(|&b| b > 1) {
            return Err(serde::de::Error::custom("payoff must be a list of at most 64 bits"));
        }
        Ok(Payoff::from_bools(&v.iter().map(|&b| b == 1).collect::<Vec<_>>()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtendedPayoff {
    pub won: bool,
    pub payoff: Payoff,
}

impl fmt::Display for ExtendedPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.won as u8, self.payoff)
    }
}

pub fn is_antichain(ps: &[Payoff]) -> bool {
    ps.iter().enumerate().all(|(i, &p)| ps[i + 1..].iter().all(|&q| !p.comparable(q)))
}

/// Maximal elements, sorted.
pub fn maximal_elements(ps: impl IntoIterator<Item = Payoff>) -> Vec<Payoff> {
    let mut all: Vec<Payoff> = ps.into_iter().collect();
    all.sort();
    all.dedup();
    let mut out: Vec<Payoff> = all.iter().copied().filter(|&p| !all.iter().any(|&q| p.lt(q))).collect();
    out.sort();
    out
}

/// Stackelberg-Pareto game: one objective for Player 0, `t` for Player 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGame", into = "RawGame")]
pub struct SPGame {
    arena: GameArena,
    objective0: ObjectiveSpec,
    objectives1: Vec<ObjectiveSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGame {
    arena: GameArena,
    objective0: ObjectiveSpec,
    objectives1: Vec<ObjectiveSpec>,
}

impl TryFrom<RawGame> for SPGame {
    type Error = ObjectiveError;
    fn try_from(r: RawGame) -> Result<Self, Self::Error> {
        SPGame::new(r.arena, r.objective0, r.objectives1)
    }
}

impl From<SPGame> for RawGame {
    fn from(g: SPGame) -> RawGame {
        RawGame { arena: g.arena, objective0: g.objective0, objectives1: g.objectives1 }
    }
}

impl SPGame {
    pub fn new(arena: GameArena, objective0: ObjectiveSpec, objectives1: Vec<ObjectiveSpec>) -> Result<Self, ObjectiveError> {
        if objectives1.is_empty() {
            return Err(ObjectiveError::NoObjectives);
        }
        if objectives1.len() > MAX_T {
            return Err(ObjectiveError::TooManyObjectives(objectives1.len()));
        }
        let k = objective0.kind();
        for o in &objectives1 {
            if o.kind() != k {
                return Err(ObjectiveError::Heterogeneous(k, o.kind()));
            }
        }
        for o in std::iter::once(&objective0).chain(&objectives1) {
            o.check(arena.n())?;
        }
        Ok(SPGame {
            arena,
            objective0: objective0.normalized(),
            objectives1: objectives1.iter().map(ObjectiveSpec::normalized).collect(),
        })
    }

    pub fn arena(&self) -> &GameArena {
        &self.arena
    }

    pub fn objective0(&self) -> &ObjectiveSpec {
        &self.objective0
    }

    pub fn objectives1(&self) -> &[ObjectiveSpec] {
        &self.objectives1
    }

    pub fn t(&self) -> usize {
        self.objectives1.len()
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.objective0.kind()
    }

    /// Same objectives on a different initial vertex.
    pub fn with_initial(&self, v: usize) -> SPGame {
        SPGame { arena: self.arena.with_initial(v), ..self.clone() }
    }

    pub fn payoff_from_sets(&self, occ: &[usize], inf: &[usize]) -> ExtendedPayoff {
        let bits: Vec<bool> = self.objectives1.iter().map(|o| o.holds(occ, inf)).collect();
        ExtendedPayoff { won: self.objective0.holds(occ, inf), payoff: Payoff::from_bools(&bits) }
    }

    pub fn payoff_of(&self, rho: &Lasso) -> Result<ExtendedPayoff, ObjectiveError> {
        rho.check(&self.arena, false)?;
        Ok(self.payoff_from_sets(&rho.occ(), &rho.inf()))
    }

    /// Normalized game on an arena whose vertices have at most two successors.
    pub fn normalized(&self) -> (SPGame, VertexMapping) {
        let (arena, mapping) = crate::arena::normalize_two_successors(&self.arena);
        let g = lift_through_normalization(self, &arena, &mapping);
        (g, mapping)
    }
}

/// Boolean Büchi encoding of a prefix-independent objective.
pub fn encode_boolean_buchi(obj: &ObjectiveSpec) -> Result<ObjectiveSpec, ObjectiveError> {
    use BoolFormula as F;
    let obj = obj.normalized();
    Ok(match &obj {
        ObjectiveSpec::Reach { .. } | ObjectiveSpec::Safe { .. } => {
            return Err(ObjectiveError::KindUnsupported(obj.kind()));
        }
        ObjectiveSpec::Buchi { set } => ObjectiveSpec::BooleanBuchi { formula: F::var(1), sets: vec![set.clone()] },
        ObjectiveSpec::CoBuchi { set } => {
            ObjectiveSpec::BooleanBuchi { formula: F::not(F::var(1)), sets: vec![set.clone()] }
        }
        ObjectiveSpec::BooleanBuchi { .. } => obj.clone(),
        ObjectiveSpec::Parity { priority } => {
            // variable j+1 stands for priority j
            let d = even_ceiling(priority);
            let sets = priority_classes(priority, d);
            let disjuncts = (0..=d)
                .step_by(2)
                .map(|j| {
                    let mut conj = vec![F::var(j as usize + 1)];
                    conj.extend((1..j).step_by(2).map(|i| F::not(F::var(i as usize + 1))));
                    F::and(conj)
                })
                .collect();
            ObjectiveSpec::BooleanBuchi { formula: F::or(disjuncts), sets }
        }
        ObjectiveSpec::Muller { priority, family } => {
            let d = priority.iter().chain(family.iter().flatten()).copied().max().unwrap_or(0);
            let sets = priority_classes(priority, d);
            let disjuncts = family
                .iter()
                .map(|q| {
                    F::and(
                        (0..=d)
                            .map(|j| {
                                let x = F::var(j as usize + 1);
                                if q.contains(&j) {
                                    x
                                } else {
                                    F::not(x)
                                }
                            })
                            .collect(),
                    )
                })
                .collect();
            ObjectiveSpec::BooleanBuchi { formula: F::or(disjuncts), sets }
        }
        ObjectiveSpec::Streett { pairs } => {
            let sets = pairs.iter().flat_map(|(e, f)| [e.clone(), f.clone()]).collect();
            let conj = (0..pairs.len())
                .map(|i| F::or(vec![F::var(2 * i + 1), F::not(F::var(2 * i + 2))]))
                .collect();
            ObjectiveSpec::BooleanBuchi { formula: F::and(conj), sets }
        }
        ObjectiveSpec::Rabin { pairs } => {
            let sets = pairs.iter().flat_map(|(e, f)| [e.clone(), f.clone()]).collect();
            let disj = (0..pairs.len())
                .map(|i| F::and(vec![F::not(F::var(2 * i + 1)), F::var(2 * i + 2)]))
                .collect();
            ObjectiveSpec::BooleanBuchi { formula: F::or(disj), sets }
        }
    })
}

fn priority_classes(priority: &[u32], d: u32) -> Vec<Vec<usize>> {
    (0..=d)
        .map(|j| (0..priority.len()).filter(|&v| priority[v] == j).collect())
        .collect()
}

fn rabin_chain(priority: &[u32]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let d = even_ceiling(priority);
    let below = |k: i64| -> Vec<usize> { (0..priority.len()).filter(|&v| (priority[v] as i64) <= k).collect() };
    // E_j holds priorities up to 2j-3, F_j up to 2j-2
    (1..=(d / 2 + 1) as i64).map(|j| (below(2 * j - 3), below(2 * j - 2))).collect()
}

/// Rabin objective with `d/2 + 1` chained pairs equal to the parity objective.
pub fn parity_to_rabin(priority: &[u32]) -> ObjectiveSpec {
    ObjectiveSpec::Rabin { pairs: rabin_chain(priority) }
}

/// Streett objective with `d/2 + 1` chained pairs equal to the parity objective.
pub fn parity_to_streett(priority: &[u32]) -> ObjectiveSpec {
    // complement of the Rabin chain of the shifted function c+1; its first
    // pair (∅, ∅) is vacuous for Streett
    let shifted: Vec<u32> = priority.iter().map(|p| p + 1).collect();
    let mut pairs = rabin_chain(&shifted);
    pairs.remove(0);
    ObjectiveSpec::Streett { pairs }
}

/// Muller SP game equivalent to a parity SP game: every edge is stretched by
/// `d` vertices whose priorities climb from the source's priority up to `d`.
pub fn parity_sp_to_muller_sp(game: &SPGame) -> Result<(SPGame, VertexMapping), ObjectiveError> {
    let prios: Vec<&Vec<u32>> = std::iter::once(game.objective0())
        .chain(game.objectives1())
        .map(|o| match o {
            ObjectiveSpec::Parity { priority } => Ok(priority),
            other => Err(ObjectiveError::KindUnsupported(other.kind())),
        })
        .collect::<Result<_, _>>()?;
    let d = prios.iter().map(|p| even_ceiling(p)).max().unwrap_or(0);
    let a = game.arena();
    let n = a.n();
    let mut owner = a.owners().to_vec();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roles: Vec<VertexRole> = (0..n).map(VertexRole::Original).collect();
    let mut new_prio: Vec<Vec<u32>> = prios.iter().map(|p| p.to_vec()).collect();
    let mut paths = Vec::new();
    for u in 0..n {
        for &v in a.successors(u) {
            let mut path = vec![u];
            let mut prev = u;
            for k in 1..=d {
                let x = owner.len();
                owner.push(a.owner(u));
                succ.push(Vec::new());
                roles.push(VertexRole::Internal { root: u });
                for (i, p) in new_prio.iter_mut().enumerate() {
                    p.push((prios[i][u] + k).min(d));
                }
                succ[prev].push(x);
                path.push(x);
                prev = x;
            }
            succ[prev].push(v);
            path.push(v);
            paths.push(((u, v), path));
        }
    }
    let arena = GameArena::from_parts(owner, succ, a.initial()).with_labels(a.labels().clone()).expect("labels stay in range");
    let muller = |i: usize| {
        let top = prios[i].iter().copied().max().unwrap_or(0);
        let family = (0..=top).step_by(2).map(|j| (j..=d).collect()).collect();
        ObjectiveSpec::Muller { priority: new_prio[i].clone(), family }
    };
    let g = SPGame::new(arena, muller(0), (1..prios.len()).map(muller).collect())?;
    let mapping = VertexMapping::from_paths(n, roles, paths);
    Ok((g, mapping))
}

/// Carries objectives over to the normalized arena produced alongside `mapping`.
pub fn lift_through_normalization(game: &SPGame, normalized: &GameArena, mapping: &VertexMapping) -> SPGame {
    let inserted: Vec<usize> = (mapping.original_count()..normalized.n()).collect();
    let lift = |o: &ObjectiveSpec| -> ObjectiveSpec {
        let extend = |prio: &Vec<u32>| -> Vec<u32> {
            (0..normalized.n())
                .map(|v| match mapping.roles[v] {
                    VertexRole::Original(x) => prio[x],
                    VertexRole::Internal { root } => prio[root],
                })
                .collect()
        };
        match o {
            ObjectiveSpec::Safe { safe } => {
                let mut s = safe.clone();
                s.extend(&inserted);
                ObjectiveSpec::Safe { safe: s }
            }
            ObjectiveSpec::Parity { priority } => ObjectiveSpec::Parity { priority: extend(priority) },
            ObjectiveSpec::Muller { priority, family } => {
                ObjectiveSpec::Muller { priority: extend(priority), family: family.clone() }
            }
            other => other.clone(),
        }
    };
    SPGame::new(
        normalized.clone(),
        lift(game.objective0()),
        game.objectives1().iter().map(lift).collect(),
    )
    .expect("lifted objectives stay well formed")
}
