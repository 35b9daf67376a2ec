//! Stackelberg-Pareto synthesis on finite turn-based arenas.
//!
//! Player 0 picks a strategy first; Player 1 answers with a play whose
//! payoff over her objectives is Pareto-optimal. The synthesis question is
//! whether Player 0 has a strategy that wins against every such answer.

pub mod arena;
pub mod buchi_np;
pub mod cpgame;
pub mod fixtures;
mod graph;
pub mod objectives;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod sar;
pub mod sps_solver;
pub mod verify;
pub mod zerosum;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A construction grew past its configured cap.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} exceeds the configured cap of {limit}")]
pub struct SizeLimit {
    pub what: &'static str,
    pub limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    SizeLimit(#[from] SizeLimit),
    #[error("{what} is {value}, above the cap of {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },
    #[error("search budget of {0} steps exhausted")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Objective(#[from] objectives::ObjectiveError),
    #[error("{0}")]
    Unsupported(String),
}

/// Resource caps shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest number of Player-1 objectives accepted by the C-P route.
    pub max_t: usize,
    /// Largest node count of any product or C-P slice.
    pub max_product: usize,
    /// Largest number of sets tracked by one appearance record.
    pub max_sar_sets: usize,
    /// Step budget of the witness search and the brute-force oracle.
    pub search_budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_t: 5, max_product: 2_000_000, max_sar_sets: 12, search_budget: 2_000_000 }
    }
}
