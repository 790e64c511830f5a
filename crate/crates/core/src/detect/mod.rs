//! Negative cycle and circulation search on the separated graph.
//!
//! - [`floyd_warshall_full`] + [`predecessor_readout`]: many candidate cycles
//! - [`karp_min_mean`]: one minimum-mean cycle
//! - [`min_cost_circulation`]: an optimal 0,1-circulation
//!
//! Everything here is exact integer arithmetic.

mod circulation;
mod floyd;
mod karp;

pub use circulation::{min_cost_circulation, residual_negative_cycle, CirculationResult};
pub use floyd::{floyd_warshall_full, predecessor_readout, FloydResult};
pub use karp::{karp_min_mean, min_cycle_mean};

use num_rational::Ratio;

use crate::residual::SeparatedGraph;

/// A closed walk `walk[0] → … → walk[last] = walk[0]` in the separated
/// graph with strictly negative exact cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCandidate {
    pub walk: Vec<usize>,
    pub cost: i64,
}

impl CycleCandidate {
    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.walk.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.walk.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn mean(&self) -> Ratio<i64> {
        Ratio::new(self.cost, self.len() as i64)
    }

    /// Sorted arc list; equal for two rotations of the same cycle.
    pub fn canonical_arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = self.arcs();
        arcs.sort_unstable();
        arcs
    }
}

/// Builds a candidate from a closed walk if every arc exists and the total
/// is negative.
pub(crate) fn verified_candidate(sep: &SeparatedGraph, walk: Vec<usize>) -> Option<CycleCandidate> {
    if walk.len() < 3 || walk.first() != walk.last() {
        return None;
    }
    let cost = sep.walk_cost(&walk)?;
    (cost < 0).then_some(CycleCandidate { walk, cost })
}
