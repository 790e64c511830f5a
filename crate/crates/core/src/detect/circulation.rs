//! Exact minimum-cost 0,1-circulation on the separated graph by repeatedly
//! canceling negative residual cycles found with Bellman–Ford.
//!
//! The separated graph has no pair of antiparallel arcs, so the residual
//! network fits in one dense matrix: a free arc `u → v` appears with its own
//! cost, a saturated one as `v → u` with the negated cost.

use crate::residual::{Matrix, SeparatedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CirculationResult {
    /// Arcs of the separated graph carrying one unit, sorted.
    pub arcs: Vec<(usize, usize)>,
    pub cost: i64,
}

impl CirculationResult {
    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

struct Residual {
    dim: usize,
    flow: Matrix<bool>,
}

impl Residual {
    fn cost(&self, sep: &SeparatedGraph, u: usize, v: usize) -> Option<i64> {
        match (sep.cost(u, v), sep.cost(v, u)) {
            (Some(c), _) if !self.flow.get(u, v) => Some(c),
            (_, Some(c)) if self.flow.get(v, u) => Some(-c),
            _ => None,
        }
    }

    fn arcs(&self, sep: &SeparatedGraph) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for u in 0..self.dim {
            for v in 0..self.dim {
                if let Some(c) = self.cost(sep, u, v) {
                    out.push((u, v, c));
                }
            }
        }
        out
    }

    fn push(&mut self, sep: &SeparatedGraph, u: usize, v: usize) {
        if sep.has_arc(u, v) {
            debug_assert!(!self.flow.get(u, v));
            self.flow.set(u, v, true);
        } else {
            debug_assert!(self.flow.get(v, u));
            self.flow.set(v, u, false);
        }
    }
}

/// Bellman–Ford from a virtual source joined to every vertex at cost 0.
/// Returns a negative cycle as a closed vertex sequence.
fn bellman_ford_cycle(dim: usize, arcs: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
    let mut dist = vec![0i64; dim];
    let mut parent = vec![usize::MAX; dim];
    let mut last = None;
    for _ in 0..dim {
        last = None;
        for &(u, v, c) in arcs {
            if dist[u] + c < dist[v] {
                dist[v] = dist[u] + c;
                parent[v] = u;
                last = Some(v);
            }
        }
        last?;
    }
    last?;
    // still relaxing after `dim` rounds, so the parent graph has a cycle
    parent_cycle(&parent)
}

fn parent_cycle(parent: &[usize]) -> Option<Vec<usize>> {
    let dim = parent.len();
    let mut mark = vec![usize::MAX; dim];
    for start in 0..dim {
        let mut x = start;
        while x != usize::MAX && mark[x] == usize::MAX {
            mark[x] = start;
            x = parent[x];
        }
        if x != usize::MAX && mark[x] == start {
            let mut cycle = vec![x];
            let mut y = parent[x];
            while y != x {
                cycle.push(y);
                y = parent[y];
            }
            cycle.push(x);
            cycle.reverse();
            return Some(cycle);
        }
    }
    None
}

fn residual_from(sep: &SeparatedGraph, arcs: &[(usize, usize)]) -> Option<Residual> {
    let dim = sep.dim();
    let mut flow = Matrix::filled(dim, false);
    for &(u, v) in arcs {
        if u >= dim || v >= dim || !sep.has_arc(u, v) || flow.get(u, v) {
            return None;
        }
        flow.set(u, v, true);
    }
    Some(Residual { dim, flow })
}

/// A negative cycle in the residual network of the given unit flow, if any.
/// `None` certifies that the flow is a minimum-cost circulation.
///
/// # Panics
/// If `arcs` is not a set of separated-graph arcs.
pub fn residual_negative_cycle(sep: &SeparatedGraph, arcs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let residual = residual_from(sep, arcs).expect("flow arcs must be distinct graph arcs");
    bellman_ford_cycle(residual.dim, &residual.arcs(sep))
}

pub fn min_cost_circulation(sep: &SeparatedGraph) -> CirculationResult {
    let dim = sep.dim();
    let mut residual = Residual {
        dim,
        flow: Matrix::filled(dim, false),
    };
    while let Some(cycle) = bellman_ford_cycle(dim, &residual.arcs(sep)) {
        for w in cycle.windows(2) {
            residual.push(sep, w[0], w[1]);
        }
    }
    let mut arcs = Vec::new();
    for u in 0..dim {
        for v in 0..dim {
            if residual.flow.get(u, v) {
                arcs.push((u, v));
            }
        }
    }
    let cost = arcs
        .iter()
        .map(|&(u, v)| sep.cost(u, v).expect("flow on graph arcs"))
        .sum();
    assert!(
        residual_negative_cycle(sep, &arcs).is_none(),
        "circulation optimality certificate failed"
    );
    CirculationResult { arcs, cost }
}
