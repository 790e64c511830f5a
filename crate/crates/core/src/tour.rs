//! Tours, post-cancel flow states and their decomposition into subtours.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Directed Hamiltonian cycle stored as a successor map (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour {
    succ: Vec<usize>,
}

/// True iff `succ` is a single fixed-point-free cycle through all `n` vertices.
pub fn validate_tour(succ: &[usize], n: usize) -> bool {
    if succ.len() != n || n < 2 {
        return false;
    }
    if succ.iter().enumerate().any(|(i, &s)| s >= n || s == i) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut v = 0;
    for _ in 0..n {
        if seen[v] {
            return false;
        }
        seen[v] = true;
        v = succ[v];
    }
    v == 0
}

impl Tour {
    pub fn from_successors(succ: Vec<usize>) -> Result<Self> {
        let n = succ.len();
        if !validate_tour(&succ, n) {
            return Err(Error::InvalidTour(format!(
                "successor map is not a single {n}-cycle"
            )));
        }
        Ok(Tour { succ })
    }

    /// Builds the tour visiting `order[0] → order[1] → … → order[0]`.
    pub fn from_sequence(order: &[usize]) -> Result<Self> {
        let n = order.len();
        if n < 2 {
            return Err(Error::InvalidTour("fewer than two vertices".into()));
        }
        let mut succ = vec![usize::MAX; n];
        for (pos, &v) in order.iter().enumerate() {
            if v >= n || succ[v] != usize::MAX {
                return Err(Error::InvalidTour(format!(
                    "vertex {} out of range or repeated",
                    v + 1
                )));
            }
            succ[v] = order[(pos + 1) % n];
        }
        Self::from_successors(succ)
    }

    /// Parses a whitespace-separated 1-based vertex sequence.
    pub fn parse_labels(text: &str) -> Result<Self> {
        let order = text
            .split_whitespace()
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::InvalidTour(format!("bad vertex label {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_sequence(&order)
    }

    pub(crate) fn from_successors_unchecked(succ: Vec<usize>) -> Self {
        debug_assert!(validate_tour(&succ, succ.len()));
        Tour { succ }
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn succ(&self, v: usize) -> usize {
        self.succ[v]
    }

    pub fn successors(&self) -> &[usize] {
        &self.succ
    }

    pub fn contains_arc(&self, i: usize, j: usize) -> bool {
        self.succ[i] == j
    }

    /// Vertex order starting at vertex 0.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.n());
        let mut v = 0;
        for _ in 0..self.n() {
            seq.push(v);
            v = self.succ[v];
        }
        seq
    }

    /// 1-based labels starting at vertex 1.
    pub fn labels(&self) -> Vec<usize> {
        self.sequence().into_iter().map(|v| v + 1).collect()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().map(|(i, &j)| (i, j))
    }

    pub fn reversed(&self) -> Tour {
        let mut succ = vec![0; self.n()];
        for (i, &j) in self.succ.iter().enumerate() {
            succ[j] = i;
        }
        Tour { succ }
    }

    pub fn cost(&self, instance: &Instance) -> i64 {
        tour_cost(instance, self)
    }

    pub fn to_flow(&self) -> FlowState {
        FlowState {
            succ: self.succ.iter().map(|&s| Some(s)).collect(),
        }
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        f.write_str(&labels.join(" "))
    }
}

pub fn tour_cost(instance: &Instance, tour: &Tour) -> i64 {
    tour.arcs().map(|(i, j)| instance.cost(i, j)).sum()
}

/// Uniformly random tour: a Fisher–Yates shuffle of the vertices, read as a
/// cyclic order.
pub fn random_tour<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tour {
    assert!(n >= 3, "random_tour needs n ≥ 3");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Tour::from_sequence(&order).expect("a permutation is a tour")
}

/// 0,1-circulation after a cancel: every vertex has in = out ∈ {0, 1}.
/// Vertices with no successor are isolated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowState {
    succ: Vec<Option<usize>>,
}

impl FlowState {
    pub fn new(succ: Vec<Option<usize>>) -> Result<Self> {
        let n = succ.len();
        let mut indeg = vec![0u8; n];
        for (i, s) in succ.iter().enumerate() {
            if let Some(j) = *s {
                if j >= n {
                    return Err(Error::InvalidFlow(format!("successor {} out of range", j + 1)));
                }
                if j == i {
                    return Err(Error::InvalidFlow(format!("self loop at {}", i + 1)));
                }
                indeg[j] += 1;
                if indeg[j] > 1 {
                    return Err(Error::InvalidFlow(format!("in-degree 2 at {}", j + 1)));
                }
            }
        }
        for v in 0..n {
            let out = succ[v].is_some() as u8;
            if out != indeg[v] {
                return Err(Error::InvalidFlow(format!(
                    "unbalanced vertex {}: in {} out {}",
                    v + 1,
                    indeg[v],
                    out
                )));
            }
        }
        Ok(FlowState { succ })
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, v: usize) -> Option<usize> {
        self.succ[v]
    }

    pub fn successors(&self) -> &[Option<usize>] {
        &self.succ
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.succ[v].is_none()
    }

    pub fn isolated(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.succ[v].is_none()).collect()
    }

    pub fn cost(&self, instance: &Instance) -> i64 {
        self.succ
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|j| instance.cost(i, j)))
            .sum()
    }

    pub fn decompose(&self) -> SubtourDecomposition {
        decompose(self)
    }

    /// Converts to a tour when the flow is a single spanning cycle.
    pub fn to_tour(&self) -> Option<Tour> {
        let succ: Option<Vec<usize>> = self.succ.iter().copied().collect();
        succ.filter(|s| validate_tour(s, s.len()))
            .map(Tour::from_successors_unchecked)
    }

    pub(crate) fn set_succ(&mut self, v: usize, s: Option<usize>) {
        self.succ[v] = s;
    }
}

/// Vertex cycles in canonical order (each starts at its minimum vertex,
/// cycles sorted by that vertex) plus the isolated set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtourDecomposition {
    pub subtours: Vec<Vec<usize>>,
    pub isolated: Vec<usize>,
}

impl SubtourDecomposition {
    pub fn count(&self) -> usize {
        self.subtours.len()
    }
}

pub fn decompose(flow: &FlowState) -> SubtourDecomposition {
    let n = flow.n();
    let mut seen = vec![false; n];
    let mut subtours = Vec::new();
    let mut isolated = Vec::new();
    // Ascending scan: the first unvisited vertex of each cycle is its minimum.
    for start in 0..n {
        if seen[start] {
            continue;
        }
        match flow.succ(start) {
            None => {
                seen[start] = true;
                isolated.push(start);
            }
            Some(_) => {
                let mut cycle = Vec::new();
                let mut v = start;
                while !seen[v] {
                    seen[v] = true;
                    cycle.push(v);
                    v = flow.succ(v).expect("balanced flow");
                }
                subtours.push(cycle);
            }
        }
    }
    SubtourDecomposition { subtours, isolated }
}
