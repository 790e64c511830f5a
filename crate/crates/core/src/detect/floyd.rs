use std::collections::HashSet;

use super::{verified_candidate, CycleCandidate};
use crate::residual::{Matrix, SeparatedGraph, NO_PRED};

/// Distances can run away once negative cycles are present; they saturate
/// here so the sign stays meaningful and nothing wraps.
const FLOOR: i64 = i64::MIN / 4;

#[derive(Debug, Clone)]
pub struct FloydResult {
    pub dist: Matrix<i64>,
    pub pred: Matrix<usize>,
}

/// All-pairs relaxation over every pivot, without stopping at the first
/// negative diagonal entry. Entries equal to the absent sentinel are never
/// relaxed through. `pred[i][j]` is the predecessor of `j` on the best
/// known `i → j` walk.
pub fn floyd_warshall_full(sep: &SeparatedGraph) -> FloydResult {
    let dim = sep.dim();
    let absent = sep.absent();
    let mut dist = sep.dist().clone();
    let mut pred = sep.pred().clone();
    for k in 0..dim {
        for i in 0..dim {
            let dik = dist.get(i, k);
            if dik == absent {
                continue;
            }
            for j in 0..dim {
                let dkj = dist.get(k, j);
                if dkj == absent {
                    continue;
                }
                let cand = dik.saturating_add(dkj).max(FLOOR);
                if cand < dist.get(i, j) {
                    dist.set(i, j, cand);
                    pred.set(i, j, pred.get(k, j));
                }
            }
        }
    }
    FloydResult { dist, pred }
}

/// Extracts negative cycles from a complete Floyd–Warshall run.
///
/// For each source `s` with a negative diagonal entry and each target `j`,
/// predecessors `v ← pred[s][v]` are followed from `j` with `s` fixed. A
/// repeated vertex closes a cycle; vertices before the first occurrence are
/// dropped. Reaching `s` (for `j ≠ s`) or an unset predecessor ends the walk
/// without a cycle. Every extracted cycle is re-costed on the separated graph
/// and kept only if negative; identical arc sets are reported once.
pub fn predecessor_readout(fw: &FloydResult, sep: &SeparatedGraph) -> Vec<CycleCandidate> {
    let dim = sep.dim();
    let bound = dim + 1;
    let mut found = Vec::new();
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut position = vec![usize::MAX; dim];

    for s in (0..dim).filter(|&s| fw.dist.get(s, s) < 0) {
        for j in 0..dim {
            let mut visited: Vec<usize> = vec![j];
            position[j] = 0;
            let mut v = j;
            let mut cycle = None;
            for _ in 0..bound {
                let u = fw.pred.get(s, v);
                if u == NO_PRED {
                    break;
                }
                if position[u] != usize::MAX {
                    // visited[p] = u; walk runs backwards, so the forward
                    // cycle is visited[last], …, visited[p], visited[last]
                    let p = position[u];
                    let mut walk: Vec<usize> = visited[p..].iter().rev().copied().collect();
                    walk.push(walk[0]);
                    cycle = Some(walk);
                    break;
                }
                if u == s && j != s {
                    break;
                }
                position[u] = visited.len();
                visited.push(u);
                v = u;
            }
            for &x in &visited {
                position[x] = usize::MAX;
            }
            if let Some(candidate) = cycle.and_then(|w| verified_candidate(sep, w)) {
                if seen.insert(candidate.canonical_arcs()) {
                    found.push(candidate);
                }
            }
        }
    }
    found
}
