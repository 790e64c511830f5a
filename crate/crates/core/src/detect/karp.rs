//! Karp's minimum mean cycle with a virtual source attached to every vertex.
//!
//! `d[k][v]` is the cheapest walk of exactly `k` arcs ending at `v` (any
//! start). With `N` vertices,
//! `λ* = min_v max_k (d[N][v] − d[k][v]) / (N − k)`; all comparisons are
//! cross-multiplied in `i128`.

use std::cmp::Ordering;

use num_rational::Ratio;

use super::CycleCandidate;
use crate::residual::SeparatedGraph;

const INF: i64 = i64::MAX;

struct Table {
    dist: Vec<Vec<i64>>,
    parent: Vec<Vec<usize>>,
}

fn walk_table(sep: &SeparatedGraph) -> Table {
    let dim = sep.dim();
    let adj: Vec<Vec<(usize, i64)>> = (0..dim)
        .map(|v| {
            (0..dim)
                .filter_map(|u| sep.cost(u, v).map(|c| (u, c)))
                .collect()
        })
        .collect();
    let mut dist = vec![vec![INF; dim]; dim + 1];
    let mut parent = vec![vec![usize::MAX; dim]; dim + 1];
    dist[0].iter_mut().for_each(|d| *d = 0);
    for k in 1..=dim {
        for v in 0..dim {
            let mut best = INF;
            let mut arg = usize::MAX;
            for &(u, c) in &adj[v] {
                let du = dist[k - 1][u];
                if du == INF {
                    continue;
                }
                let cand = du + c;
                if cand < best {
                    best = cand;
                    arg = u;
                }
            }
            dist[k][v] = best;
            parent[k][v] = arg;
        }
    }
    Table { dist, parent }
}

/// `a/b` vs `c/d` for positive denominators.
fn cmp_frac(a: i64, b: i64, c: i64, d: i64) -> Ordering {
    (a as i128 * d as i128).cmp(&(c as i128 * b as i128))
}

/// Returns `(numerator, denominator, vertex)` of λ*, or `None` when the graph
/// is acyclic.
fn lambda(table: &Table, dim: usize) -> Option<(i64, i64, usize)> {
    let mut best: Option<(i64, i64, usize)> = None;
    for v in 0..dim {
        let dn = table.dist[dim][v];
        if dn == INF {
            continue;
        }
        let mut worst: Option<(i64, i64)> = None;
        for k in 0..dim {
            let dk = table.dist[k][v];
            if dk == INF {
                continue;
            }
            let (num, den) = (dn - dk, (dim - k) as i64);
            if worst.is_none_or(|(a, b)| cmp_frac(num, den, a, b) == Ordering::Greater) {
                worst = Some((num, den));
            }
        }
        if let Some((a, b)) = worst {
            if best.is_none_or(|(c, d, _)| cmp_frac(a, b, c, d) == Ordering::Less) {
                best = Some((a, b, v));
            }
        }
    }
    best
}

/// Exact minimum cycle mean of the separated graph (`None` if acyclic).
pub fn min_cycle_mean(sep: &SeparatedGraph) -> Option<Ratio<i64>> {
    let table = walk_table(sep);
    lambda(&table, sep.dim()).map(|(a, b, _)| Ratio::new(a, b))
}

/// A cycle of minimum mean cost, if that mean is negative.
pub fn karp_min_mean(sep: &SeparatedGraph) -> Option<CycleCandidate> {
    let dim = sep.dim();
    let table = walk_table(sep);
    let (num, den, v) = lambda(&table, dim)?;
    if num >= 0 {
        return None;
    }
    // Walk the N-arc parent chain back from v; any cycle on it has mean λ*.
    let mut chain = vec![v];
    let mut level_of = vec![usize::MAX; dim];
    level_of[v] = dim;
    let mut x = v;
    for k in (1..=dim).rev() {
        x = table.parent[k][x];
        let level = k - 1;
        if level_of[x] != usize::MAX {
            let upper = level_of[x];
            // chain holds levels dim, dim-1, …, level; the cycle is levels
            // level..=upper in forward order
            let len = chain.len();
            let mut walk: Vec<usize> = chain[len - (upper - level)..].to_vec();
            walk.reverse();
            walk.insert(0, x);
            let cost = sep.walk_cost(&walk).expect("parent chain uses graph arcs");
            let candidate = CycleCandidate { walk, cost };
            debug_assert_eq!(candidate.mean(), Ratio::new(num, den));
            return Some(candidate);
        }
        level_of[x] = level;
        chain.push(x);
    }
    unreachable!("a walk with N arcs over N vertices repeats a vertex")
}
