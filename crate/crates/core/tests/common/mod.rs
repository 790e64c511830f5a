#![allow(dead_code)]

use cycap::instance::Instance;
use cycap::residual::{map_back_arcs, AlternatingStructure, SeparatedGraph};
use cycap::tour::{random_tour, Tour};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_instance<R: Rng>(rng: &mut R, n: usize, max_cost: i64) -> Instance {
    Instance::from_fn("random", n, |_, _| rng.gen_range(1..=max_cost)).unwrap()
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize, max_cost: i64) -> Instance {
    let mut upper = vec![0i64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            upper[i * n + j] = rng.gen_range(1..=max_cost);
        }
    }
    Instance::from_fn("random-sym", n, |i, j| upper[i.min(j) * n + i.max(j)]).unwrap()
}

pub fn random_setup<R: Rng>(rng: &mut R, n: usize) -> (Instance, Tour) {
    let inst = random_instance(rng, n, 100);
    let tour = random_tour(n, rng);
    (inst, tour)
}

/// Grows one simple cycle of the separated graph by a random walk avoiding
/// `used` vertices. From an original vertex an insertion is drawn at random,
/// preferring one that reverses an insertion already in `prefer` so that
/// opposite pairs show up often; from a duplicate the only arc is taken.
pub fn random_cycle<R: Rng>(
    rng: &mut R,
    sep: &SeparatedGraph,
    used: &[bool],
    prefer: &[(usize, usize)],
) -> Option<Vec<(usize, usize)>> {
    let dim = sep.dim();
    let n = sep.n();
    let starts: Vec<usize> = (0..n).filter(|&v| !used[v]).collect();
    let &start = starts.choose(rng)?;
    let mut pos = vec![usize::MAX; dim];
    let mut walk = vec![start];
    pos[start] = 0;
    loop {
        let v = *walk.last().unwrap();
        let outs: Vec<usize> = sep
            .out_arcs(v)
            .map(|(w, _)| w)
            .filter(|&w| !used[w])
            .collect();
        if outs.is_empty() {
            return None;
        }
        let next = if v < n {
            let reversing: Vec<usize> = outs
                .iter()
                .copied()
                .filter(|&w| prefer.contains(&(w - n, v)))
                .collect();
            if !reversing.is_empty() && rng.gen_bool(0.5) {
                *reversing.choose(rng).unwrap()
            } else {
                *outs.choose(rng).unwrap()
            }
        } else {
            outs[0]
        };
        if pos[next] != usize::MAX {
            let cycle = &walk[pos[next]..];
            let mut arcs: Vec<(usize, usize)> = cycle.windows(2).map(|w| (w[0], w[1])).collect();
            arcs.push((*cycle.last().unwrap(), next));
            return Some(arcs);
        }
        pos[next] = walk.len();
        walk.push(next);
    }
}

/// Union of up to `max_cycles` vertex-disjoint random cycles, read back as
/// one structure.
pub fn random_structure<R: Rng>(
    rng: &mut R,
    sep: &SeparatedGraph,
    max_cycles: usize,
) -> Option<AlternatingStructure> {
    let mut used = vec![false; sep.dim()];
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut insertions: Vec<(usize, usize)> = Vec::new();
    let n = sep.n();
    for _ in 0..max_cycles {
        let Some(cycle) = (0..8).find_map(|_| random_cycle(rng, sep, &used, &insertions)) else {
            break;
        };
        for &(u, v) in &cycle {
            used[u] = true;
            used[v] = true;
            if u < n {
                insertions.push((u, v - n));
            }
        }
        arcs.extend(cycle);
    }
    if arcs.is_empty() {
        return None;
    }
    map_back_arcs(sep, &arcs).ok()
}

/// Every simple cycle of the separated graph as a closed vertex walk,
/// enumerated by depth-first search from its smallest vertex.
pub fn all_simple_cycles(sep: &SeparatedGraph) -> Vec<Vec<usize>> {
    fn dfs(
        sep: &SeparatedGraph,
        start: usize,
        v: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for (w, _) in sep.out_arcs(v) {
            if w == start {
                let mut c = path.clone();
                c.push(start);
                out.push(c);
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(sep, start, w, on_path, path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; sep.dim()];
    for s in 0..sep.dim() {
        on_path[s] = true;
        let mut path = vec![s];
        dfs(sep, s, s, &mut on_path, &mut path, &mut out);
        on_path[s] = false;
    }
    out
}

pub fn exhaustive_min_mean(sep: &SeparatedGraph) -> Option<Ratio<i64>> {
    all_simple_cycles(sep)
        .iter()
        .map(|c| Ratio::new(sep.walk_cost(c).unwrap(), (c.len() - 1) as i64))
        .min()
}

/// Floyd–Warshall on the residual network of a unit flow: true when some
/// closed walk has negative cost.
pub fn residual_has_negative_cycle(sep: &SeparatedGraph, flow: &[(usize, usize)]) -> bool {
    let dim = sep.dim();
    let inf = i64::MAX / 4;
    let mut d = vec![vec![inf; dim]; dim];
    for (u, v, c) in sep.arcs() {
        if flow.contains(&(u, v)) {
            d[v][u] = d[v][u].min(-c);
        } else {
            d[u][v] = d[u][v].min(c);
        }
    }
    for k in 0..dim {
        for i in 0..dim {
            if d[i][k] == inf {
                continue;
            }
            for j in 0..dim {
                if d[k][j] != inf && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    (0..dim).any(|v| d[v][v] < 0)
}

/// In- and out-degree of every vertex under a partial successor map.
pub fn degrees(succ: &[Option<usize>]) -> Vec<(usize, usize)> {
    let mut deg = vec![(0, 0); succ.len()];
    for (i, s) in succ.iter().enumerate() {
        if let Some(j) = *s {
            deg[i].1 += 1;
            deg[j].0 += 1;
        }
    }
    deg
}

pub fn opposite_pairs(insertions: &[(usize, usize)]) -> usize {
    insertions
        .iter()
        .filter(|&&(u, v)| u < v && insertions.contains(&(v, u)))
        .count()
}
