use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tour::Tour;

pub const HELD_KARP_MAX_N: usize = 16;

/// Exact optimum by subset dynamic programming. Vertex 0 is the fixed start;
/// `best[mask][j]` is the cheapest path from 0 through `mask` ending at `j`.
pub fn held_karp(instance: &Instance) -> Result<(i64, Tour)> {
    let n = instance.n();
    if !(3..=HELD_KARP_MAX_N).contains(&n) {
        return Err(Error::SizeOutOfRange {
            n,
            min: 3,
            max: HELD_KARP_MAX_N,
        });
    }
    let m = n - 1;
    let full = (1usize << m) - 1;
    let idx = |mask: usize, j: usize| mask * m + j;
    let mut best = vec![i64::MAX; (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];
    for j in 0..m {
        best[idx(1 << j, j)] = instance.cost(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = best[idx(mask, j)];
            if here == i64::MAX {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = here + instance.cost(j + 1, k + 1);
                if cand < best[idx(next, k)] {
                    best[idx(next, k)] = cand;
                    parent[idx(next, k)] = j as u8;
                }
            }
        }
    }
    let (cost, last) = (0..m)
        .map(|j| (best[idx(full, j)] + instance.cost(j + 1, 0), j))
        .min()
        .expect("n ≥ 3");
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        order.push(j + 1);
        let p = parent[idx(mask, j)];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    let tour = Tour::from_sequence(&order)?;
    debug_assert_eq!(tour.cost(instance), cost);
    Ok((cost, tour))
}
