//! Unit-flow cancel along an alternating structure, and greedy patching of
//! the resulting subtours and isolated vertices back into one tour.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::residual::AlternatingStructure;
use crate::tour::{FlowState, Tour};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancelOutcome {
    pub flow: FlowState,
    /// Opposite insertion pairs `(u, v)` with `u < v` that were deleted.
    pub trimmed: Vec<(usize, usize)>,
}

/// Tour arcs minus removals plus insertions, then every opposite pair of
/// insertions `{(u, v), (v, u)}` is dropped, leaving `u` and `v` isolated.
pub fn cancel(instance: &Instance, tour: &Tour, s: &AlternatingStructure) -> Result<FlowState> {
    cancel_traced(instance, tour, s).map(|o| o.flow)
}

pub fn cancel_traced(
    instance: &Instance,
    tour: &Tour,
    s: &AlternatingStructure,
) -> Result<CancelOutcome> {
    if tour.n() != instance.n() {
        return Err(Error::InvalidTour("tour and instance sizes differ".into()));
    }
    s.check_against(tour)?;
    let mut succ: Vec<Option<usize>> = tour.successors().iter().map(|&j| Some(j)).collect();
    for &(i, _) in s.removals() {
        succ[i] = None;
    }
    for &(h, k) in s.insertions() {
        if succ[h].is_some() {
            return Err(Error::InvalidStructure(format!(
                "vertex {} keeps two successors",
                h + 1
            )));
        }
        succ[h] = Some(k);
    }
    let mut trimmed = Vec::new();
    for &(u, v) in s.insertions() {
        if u < v && s.insertions().binary_search(&(v, u)).is_ok() {
            succ[u] = None;
            succ[v] = None;
            trimmed.push((u, v));
        }
    }
    let flow = FlowState::new(succ)?;
    Ok(CancelOutcome { flow, trimmed })
}

fn cycle_of(flow: &FlowState, v: usize) -> Vec<usize> {
    let mut cycle = vec![v];
    let mut x = flow.succ(v).expect("vertex on a subtour");
    while x != v {
        cycle.push(x);
        x = flow.succ(x).expect("balanced flow");
    }
    cycle
}

fn check_subtour(flow: &FlowState, s: &[usize]) -> Result<()> {
    let first = *s
        .first()
        .ok_or_else(|| Error::Patch("empty subtour".into()))?;
    if flow.succ(first).is_none() {
        return Err(Error::Patch(format!("vertex {} is isolated", first + 1)));
    }
    let cycle = cycle_of(flow, first);
    if cycle != s {
        return Err(Error::Patch("vertex list is not a subtour of the flow".into()));
    }
    Ok(())
}

/// Best two-arc patch between `s1` and `s2` (vertex cycles in successor
/// order). Among all arc pairs `(i, j) ∈ s1`, `(h, k) ∈ s2` the one with
/// minimum `c[i][k] + c[h][j] − c[i][j] − c[h][k]` is applied; ties go to the
/// earliest `s1` arc, then the earliest `s2` arc. Returns the new flow and Δ.
pub fn patch_pair(
    instance: &Instance,
    flow: &FlowState,
    s1: &[usize],
    s2: &[usize],
) -> Result<(FlowState, i64)> {
    check_subtour(flow, s1)?;
    check_subtour(flow, s2)?;
    if s2.contains(&s1[0]) {
        return Err(Error::Patch("both arguments are the same subtour".into()));
    }
    let mut out = flow.clone();
    let delta = apply_pair(instance, &mut out, s1, s2);
    Ok((out, delta))
}

fn apply_pair(instance: &Instance, flow: &mut FlowState, s1: &[usize], s2: &[usize]) -> i64 {
    let mut best: Option<(i64, usize, usize)> = None;
    for &i in s1 {
        let j = flow.succ(i).expect("subtour vertex");
        for &h in s2 {
            let k = flow.succ(h).expect("subtour vertex");
            let delta =
                instance.cost(i, k) + instance.cost(h, j) - instance.cost(i, j) - instance.cost(h, k);
            if best.is_none_or(|(d, _, _)| delta < d) {
                best = Some((delta, i, h));
            }
        }
    }
    let (delta, i, h) = best.expect("subtours are nonempty");
    let j = flow.succ(i).unwrap();
    let k = flow.succ(h).unwrap();
    flow.set_succ(i, Some(k));
    flow.set_succ(h, Some(j));
    delta
}

/// Absorbs isolated `v` by replacing the subtour arc `(h, k)` that minimizes
/// `c[h][v] + c[v][k] − c[h][k]` with `(h, v), (v, k)`. Arcs are scanned by
/// tail vertex in ascending order; the first minimum wins.
pub fn patch_isolated(instance: &Instance, flow: &FlowState, v: usize) -> Result<(FlowState, i64)> {
    if v >= flow.n() || !flow.is_isolated(v) {
        return Err(Error::Patch(format!("vertex {} is not isolated", v + 1)));
    }
    let mut out = flow.clone();
    let delta = apply_isolated(instance, &mut out, v)
        .ok_or_else(|| Error::Patch("no subtour to absorb the vertex into".into()))?;
    Ok((out, delta))
}

fn apply_isolated(instance: &Instance, flow: &mut FlowState, v: usize) -> Option<i64> {
    let mut best: Option<(i64, usize)> = None;
    for h in 0..flow.n() {
        if let Some(k) = flow.succ(h) {
            let delta = instance.cost(h, v) + instance.cost(v, k) - instance.cost(h, k);
            if best.is_none_or(|(d, _)| delta < d) {
                best = Some((delta, h));
            }
        }
    }
    let (delta, h) = best?;
    let k = flow.succ(h).unwrap();
    flow.set_succ(h, Some(v));
    flow.set_succ(v, Some(k));
    Some(delta)
}

/// Turns any flow state into a tour. Isolated vertices are absorbed first in
/// ascending order, then pairs of subtours drawn uniformly from `rng` are
/// merged until one remains.
///
/// If every vertex is isolated the two smallest are first joined into a
/// 2-cycle so there is something to absorb into.
pub fn patch_all<R: Rng + ?Sized>(instance: &Instance, flow: &FlowState, rng: &mut R) -> Tour {
    let mut flow = flow.clone();
    let isolated = flow.isolated();
    if isolated.len() == flow.n() {
        let (a, b) = (isolated[0], isolated[1]);
        flow.set_succ(a, Some(b));
        flow.set_succ(b, Some(a));
    }
    for v in flow.isolated() {
        apply_isolated(instance, &mut flow, v).expect("a subtour exists");
    }
    loop {
        let subtours = flow.decompose().subtours;
        let m = subtours.len();
        if m < 2 {
            break;
        }
        let a = rng.gen_range(0..m);
        let mut b = rng.gen_range(0..m - 1);
        if b >= a {
            b += 1;
        }
        apply_pair(instance, &mut flow, &subtours[a], &subtours[b]);
    }
    flow.to_tour().expect("patching leaves a single spanning cycle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{figure3_instance, figure3_tour, figure5_instance, figure5_tour};
    use crate::residual::{structure_cost, StructureKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_based(arcs: &[(usize, usize)]) -> Vec<(usize, usize)> {
        arcs.iter().map(|&(a, b)| (a - 1, b - 1)).collect()
    }

    fn figure5_structure() -> AlternatingStructure {
        AlternatingStructure::new(
            one_based(&[(2, 3), (7, 8), (3, 4), (6, 7)]),
            one_based(&[(2, 8), (7, 3), (3, 7), (6, 4)]),
            StructureKind::Circulation,
        )
        .unwrap()
    }

    #[test]
    fn figure3_cancel_gives_tour() {
        let inst = figure3_instance();
        let tour = figure3_tour();
        // 1→6→7→2→3→8→9→4→5→10→1
        let s = AlternatingStructure::new(
            one_based(&[(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]),
            one_based(&[(1, 6), (7, 2), (3, 8), (9, 4), (5, 10)]),
            StructureKind::Cycle,
        )
        .unwrap();
        assert_eq!(structure_cost(&inst, &s), -25);
        let flow = cancel(&inst, &tour, &s).unwrap();
        let t = flow.to_tour().unwrap();
        assert_eq!(t.labels(), vec![1, 6, 7, 2, 3, 8, 9, 4, 5, 10]);
        assert_eq!(t.cost(&inst), 45);
    }

    #[test]
    fn figure5_cancel_trims() {
        let inst = figure5_instance();
        let out = cancel_traced(&inst, &figure5_tour(), &figure5_structure()).unwrap();
        assert_eq!(out.trimmed, vec![(2, 6)]);
        let d = out.flow.decompose();
        assert_eq!(d.subtours, vec![vec![0, 1, 7], vec![3, 4, 5]]);
        assert_eq!(d.isolated, vec![2, 6]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = patch_all(&inst, &out.flow, &mut rng);
        assert_eq!(t.n(), 8);
    }

    #[test]
    fn cost_accounting_through_trim() {
        let inst = figure5_instance();
        let tour = figure5_tour();
        let s = figure5_structure();
        let out = cancel_traced(&inst, &tour, &s).unwrap();
        let trim: i64 = out
            .trimmed
            .iter()
            .map(|&(u, v)| inst.cost(u, v) + inst.cost(v, u))
            .sum();
        assert_eq!(
            out.flow.cost(&inst),
            tour.cost(&inst) + structure_cost(&inst, &s) - trim
        );
    }

    #[test]
    fn cancel_rejects_non_tour_removal() {
        let inst = figure5_instance();
        let s = AlternatingStructure::new(
            one_based(&[(1, 2), (3, 4)]),
            one_based(&[(1, 4), (3, 2)]),
            StructureKind::Cycle,
        )
        .unwrap();
        let wrong = Tour::from_sequence(&[0, 2, 1, 3, 4, 5, 6, 7]).unwrap();
        assert!(cancel(&inst, &wrong, &s).is_err());
    }

    #[test]
    fn two_two_cycles_merge_at_zero() {
        let inst = Instance::from_fn("ones", 4, |_, _| 1).unwrap();
        let flow = FlowState::new(vec![Some(1), Some(0), Some(3), Some(2)]).unwrap();
        let (merged, delta) = patch_pair(&inst, &flow, &[0, 1], &[2, 3]).unwrap();
        assert_eq!(delta, 0);
        assert!(merged.to_tour().is_some());
        assert!(patch_pair(&inst, &flow, &[0, 1], &[1, 0]).is_err());
    }

    #[test]
    fn three_subtours_need_two_patches() {
        let inst = Instance::from_fn("r", 7, |i, j| ((i * 5 + j * 3) % 7 + 1) as i64).unwrap();
        let flow =
            FlowState::new(vec![Some(1), Some(0), Some(3), Some(4), Some(2), Some(6), Some(5)]).unwrap();
        let (f1, _) = patch_pair(&inst, &flow, &[0, 1], &[2, 3, 4]).unwrap();
        assert_eq!(f1.decompose().count(), 2);
        let d = f1.decompose();
        let (f2, _) = patch_pair(&inst, &f1, &d.subtours[0], &d.subtours[1]).unwrap();
        assert!(f2.to_tour().is_some());
    }

    #[test]
    fn isolated_tie_takes_first_arc() {
        let inst = Instance::from_fn("flat", 4, |_, _| 5).unwrap();
        let flow = FlowState::new(vec![Some(1), Some(2), Some(0), None]).unwrap();
        let (f, delta) = patch_isolated(&inst, &flow, 3).unwrap();
        assert_eq!(delta, 5);
        assert_eq!(f.succ(0), Some(3));
        assert_eq!(f.succ(3), Some(1));
        assert!(patch_isolated(&inst, &flow, 0).is_err());
        let empty = FlowState::new(vec![None; 4]).unwrap();
        assert!(patch_isolated(&inst, &empty, 0).is_err());
    }

    #[test]
    fn patch_deltas_match_resummation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let inst = Instance::from_fn("r", 10, |_, _| rng.gen_range(1..100)).unwrap();
            // a 5-cycle and two 2-cycles, plus vertex 9 isolated
            let flow = FlowState::new(vec![
                Some(2), Some(4), Some(1), Some(0), Some(3),
                Some(7), Some(8), Some(5), Some(6), None,
            ])
            .unwrap();
            let d = flow.decompose();
            let (f1, delta) = patch_isolated(&inst, &flow, 9).unwrap();
            assert_eq!(f1.cost(&inst), flow.cost(&inst) + delta);
            let d1 = f1.decompose();
            let (f2, delta2) = patch_pair(&inst, &f1, &d1.subtours[0], &d1.subtours[1]).unwrap();
            assert_eq!(f2.cost(&inst), f1.cost(&inst) + delta2);
            assert_eq!(d.count(), 3);
        }
    }

    #[test]
    fn all_isolated_still_patches() {
        let inst = Instance::from_fn("r", 4, |i, j| (i + 2 * j) as i64 + 1).unwrap();
        let tour = Tour::from_sequence(&[0, 1, 2, 3]).unwrap();
        let s = AlternatingStructure::new(
            vec![(0, 1), (1, 2), (2, 3), (3, 0)],
            vec![(0, 2), (2, 0), (1, 3), (3, 1)],
            StructureKind::Circulation,
        )
        .unwrap();
        let out = cancel_traced(&inst, &tour, &s).unwrap();
        assert_eq!(out.flow.isolated().len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(patch_all(&inst, &out.flow, &mut rng).n(), 4);
    }

    #[test]
    fn tour_flow_unchanged() {
        let inst = figure3_instance();
        let tour = figure3_tour();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(patch_all(&inst, &tour.to_flow(), &mut rng), tour);
    }
}
