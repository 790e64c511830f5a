//! Tour graph and its bipartite separated form.
//!
//! The separated graph has `2n` vertices: `0..n` are the originals (side A)
//! and `n..2n` their duplicates (side B). Insertion arcs run `h → n+k` with
//! cost `c[h][k]`; removal arcs run `n+π(i) → i` with cost `-c[i][π(i)]`.
//! Because every arc crosses sides, every directed cycle alternates between
//! insertions and removals once read back on the original vertices.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tour::Tour;

pub const NO_PRED: usize = usize::MAX;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Copy> Matrix<T> {
    pub fn filled(dim: usize, value: T) -> Self {
        Matrix {
            dim,
            data: vec![value; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.dim + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SeparatedOptions {
    /// Also add insertion arcs `(π(i), i)` that reverse a tour arc. Off by
    /// default: the tour graph leaves out both directions of every tour arc.
    pub include_reverse_tour_insertions: bool,
}

#[derive(Debug, Clone)]
pub struct SeparatedGraph {
    n: usize,
    dist: Matrix<i64>,
    pred: Matrix<usize>,
    absent: i64,
    tour: Tour,
}

pub fn build_separated(instance: &Instance, tour: &Tour) -> SeparatedGraph {
    build_separated_with(instance, tour, SeparatedOptions::default())
}

pub fn build_separated_with(
    instance: &Instance,
    tour: &Tour,
    options: SeparatedOptions,
) -> SeparatedGraph {
    let n = instance.n();
    assert_eq!(tour.n(), n, "tour and instance sizes differ");
    let absent = 2 * n as i64 * instance.penalty();
    let mut dist = Matrix::filled(2 * n, absent);
    let mut pred = Matrix::filled(2 * n, NO_PRED);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if tour.contains_arc(i, j) {
                dist.set(n + j, i, -instance.cost(i, j));
                pred.set(n + j, i, n + j);
            } else if tour.contains_arc(j, i) && !options.include_reverse_tour_insertions {
                continue;
            } else {
                dist.set(i, n + j, instance.cost(i, j));
                pred.set(i, n + j, i);
            }
        }
    }
    SeparatedGraph {
        n,
        dist,
        pred,
        absent,
        tour: tour.clone(),
    }
}

impl SeparatedGraph {
    /// Number of original vertices; the graph has `2n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn tour(&self) -> &Tour {
        &self.tour
    }

    /// Sentinel stored for missing arcs.
    pub fn absent(&self) -> i64 {
        self.absent
    }

    pub fn dist(&self) -> &Matrix<i64> {
        &self.dist
    }

    pub fn pred(&self) -> &Matrix<usize> {
        &self.pred
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.dist.get(u, v) != self.absent
    }

    #[inline]
    pub fn cost(&self, u: usize, v: usize) -> Option<i64> {
        let d = self.dist.get(u, v);
        (d != self.absent).then_some(d)
    }

    pub fn is_original(&self, v: usize) -> bool {
        v < self.n
    }

    /// All arcs `(u, v, cost)` in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let dim = self.dim();
        (0..dim).flat_map(move |u| {
            (0..dim).filter_map(move |v| self.cost(u, v).map(|c| (u, v, c)))
        })
    }

    pub fn out_arcs(&self, u: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        (0..self.dim()).filter_map(move |v| self.cost(u, v).map(|c| (v, c)))
    }

    pub fn removal_arc_count(&self) -> usize {
        self.arcs().filter(|&(u, _, _)| u >= self.n).count()
    }

    /// Human-readable vertex label: `v3` for an original, `v3'` for a duplicate.
    pub fn label(&self, v: usize) -> String {
        if v < self.n {
            format!("v{}", v + 1)
        } else {
            format!("v{}'", v - self.n + 1)
        }
    }

    fn header(&self) -> String {
        let mut out = String::new();
        for v in 0..self.dim() {
            out.push(',');
            out.push_str(&self.label(v));
        }
        out
    }

    /// Cost matrix as CSV; absent arcs are empty cells.
    pub fn dist_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for u in 0..self.dim() {
            out.push_str(&self.label(u));
            for v in 0..self.dim() {
                out.push(',');
                if let Some(c) = self.cost(u, v) {
                    let _ = write!(out, "{c}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Predecessor matrix as CSV with labels; unset entries are empty.
    pub fn pred_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for u in 0..self.dim() {
            out.push_str(&self.label(u));
            for v in 0..self.dim() {
                out.push(',');
                let p = self.pred.get(u, v);
                if p != NO_PRED {
                    out.push_str(&self.label(p));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Exact cost of a closed walk `w[0] → … → w[last] = w[0]`, or `None` if
    /// an arc is missing.
    pub fn walk_cost(&self, walk: &[usize]) -> Option<i64> {
        walk.windows(2).map(|w| self.cost(w[0], w[1])).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum StructureKind {
    Cycle,
    Circulation,
}

/// A set of tour arcs to delete and non-tour arcs to add, balanced at every
/// vertex. Arc lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlternatingStructure {
    removals: Vec<(usize, usize)>,
    insertions: Vec<(usize, usize)>,
    kind: StructureKind,
}

impl AlternatingStructure {
    /// Checks size and per-vertex balance; arc lists are canonicalized.
    pub fn new(
        mut removals: Vec<(usize, usize)>,
        mut insertions: Vec<(usize, usize)>,
        kind: StructureKind,
    ) -> Result<Self> {
        removals.sort_unstable();
        insertions.sort_unstable();
        if removals.len() != insertions.len() {
            return Err(Error::InvalidStructure(format!(
                "{} removals vs {} insertions",
                removals.len(),
                insertions.len()
            )));
        }
        if removals.len() < 2 {
            return Err(Error::InvalidStructure(
                "needs at least two removals and two insertions".into(),
            ));
        }
        if removals.windows(2).any(|w| w[0] == w[1]) || insertions.windows(2).any(|w| w[0] == w[1])
        {
            return Err(Error::InvalidStructure("repeated arc".into()));
        }
        let mut balance: HashMap<usize, (i64, i64)> = HashMap::new();
        for &(i, j) in &removals {
            balance.entry(i).or_default().0 -= 1;
            balance.entry(j).or_default().1 -= 1;
        }
        for &(h, k) in &insertions {
            balance.entry(h).or_default().0 += 1;
            balance.entry(k).or_default().1 += 1;
        }
        if let Some((v, _)) = balance.iter().find(|(_, &(o, i))| o != 0 || i != 0) {
            return Err(Error::InvalidStructure(format!(
                "unbalanced at vertex {}",
                v + 1
            )));
        }
        Ok(AlternatingStructure {
            removals,
            insertions,
            kind,
        })
    }

    pub fn removals(&self) -> &[(usize, usize)] {
        &self.removals
    }

    pub fn insertions(&self) -> &[(usize, usize)] {
        &self.insertions
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.removals.len() + self.insertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removals.is_empty()
    }

    /// Removals must be tour arcs and insertions must not be.
    pub fn check_against(&self, tour: &Tour) -> Result<()> {
        if let Some(&(i, j)) = self.removals.iter().find(|&&(i, j)| !tour.contains_arc(i, j)) {
            return Err(Error::InvalidStructure(format!(
                "removal ({}, {}) is not a tour arc",
                i + 1,
                j + 1
            )));
        }
        if let Some(&(h, k)) = self.insertions.iter().find(|&&(h, k)| tour.contains_arc(h, k)) {
            return Err(Error::InvalidStructure(format!(
                "insertion ({}, {}) is already a tour arc",
                h + 1,
                k + 1
            )));
        }
        Ok(())
    }

    /// Splits into arc-disjoint alternating cycles. At each vertex `v` the
    /// removal of the tour arc leaving `v` continues with the insertion
    /// leaving `v`, and an insertion entering `k` continues with the removal
    /// of the tour arc entering `k`.
    pub fn decompose_cycles(&self) -> Vec<AlternatingStructure> {
        let by_tail: HashMap<usize, (usize, usize)> =
            self.insertions.iter().map(|&a| (a.0, a)).collect();
        let removal_into: HashMap<usize, (usize, usize)> =
            self.removals.iter().map(|&a| (a.1, a)).collect();
        let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut cycles = Vec::new();
        for &start in &self.insertions {
            if used.contains(&start) {
                continue;
            }
            let mut ins = Vec::new();
            let mut rem = Vec::new();
            let mut arc = start;
            loop {
                used.insert(arc);
                ins.push(arc);
                let r = removal_into[&arc.1];
                rem.push(r);
                arc = by_tail[&r.0];
                if arc == start {
                    break;
                }
            }
            cycles.push(
                AlternatingStructure::new(rem, ins, StructureKind::Cycle)
                    .expect("pairing yields balanced cycles"),
            );
        }
        cycles
    }

    /// Arcs of the structure in separated-graph coordinates.
    pub fn separated_arcs(&self, n: usize) -> Vec<(usize, usize)> {
        let mut arcs: Vec<(usize, usize)> = self
            .insertions
            .iter()
            .map(|&(h, k)| (h, n + k))
            .chain(self.removals.iter().map(|&(i, j)| (n + j, i)))
            .collect();
        arcs.sort_unstable();
        arcs
    }
}

pub fn structure_cost(instance: &Instance, s: &AlternatingStructure) -> i64 {
    let plus: i64 = s.insertions.iter().map(|&(h, k)| instance.cost(h, k)).sum();
    let minus: i64 = s.removals.iter().map(|&(i, j)| instance.cost(i, j)).sum();
    plus - minus
}

fn split_arc(sep: &SeparatedGraph, u: usize, v: usize) -> Result<(bool, (usize, usize))> {
    let n = sep.n();
    if !sep.has_arc(u, v) {
        return Err(Error::InvalidWalk(format!(
            "arc {} → {} is not in the separated graph",
            sep.label(u),
            sep.label(v)
        )));
    }
    if u < n {
        Ok((true, (u, v - n)))
    } else {
        Ok((false, (v, u - n)))
    }
}

/// Reads a closed walk `w[0] → … → w[last]` (with `w[last] = w[0]`) back as
/// insertions `(h, k)` for arcs `h → k'` and removals of tour arcs `(i, j)`
/// for arcs `j' → i`.
pub fn map_back(sep: &SeparatedGraph, walk: &[usize]) -> Result<AlternatingStructure> {
    if walk.len() < 2 || walk.first() != walk.last() {
        return Err(Error::InvalidWalk("walk is not closed".into()));
    }
    let body = &walk[..walk.len() - 1];
    let mut seen = vec![false; sep.dim()];
    for &v in body {
        if v >= sep.dim() {
            return Err(Error::InvalidWalk(format!("vertex index {v} out of range")));
        }
        if seen[v] {
            return Err(Error::InvalidWalk(format!(
                "walk revisits {}",
                sep.label(v)
            )));
        }
        seen[v] = true;
    }
    let mut removals = Vec::new();
    let mut insertions = Vec::new();
    for w in walk.windows(2) {
        let (is_insertion, arc) = split_arc(sep, w[0], w[1])?;
        if is_insertion {
            insertions.push(arc);
        } else {
            removals.push(arc);
        }
    }
    AlternatingStructure::new(removals, insertions, StructureKind::Cycle)
}

/// Reads a set of separated-graph arcs carrying unit flow back as one
/// structure. The kind is `Circulation` when it splits into several cycles.
pub fn map_back_arcs(sep: &SeparatedGraph, arcs: &[(usize, usize)]) -> Result<AlternatingStructure> {
    let mut removals = Vec::new();
    let mut insertions = Vec::new();
    let mut net = vec![0i64; sep.dim()];
    for &(u, v) in arcs {
        let (is_insertion, arc) = split_arc(sep, u, v)?;
        net[u] += 1;
        net[v] -= 1;
        if is_insertion {
            insertions.push(arc);
        } else {
            removals.push(arc);
        }
    }
    if net.iter().any(|&b| b != 0) {
        return Err(Error::InvalidWalk("arc set violates flow conservation".into()));
    }
    let s = AlternatingStructure::new(removals, insertions, StructureKind::Cycle)?;
    let kind = if s.decompose_cycles().len() > 1 {
        StructureKind::Circulation
    } else {
        StructureKind::Cycle
    };
    Ok(AlternatingStructure { kind, ..s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{figure3_instance, figure3_tour};

    fn labels_to_walk(n: usize, labels: &[&str]) -> Vec<usize> {
        labels
            .iter()
            .map(|l| match l.strip_suffix('\'') {
                Some(b) => n + b.parse::<usize>().unwrap() - 1,
                None => l.parse::<usize>().unwrap() - 1,
            })
            .collect()
    }

    #[test]
    fn removal_arcs_follow_tour() {
        let inst = Instance::from_fn("r", 5, |i, j| (i * 7 + j * 3) as i64 % 11 + 1).unwrap();
        // 1 → 5 → 4 → 3 → 2 → 1
        let tour = Tour::from_sequence(&[0, 4, 3, 2, 1]).unwrap();
        let sep = build_separated(&inst, &tour);
        assert_eq!(sep.cost(5 + 4, 0), Some(-inst.cost(0, 4)));
        assert_eq!(sep.pred().get(5 + 4, 0), 5 + 4);
        assert_eq!(sep.removal_arc_count(), 5);
        for i in 0..5 {
            assert!(!sep.has_arc(i, 5 + tour.succ(i)));
        }
    }

    #[test]
    fn figure3_removal_costs() {
        let sep = build_separated(&figure3_instance(), &figure3_tour());
        let removal: Vec<i64> = sep.arcs().filter(|a| a.0 >= 10).map(|a| a.2).collect();
        assert_eq!(removal.len(), 10);
        assert!(removal.iter().all(|&c| c == -12 || c == -2));
        // no A→A or B→B arcs
        assert!(sep.arcs().all(|(u, v, _)| (u < 10) != (v < 10)));
    }

    #[test]
    fn reverse_tour_insertions_option() {
        let inst = figure3_instance();
        let tour = figure3_tour();
        let plain = build_separated(&inst, &tour);
        assert!(!plain.has_arc(1, 10));
        let opt = SeparatedOptions {
            include_reverse_tour_insertions: true,
        };
        let wide = build_separated_with(&inst, &tour, opt);
        // (2, 1) reverses the tour arc (1, 2)
        assert_eq!(wide.cost(1, 10), Some(12));
        assert!(!wide.has_arc(0, 11));
    }

    #[test]
    fn figure3_cycle_maps_back() {
        let inst = figure3_instance();
        let sep = build_separated(&inst, &figure3_tour());
        let walk = labels_to_walk(
            10,
            &["1", "6'", "5", "10'", "9", "4'", "3", "8'", "7", "2'", "1"],
        );
        let s = map_back(&sep, &walk).unwrap();
        let one = |v: &[(usize, usize)]| -> Vec<(usize, usize)> {
            v.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
        };
        assert_eq!(one(s.removals()), vec![(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]);
        assert_eq!(one(s.insertions()), vec![(1, 6), (3, 8), (5, 10), (7, 2), (9, 4)]);
        assert_eq!(s.kind(), StructureKind::Cycle);
        assert_eq!(structure_cost(&inst, &s), -25);
        assert_eq!(sep.walk_cost(&walk), Some(-25));
    }

    #[test]
    fn minimal_cycle_and_errors() {
        let inst = Instance::from_fn("r", 6, |i, j| (i as i64 - j as i64).abs()).unwrap();
        let tour = Tour::from_sequence(&[0, 1, 2, 3, 4, 5]).unwrap();
        let sep = build_separated(&inst, &tour);
        let n = 6;
        // 1 → 5' → 4 → 2' → 1 : insert (1,5),(4,2); remove (4,5),(1,2)
        let walk = vec![0, n + 4, 3, n + 1, 0];
        let s = map_back(&sep, &walk).unwrap();
        assert_eq!(s.removals(), &[(0, 1), (3, 4)]);
        assert_eq!(s.insertions(), &[(0, 4), (3, 1)]);
        assert!(matches!(map_back(&sep, &walk[..4]), Err(Error::InvalidWalk(_))));
        // tour arc as insertion is absent
        assert!(map_back(&sep, &[0, n + 1, 0]).is_err());
        // revisiting a duplicate vertex
        let twice = vec![0, n + 4, 3, n + 1, 0, n + 4, 3, n + 1, 0];
        assert!(map_back(&sep, &twice).unwrap_err().to_string().contains("revisits"));
    }

    #[test]
    fn structure_zero_cost() {
        let inst = Instance::from_fn("u", 4, |_, _| 5).unwrap();
        let s = AlternatingStructure::new(
            vec![(0, 1), (2, 3)],
            vec![(0, 3), (2, 1)],
            StructureKind::Cycle,
        )
        .unwrap();
        assert_eq!(structure_cost(&inst, &s), 0);
    }

    #[test]
    fn unbalanced_structure_rejected() {
        let e = AlternatingStructure::new(vec![(0, 1), (2, 3)], vec![(0, 3), (1, 2)], StructureKind::Cycle);
        assert!(e.is_err());
        assert!(AlternatingStructure::new(vec![], vec![], StructureKind::Cycle).is_err());
    }

    #[test]
    fn csv_dump_has_labels() {
        let sep = build_separated(&figure3_instance(), &figure3_tour());
        let csv = sep.dist_csv();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with(",v1,v2"));
        assert!(header.ends_with("v10'"));
        assert_eq!(csv.lines().count(), 21);
        assert!(sep.pred_csv().lines().nth(11).unwrap().starts_with("v1',"));
    }
}
