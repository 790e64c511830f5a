//! First-improvement 2-opt and 3-opt for directed tours, with the optional
//! reversal-augmented candidate family (k*-opt).
//!
//! Removing `k` tour arcs at sequence positions `p0 < p1 < … < p(k-1)` leaves
//! `k` segments. Segment 0 wraps around the end of the sequence and keeps its
//! orientation; the others are permuted and possibly reversed. All costs are
//! evaluated with directed arc costs, so reversing a segment is never free.
//!
//! With `star`, every candidate is also compared in reversed orientation, and
//! so is the current tour itself. Candidates are scanned in a fixed order:
//! standard reconnections, then their reversals, then the reversed tour; the
//! first strictly cheapest one wins.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instance::Instance;
use crate::tour::Tour;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptStep {
    TwoOpt,
    ThreeOpt,
}

impl OptStep {
    pub fn k(self) -> usize {
        match self {
            OptStep::TwoOpt => 2,
            OptStep::ThreeOpt => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptSchedule {
    pub steps: Vec<OptStep>,
    pub star: bool,
    pub time_cap: Option<Duration>,
}

impl OptSchedule {
    pub fn new(steps: Vec<OptStep>, star: bool) -> Self {
        assert!(!steps.is_empty(), "schedule needs at least one step");
        OptSchedule {
            steps,
            star,
            time_cap: None,
        }
    }

    pub fn two_opt(star: bool) -> Self {
        Self::new(vec![OptStep::TwoOpt], star)
    }

    pub fn three_opt(star: bool) -> Self {
        Self::new(vec![OptStep::ThreeOpt], star)
    }

    pub fn two_three_opt(star: bool) -> Self {
        Self::new(vec![OptStep::TwoOpt, OptStep::ThreeOpt], star)
    }

    pub fn with_time_cap(mut self, cap: Option<Duration>) -> Self {
        self.time_cap = cap;
        self
    }

    /// `"2"`, `"3"` or `"2+3"`.
    pub fn label(&self) -> String {
        self.steps
            .iter()
            .map(|s| s.k().to_string())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn parse(text: &str, star: bool) -> Result<Self, Error> {
        let steps = text
            .split('+')
            .map(|t| match t.trim() {
                "2" => Ok(OptStep::TwoOpt),
                "3" => Ok(OptStep::ThreeOpt),
                other => Err(Error::InvalidArgument(format!("unknown k-opt step {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if steps.is_empty() {
            return Err(Error::InvalidArgument("empty schedule".into()));
        }
        Ok(Self::new(steps, star))
    }
}

impl fmt::Display for OptSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())?;
        if self.star {
            f.write_str("*")?;
        }
        Ok(())
    }
}

impl FromStr for OptStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "2" => Ok(OptStep::TwoOpt),
            "3" => Ok(OptStep::ThreeOpt),
            other => Err(Error::InvalidArgument(format!("unknown k-opt step {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub tour: Tour,
    pub moves: usize,
    /// The deadline fired before a local optimum was certified.
    pub capped: bool,
}

/// A reconnection: segments 1.. in the given order, each flagged reversed.
type Arrangement = &'static [(usize, bool)];

const TWO_OPT_MOVES: &[Arrangement] = &[&[(1, true)]];

const THREE_OPT_MOVES: &[Arrangement] = &[
    &[(1, true), (2, false)],
    &[(1, false), (2, true)],
    &[(1, true), (2, true)],
    &[(2, false), (1, false)],
    &[(2, true), (1, false)],
    &[(2, false), (1, true)],
    &[(2, true), (1, true)],
];

pub(crate) fn reconnections(k: usize) -> &'static [Arrangement] {
    match k {
        2 => TWO_OPT_MOVES,
        3 => THREE_OPT_MOVES,
        _ => panic!("only k = 2 and k = 3 are supported"),
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    first: usize,
    last: usize,
    /// internal cost traversed forward / backward
    fwd: i64,
    bwd: i64,
}

impl Segment {
    fn oriented(self, reversed: bool) -> Segment {
        if reversed {
            Segment {
                first: self.last,
                last: self.first,
                fwd: self.bwd,
                bwd: self.fwd,
            }
        } else {
            self
        }
    }
}

/// Prefix sums over the arcs of a tour sequence, forward and reversed.
struct Prefix {
    seq: Vec<usize>,
    fwd: Vec<i64>,
    bwd: Vec<i64>,
}

impl Prefix {
    fn new(instance: &Instance, seq: Vec<usize>) -> Self {
        let n = seq.len();
        let mut fwd = vec![0i64; n + 1];
        let mut bwd = vec![0i64; n + 1];
        for m in 0..n {
            let (a, b) = (seq[m], seq[(m + 1) % n]);
            fwd[m + 1] = fwd[m] + instance.cost(a, b);
            bwd[m + 1] = bwd[m] + instance.cost(b, a);
        }
        Prefix { seq, fwd, bwd }
    }

    fn total(&self) -> i64 {
        self.fwd[self.seq.len()]
    }

    fn reversed_total(&self) -> i64 {
        self.bwd[self.seq.len()]
    }

    /// Non-wrapping segment over positions `a..=b`.
    fn inner(&self, a: usize, b: usize) -> Segment {
        Segment {
            first: self.seq[a],
            last: self.seq[b],
            fwd: self.fwd[b] - self.fwd[a],
            bwd: self.bwd[b] - self.bwd[a],
        }
    }

    /// The wrapping segment over positions `b+1 .. n-1, 0 .. a`.
    fn wrap(&self, a: usize, b: usize) -> Segment {
        let n = self.seq.len();
        Segment {
            first: self.seq[(b + 1) % n],
            last: self.seq[a],
            fwd: (self.fwd[n] - self.fwd[b + 1]) + self.fwd[a],
            bwd: (self.bwd[n] - self.bwd[b + 1]) + self.bwd[a],
        }
    }

    fn segments(&self, cuts: &[usize]) -> Vec<Segment> {
        let k = cuts.len();
        let mut segs = Vec::with_capacity(k);
        segs.push(self.wrap(cuts[0], cuts[k - 1]));
        for t in 1..k {
            segs.push(self.inner(cuts[t - 1] + 1, cuts[t]));
        }
        segs
    }

    /// Segment `t` as a position range for materialization.
    fn positions(&self, cuts: &[usize], t: usize) -> Vec<usize> {
        let n = self.seq.len();
        let k = cuts.len();
        if t == 0 {
            let mut v: Vec<usize> = (cuts[k - 1] + 1..n).collect();
            v.extend(0..=cuts[0]);
            v
        } else {
            (cuts[t - 1] + 1..=cuts[t]).collect()
        }
    }
}

/// Cost of `segs[0]` followed by `arr`, and the cost of the same tour reversed.
fn arrangement_costs(instance: &Instance, segs: &[Segment], arr: Arrangement) -> (i64, i64) {
    let mut order = Vec::with_capacity(arr.len() + 1);
    order.push(segs[0]);
    for &(idx, rev) in arr {
        order.push(segs[idx].oriented(rev));
    }
    let mut forward = 0i64;
    let mut backward = 0i64;
    for (t, seg) in order.iter().enumerate() {
        let next = &order[(t + 1) % order.len()];
        forward += seg.fwd + instance.cost(seg.last, next.first);
        backward += seg.bwd + instance.cost(next.first, seg.last);
    }
    (forward, backward)
}

fn materialize(prefix: &Prefix, cuts: &[usize], arr: Arrangement, reverse_all: bool) -> Tour {
    let mut seq: Vec<usize> = prefix
        .positions(cuts, 0)
        .into_iter()
        .map(|p| prefix.seq[p])
        .collect();
    for &(idx, rev) in arr {
        let mut part: Vec<usize> = prefix
            .positions(cuts, idx)
            .into_iter()
            .map(|p| prefix.seq[p])
            .collect();
        if rev {
            part.reverse();
        }
        seq.extend(part);
    }
    if reverse_all {
        seq.reverse();
    }
    Tour::from_sequence(&seq).expect("reconnection of tour segments is a tour")
}

enum Choice {
    Move(usize, bool),
    ReverseTour,
}

/// Scans all `k`-arc choices in lexicographic position order and returns the
/// first improving candidate, if any.
fn improving_move(
    instance: &Instance,
    prefix: &Prefix,
    k: usize,
    star: bool,
    deadline: Option<Instant>,
) -> Result<Option<Tour>, ()> {
    let n = prefix.seq.len();
    let current = prefix.total();
    let moves = reconnections(k);
    let mut cuts = vec![0usize; k];

    let evaluate = |cuts: &[usize]| -> Option<Tour> {
        let segs = prefix.segments(cuts);
        let mut best: Option<(i64, Choice)> = None;
        let consider = |cost: i64, choice: Choice, best: &mut Option<(i64, Choice)>| {
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                *best = Some((cost, choice));
            }
        };
        let mut reversed_costs = Vec::with_capacity(moves.len());
        for (m, arr) in moves.iter().enumerate() {
            let (fwd, bwd) = arrangement_costs(instance, &segs, arr);
            consider(fwd, Choice::Move(m, false), &mut best);
            reversed_costs.push(bwd);
        }
        if star {
            for (m, &bwd) in reversed_costs.iter().enumerate() {
                consider(bwd, Choice::Move(m, true), &mut best);
            }
            consider(prefix.reversed_total(), Choice::ReverseTour, &mut best);
        }
        match best {
            Some((cost, choice)) if cost < current => Some(match choice {
                Choice::Move(m, rev) => materialize(prefix, cuts, moves[m], rev),
                Choice::ReverseTour => Tour::from_sequence(&prefix.seq)
                    .expect("current sequence is a tour")
                    .reversed(),
            }),
            _ => None,
        }
    };

    let expired = |d: Option<Instant>| d.is_some_and(|d| Instant::now() >= d);

    match k {
        2 => {
            for i in 0..n {
                if expired(deadline) {
                    return Err(());
                }
                for j in i + 2..n {
                    cuts[0] = i;
                    cuts[1] = j;
                    if let Some(t) = evaluate(&cuts) {
                        return Ok(Some(t));
                    }
                }
            }
        }
        3 => {
            for i in 0..n {
                for j in i + 1..n {
                    if expired(deadline) {
                        return Err(());
                    }
                    for l in j + 1..n {
                        cuts[0] = i;
                        cuts[1] = j;
                        cuts[2] = l;
                        if let Some(t) = evaluate(&cuts) {
                            return Ok(Some(t));
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(None)
}

fn search_until(
    instance: &Instance,
    tour: &Tour,
    step: OptStep,
    star: bool,
    deadline: Option<Instant>,
) -> SearchOutcome {
    let mut current = tour.clone();
    let mut moves = 0;
    loop {
        let prefix = Prefix::new(instance, current.sequence());
        match improving_move(instance, &prefix, step.k(), star, deadline) {
            Ok(Some(next)) => {
                debug_assert!(next.cost(instance) < current.cost(instance));
                current = next;
                moves += 1;
            }
            Ok(None) => {
                return SearchOutcome {
                    tour: current,
                    moves,
                    capped: false,
                }
            }
            Err(()) => {
                return SearchOutcome {
                    tour: current,
                    moves,
                    capped: true,
                }
            }
        }
    }
}

/// Runs k-opt (or k*-opt with `star`) to local optimality, or until
/// `time_cap` elapses, in which case the current tour is returned.
pub fn k_opt_star(
    instance: &Instance,
    tour: &Tour,
    step: OptStep,
    star: bool,
    time_cap: Option<Duration>,
) -> SearchOutcome {
    let deadline = time_cap.map(|c| Instant::now() + c);
    search_until(instance, tour, step, star, deadline)
}

/// Applies the schedule's steps in order. Whenever a later step improves
/// the tour, the schedule starts over from its first step, so on natural
/// termination the tour is locally optimal for every step.
pub fn run_schedule(instance: &Instance, tour: &Tour, schedule: &OptSchedule) -> SearchOutcome {
    let deadline = schedule.time_cap.map(|c| Instant::now() + c);
    let mut current = tour.clone();
    let mut moves = 0;
    loop {
        let mut restart = false;
        for (idx, &step) in schedule.steps.iter().enumerate() {
            let out = search_until(instance, &current, step, schedule.star, deadline);
            current = out.tour;
            moves += out.moves;
            if out.capped {
                return SearchOutcome {
                    tour: current,
                    moves,
                    capped: true,
                };
            }
            if idx > 0 && out.moves > 0 {
                restart = true;
                break;
            }
        }
        if !restart || schedule.steps.len() == 1 {
            return SearchOutcome {
                tour: current,
                moves,
                capped: false,
            };
        }
    }
}
