//! One Cycap run: random start, k-opt, detect, cancel, patch, optional k-opt.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cancel_patch::{cancel_traced, patch_all};
use crate::detect::{
    floyd_warshall_full, karp_min_mean, min_cost_circulation, predecessor_readout,
};
use crate::error::Error;
use crate::instance::Instance;
use crate::local_search::{run_schedule, OptSchedule};
use crate::residual::{
    build_separated_with, map_back, map_back_arcs, AlternatingStructure, SeparatedOptions,
};
use crate::tour::{random_tour, Tour};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Every cycle read off a full Floyd–Warshall run.
    F,
    /// One minimum-mean cycle.
    M,
    /// A minimum-cost circulation.
    C,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::F => "F",
            Variant::M => "M",
            Variant::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "f" => Ok(Variant::F),
            "m" => Ok(Variant::M),
            "c" => Ok(Variant::C),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CycapOptions {
    pub separated: SeparatedOptions,
    /// Repeat until a pass no longer improves.
    pub iterate: bool,
}

/// What one detect–cancel–patch call saw. Counts describe the attempt whose
/// patched tour was cheapest, whether or not it beat the input.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycapStats {
    pub passes: usize,
    pub candidates: usize,
    pub structure_cost: Option<i64>,
    pub subtours_after_cancel: Option<usize>,
    pub isolated_after_cancel: Option<usize>,
    pub trimmed_pairs: Option<usize>,
    pub improved: bool,
}

struct Attempt {
    tour: Tour,
    cost: i64,
    structure_cost: i64,
    subtours: usize,
    isolated: usize,
    trimmed: usize,
}

fn attempt<R: Rng + ?Sized>(
    instance: &Instance,
    tour: &Tour,
    s: &AlternatingStructure,
    rng: &mut R,
) -> Option<Attempt> {
    let out = match cancel_traced(instance, tour, s) {
        Ok(out) => out,
        Err(e) => {
            debug!("cancel rejected: {e}");
            return None;
        }
    };
    let d = out.flow.decompose();
    let patched = patch_all(instance, &out.flow, rng);
    Some(Attempt {
        cost: patched.cost(instance),
        tour: patched,
        structure_cost: crate::residual::structure_cost(instance, s),
        subtours: d.count(),
        isolated: d.isolated.len(),
        trimmed: out.trimmed.len(),
    })
}

fn single_pass<R: Rng + ?Sized>(
    instance: &Instance,
    tour: &Tour,
    variant: Variant,
    rng: &mut R,
    options: CycapOptions,
) -> (Tour, CycapStats) {
    let sep = build_separated_with(instance, tour, options.separated);
    let structures: Vec<AlternatingStructure> = match variant {
        Variant::F => {
            let fw = floyd_warshall_full(&sep);
            predecessor_readout(&fw, &sep)
                .iter()
                .filter_map(|c| map_back(&sep, &c.walk).ok())
                .collect()
        }
        Variant::M => karp_min_mean(&sep)
            .and_then(|c| map_back(&sep, &c.walk).ok())
            .into_iter()
            .collect(),
        Variant::C => {
            let circ = min_cost_circulation(&sep);
            if circ.is_empty() {
                Vec::new()
            } else {
                map_back_arcs(&sep, &circ.arcs).ok().into_iter().collect()
            }
        }
    };
    let mut stats = CycapStats {
        passes: 1,
        candidates: structures.len(),
        ..CycapStats::default()
    };
    let mut best: Option<Attempt> = None;
    for s in &structures {
        if let Some(a) = attempt(instance, tour, s, rng) {
            if best.as_ref().is_none_or(|b| a.cost < b.cost) {
                best = Some(a);
            }
        }
    }
    let input_cost = tour.cost(instance);
    match best {
        Some(a) => {
            stats.structure_cost = Some(a.structure_cost);
            stats.subtours_after_cancel = Some(a.subtours);
            stats.isolated_after_cancel = Some(a.isolated);
            stats.trimmed_pairs = Some(a.trimmed);
            if a.cost < input_cost {
                stats.improved = true;
                (a.tour, stats)
            } else {
                (tour.clone(), stats)
            }
        }
        None => (tour.clone(), stats),
    }
}

/// Detect, cancel and patch once (or until no improvement with
/// `options.iterate`). The input tour is always a candidate, so the result
/// never costs more than `tour`.
pub fn cycap_once<R: Rng + ?Sized>(
    instance: &Instance,
    tour: &Tour,
    variant: Variant,
    rng: &mut R,
    options: CycapOptions,
) -> (Tour, CycapStats) {
    let (mut current, mut stats) = single_pass(instance, tour, variant, rng, options);
    if !options.iterate {
        return (current, stats);
    }
    let mut last_improved = stats.improved;
    while last_improved {
        let (next, s) = single_pass(instance, &current, variant, rng, options);
        stats.passes += 1;
        last_improved = s.improved;
        if s.improved {
            current = next;
        }
    }
    (current, stats)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub variant: Variant,
    pub pre: OptSchedule,
    pub post: Option<OptSchedule>,
    pub seed: u64,
    /// Applied to each k-opt phase; overrides the schedules' own caps when set.
    pub time_cap: Option<Duration>,
    pub options: CycapOptions,
}

impl PipelineConfig {
    pub fn new(variant: Variant, pre: OptSchedule) -> Self {
        PipelineConfig {
            variant,
            pre,
            post: None,
            seed: 0,
            time_cap: None,
            options: CycapOptions::default(),
        }
    }

    pub fn with_post(mut self, post: Option<OptSchedule>) -> Self {
        self.post = post;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `"2+C"`, `"2+3+C+2"`, …
    pub fn schedule_label(&self) -> String {
        let mut s = format!("{}+{}", self.pre, self.variant);
        if let Some(post) = &self.post {
            s.push('+');
            s.push_str(&post.to_string());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub pre: f64,
    pub cycap: f64,
    pub post: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub start_cost: i64,
    /// Cost after the first k-opt phase.
    pub initial_cost: i64,
    pub after_cycap_cost: i64,
    pub final_cost: i64,
    pub subtour_count_after_cancel: Option<usize>,
    pub isolated_count: Option<usize>,
    pub improved_after_cycap: bool,
    pub improved_final: bool,
    pub capped: bool,
    pub stats: CycapStats,
    /// Seconds per phase.
    pub timings: PhaseTimings,
    /// Final tour as 1-based labels.
    pub tour: Vec<usize>,
}

pub fn run_pipeline(instance: &Instance, config: &PipelineConfig) -> RunResult {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let started = Instant::now();
    let start = random_tour(instance.n(), &mut rng);

    let pre_schedule = match config.time_cap {
        Some(cap) => config.pre.clone().with_time_cap(Some(cap)),
        None => config.pre.clone(),
    };
    let t0 = Instant::now();
    let pre = run_schedule(instance, &start, &pre_schedule);
    let pre_time = t0.elapsed();
    let initial_cost = pre.tour.cost(instance);

    let t1 = Instant::now();
    let (after, stats) = cycap_once(instance, &pre.tour, config.variant, &mut rng, config.options);
    let cycap_time = t1.elapsed();
    let after_cycap_cost = after.cost(instance);

    let t2 = Instant::now();
    let mut capped = pre.capped;
    let final_tour = match &config.post {
        Some(post) => {
            let schedule = match config.time_cap {
                Some(cap) => post.clone().with_time_cap(Some(cap)),
                None => post.clone(),
            };
            let out = run_schedule(instance, &after, &schedule);
            capped |= out.capped;
            out.tour
        }
        None => after,
    };
    let post_time = t2.elapsed();
    let final_cost = final_tour.cost(instance);
    debug_assert!(final_cost <= initial_cost);

    RunResult {
        seed: config.seed,
        start_cost: start.cost(instance),
        initial_cost,
        after_cycap_cost,
        final_cost,
        subtour_count_after_cancel: stats.subtours_after_cancel,
        isolated_count: stats.isolated_after_cancel,
        improved_after_cycap: after_cycap_cost < initial_cost,
        improved_final: final_cost < initial_cost,
        capped,
        stats,
        timings: PhaseTimings {
            pre: pre_time.as_secs_f64(),
            cycap: cycap_time.as_secs_f64(),
            post: post_time.as_secs_f64(),
            total: started.elapsed().as_secs_f64(),
        },
        tour: final_tour.labels(),
    }
}
