//! Repeated seeded runs, gap closure, and report serialization.

mod held_karp;

pub use held_karp::{held_karp, HELD_KARP_MAX_N};

use std::collections::BTreeMap;
use std::time::Duration;

use log::info;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pipeline::{run_pipeline, PipelineConfig, RunResult};

/// `(T_o − T_f) / (T_o − T_opt)`.
pub fn gap_closure(t_o: i64, t_f: i64, t_opt: i64) -> Result<Ratio<i64>> {
    if t_o == t_opt {
        return Err(Error::NoGap);
    }
    if t_o < t_opt {
        return Err(Error::InvalidGap(format!(
            "initial cost {t_o} is below the optimum {t_opt}"
        )));
    }
    if t_f > t_o {
        return Err(Error::InvalidGap(format!(
            "final cost {t_f} exceeds initial cost {t_o}"
        )));
    }
    Ok(Ratio::new(t_o - t_f, t_o - t_opt))
}

/// Smallest cap handed out, ten ticks of a microsecond clock.
pub const CAP_FLOOR: Duration = Duration::from_micros(10);

/// Ten times the calibrated median, or no cap when the policy is off.
pub fn apply_time_cap_policy(median: Duration, enabled: bool) -> Option<Duration> {
    enabled.then(|| (median * 10).max(CAP_FLOOR))
}

/// Runs `runs` (at least 5) warm-up pipelines without a cap and returns the
/// median Cycap phase time.
pub fn calibrate_median(instance: &Instance, template: &PipelineConfig, runs: usize, base_seed: u64) -> Duration {
    let runs = runs.max(5);
    let mut times: Vec<f64> = (0..runs as u64)
        .map(|i| {
            let config = PipelineConfig {
                seed: base_seed.wrapping_add(i),
                time_cap: None,
                ..template.clone()
            };
            run_pipeline(instance, &config).timings.cycap
        })
        .collect();
    Duration::from_secs_f64(median(&mut times))
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

/// Exact rational with a rounded decimal rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRatio {
    pub numerator: String,
    pub denominator: String,
    pub decimal: String,
}

impl ExactRatio {
    pub fn from_big(r: &BigRational) -> Self {
        ExactRatio {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
            decimal: render_decimal(r, 4),
        }
    }

    pub fn from_ratio(r: Ratio<i64>) -> Self {
        Self::from_big(&BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
    }

    pub fn to_big(&self) -> Option<BigRational> {
        let n: BigInt = self.numerator.parse().ok()?;
        let d: BigInt = self.denominator.parse().ok()?;
        (!d.is_zero()).then(|| BigRational::new(n, d))
    }
}

/// Rounds half away from zero to `places` decimals.
pub fn render_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let num: BigInt = r.numer().abs() * &scale * 2 + r.denom();
    let scaled = num.div_floor(&(r.denom() * 2));
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if r.is_negative() && !scaled.is_zero() { "-" } else { "" };
    format!("{sign}{int}.{frac:0>width$}", width = places as usize)
}

fn mean(values: &[Ratio<i64>]) -> Option<BigRational> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(BigRational::zero(), |acc, r| {
        acc + BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    });
    Some(sum / BigRational::from_integer(BigInt::from(values.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptSource {
    HeldKarp,
    User,
    BestObserved,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOptions {
    pub known_opt: Option<i64>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Cap applied to every k-opt phase of every trial.
    pub time_cap: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(flatten)]
    pub run: RunResult,
    pub gap_closure_cycap: Option<ExactRatio>,
    pub gap_closure_final: Option<ExactRatio>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportTimings {
    pub median_pre: f64,
    pub median_cycap: f64,
    pub median_post: f64,
    pub median_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub instance: String,
    pub n: usize,
    pub variant: String,
    pub schedule: String,
    pub trials: usize,
    pub base_seed: u64,
    pub opt_cost: i64,
    pub opt_source: OptSource,
    pub time_cap: Option<f64>,
    pub success_rate_cycap: ExactRatio,
    pub success_rate_final: ExactRatio,
    /// Mean over runs improved by the whole pipeline.
    pub gap_closure_mean: Option<ExactRatio>,
    /// Mean over runs improved right after Cycap, before the second k-opt.
    pub gap_closure_cycap_mean: Option<ExactRatio>,
    pub timings: ReportTimings,
    pub histogram_subtours: BTreeMap<usize, usize>,
    pub histogram_isolated: BTreeMap<usize, usize>,
    pub per_trial: Vec<TrialRecord>,
}

/// One CSV line per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub seed: u64,
    pub start_cost: i64,
    pub initial_cost: i64,
    pub after_cycap_cost: i64,
    pub final_cost: i64,
    pub opt_cost: i64,
    pub subtours: Option<usize>,
    pub isolated: Option<usize>,
    pub improved_after_cycap: bool,
    pub improved_final: bool,
    pub capped: bool,
    pub gap_closure_final_num: Option<String>,
    pub gap_closure_final_den: Option<String>,
    pub gap_closure_final: Option<String>,
    pub time_pre: f64,
    pub time_cycap: f64,
    pub time_post: f64,
    pub time_total: f64,
    pub tour: String,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad report: {e}")))
    }

    pub fn rows(&self) -> Vec<TrialRow> {
        self.per_trial
            .iter()
            .map(|t| {
                let gc = t.gap_closure_final.as_ref();
                TrialRow {
                    seed: t.run.seed,
                    start_cost: t.run.start_cost,
                    initial_cost: t.run.initial_cost,
                    after_cycap_cost: t.run.after_cycap_cost,
                    final_cost: t.run.final_cost,
                    opt_cost: self.opt_cost,
                    subtours: t.run.subtour_count_after_cancel,
                    isolated: t.run.isolated_count,
                    improved_after_cycap: t.run.improved_after_cycap,
                    improved_final: t.run.improved_final,
                    capped: t.run.capped,
                    gap_closure_final_num: gc.map(|g| g.numerator.clone()),
                    gap_closure_final_den: gc.map(|g| g.denominator.clone()),
                    gap_closure_final: gc.map(|g| g.decimal.clone()),
                    time_pre: t.run.timings.pre,
                    time_cycap: t.run.timings.cycap,
                    time_post: t.run.timings.post,
                    time_total: t.run.timings.total,
                    tour: t
                        .run
                        .tour
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            w.serialize(row).expect("csv row serializes");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<TrialRow>> {
        csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<TrialRow>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad csv report: {e}")))
    }
}

fn ratio(count: usize, total: usize) -> ExactRatio {
    ExactRatio::from_big(&BigRational::new(BigInt::from(count), BigInt::from(total)))
}

/// Runs `trials` pipelines from `template` with seeds `base_seed + i`.
pub fn experiment(
    instance: &Instance,
    template: &PipelineConfig,
    trials: usize,
    base_seed: u64,
    options: &ExperimentOptions,
) -> Result<Report> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let run = |i: usize| {
        let config = PipelineConfig {
            seed: base_seed.wrapping_add(i as u64),
            time_cap: options.time_cap.or(template.time_cap),
            ..template.clone()
        };
        run_pipeline(instance, &config)
    };
    let runs: Vec<RunResult> = match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| (0..trials).into_par_iter().map(run).collect()),
        None => (0..trials).into_par_iter().map(run).collect(),
    };

    let best_observed = runs.iter().map(|r| r.final_cost).min().expect("trials ≥ 1");
    let (opt_cost, opt_source) = if instance.n() <= HELD_KARP_MAX_N {
        (held_karp(instance)?.0, OptSource::HeldKarp)
    } else if let Some(opt) = options.known_opt {
        if opt > best_observed {
            return Err(Error::InvalidArgument(format!(
                "known optimum {opt} exceeds an observed tour of cost {best_observed}"
            )));
        }
        (opt, OptSource::User)
    } else {
        (best_observed, OptSource::BestObserved)
    };
    info!("optimum {opt_cost} from {opt_source:?}");

    let gc = |success: bool, t_o: i64, t_f: i64| {
        if success {
            gap_closure(t_o, t_f, opt_cost).ok()
        } else {
            None
        }
    };
    let mut gc_cycap = Vec::new();
    let mut gc_final = Vec::new();
    let mut hist_sub = BTreeMap::new();
    let mut hist_iso = BTreeMap::new();
    let mut per_trial = Vec::with_capacity(trials);
    for r in runs {
        let c = gc(r.improved_after_cycap, r.initial_cost, r.after_cycap_cost);
        let f = gc(r.improved_final, r.initial_cost, r.final_cost);
        gc_cycap.extend(c);
        gc_final.extend(f);
        if let Some(s) = r.subtour_count_after_cancel {
            *hist_sub.entry(s).or_insert(0) += 1;
        }
        if let Some(s) = r.isolated_count {
            *hist_iso.entry(s).or_insert(0) += 1;
        }
        per_trial.push(TrialRecord {
            run: r,
            gap_closure_cycap: c.map(ExactRatio::from_ratio),
            gap_closure_final: f.map(ExactRatio::from_ratio),
        });
    }

    let improved_cycap = per_trial.iter().filter(|t| t.run.improved_after_cycap).count();
    let improved_final = per_trial.iter().filter(|t| t.run.improved_final).count();
    debug_assert_eq!(improved_final, gc_final.len());
    let column = |f: fn(&TrialRecord) -> f64| {
        let mut v: Vec<f64> = per_trial.iter().map(f).collect();
        median(&mut v)
    };
    let timings = ReportTimings {
        median_pre: column(|t| t.run.timings.pre),
        median_cycap: column(|t| t.run.timings.cycap),
        median_post: column(|t| t.run.timings.post),
        median_total: column(|t| t.run.timings.total),
    };

    Ok(Report {
        instance: instance.name().to_string(),
        n: instance.n(),
        variant: template.variant.to_string(),
        schedule: template.schedule_label(),
        trials,
        base_seed,
        opt_cost,
        opt_source,
        time_cap: options.time_cap.or(template.time_cap).map(|d| d.as_secs_f64()),
        success_rate_cycap: ratio(improved_cycap, trials),
        success_rate_final: ratio(improved_final, trials),
        gap_closure_mean: mean(&gc_final).map(|m| ExactRatio::from_big(&m)),
        gap_closure_cycap_mean: mean(&gc_cycap).map(|m| ExactRatio::from_big(&m)),
        timings,
        histogram_subtours: hist_sub,
        histogram_isolated: hist_iso,
        per_trial,
    })
}
