//! Command-line front end: `solve`, `bench`, `oracle`, `convert`, `separated`.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    apply_time_cap_policy, calibrate_median, experiment, held_karp, ExperimentOptions,
    HELD_KARP_MAX_N,
};
use crate::error::Error;
use crate::instance::{fixture, parse_auto, Instance};
use crate::local_search::OptSchedule;
use crate::pipeline::{run_pipeline, CycapOptions, PipelineConfig, RunResult, Variant};
use crate::residual::build_separated;
use crate::tour::{validate_tour, Tour};

#[derive(Debug, Parser)]
#[command(name = "cycap", version, about = "Cycle cancel and patch TSP heuristic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    F,
    M,
    C,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::F => Variant::F,
            VariantArg::M => Variant::M,
            VariantArg::C => Variant::C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertFormat {
    Csv,
    Tsplib,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Instance file (TSPLIB or matrix CSV) or a built-in fixture name (`fig3`, `fig5`).
    #[arg(long)]
    pub instance: String,
    #[arg(long, value_enum, default_value = "c", ignore_case = true)]
    pub variant: VariantArg,
    /// k-opt schedule before Cycap: 2, 3 or 2+3.
    #[arg(long, default_value = "2")]
    pub pre: String,
    /// k-opt schedule after Cycap: none, 2, 3 or 2+3.
    #[arg(long, default_value = "none")]
    pub post: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the reversal-augmented k*-opt. Defaults to true for asymmetric instances.
    #[arg(long)]
    pub star: Option<bool>,
    /// Time cap in seconds for each k-opt phase.
    #[arg(long)]
    pub time_cap: Option<f64>,
    /// Repeat detect-cancel-patch until it stops improving.
    #[arg(long)]
    pub iterate: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one pipeline and print the resulting tour.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFormat,
    },
    /// Run repeated seeded trials and write a report.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Best known optimum, used for gap closure when n > 16.
        #[arg(long)]
        opt: Option<i64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Worker threads for trials; all cores when omitted
        #[arg(long)]
        jobs: Option<usize>,
        /// Cap each k-opt phase at ten times the calibrated Cycap median.
        #[arg(long)]
        cap_policy: bool,
    },
    /// Compare pipeline costs with the exact optimum (n ≤ 16).
    Oracle {
        #[command(flatten)]
        run: RunArgs,
        /// Number of seeds per variant, starting at --seed.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
    },
    /// Rewrite an instance as a matrix CSV or TSPLIB file.
    Convert {
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum)]
        to: ConvertFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the separated graph's cost matrix for a tour.
    Separated {
        #[arg(long)]
        instance: String,
        /// Tour as 1-based labels; defaults to 1 2 … n.
        #[arg(long)]
        tour: Option<String>,
        /// Print the predecessor matrix instead.
        #[arg(long)]
        pred: bool,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidFlow(_) | Error::InvalidWalk(_) | Error::InvalidStructure(_) | Error::Patch(_) => {
                CliError::internal(e.to_string())
            }
            _ => CliError::usage(e.to_string()),
        }
    }
}

pub fn load_instance(spec: &str) -> Result<Instance, CliError> {
    if let Some(inst) = fixture(spec) {
        return Ok(inst);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::usage(format!("file not found: {spec}")),
        _ => CliError::usage(format!("cannot read {spec}: {e}")),
    })?;
    let inst = parse_auto(&text).map_err(|e| CliError::usage(format!("{spec}: {e}")))?;
    if inst.name().is_empty() || inst.name() == "matrix" {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
        return Ok(inst.with_name(stem));
    }
    Ok(inst)
}

fn schedule(text: &str, star: bool) -> Result<OptSchedule, CliError> {
    OptSchedule::parse(text, star).map_err(|e| CliError::usage(e.to_string()))
}

fn pipeline_config(run: &RunArgs, instance: &Instance) -> Result<PipelineConfig, CliError> {
    let star = run.star.unwrap_or(!instance.is_symmetric());
    let pre = schedule(&run.pre, star)?;
    let post = match run.post.as_str() {
        "none" => None,
        other => Some(schedule(other, star)?),
    };
    let time_cap = match run.time_cap {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(CliError::usage(format!("invalid --time-cap {s}")))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(PipelineConfig {
        variant: run.variant.into(),
        pre,
        post,
        seed: run.seed,
        time_cap,
        options: CycapOptions {
            iterate: run.iterate,
            ..CycapOptions::default()
        },
    })
}

fn check_result(instance: &Instance, r: &RunResult) -> Result<(), CliError> {
    let tour = Tour::parse_labels(
        &r.tour.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
    )
    .map_err(|e| CliError::internal(format!("result tour invalid: {e}")))?;
    if !validate_tour(tour.successors(), instance.n()) || tour.cost(instance) != r.final_cost {
        return Err(CliError::internal("result tour fails validation"));
    }
    if r.final_cost > r.initial_cost {
        return Err(CliError::internal("final tour is worse than the k-opt tour"));
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    instance: &'a str,
    n: usize,
    variant: String,
    schedule: String,
    #[serde(flatten)]
    result: &'a RunResult,
}

fn write_out(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(format!("write failed: {e}"))),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { run, output } => {
            let instance = load_instance(&run.instance)?;
            let config = pipeline_config(&run, &instance)?;
            let r = run_pipeline(&instance, &config);
            check_result(&instance, &r)?;
            let text = match output {
                OutputFormat::Json => {
                    let o = SolveOutput {
                        instance: instance.name(),
                        n: instance.n(),
                        variant: config.variant.to_string(),
                        schedule: config.schedule_label(),
                        result: &r,
                    };
                    serde_json::to_string_pretty(&o).expect("serializable") + "\n"
                }
                OutputFormat::Text => {
                    let labels: Vec<String> = r.tour.iter().map(|v| v.to_string()).collect();
                    format!(
                        "instance {} (n = {})\nschedule {}\ninitial cost {}\nafter cycap  {}\nfinal cost   {}\ntour {}\ntimings pre {:.6}s cycap {:.6}s post {:.6}s total {:.6}s\n",
                        instance.name(),
                        instance.n(),
                        config.schedule_label(),
                        r.initial_cost,
                        r.after_cycap_cost,
                        r.final_cost,
                        labels.join(" "),
                        r.timings.pre,
                        r.timings.cycap,
                        r.timings.post,
                        r.timings.total
                    )
                }
            };
            write_out(None, &text, out)
        }
        Command::Bench {
            run,
            trials,
            opt,
            report,
            format,
            jobs,
            cap_policy,
        } => {
            if trials == 0 {
                return Err(CliError::usage("--trials must be at least 1"));
            }
            if jobs == Some(0) {
                return Err(CliError::usage("--jobs must be at least 1"));
            }
            let instance = load_instance(&run.instance)?;
            let config = pipeline_config(&run, &instance)?;
            let mut time_cap = config.time_cap;
            if cap_policy {
                let median = calibrate_median(&instance, &config, 5, run.seed);
                time_cap = apply_time_cap_policy(median, true);
            }
            let options = ExperimentOptions {
                known_opt: opt,
                jobs,
                time_cap,
            };
            let rep = experiment(&instance, &config, trials, run.seed, &options)?;
            for t in &rep.per_trial {
                check_result(&instance, &t.run)?;
            }
            let text = match format {
                ReportFormat::Json => rep.to_json() + "\n",
                ReportFormat::Csv => rep.to_csv(),
            };
            write_out(report.as_deref(), &text, out)
        }
        Command::Oracle { run, seeds } => {
            let instance = load_instance(&run.instance)?;
            if instance.n() > HELD_KARP_MAX_N {
                return Err(CliError::usage(format!(
                    "oracle needs n ≤ {HELD_KARP_MAX_N}, instance has n = {}",
                    instance.n()
                )));
            }
            let (opt, tour) = held_karp(&instance)?;
            let mut text = format!("optimal {opt}\ntour {tour}\n");
            let base = pipeline_config(&run, &instance)?;
            for variant in [Variant::F, Variant::M, Variant::C] {
                let mut costs = Vec::new();
                for s in 0..seeds.max(1) {
                    let config = PipelineConfig {
                        variant,
                        seed: run.seed.wrapping_add(s),
                        ..base.clone()
                    };
                    let r = run_pipeline(&instance, &config);
                    check_result(&instance, &r)?;
                    if r.final_cost < opt {
                        return Err(CliError::internal("pipeline beat the exact optimum"));
                    }
                    costs.push(r.final_cost.to_string());
                }
                text.push_str(&format!("{variant} {}\n", costs.join(" ")));
            }
            write_out(None, &text, out)
        }
        Command::Convert {
            instance,
            to,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let text = match to {
                ConvertFormat::Csv => inst.to_matrix_csv(),
                ConvertFormat::Tsplib => inst.to_tsplib(),
            };
            write_out(output.as_deref(), &text, out)
        }
        Command::Separated {
            instance,
            tour,
            pred,
        } => {
            let inst = load_instance(&instance)?;
            let tour = match tour {
                Some(t) => Tour::parse_labels(&t)?,
                None => Tour::from_sequence(&(0..inst.n()).collect::<Vec<_>>())?,
            };
            if tour.n() != inst.n() {
                return Err(CliError::usage("tour size does not match the instance"));
            }
            let sep = build_separated(&inst, &tour);
            let text = if pred { sep.pred_csv() } else { sep.dist_csv() };
            write_out(None, &text, out)
        }
    }
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to standard error. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            let mut cmd = Cli::command();
            cmd.build();
            let sub = args.get(1).and_then(|a| a.to_str()).unwrap_or_default();
            let usage = match cmd.find_subcommand_mut(sub) {
                Some(sc) => sc.render_usage(),
                None => cmd.render_usage(),
            };
            eprintln!("\n{usage}");
            return 2;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
