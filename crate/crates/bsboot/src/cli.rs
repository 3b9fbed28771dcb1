//! Command line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use bsboot_core::bootstrap::{lo_posterior, proper_posterior, FunctionalSample, DEFAULT_DRAWS, DEFAULT_M};
use bsboot_core::oracle::{PosteriorGrid, DEFAULT_MESH_POINTS};
use bsboot_core::{FunctionalSpec, HFunction, Posterior, PriorSpec, SurvivalDataset};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::io::{load_csv, parse_time_unit, CsvOptions};
use crate::runner;
use crate::specs::{parse_centering, parse_precision};
use crate::summary::Summary;

#[derive(Debug, Parser, Serialize)]
#[command(name = "bsboot", version, about = "Beta-Stacy posterior and bootstrap for right-censored survival data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Tabulate F*_d, F*_c, F*, c* and Kaplan-Meier on a grid
    Fit(FitArgs),
    /// Sample a one-sample functional
    Bootstrap(BootstrapArgs),
    /// Sample a two-sample functional
    Compare(CompareArgs),
    /// KS distance of bootstrap samples to the grid oracle for several m
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// CSV with columns time,status[,group]
    #[arg(long)]
    pub data: PathBuf,
    /// Multiplier for times, or `days` (to years) / `years`
    #[arg(long, default_value = "1", value_parser = parse_time_unit)]
    pub time_unit: f64,
    /// Name of the group column
    #[arg(long, default_value = "group")]
    pub group_col: String,
    /// Keep only this group
    #[arg(long)]
    pub group: Option<u32>,
    /// Status value of an uncensored event (default: 2 if present, else 1)
    #[arg(long)]
    pub event_code: Option<i64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PriorArgs {
    /// Centering distribution, e.g. exp:median=10
    #[arg(long, default_value = "exp:median=10")]
    pub prior: String,
    /// Precision function, e.g. const:1
    #[arg(long, default_value = "const:1")]
    pub c: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SamplingArgs {
    /// Draws from F* per bootstrap replicate
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: usize,
    /// Number of bootstrap replicates
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Evaluation grid min:max:points
    #[arg(long, default_value = "0:12:121")]
    pub grid: String,
    /// Upper end of the interval for sup |F* - KM|
    #[arg(long, default_value_t = 12.0)]
    pub horizon: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Beta-Stacy bootstrap
    Bsb,
    /// Rubin's Bayesian bootstrap (uncensored data)
    Rubin,
    /// Lo's censored-data Bayesian bootstrap (c -> 0 limit)
    Lo,
    /// Proper Bayesian bootstrap with DP(k, F) prior (uncensored data)
    Proper,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// mean, variance, rmst:tau=10, surv:t=10, or custom:h=...;f=...
    #[arg(long)]
    pub functional: String,
    #[arg(long, value_enum, default_value_t = Mode::Bsb)]
    pub mode: Mode,
    /// Dirichlet precision for --mode proper
    #[arg(long)]
    pub k: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Write a kernel density plot of the samples (SVG)
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Second sample in its own file; otherwise groups of --data are used
    #[arg(long)]
    pub data2: Option<PathBuf>,
    /// The two group labels `first,second` (default: the two labels in
    /// ascending order)
    #[arg(long)]
    pub groups: Option<String>,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// diff_mean, ratio_surv:t=10, diff_rmst:tau=10, or custom2:h=...;f=...
    #[arg(long)]
    pub functional: String,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    /// One-sample functional(s); repeat the flag for several
    #[arg(long, required = true)]
    pub functional: Vec<String>,
    /// Values of m, comma separated
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle grid horizon T
    #[arg(long, default_value_t = 12.0)]
    pub horizon: f64,
    /// Uniform mesh points of the oracle grid on [0, T]
    #[arg(long, default_value_t = DEFAULT_MESH_POINTS)]
    pub mesh: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl Cli {
    /// Output path of the command, if any.
    pub fn out_path(&self) -> Option<&Path> {
        match &self.command {
            Command::Fit(a) => a.output.out.as_deref(),
            Command::Bootstrap(a) => a.output.out.as_deref(),
            Command::Compare(a) => a.output.out.as_deref(),
            Command::Validate(a) => a.output.out.as_deref(),
        }
    }
}

/// Path of the error artifact written next to `out`.
pub fn error_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".error.json");
    PathBuf::from(s)
}

fn csv_options(d: &DataArgs) -> CsvOptions {
    CsvOptions {
        time_unit: d.time_unit,
        group_column: d.group_col.clone(),
        event_code: d.event_code,
    }
}

fn load(d: &DataArgs) -> Result<SurvivalDataset> {
    let data = load_csv(&d.data, &csv_options(d)).with_context(|| format!("loading {}", d.data.display()))?;
    Ok(match d.group {
        Some(g) => {
            let sub = data.filter_group(g);
            if sub.is_empty() {
                bail!("group {g} has no observations in {}", d.data.display());
            }
            sub
        }
        None => data,
    })
}

fn prior(p: &PriorArgs) -> Result<PriorSpec> {
    let f = parse_centering(&p.prior).with_context(|| "invalid --prior".to_string())?;
    let c = parse_precision(&p.c).with_context(|| "invalid --c".to_string())?;
    Ok(PriorSpec::new(c, f))
}

fn functional(s: &str) -> Result<FunctionalSpec> {
    s.parse::<FunctionalSpec>()
        .map_err(|e| anyhow!(e))
        .with_context(|| format!("invalid --functional '{s}'"))
}

fn emit(out: &OutputArgs, body: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("invalid --grid '{s}': expected min:max:points");
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| anyhow!("invalid --grid min '{}'", parts[0]))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| anyhow!("invalid --grid max '{}'", parts[1]))?;
    let n: usize = parts[2].trim().parse().map_err(|_| anyhow!("invalid --grid points '{}'", parts[2]))?;
    if !(lo >= 0.0 && hi > lo && n >= 2) {
        bail!("invalid --grid '{s}': need 0 <= min < max and at least 2 points");
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => fit(cli, a),
        Command::Bootstrap(a) => bootstrap(cli, a),
        Command::Compare(a) => compare(cli, a),
        Command::Validate(a) => validate(cli, a),
    }
}

#[derive(Serialize)]
struct FitRow {
    x: f64,
    f_discrete: f64,
    f_continuous: f64,
    f_star: f64,
    c_star: Option<f64>,
    km: f64,
}

fn fit(cli: &Cli, a: &FitArgs) -> Result<()> {
    let data = load(&a.data)?;
    let post = Posterior::new(&prior(&a.prior)?, &data);
    let km = data.kaplan_meier();
    let rows: Vec<FitRow> = parse_grid(&a.grid)?
        .into_iter()
        .map(|x| {
            let (fd, fc, f, c) = post.summary_at(x);
            FitRow {
                x,
                f_discrete: fd,
                f_continuous: fc,
                f_star: f,
                c_star: c,
                km: km.cdf(x),
            }
        })
        .collect();
    let sup = post.sup_distance_to_km(&km, a.horizon);
    eprintln!("sup |F* - KM| on [0, {}]: {sup:.6}", a.horizon);
    let body = match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Json => serde_json::to_string_pretty(&json!({
            "config": cli,
            "table": rows,
            "sup_distance_km": sup,
            "horizon": a.horizon,
        }))? + "\n",
    };
    emit(&a.output, &body)
}

fn samples_body(cli: &Cli, out: &OutputArgs, sample: &FunctionalSample, started: Instant) -> Result<String> {
    Ok(match out.format {
        Format::Csv => {
            let mut s = String::with_capacity(sample.values.len() * 20 + 6);
            s.push_str("value\n");
            for v in &sample.values {
                s.push_str(&format!("{v}\n"));
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&json!({
            "config": cli,
            "samples": sample.values,
            "summary": Summary::of(&sample.values),
            "diagnostics": {
                "excluded_draws": sample.excluded.len(),
                "warnings": sample.warnings,
                "runtime_ms": started.elapsed().as_millis() as u64,
            },
        }))? + "\n",
    })
}

fn report(sample: &FunctionalSample, name: &str) {
    for w in &sample.warnings {
        eprintln!("warning: {w}");
    }
    if !sample.excluded.is_empty() {
        eprintln!("warning: {} draws excluded (functional not finite)", sample.excluded.len());
    }
    if let Some(s) = Summary::of(&sample.values) {
        eprintln!(
            "{name}: n={} mean={:.6} sd={:.6} 2.5%={:.6} 50%={:.6} 97.5%={:.6}",
            s.n, s.mean, s.sd, s.q025, s.q50, s.q975
        );
    }
}

fn finish(cli: &Cli, out: &OutputArgs, plot: Option<&Path>, sample: &FunctionalSample, name: &str, started: Instant) -> Result<()> {
    report(sample, name);
    if let Some(p) = plot {
        if sample.values.is_empty() {
            bail!("no samples to plot");
        }
        fs::write(p, crate::plot::density_svg(&sample.values, name)).with_context(|| format!("writing {}", p.display()))?;
    }
    emit(out, &samples_body(cli, out, sample, started)?)
}

fn bootstrap(cli: &Cli, a: &BootstrapArgs) -> Result<()> {
    let started = Instant::now();
    let data = load(&a.data)?;
    let p = prior(&a.prior)?;
    let phi = functional(&a.functional)?;
    let s = &a.sampling;
    if a.k.is_some() && a.mode != Mode::Proper {
        bail!("--k only applies to --mode proper");
    }
    let sample = match a.mode {
        Mode::Bsb => runner::bootstrap(&Posterior::new(&p, &data), &phi, s.m, s.draws, s.seed)?,
        Mode::Rubin => runner::rubin(&data, &phi, s.draws, s.seed)?,
        Mode::Lo => runner::bootstrap(&lo_posterior(&data, &p.centering)?, &phi, s.m, s.draws, s.seed)?,
        Mode::Proper => {
            let k = a.k.ok_or_else(|| anyhow!("--mode proper needs --k"))?;
            runner::bootstrap(&proper_posterior(k, &p.centering, &data)?, &phi, s.m, s.draws, s.seed)?
        }
    };
    finish(cli, &a.output, a.plot.as_deref(), &sample, &phi.name, started)
}

fn compare(cli: &Cli, a: &CompareArgs) -> Result<()> {
    let started = Instant::now();
    let p = prior(&a.prior)?;
    let phi = functional(&a.functional)?;
    let (d1, d2) = match &a.data2 {
        Some(path2) => {
            if a.groups.is_some() {
                bail!("--groups cannot be combined with --data2");
            }
            let second = DataArgs {
                data: path2.clone(),
                ..a.data.clone()
            };
            (load(&a.data)?, load(&second)?)
        }
        None => {
            let all = load(&DataArgs {
                group: None,
                ..a.data.clone()
            })?;
            let (g1, g2) = match &a.groups {
                Some(s) => {
                    let v: Vec<u32> = s
                        .split(',')
                        .map(|x| x.trim().parse::<u32>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| anyhow!("invalid --groups '{s}': expected two labels a,b"))?;
                    if v.len() != 2 || v[0] == v[1] {
                        bail!("invalid --groups '{s}': expected two distinct labels a,b");
                    }
                    (v[0], v[1])
                }
                None => {
                    let labels = all.groups();
                    if labels.len() != 2 {
                        bail!(
                            "compare needs exactly two groups in '{}' (found {}); use --groups or --data2",
                            a.data.group_col,
                            labels.len()
                        );
                    }
                    (labels[0], labels[1])
                }
            };
            let (x, y) = (all.filter_group(g1), all.filter_group(g2));
            if x.is_empty() || y.is_empty() {
                bail!("groups {g1},{g2}: one of them has no observations");
            }
            (x, y)
        }
    };
    let s = &a.sampling;
    let sample = runner::two_sample(&Posterior::new(&p, &d1), &Posterior::new(&p, &d2), &phi, s.m, s.draws, s.seed)?;
    finish(cli, &a.output, a.plot.as_deref(), &sample, &phi.name, started)
}

// Thresholds of a functional's h-functions, added to the oracle grid so
// indicators and truncations are evaluated at exact grid points.
fn thresholds(phi: &FunctionalSpec) -> Vec<f64> {
    fn walk(h: &HFunction, out: &mut Vec<f64>) {
        match h {
            HFunction::Truncation(t) | HFunction::SurvivalIndicator(t) | HFunction::CdfIndicator(t) => out.push(*t),
            HFunction::Linear(terms) => terms.iter().for_each(|(_, h)| walk(h, out)),
            HFunction::Identity | HFunction::Power(_) => {}
        }
    }
    let mut out = Vec::new();
    phi.h.iter().for_each(|h| walk(h, &mut out));
    out
}

fn validate(cli: &Cli, a: &ValidateArgs) -> Result<()> {
    let started = Instant::now();
    let data = load(&a.data)?;
    let post = Posterior::new(&prior(&a.prior)?, &data);
    let phis: Vec<FunctionalSpec> = a.functional.iter().map(|s| functional(s)).collect::<Result<_>>()?;
    if a.m.is_empty() {
        bail!("--m needs at least one value");
    }
    let extra: Vec<f64> = phis.iter().flat_map(thresholds).collect();
    let grid = PosteriorGrid::new(&post, a.horizon, a.mesh, &extra).context("building the oracle grid")?;
    let rows = runner::delta_table(&post, &grid, &phis, &a.m, a.draws, a.seed)?;
    for r in &rows {
        eprintln!("{} m={}: KS={:.4}", r.functional, r.m, r.ks);
    }
    let body = match a.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Json => serde_json::to_string_pretty(&json!({
            "config": cli,
            "table": rows,
            "diagnostics": { "runtime_ms": started.elapsed().as_millis() as u64 },
        }))? + "\n",
    };
    emit(&a.output, &body)
}
