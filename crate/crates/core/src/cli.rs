//! Batch command-line front door.
//!
//! Subcommands: `coeff`, `bound`, `percolate`, `growth`, `explore`,
//! `degree`. Every output record embeds the resolved [`RunConfig`] and the
//! seed, outputs are byte-identical for identical configs regardless of
//! `--workers`, and a flat key-value `--config` file can stand in for any
//! flag (flags win).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, BoundResult};
use crate::cluster::{coefficient, CoefficientEstimate, Method};
use crate::error::{Error, Result};
use crate::exploration::{active_saturated_run, ExplorationTrace, SelectionPolicy};
use crate::geometry::TorusBox;
use crate::percolation::{percolation_sweep, subcritical_growth, GrowthReport, PercolationCurve};
use crate::rgg::{
    build_graph, degree_summary, sample_poisson_points, write_edge_list, DegreeSummary,
};
use crate::rng::stream_rng;

/// Machine-readable output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// The resolved configuration embedded in every output record.
///
/// Worker count is deliberately not part of the config: it must not be
/// able to change output bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub d: usize,
    pub t: Option<usize>,
    pub method: Option<String>,
    pub radius: f64,
    pub side: Option<f64>,
    pub grid: Option<String>,
    pub density: Option<f64>,
    pub mu: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub trials: u64,
    pub seed: u64,
    pub policy: Option<String>,
    pub start: Option<usize>,
    pub format: OutputFormat,
    pub output: Option<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "contperc",
    version,
    about = "Continuum-percolation toolkit for Poisson random geometric graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a cluster coefficient C_t^(d)
    Coeff(OpArgs),
    /// Lower bounds on critical mean degree and density from C_t^(d)
    Bound(OpArgs),
    /// Sweep a density grid and record largest-component statistics
    Percolate(OpArgs),
    /// Subcritical largest-component growth check across system sizes
    Growth(OpArgs),
    /// Dump one active-saturated exploration trace as JSON lines
    Explore(OpArgs),
    /// Degree summary of one sampled graph
    Degree(OpArgs),
}

#[derive(Debug, Args, Default, Clone)]
struct OpArgs {
    /// Space dimension d
    #[arg(long)]
    d: Option<usize>,
    /// Chain order t (coeff, bound)
    #[arg(long)]
    t: Option<usize>,
    /// Coefficient method: closed-form | quadrature | series | monte-carlo
    #[arg(long)]
    method: Option<String>,
    /// Connection radius r
    #[arg(long)]
    radius: Option<f64>,
    /// Torus side L
    #[arg(long = "L", alias = "side")]
    side: Option<f64>,
    /// Density grid start:step:stop (percolate)
    #[arg(long)]
    grid: Option<String>,
    /// Single density λ (degree, explore)
    #[arg(long)]
    density: Option<f64>,
    /// Mean degree μ (growth)
    #[arg(long)]
    mu: Option<f64>,
    /// Comma-separated system sizes (growth)
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Trials (per grid point for percolate, per size for growth)
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed (fallback: config file, then CONTPERC_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Active-node selection: fifo | random (explore)
    #[arg(long)]
    policy: Option<String>,
    /// Start node index (explore; defaults to the center node)
    #[arg(long)]
    start: Option<usize>,
    /// Output encoding
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output path (stdout when absent)
    #[arg(long)]
    output: Option<String>,
    /// Worker threads for trial-parallel operations (never affects results)
    #[arg(long)]
    workers: Option<usize>,
    /// Flat key-value file mirroring the flags; flags override it
    #[arg(long)]
    config: Option<String>,
    /// Write the sampled graph as an edge list (degree, explore)
    #[arg(long = "dump-graph")]
    dump_graph: Option<String>,
}

/// Parse argv, run the requested operation, and return the exit code:
/// 0 on success, 1 on a validation or operation failure, 2 on a usage
/// error.
pub fn parse_and_dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own usage text; --help/--version are not errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (name, mut args) = match cli.command {
        Command::Coeff(a) => ("coeff", a),
        Command::Bound(a) => ("bound", a),
        Command::Percolate(a) => ("percolate", a),
        Command::Growth(a) => ("growth", a),
        Command::Explore(a) => ("explore", a),
        Command::Degree(a) => ("degree", a),
    };
    if let Some(path) = args.config.take() {
        merge_config_file(&mut args, Path::new(&path))?;
    }
    let workers = args.workers.unwrap_or(0);
    let config = resolve(name, args.clone())?;
    let dump_graph = args.dump_graph.clone();

    let body = if workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
        pool.install(|| render(&config, dump_graph.as_deref()))?
    } else {
        render(&config, dump_graph.as_deref())?
    };

    match &config.output {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

/// Merge values from a flat `key = value` file into unset flags.
fn merge_config_file(args: &mut OpArgs, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| {
                Error::Parse(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
        let bad = |what: &str| {
            Error::Parse(format!(
                "{}:{}: bad {what}: '{value}'",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "d" => fill(&mut args.d, value.parse().map_err(|_| bad("d"))?),
            "t" => fill(&mut args.t, value.parse().map_err(|_| bad("t"))?),
            "method" => fill(&mut args.method, value.to_string()),
            "radius" => fill(&mut args.radius, value.parse().map_err(|_| bad("radius"))?),
            "L" | "side" => fill(&mut args.side, value.parse().map_err(|_| bad("L"))?),
            "grid" => fill(&mut args.grid, value.to_string()),
            "density" => fill(
                &mut args.density,
                value.parse().map_err(|_| bad("density"))?,
            ),
            "mu" => fill(&mut args.mu, value.parse().map_err(|_| bad("mu"))?),
            "n-list" | "n_list" => {
                let list: std::result::Result<Vec<usize>, _> =
                    value.split(',').map(|v| v.trim().parse()).collect();
                fill(&mut args.n_list, list.map_err(|_| bad("n-list"))?)
            }
            "trials" => fill(&mut args.trials, value.parse().map_err(|_| bad("trials"))?),
            "seed" => fill(&mut args.seed, value.parse().map_err(|_| bad("seed"))?),
            "policy" => fill(&mut args.policy, value.to_string()),
            "start" => fill(&mut args.start, value.parse().map_err(|_| bad("start"))?),
            "format" => {
                let fmt = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    _ => return Err(bad("format")),
                };
                fill(&mut args.format, fmt)
            }
            "output" => fill(&mut args.output, value.to_string()),
            "workers" => fill(
                &mut args.workers,
                value.parse().map_err(|_| bad("workers"))?,
            ),
            other => {
                return Err(Error::Parse(format!(
                    "{}:{}: unknown config key '{other}'",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(())
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

fn resolve(name: &str, args: OpArgs) -> Result<RunConfig> {
    let seed = match args.seed {
        Some(s) => s,
        None => match std::env::var("CONTPERC_SEED") {
            Ok(raw) => raw.parse().map_err(|_| {
                Error::InvalidParameter(format!("CONTPERC_SEED is not a valid u64: '{raw}'"))
            })?,
            Err(_) => 0,
        },
    };
    let d = args
        .d
        .ok_or_else(|| Error::InvalidParameter("--d is required".into()))?;
    let default_trials: u64 = match name {
        "coeff" | "bound" => 1_000_000,
        "percolate" => 50,
        "growth" => 20,
        _ => 1,
    };
    let format = args.format.unwrap_or(OutputFormat::Json);
    let config = RunConfig {
        subcommand: name.to_string(),
        d,
        t: args.t,
        method: args.method,
        radius: args.radius.unwrap_or(1.0),
        side: args.side,
        grid: args.grid,
        density: args.density,
        mu: args.mu,
        n_list: args.n_list,
        trials: args.trials.unwrap_or(default_trials),
        seed,
        policy: args.policy,
        start: args.start,
        format,
        output: args.output,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    let need = |cond: bool, msg: &str| -> Result<()> {
        if cond {
            Ok(())
        } else {
            Err(Error::InvalidParameter(msg.into()))
        }
    };
    match config.subcommand.as_str() {
        "coeff" | "bound" => {
            need(config.method.is_some(), "--method is required")?;
            Method::from_str(config.method.as_deref().unwrap_or(""))?;
            need(config.t.unwrap_or(3) >= 3, "--t must be at least 3")?;
            need(config.d >= 2, "--d must be at least 2")?;
            need(config.trials >= 1, "--trials must be positive")?;
        }
        "percolate" => {
            need(config.side.is_some(), "--L is required")?;
            need(
                config.grid.is_some(),
                "--grid is required (start:step:stop)",
            )?;
            parse_grid(config.grid.as_deref().unwrap_or(""))?;
            need(config.trials >= 1, "--trials must be positive")?;
            need(config.radius > 0.0, "--radius must be positive")?;
        }
        "growth" => {
            need(config.mu.is_some(), "--mu is required")?;
            need(config.n_list.is_some(), "--n-list is required")?;
            need(config.trials >= 1, "--trials must be positive")?;
        }
        "explore" => {
            need(config.density.is_some(), "--density is required")?;
            need(config.side.is_some(), "--L is required")?;
            need(
                config.format == OutputFormat::Json,
                "explore emits JSON lines; use --format json",
            )?;
            if let Some(policy) = &config.policy {
                need(
                    policy == "fifo" || policy == "random",
                    "--policy must be fifo or random",
                )?;
            }
        }
        "degree" => {
            need(config.density.is_some(), "--density is required")?;
            need(config.side.is_some(), "--L is required")?;
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown subcommand '{other}'"
            )))
        }
    }
    Ok(())
}

/// Expand `start:step:stop` (inclusive) into an explicit grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "grid must be start:step:stop, got '{spec}'"
        )));
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid number '{s}'")))
    };
    let (start, step, stop) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0) || stop < start {
        return Err(Error::Parse(format!(
            "grid needs step > 0 and stop ≥ start, got '{spec}'"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let value = start + f64::from(k) * step;
        if value > stop + step * 1e-9 {
            break;
        }
        grid.push(value);
        k += 1;
    }
    Ok(grid)
}

/// Format a float with 17 significant digits (exact round-trip).
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

const CONFIG_CSV_HEADER: &str =
    "subcommand,d,t,method,radius,L,grid,density,mu,n_list,trials,seed,policy,start,format,output";

fn config_csv_cells(config: &RunConfig) -> String {
    let opt_num = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let opt_str = |v: &Option<String>| v.clone().unwrap_or_default();
    let n_list = config
        .n_list
        .as_ref()
        .map(|l| {
            l.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        config.subcommand,
        config.d,
        opt_usize(config.t),
        opt_str(&config.method),
        fmt_float(config.radius),
        opt_num(config.side),
        opt_str(&config.grid),
        opt_num(config.density),
        opt_num(config.mu),
        n_list,
        config.trials,
        config.seed,
        opt_str(&config.policy),
        opt_usize(config.start),
        match config.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        },
        opt_str(&config.output),
    )
}

fn json_record<T: Serialize>(config: &RunConfig, key: &str, value: &T) -> Result<String> {
    let record = serde_json::json!({ "config": config, key: value });
    serde_json::to_string_pretty(&record)
        .map(|s| s + "\n")
        .map_err(|e| Error::Parse(format!("serialization: {e}")))
}

fn render(config: &RunConfig, dump_graph: Option<&str>) -> Result<String> {
    match config.subcommand.as_str() {
        "coeff" => render_coeff(config),
        "bound" => render_bound(config),
        "percolate" => render_percolate(config),
        "growth" => render_growth(config),
        "explore" => render_explore(config, dump_graph),
        "degree" => render_degree(config, dump_graph),
        other => Err(Error::InvalidParameter(format!(
            "unknown subcommand '{other}'"
        ))),
    }
}

fn render_coeff(config: &RunConfig) -> Result<String> {
    let method = Method::from_str(config.method.as_deref().unwrap_or(""))?;
    let t = config.t.unwrap_or(3);
    let est: CoefficientEstimate<f64> =
        coefficient(config.d, t, method, config.trials, config.seed)?;
    match config.format {
        OutputFormat::Json => json_record(config, "estimate", &est),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "{CONFIG_CSV_HEADER},value,half_width_95");
            let _ = writeln!(
                out,
                "{},{},{}",
                config_csv_cells(config),
                fmt_float(est.value),
                fmt_float(est.half_width_95)
            );
            Ok(out)
        }
    }
}

fn render_bound(config: &RunConfig) -> Result<String> {
    let method = Method::from_str(config.method.as_deref().unwrap_or(""))?;
    let t = config.t.unwrap_or(3);
    let report: BoundResult<f64> = bound_report(config.d, t, method, config.trials, config.seed)?;
    match config.format {
        OutputFormat::Json => json_record(config, "bound", &report),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{CONFIG_CSV_HEADER},coefficient,coefficient_half_width_95,mu_lower,lambda_lower,mu_lower_lo,mu_lower_hi,lambda_lower_lo,lambda_lower_hi"
            );
            let iv = |iv: Option<(f64, f64)>| match iv {
                Some((lo, hi)) => (fmt_float(lo), fmt_float(hi)),
                None => (String::new(), String::new()),
            };
            let (mu_lo, mu_hi) = iv(report.mu_lower_interval);
            let (la_lo, la_hi) = iv(report.lambda_lower_interval);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                config_csv_cells(config),
                fmt_float(report.coefficient),
                fmt_float(report.coefficient_half_width_95),
                fmt_float(report.mu_lower),
                fmt_float(report.lambda_lower),
                mu_lo,
                mu_hi,
                la_lo,
                la_hi
            );
            Ok(out)
        }
    }
}

fn render_percolate(config: &RunConfig) -> Result<String> {
    let grid = parse_grid(config.grid.as_deref().unwrap_or(""))?;
    let side = config.side.unwrap_or(0.0);
    let curve: PercolationCurve<f64> = percolation_sweep(
        config.d,
        &grid,
        side,
        config.radius,
        config.trials as usize,
        config.seed,
    )?;
    match config.format {
        OutputFormat::Json => json_record(config, "curve", &curve),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{CONFIG_CSV_HEADER},lambda,trials,mean_fraction,stderr,mean_origin_size"
            );
            let prefix = config_csv_cells(config);
            for row in &curve.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    prefix,
                    fmt_float(row.density),
                    row.trials,
                    fmt_float(row.mean_fraction),
                    fmt_float(row.std_error),
                    fmt_float(row.mean_origin_size)
                );
            }
            Ok(out)
        }
    }
}

fn render_growth(config: &RunConfig) -> Result<String> {
    let n_list = config.n_list.clone().unwrap_or_default();
    let report: GrowthReport<f64> = subcritical_growth(
        config.d,
        config.mu.unwrap_or(0.0),
        &n_list,
        config.trials as usize,
        config.seed,
    )?;
    match config.format {
        OutputFormat::Json => json_record(config, "report", &report),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{CONFIG_CSV_HEADER},n,mean_largest,max_largest,max_over_log_n"
            );
            let prefix = config_csv_cells(config);
            for row in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    prefix,
                    row.n,
                    fmt_float(row.mean_largest),
                    row.max_largest,
                    fmt_float(row.max_over_log_n)
                );
            }
            Ok(out)
        }
    }
}

fn sample_graph_with_center(config: &RunConfig) -> Result<(crate::rgg::Graph<f64>, usize)> {
    let side = config.side.unwrap_or(0.0);
    let bbox = TorusBox::new(config.d, side)?;
    let mut rng = stream_rng(config.seed, 0);
    let mut points = sample_poisson_points(config.density.unwrap_or(0.0), &bbox, &mut rng)?;
    points.points.push(bbox.center());
    let center = points.len() - 1;
    let graph = build_graph(&points, config.radius)?;
    Ok((graph, center))
}

fn render_explore(config: &RunConfig, dump_graph: Option<&str>) -> Result<String> {
    let (graph, center) = sample_graph_with_center(config)?;
    if let Some(path) = dump_graph {
        let mut buf = Vec::new();
        write_edge_list(&graph, &mut buf)?;
        fs::write(path, buf)?;
    }
    let start = config.start.unwrap_or(center);
    let policy = match config.policy.as_deref() {
        None | Some("fifo") => SelectionPolicy::Fifo,
        Some("random") => SelectionPolicy::Random { seed: config.seed },
        Some(other) => return Err(Error::InvalidParameter(format!("unknown policy '{other}'"))),
    };
    let trace: ExplorationTrace = active_saturated_run(&graph, start, policy)?;
    let mut out = String::new();
    let header =
        serde_json::json!({ "config": config, "start": trace.start, "explored": trace.explored() });
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string(&header).map_err(|e| Error::Parse(e.to_string()))?
    );
    for step in &trace.steps {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(step).map_err(|e| Error::Parse(e.to_string()))?
        );
    }
    Ok(out)
}

fn render_degree(config: &RunConfig, dump_graph: Option<&str>) -> Result<String> {
    let side = config.side.unwrap_or(0.0);
    let bbox = TorusBox::new(config.d, side)?;
    let mut rng = stream_rng(config.seed, 0);
    let points = sample_poisson_points(config.density.unwrap_or(0.0), &bbox, &mut rng)?;
    let graph = build_graph(&points, config.radius)?;
    if let Some(path) = dump_graph {
        let mut buf = Vec::new();
        write_edge_list(&graph, &mut buf)?;
        fs::write(path, buf)?;
    }
    let summary: DegreeSummary<f64> = degree_summary(&graph, config.density.unwrap_or(0.0))?;
    match config.format {
        OutputFormat::Json => json_record(config, "summary", &summary),
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{CONFIG_CSV_HEADER},mean_degree,tv_distance_to_poisson,pmf"
            );
            let pmf = summary
                .empirical_pmf
                .iter()
                .map(|&(k, f)| format!("{k}:{}", fmt_float(f)))
                .collect::<Vec<_>>()
                .join(";");
            let _ = writeln!(
                out,
                "{},{},{},{}",
                config_csv_cells(config),
                fmt_float(summary.mean_degree),
                fmt_float(summary.tv_distance_to_poisson),
                pmf
            );
            Ok(out)
        }
    }
}
