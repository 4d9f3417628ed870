use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use latcomp_core::lattice::random_fill;
use latcomp_core::planner::plan;
use latcomp_core::simulator::execute;
use serde::Serialize;
use serde_json::json;

use crate::config::{self, EigenConfig, FlipConfig, MonteCarloConfig, PlanInput, SweepConfig};
use crate::error::{CliError, Result};
use crate::formats::{write_snapshot, write_trace_csv, write_trajectory_csv, ReportDoc, ScheduleDoc, Table};
use crate::header::Header;
use crate::montecarlo::{run_trials, summarize, trials_table};
use crate::physics::{run_eigen, run_sweep};
use crate::{flipjob, DEFAULT_STEP_SECONDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "latcomp", version, about = "Optical-lattice compaction planner and shift/flip physics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration for the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Plan and execute a compaction schedule for one grid.
    Plan,
    /// Planner cost statistics over random grids.
    Montecarlo,
    /// Shift heating/fidelity or vibrational-frequency sweeps.
    Sweep,
    /// Pulse, chirp, Λ-system and addressing estimates.
    Flip,
    /// Bound-state ladder of one lattice well.
    Eigen,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Plan => "plan",
            Command::Montecarlo => "montecarlo",
            Command::Sweep => "sweep",
            Command::Flip => "flip",
            Command::Eigen => "eigen",
        }
    }
}

/// Files written by a command, relative to `--out`.
pub type Written = Vec<PathBuf>;

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_table(out: &Path, stem: &str, format: Format, table: &Table, header: &Header) -> Result<PathBuf> {
    match format {
        Format::Csv => {
            let path = out.join(format!("{stem}.csv"));
            table.write_csv(BufWriter::new(fs::File::create(&path)?), header)?;
            Ok(path)
        }
        Format::Json => {
            let path = out.join(format!("{stem}.json"));
            write_json(&path, &table.to_json(header))?;
            Ok(path)
        }
    }
}

fn valid_stem(stem: &str) -> Result<()> {
    if stem.is_empty() || !stem.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(CliError::parse("figure name must be non-empty and use only letters, digits, '_' and '-'"));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Written> {
    let bytes = match &cli.config {
        Some(p) => fs::read(p).map_err(|e| CliError::parse(format!("cannot read {}: {e}", p.display())))?,
        None => return Err(CliError::parse("--config is required")),
    };
    fs::create_dir_all(&cli.out)?;
    let header = Header::new(cli.command.name(), &bytes, Some(cli.seed));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::parse(format!("worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Plan => cmd_plan(cli, &bytes, &header),
        Command::Montecarlo => cmd_montecarlo(cli, &bytes, &header),
        Command::Sweep => cmd_sweep(cli, &bytes, &header),
        Command::Flip => cmd_flip(cli, &bytes, &header),
        Command::Eigen => cmd_eigen(cli, &bytes, &header),
    })
}

fn cmd_plan(cli: &Cli, bytes: &[u8], header: &Header) -> Result<Written> {
    let grid = match PlanInput::parse(bytes)? {
        PlanInput::Grid(doc) => doc.to_grid()?,
        PlanInput::Random(random) => random_fill(&random.extents, random.p_occ, cli.seed).map_err(CliError::parse)?,
    };
    let schedule = plan(&grid);
    let schedule_path = cli.out.join("schedule.json");
    write_json(&schedule_path, &ScheduleDoc::new(header, &grid, &schedule))?;
    // A step the executor rejects stops the run after the schedule is saved.
    let report = execute(&grid, &schedule)?;
    let report_path = cli.out.join("report.json");
    write_json(&report_path, &ReportDoc::new(header, &report, DEFAULT_STEP_SECONDS))?;
    let trace_path = cli.out.join("trace.csv");
    write_trace_csv(BufWriter::new(fs::File::create(&trace_path)?), header, &report.trace)?;
    Ok(vec![schedule_path, report_path, trace_path])
}

fn cmd_montecarlo(cli: &Cli, bytes: &[u8], header: &Header) -> Result<Written> {
    let cfg: MonteCarloConfig = config::parse(bytes)?;
    if !(0.0..=1.0).contains(&cfg.p_occ) {
        return Err(CliError::parse("p_occ must lie in [0, 1]"));
    }
    let mut all = Vec::new();
    let mut summaries = Vec::new();
    for n in cfg.n.to_vec() {
        let results = run_trials(cfg.dims, n, cfg.p_occ, cfg.trials, cli.seed)?;
        summaries.push(summarize(cfg.dims, cfg.p_occ, &results));
        all.extend(results);
    }
    let trials = write_table(&cli.out, "montecarlo_trials", cli.format, &trials_table(&all), header)?;
    let summary_path = cli.out.join("montecarlo_summary.json");
    write_json(&summary_path, &json!({ "header": header, "summaries": summaries }))?;
    Ok(vec![trials, summary_path])
}

fn cmd_sweep(cli: &Cli, bytes: &[u8], header: &Header) -> Result<Written> {
    let cfg: SweepConfig = config::parse(bytes)?;
    valid_stem(&cfg.figure)?;
    let output = run_sweep(&cfg)?;
    let mut written = vec![write_table(&cli.out, &cfg.figure, cli.format, &output.table, header)?];
    for (i, traj) in output.trajectories.iter().enumerate() {
        let path = cli.out.join(format!("{}_trajectory_{i}.csv", cfg.figure));
        write_trajectory_csv(BufWriter::new(fs::File::create(&path)?), header, traj)?;
        written.push(path);
    }
    Ok(written)
}

fn cmd_flip(cli: &Cli, bytes: &[u8], header: &Header) -> Result<Written> {
    let cfg: FlipConfig = config::parse(bytes)?;
    let mut results = flipjob::run_flip(&cfg)?;
    results["header"] = serde_json::to_value(header)?;
    let path = cli.out.join("flip.json");
    write_json(&path, &results)?;
    Ok(vec![path])
}

fn cmd_eigen(cli: &Cli, bytes: &[u8], header: &Header) -> Result<Written> {
    let cfg: EigenConfig = config::parse(bytes)?;
    let (table, ground) = run_eigen(&cfg)?;
    let mut written = vec![write_table(&cli.out, "eigen", cli.format, &table, header)?];
    if cfg.snapshot {
        let path = cli.out.join("ground_state.bin");
        write_snapshot(BufWriter::new(fs::File::create(&path)?), header, &ground)?;
        written.push(path);
    }
    Ok(written)
}
