use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use passfca::exec::Execution;
use passfca::ingest::{HalfKey, ParseMode};
use passfca::pipeline::{
    basis_from_cxt, cmd_basis, cmd_ingest, cmd_pipeline, cmd_scale, cmd_search, exit_code,
    ingested_halves, DatasetFiles, PipelineConfig, DATA_DIR_ENV,
};
use passfca::scaling::OverflowPolicy;
use passfca::Result;

#[derive(Parser, Debug)]
#[command(name = "passfca", version, about = "Mine recurring passing patterns with formal concept analysis")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Options {
    /// JSON configuration file; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset root directory, searched for the events, matches and players files.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    events: Option<PathBuf>,
    #[arg(long, global = true)]
    matches: Option<PathBuf>,
    #[arg(long, global = true)]
    players: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Team whose passes are analyzed [default: 676].
    #[arg(long, global = true)]
    team_id: Option<u64>,
    /// Pass tags to keep, comma-separated [default: 1801,1802,301,302].
    #[arg(long, global = true, value_delimiter = ',')]
    tags: Option<Vec<u32>>,
    /// Matches to ingest, comma-separated [default: every match of the team].
    #[arg(long = "match", global = true, value_delimiter = ',')]
    match_ids: Option<Vec<u64>>,
    /// Time bins per half [default: 10].
    #[arg(long, global = true)]
    bins: Option<u32>,
    /// Half length covered by the bins, in minutes [default: 50].
    #[arg(long, global = true)]
    max_minutes: Option<f64>,
    /// What to do with events past the last bin [default: clamp].
    #[arg(long, global = true, value_parser = ["clamp", "reject"])]
    overflow: Option<String>,
    /// Smallest premise support kept in a basis [default: 1].
    #[arg(long, global = true)]
    min_support: Option<usize>,
    /// Smallest similarity ratio reported [default: 75].
    #[arg(long, global = true)]
    cutoff: Option<u8>,
    /// Hits kept per query and target [default: 10].
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Fail on the first malformed event record instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,
    /// Report each (query, target, conclusion) text only once.
    #[arg(long, global = true)]
    dedup_hits: bool,
    /// Also write each scaled context as a 0/1 CSV matrix.
    #[arg(long, global = true)]
    csv_matrix: bool,
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the team's passes and write one pass list per match half.
    Ingest,
    /// Scale the pass list of each given half into a formal context.
    Scale {
        /// Halves as MATCH:PERIOD; all ingested halves when omitted.
        halves: Vec<HalfKey>,
    },
    /// Compute the canonical basis of each given half.
    Basis {
        /// Halves as MATCH:PERIOD; all ingested halves when omitted.
        halves: Vec<HalfKey>,
        /// Compute the basis of this CXT file instead, written next to it.
        #[arg(long, conflicts_with = "halves")]
        cxt: Option<PathBuf>,
    },
    /// Search the conclusions of an index half in target halves.
    Search {
        #[arg(long)]
        index: HalfKey,
        #[arg(long = "target", required = true, num_args = 1..)]
        targets: Vec<HalfKey>,
    },
    /// Run every stage, then the search.
    Pipeline {
        #[arg(long)]
        index: HalfKey,
        /// Target halves; every other ingested half when omitted.
        #[arg(long = "target", num_args = 1..)]
        targets: Vec<HalfKey>,
    },
    /// Print the effective configuration as JSON.
    Config,
}

impl Options {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.team_id {
            cfg.team_id = v;
        }
        if let Some(v) = &self.tags {
            cfg.tags = v.iter().copied().collect();
        }
        if let Some(v) = &self.match_ids {
            cfg.matches = v.clone();
        }
        if let Some(v) = self.bins {
            cfg.scaling.bins_per_half = v;
        }
        if let Some(v) = self.max_minutes {
            cfg.scaling.max_minutes = v;
        }
        if let Some(v) = &self.overflow {
            cfg.scaling.overflow = v.parse::<OverflowPolicy>()?;
        }
        if let Some(v) = self.min_support {
            cfg.min_support = v;
        }
        if let Some(v) = self.cutoff {
            cfg.search.score_cutoff = v;
        }
        if let Some(v) = self.limit {
            cfg.search.limit = v;
        }
        if self.strict {
            cfg.parse_mode = ParseMode::Strict;
        }
        cfg.dedup_hits |= self.dedup_hits;
        cfg.csv_matrix |= self.csv_matrix;
        if self.sequential {
            cfg.execution = Execution::Sequential;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = &self.events {
            cfg.events_path = Some(v.clone());
        }
        if let Some(v) = &self.matches {
            cfg.matches_path = Some(v.clone());
        }
        if let Some(v) = &self.players {
            cfg.players_path = Some(v.clone());
        }
        if let Some(root) = &self.data_dir {
            cfg = cfg.with_dataset(DatasetFiles::discover(root));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn halves_or_all(cfg: &PipelineConfig, halves: Vec<HalfKey>) -> Result<Vec<HalfKey>> {
    if halves.is_empty() {
        ingested_halves(cfg)
    } else {
        Ok(halves)
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.opts.resolve()?;
    match cli.command {
        Command::Ingest => {
            let s = cmd_ingest(&cfg)?;
            println!(
                "{} team passes, {} resolved, {} dropped, {} halves",
                s.team_passes,
                s.resolved,
                s.dropped,
                s.halves.len()
            );
        }
        Command::Scale { halves } => {
            for half in halves_or_all(&cfg, halves)? {
                let s = cmd_scale(&cfg, &half)?;
                println!("{half}: {}x{} ({} clamped)", s.objects, s.attributes, s.clamped);
            }
        }
        Command::Basis { halves, cxt: Some(cxt) } => {
            debug_assert!(halves.is_empty());
            let s = basis_from_cxt(&cxt, &cxt.with_extension(""), cfg.min_support)?;
            println!("{}: {} implications, {} retained", s.context, s.implications, s.retained);
        }
        Command::Basis { halves, cxt: None } => {
            for half in halves_or_all(&cfg, halves)? {
                let s = cmd_basis(&cfg, &half)?;
                println!("{half}: {} implications, {} retained", s.implications, s.retained);
            }
        }
        Command::Search { index, targets } => print_report(&cmd_search(&cfg, &index, &targets)?),
        Command::Pipeline { index, targets } => print_report(&cmd_pipeline(&cfg, &index, &targets)?),
        Command::Config => print!("{}", cfg.to_json()),
    }
    Ok(())
}

fn print_report(report: &passfca::patterns::SearchReport) {
    println!("index {}: {} queries", report.index, report.queries);
    for t in &report.targets {
        let note = if t.missing { " (missing)" } else { "" };
        println!("  {}: {} conclusions, {} hits{note}", t.half, t.conclusions, t.hits);
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
