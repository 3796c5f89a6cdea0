use clap::{Parser, Subcommand};
use relbound_cli::{
    analyze_graph, compute_bounds, defect_study, load_defect_config, sample_labeler, verify_maxdeg,
    write_defect_artifacts, CliError,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "relbound",
    version,
    about = "Training-graph analysis and generalization bounds for pairwise relation learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze an edge-list file: degrees, effective training size, coloring.
    AnalyzeGraph {
        /// Edge-list text file ("i j" or "i j y" per line, '#' comments).
        input: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a subsampling pattern from a labeler spec.
    SampleLabeler {
        /// Labeler spec JSON ({"variant", "n", ...}).
        #[arg(long)]
        spec: PathBuf,
        /// Output edge-list file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate closed-form bounds from a JSON request file.
    ComputeBounds {
        /// Request object or array of objects.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train-and-bound study across labeler regimes; writes CSV + meta.
    DefectStudy {
        #[arg(long)]
        config: PathBuf,
        /// key=value config overrides (dots for nesting).
        #[arg(long = "set")]
        sets: Vec<String>,
        /// Output directory; overrides the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo check of the random-graph max-degree bound.
    VerifyMaxdeg {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(json: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::AnalyzeGraph { input, out } => {
            let analysis = analyze_graph(&input)?;
            let json = serde_json::to_string_pretty(&analysis)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            emit(&json, out.as_ref())
        }
        Command::SampleLabeler { spec, out } => {
            let summary = sample_labeler(&spec, &out)?;
            let json = serde_json::to_string_pretty(&summary)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            println!("{json}");
            Ok(())
        }
        Command::ComputeBounds { input, out } => {
            let reports = compute_bounds(&input)?;
            let json = serde_json::to_string_pretty(&reports)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            emit(&json, out.as_ref())
        }
        Command::DefectStudy { config, sets, out } => {
            let config = load_defect_config(&config, &sets)?;
            let out_dir = out.or_else(|| config.out_dir.clone()).ok_or_else(|| {
                CliError::Config("no output directory (set out_dir or --out)".into())
            })?;
            let rows = defect_study(&config)?;
            write_defect_artifacts(&config, &rows, &out_dir)?;
            println!(
                "wrote {} rows to {}",
                rows.len(),
                out_dir.join("results.csv").display()
            );
            Ok(())
        }
        Command::VerifyMaxdeg {
            n,
            m,
            delta,
            trials,
            seed,
            out,
        } => {
            let result = verify_maxdeg(n, m, delta, trials, seed)?;
            let json = serde_json::to_string_pretty(&result)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            emit(&json, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
