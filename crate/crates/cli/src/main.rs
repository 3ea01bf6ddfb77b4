use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use maintix::ingest::{TableFormat, TargetScheme};
use maintix::mi::{mi_score, MiInputs, MiVariant};
use maintix::srcmetrics::LanguageProfile;
use maintix_cli::report::{parse_formats, ranking_matrix, DatasetRanking};
use maintix_cli::{emit_report, inspect, rank, run_with_jobs, scan, CliError, RunConfig};
use maintix_cli::{EXIT_CONFIG, EXIT_INTERNAL, EXIT_OK, EXIT_PARTIAL};

#[derive(Parser)]
#[command(name = "maintix", version, about = "Maintainability prediction benchmarks, TOPSIS ranking and MI")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate every technique on every dataset and rank them.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory (default: the config's `output`, else ./report).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of json,csv,md.
        #[arg(long)]
        formats: Option<String>,
    },
    /// TOPSIS-rank techniques from a `dataset,technique,mae,rmse,r2` CSV.
    Rank {
        #[arg(long)]
        metrics: PathBuf,
        /// Three comma-separated weights for mae,rmse,r2.
        #[arg(long)]
        weights: Option<String>,
        /// Three comma-separated directions (benefit|cost) for mae,rmse,r2.
        #[arg(long)]
        directions: Option<String>,
        /// Write the full rankings as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Halstead, cyclomatic, LOC and MI for source files.
    Scan {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Language profile (c, cpp, java); by default chosen per extension.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, default_value = "visual_studio")]
        variant: String,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Maintainability Index from V, G, L (and comment fraction C).
    Mi {
        #[arg(long)]
        volume: f64,
        #[arg(long)]
        cc: f64,
        #[arg(long)]
        loc: f64,
        /// Comment-line fraction in [0, 1].
        #[arg(long)]
        comments: Option<f64>,
        /// One variant; all applicable variants when omitted.
        #[arg(long)]
        variant: Option<String>,
    },
    /// Summarize a dataset file.
    Inspect {
        path: PathBuf,
        #[arg(long)]
        format: Option<String>,
        /// `change` or `mi:<variant>`.
        #[arg(long)]
        target: Option<String>,
    },
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Bench {
            config,
            seed,
            jobs,
            out,
            formats,
        } => {
            let raw = RunConfig::load(&config)?;
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let cfg = raw.resolve(&base, seed)?;
            let formats = match formats {
                Some(f) => parse_formats(&[f])?,
                None => match &cfg.formats {
                    Some(list) => parse_formats(list)?,
                    None => parse_formats(&["json,csv,md".to_string()])?,
                },
            };
            let out = out
                .or_else(|| cfg.output.as_ref().map(|o| base.join(o)))
                .unwrap_or_else(|| PathBuf::from("report"));
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let report = run_with_jobs(&cfg, jobs);
            for path in emit_report(&report, &formats, &out)? {
                println!("wrote {}", path.display());
            }
            if report.failures.is_empty() {
                Ok(EXIT_OK)
            } else {
                for f in &report.failures {
                    let t = f.technique.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
                    eprintln!("failed: {} / {} ({}): {}", f.dataset, t, f.stage, f.message);
                }
                Ok(EXIT_PARTIAL)
            }
        }
        Command::Rank {
            metrics,
            weights,
            directions,
            json,
        } => {
            let text = std::fs::read_to_string(&metrics)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", metrics.display())))?;
            let weights = weights.as_deref().map(rank::parse_weights).transpose()?;
            let directions = directions.as_deref().map(rank::parse_directions).transpose()?;
            let rankings = rank::rank_metrics_csv(&text, weights.as_deref(), directions.as_deref())?;
            print_rankings(&rankings);
            if let Some(path) = json {
                let body = serde_json::to_string_pretty(&rankings).map_err(|e| CliError::Internal(e.to_string()))?;
                std::fs::write(&path, body + "\n")
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(EXIT_OK)
        }
        Command::Scan {
            paths,
            profile,
            variant,
            json,
        } => {
            let variant: MiVariant = variant.parse().map_err(config_err)?;
            let profile = match profile {
                Some(name) => {
                    Some(LanguageProfile::by_name(&name).ok_or_else(|| config_err(format!("unknown profile `{name}`")))?)
                }
                None => None,
            };
            let report = scan::scan(&paths, profile.as_ref(), variant);
            if report.records.is_empty() {
                log::warn!("no source files found");
            }
            if json {
                let body = serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))?;
                println!("{body}");
            } else {
                print!("{}", report.to_text());
            }
            Ok(if report.errors > 0 { EXIT_PARTIAL } else { EXIT_OK })
        }
        Command::Mi {
            volume,
            cc,
            loc,
            comments,
            variant,
        } => {
            let mut inputs = MiInputs::new(volume, cc, loc);
            if let Some(c) = comments {
                inputs = inputs.with_comments(c);
            }
            let variants: Vec<MiVariant> = match variant {
                Some(v) => vec![v.parse().map_err(config_err)?],
                None => MiVariant::ALL
                    .into_iter()
                    .filter(|v| comments.is_some() || !v.needs_comments())
                    .collect(),
            };
            for v in variants {
                let s = mi_score(&inputs, v).map_err(config_err)?;
                match s.band {
                    Some(b) => println!("{:<14} {:>10.4}  {b}", v.as_str(), s.value),
                    None => println!("{:<14} {:>10.4}", v.as_str(), s.value),
                }
            }
            Ok(EXIT_OK)
        }
        Command::Inspect { path, format, target } => {
            let format: Option<TableFormat> = format.map(|f| f.parse()).transpose().map_err(config_err)?;
            let scheme = match target.as_deref() {
                None => None,
                Some("change") => Some(TargetScheme::ChangeColumn),
                Some(t) => match t.strip_prefix("mi:") {
                    Some(v) => Some(TargetScheme::mi(v.parse().map_err(config_err)?)),
                    None => return Err(config_err(format!("unknown target `{t}` (change or mi:<variant>)"))),
                },
            };
            print!("{}", inspect(&path, format, scheme.as_ref())?);
            Ok(EXIT_OK)
        }
    }
}

fn print_rankings(rankings: &[DatasetRanking]) {
    print!("{}", ranking_matrix(rankings));
    for r in rankings {
        println!("\n{}", r.dataset);
        for &j in &r.result.order {
            println!(
                "  {:>2}  {:<12} closeness {:.5}{}",
                r.result.rank[j],
                r.result.alternatives[j],
                r.result.closeness[j],
                if r.result.tied[j] { "  (tie)" } else { "" }
            );
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
