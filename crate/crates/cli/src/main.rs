use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nffs_cli::{cmd_encode, cmd_evaluate, cmd_mi_hist, cmd_select, EncoderFit, RunConfig};

#[derive(Parser)]
#[command(name = "nffs", version, about = "Feature selection via normalized selection frequencies")]
struct Cli {
    /// Run config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides "out" in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Where categorical vocabularies are learned from; overrides the config.
    #[arg(long, global = true, value_enum)]
    fit_encoder_on: Option<EncoderFit>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the feature schema and report the encoded width.
    Encode,
    /// Score features by mutual information and write a histogram.
    MiHist,
    /// Run the two-phase subset search.
    Select,
    /// Evaluate a named feature subset over repeated seeds.
    Evaluate {
        /// Newline-separated feature names (encoded or raw).
        #[arg(long)]
        mask: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let config_path = cli.config.context("--config is required")?;
    let mut cfg = RunConfig::load(&config_path)?;
    if let Some(fit) = cli.fit_encoder_on {
        cfg.fit_encoder_on = fit;
    }
    let out = cfg.out_dir(cli.out.as_deref())?;

    match cli.command {
        Command::Encode => {
            let s = cmd_encode(&cfg, &out)?;
            println!(
                "{} raw features -> {} encoded columns ({} categorical)",
                s.raw_features,
                s.encoded_width,
                s.categorical.len()
            );
        }
        Command::MiHist => {
            let h = cmd_mi_hist(&cfg, &out)?;
            println!(
                "{} features in {} bins, threshold {}",
                h.counts.iter().sum::<usize>(),
                h.counts.len(),
                cfg.nffs.threshold
            );
        }
        Command::Select => {
            let r = cmd_select(&cfg, &out)?;
            println!(
                "best subset: {} features, fitness {:.4} ({} evaluations)",
                r.best.feature_names.len(),
                r.best.fitness,
                r.evaluations
            );
        }
        Command::Evaluate { mask } => {
            let r = cmd_evaluate(&cfg, &mask, &out)?;
            let rep = &r.report;
            println!(
                "{} features ({} raw), {} runs: accuracy {:.3}±{:.3} precision {:.3}±{:.3} recall {:.3}±{:.3} F-score {:.3}±{:.3}",
                r.n_features,
                r.n_raw_features,
                rep.runs,
                rep.accuracy.mean,
                rep.accuracy.std,
                rep.precision.mean,
                rep.precision.std,
                rep.recall.mean,
                rep.recall.std,
                rep.f_score.mean,
                rep.f_score.std
            );
            if let Some(auc) = rep.auc {
                println!("AUC {:.3}±{:.3}", auc.mean, auc.std);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
