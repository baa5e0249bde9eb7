use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use subcut::formats::{write_graph, write_polynomial};
use subcut::harness::{
    bench, generate_autocorr, generate_g05, generate_pw, load, root_loop, summary_table, verify_model, write_report,
    CutMode, GeneratorKind, RunConfig, REPORT_HEADER,
};

#[derive(Parser)]
#[command(name = "subcut", version, about = "Intersection cuts for binary polynomial and max-cut relaxations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the root-node cutting loop on one instance.
    Root {
        instance: PathBuf,
        #[arg(long, default_value = "submodular")]
        cuts: CutMode,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON run configuration; command-line flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write a one-row CSV report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run brute-force self-checks on a small instance.
    Verify { instance: PathBuf },
    /// Write a seeded random instance to stdout or a file.
    Gen {
        kind: GeneratorKind,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability for graph generators.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Largest autocorrelation lag.
        #[arg(long, default_value_t = 3)]
        lag: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run every configured mode on every instance in a directory.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn config_from(path: Option<&PathBuf>) -> subcut::Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), |p| RunConfig::from_json_file(p))
}

fn run(command: Command) -> subcut::Result<ExitCode> {
    match command {
        Command::Root { instance, cuts, rounds, seed, config, report } => {
            let cfg = RunConfig { mode: cuts, rounds, seed, ..config_from(config.as_ref())? };
            let (model, reference) = load(&instance)?;
            println!("{}", model.summary());
            let name = instance.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let r = root_loop(&model, &cfg, &name, Some(reference))?;
            for line in &r.cut_log {
                println!("{line}");
            }
            println!("{REPORT_HEADER}");
            println!("{}", r.csv_row());
            if let Some(path) = report {
                write_report(&path, std::slice::from_ref(&r))?;
            }
            Ok(if r.failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::Verify { instance } => {
            let (model, _) = load(&instance)?;
            println!("{}", model.summary());
            let checks = verify_model(&model)?;
            for (name, ok) in &checks {
                println!("[{}] {name}", if *ok { "PASS" } else { "FAIL" });
            }
            Ok(if checks.iter().all(|c| c.1) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Gen { kind, n, seed, density, lag, out } => {
            let text = match kind {
                GeneratorKind::G05 => write_graph(&generate_g05(n, density, seed)?),
                GeneratorKind::Pw => write_graph(&generate_pw(n, density, seed)?),
                GeneratorKind::Autocorr => write_polynomial(&generate_autocorr(n, lag, seed)?),
            };
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { dir, config, report } => {
            let cfg = config_from(config.as_ref())?;
            let (reports, summaries) = bench(&dir, &cfg)?;
            println!("{REPORT_HEADER}");
            for r in &reports {
                println!("{}", r.csv_row());
            }
            println!();
            print!("{}", summary_table(&summaries));
            if let Some(path) = report {
                write_report(&path, &reports)?;
            }
            Ok(if reports.iter().any(|r| r.failed) { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
    }
}
