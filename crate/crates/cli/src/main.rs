use std::path::PathBuf;
use std::process::ExitCode;

use accept::bayes::DEFAULT_SEED;
use accept::json::to_canonical_json;
use accept::{default_priors, summarize_prior, Mode};
use accept_cli::output::{write_outputs, Emit, ALL_EMITS};
use accept_cli::service::{serve, ServiceConfig};
use accept_cli::{analyze, parse_request, Failure};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "accept", version, about = "Acceptability curves for two-arm binary trials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bayes,
    Freq,
    Both,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Bayes => Mode::Bayes,
            ModeArg::Freq => Mode::Freq,
            ModeArg::Both => Mode::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyse the trials in a JSON request file and write curves, tables and bundle.json.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Overrides the request's mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Overrides the request's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = ALL_EMITS.to_vec())]
        emit: Vec<Emit>,
    },
    /// Natural-scale summaries of the default priors for an assumed control rate.
    PriorSummary {
        #[arg(long)]
        control_rate: f64,
        #[arg(long, default_value_t = 1_000_000)]
        draws: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print the software version.
    Version,
    /// Run the HTTP service; configuration comes from ACCEPT_* variables.
    Serve {
        /// Overrides ACCEPT_PORT.
        #[arg(long)]
        port: Option<u16>,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { input, mode, seed, out, emit } => {
            let bytes = std::fs::read(&input).map_err(|e| Failure::io(&format!("reading {}", input.display()), e))?;
            let mut req = parse_request(&bytes)?;
            if let Some(m) = mode {
                req.mode = m.into();
            }
            if seed.is_some() {
                req.seed = seed;
            }
            let bundle = analyze(&req, false)?;
            for t in &bundle.trials {
                for w in &t.warnings {
                    eprintln!("warning[{}]: {}: {}", w.code, t.name, w.message);
                }
            }
            for path in write_outputs(&bundle, &out, &emit)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::PriorSummary { control_rate, draws, seed } => {
            let priors = default_priors(control_rate).map_err(|e| Failure::from(e).at("control_rate"))?;
            let summary = summarize_prior(&priors, draws, seed)?;
            let json = to_canonical_json(&summary).map_err(|e| Failure::new("internal", e.to_string()))?;
            println!("{json}");
            Ok(())
        }
        Command::Version => {
            println!("{} {}", accept::analysis::SOFTWARE, accept::analysis::VERSION);
            Ok(())
        }
        Command::Serve { port } => {
            let mut cfg = ServiceConfig::from_env()?;
            if let Some(p) = port {
                cfg.port = p;
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::io("starting runtime", e))?;
            rt.block_on(serve(cfg))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
