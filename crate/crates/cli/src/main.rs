use clap::{Args, Parser, Subcommand, ValueEnum};
use lawcat::commands::{self, render_text, Options, Outcome};
use lawcat::format::{parse_file, Document};
use lawcat_core::suite::SuiteConfig;
use lawcat_core::Budget;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lawcat", version, about = "Exact checks for quantale-enriched and (T,V)-categories")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest enumeration any single search may visit.
    #[arg(long, global = true, default_value_t = Budget::default().max_enum)]
    max_enum: u64,
    /// Use the unpruned reference enumeration.
    #[arg(long, global = true)]
    oracle: bool,
    /// Treat skipped items and sufficient-only verdicts as failures.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a quantale, vcat, tvcat, space or quniform file.
    Check { file: PathBuf },
    /// Decide Lawvere completeness.
    Complete {
        file: Option<PathBuf>,
        /// A built-in target instead of a file; only `v-hom` is known.
        #[arg(long, requires = "quantale", conflicts_with = "file")]
        builtin: Option<String>,
        #[arg(long)]
        quantale: Option<String>,
        #[arg(long, default_value = "id")]
        monad: String,
    },
    /// Compare weak sobriety with Lawvere completeness for a space.
    Sober { file: PathBuf },
    /// Run the Yoneda checks on a category.
    Yoneda { file: PathBuf },
    /// Print the dual of a category.
    Dual { file: PathBuf },
    /// Print the lax extension of a vcat's structure and sample the extension laws.
    Extend {
        file: PathBuf,
        #[arg(long, default_value = "ultra")]
        monad: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Quasi-uniform spaces.
    Quniform {
        #[arg(value_enum)]
        action: QuniformAction,
        file: PathBuf,
    },
    /// Run the acceptance battery.
    Suite {
        /// Criterion keys or numbers; repeatable.
        #[arg(long)]
        only: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QuniformAction {
    Check,
    Complete,
}

fn load(path: &Path, budget: &Budget) -> Result<Document, ExitCode> {
    parse_file(path, budget).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn emit(out: &Outcome, format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(out).expect("json")),
        Format::Text => {
            println!("status: {}", serde_json::to_value(out.status).expect("json").as_str().unwrap_or("?"));
            print!("{}", render_text(&out.report));
        }
    }
    ExitCode::from(out.status.exit_code() as u8)
}

fn run(cli: Cli) -> Result<Outcome, ExitCode> {
    let g = &cli.global;
    let mut opts = Options {
        budget: Budget::new(g.max_enum),
        oracle: g.oracle,
        strict: g.strict,
        monad: None,
    };
    Ok(match cli.cmd {
        Cmd::Check { file } => commands::check(&load(&file, &opts.budget)?, &opts),
        Cmd::Complete { file: Some(file), .. } => commands::complete(&load(&file, &opts.budget)?, &opts),
        Cmd::Complete { builtin: Some(b), quantale: Some(q), monad, .. } => {
            if b != "v-hom" {
                eprintln!("error: unknown built-in target `{b}` (expected v-hom)");
                return Err(ExitCode::from(2));
            }
            commands::complete_v_hom(&q, &monad, &opts)
        }
        Cmd::Complete { .. } => {
            eprintln!("error: `complete` needs a file or --builtin v-hom --quantale <name>");
            return Err(ExitCode::from(2));
        }
        Cmd::Sober { file } => commands::sober(&load(&file, &opts.budget)?, &opts),
        Cmd::Yoneda { file } => commands::yoneda_cmd(&load(&file, &opts.budget)?, &opts),
        Cmd::Dual { file } => commands::dual(&load(&file, &opts.budget)?, &opts),
        Cmd::Extend { file, monad, samples, seed } => {
            opts.monad = Some(monad);
            commands::extend(&load(&file, &opts.budget)?, &opts, samples, seed)
        }
        Cmd::Quniform { action, file } => {
            let doc = load(&file, &opts.budget)?;
            match action {
                QuniformAction::Check => commands::quniform_check(&doc, &opts),
                QuniformAction::Complete => commands::quniform_complete_cmd(&doc, &opts),
            }
        }
        Cmd::Suite { only, seed } => {
            let mut cfg = SuiteConfig {
                budget: opts.budget,
                only,
                oracle: opts.oracle,
                ..Default::default()
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            commands::suite(&cfg, opts.strict)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.global.format;
    match run(cli) {
        Ok(out) => emit(&out, format),
        Err(code) => code,
    }
}
