use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zetafock_cli::{
    bernoulli, exit_code, parse_setup, run, summary_text, table, ConfigError, RunConfig, Suite, TableKind, EXIT_FAIL, EXIT_PASS,
    EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "zetafock", version, about = "Exact verification of twisted realizations of the differential-operator algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Option<SuiteArg>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Print a table of exact values.
    Table {
        #[arg(value_enum)]
        kind: TableArg,
        #[command(flatten)]
        opts: Opts,
    },
    /// Bernoulli number B_n, or the polynomial B_n(x).
    Bernoulli {
        #[arg(long)]
        n: usize,
        /// Evaluation point as a fraction.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Opts {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u32>,
    /// Eigenspace dimensions d_0,...,d_{p-1}.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    r_max: Option<u32>,
    /// Order bound for the Delta suite and table.
    #[arg(long)]
    s_max: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    m_max: Option<i64>,
    /// Fock degree bound as a fraction.
    #[arg(long)]
    degree_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    y_order: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Abstract,
    Rep,
    Jacobi,
    Mwa,
    Iterates,
    Genfun,
    Delta,
    Generators,
    Dims,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Corrections,
    Central,
    Zeta,
    Delta,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Abstract => vec![Suite::Abstract],
            SuiteArg::Rep => vec![Suite::Rep],
            SuiteArg::Jacobi => vec![Suite::Jacobi],
            SuiteArg::Mwa => vec![Suite::Mwa],
            SuiteArg::Iterates => vec![Suite::Iterates],
            SuiteArg::Genfun => vec![Suite::Genfun],
            SuiteArg::Delta => vec![Suite::Delta],
            SuiteArg::Generators => vec![Suite::Generators],
            SuiteArg::Dims => vec![Suite::Dims],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

fn load_config(opts: &Opts) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = parse_setup(opts.p, opts.dims.as_deref())? {
        cfg.setup = s;
    }
    let b = &mut cfg.bounds;
    if let Some(v) = opts.r_max {
        b.r_max = v;
    }
    if let Some(v) = opts.s_max {
        b.s_max = v;
    }
    if let Some(v) = opts.m_max {
        b.m_max = v;
    }
    if let Some(v) = &opts.degree_max {
        b.degree_max = v.clone();
    }
    if let Some(v) = opts.window {
        b.window = v;
    }
    if let Some(v) = opts.y_order {
        b.y_order = v;
    }
    if opts.out.is_some() {
        cfg.output = opts.out.clone();
    }
    if opts.jobs.is_some() {
        cfg.parallelism = opts.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: &PathBuf, text: &str) -> Result<(), ConfigError> {
    std::fs::write(path, text).map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // only fails if a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn execute(cli: Cli) -> Result<i32, ConfigError> {
    match cli.command {
        Command::Verify { suite, opts } => {
            let mut cfg = load_config(&opts)?;
            if let Some(s) = suite {
                cfg.suites = s.suites();
            }
            set_jobs(cfg.parallelism);
            let rep = run(&cfg)?;
            let json = rep.to_json();
            let summary = summary_text(&rep);
            match &cfg.output {
                Some(path) => {
                    write_out(path, &(json + "\n"))?;
                    print!("{summary}");
                }
                None => {
                    println!("{json}");
                    eprint!("{summary}");
                }
            }
            Ok(exit_code(&rep))
        }
        Command::Table { kind, opts } => {
            let cfg = load_config(&opts)?;
            let kind = match kind {
                TableArg::Corrections => TableKind::Corrections,
                TableArg::Central => TableKind::Central,
                TableArg::Zeta => TableKind::Zeta,
                TableArg::Delta => TableKind::Delta,
            };
            let t = table(kind, &cfg.setup, &cfg.bounds);
            print!("{}", t.render());
            if let Some(path) = &cfg.output {
                write_out(path, &(serde_json::to_string_pretty(&t.to_json()).expect("serializable") + "\n"))?;
            }
            Ok(EXIT_PASS)
        }
        Command::Bernoulli { n, x, out } => {
            let (text, json) = bernoulli(n, x.as_deref())?;
            println!("{text}");
            if let Some(path) = &out {
                write_out(path, &(serde_json::to_string_pretty(&json).expect("serializable") + "\n"))?;
            }
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_PASS as u8 });
        }
    };
    let code = match execute(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    debug_assert!(matches!(code, EXIT_PASS | EXIT_FAIL | EXIT_USAGE));
    ExitCode::from(code as u8)
}
