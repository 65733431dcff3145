use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use so_converse::harness::{gamma_table, run_suite, Suite, SuiteConfig};
use so_converse::Error;

/// Verification suites for Bessel functions, zeta integrals and gamma
/// factors of generic representations of split SO(2l) over F_q.
#[derive(Parser, Debug)]
#[command(name = "so-converse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Rank of SO(2l).
    #[arg(long, default_value_t = 2, global = true)]
    l: usize,

    /// Odd prime q.
    #[arg(long, default_value_t = 3, global = true)]
    q: u32,

    #[arg(long, default_value_t = 0x5eed, global = true)]
    seed: u64,

    /// Absolute tolerance of pointwise identities.
    #[arg(long, global = true)]
    tol_eq: Option<f64>,

    /// Relative tolerance of gamma proportionality.
    #[arg(long, global = true)]
    tol_gamma: Option<f64>,

    /// Directory for enumerated groups.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Also write the report as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Allow the (3, 3) tier.
    #[arg(long, global = true)]
    slow: bool,

    /// Compute gamma ratios for non-cuspidal pi too (experimental).
    #[arg(long, global = true)]
    allow_noncuspidal: bool,

    /// Record per-check wall-clock times in the report.
    #[arg(long, global = true)]
    timings: bool,

    /// Progress on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Group orders, embeddings and special elements.
    Enumerate,
    /// Root-system combinatorics of the Bessel support.
    Weyl,
    /// Gelfand-Graev decomposition.
    Decompose,
    /// Bessel function identities.
    Bessel,
    /// Zeta integrals and gamma factors.
    Gamma {
        /// Export the gamma table as CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Multiplicity one.
    Multone,
    /// Cell decomposition of the n = l integral.
    Cells,
    /// The converse-theorem experiment.
    Converse,
    /// Every suite.
    All,
}

impl Command {
    fn suites(&self) -> Vec<Suite> {
        match self {
            Command::Enumerate => vec![Suite::Groups],
            Command::Weyl => vec![Suite::Weyl],
            Command::Decompose => vec![Suite::Decompose],
            Command::Bessel => vec![Suite::Bessel],
            Command::Gamma { .. } => vec![Suite::Zeta, Suite::Gamma],
            Command::Multone => vec![Suite::Multone],
            Command::Cells => vec![Suite::Cells],
            Command::Converse => vec![Suite::Converse],
            Command::All => Suite::ALL.to_vec(),
        }
    }
}

fn config(cli: &Cli) -> SuiteConfig {
    let mut cfg = SuiteConfig::new(cli.l, cli.q).with_suites(&cli.command.suites());
    cfg.seed = cli.seed;
    if let Some(t) = cli.tol_eq {
        cfg.tol.eq_abs = t;
    }
    if let Some(t) = cli.tol_gamma {
        cfg.tol.gamma_rel = t;
    }
    cfg.cache_dir = cli.cache_dir.clone();
    cfg.slow = cli.slow;
    cfg.allow_noncuspidal = cli.allow_noncuspidal;
    cfg.timings = cli.timings;
    cfg.verbose = cli.verbose;
    cfg
}

fn run(cli: &Cli) -> so_converse::Result<bool> {
    let cfg = config(cli);
    let report = run_suite(&cfg)?;
    print!("{}", report.render());
    if let Some(path) = &cli.report {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    if let Some(path) = &cli.csv {
        report.write_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Command::Gamma { table: Some(path) } = &cli.command {
        gamma_table(&cfg)?.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
