use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polmod::Generator;
use polmod_cli::{parse_point, run, CliError, Format, JobConfig, Mode};

#[derive(Parser)]
#[command(
    name = "polmod",
    version,
    about = "Polarization modules: bases, Hilbert series and Frobenius characteristics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graded Frobenius characteristic of the module generated by --gen.
    Frobenius(Common),
    /// Hilbert series in the Schur and h bases.
    Hilbert(Common),
    /// Graded basis, one block per multidegree.
    Basis(Common),
    /// Class of degree-2 points a,b or degree-3 points a,b,c.
    Classify(Common),
    /// Exception conic for --n, and the verdict for each --point.
    Exceptions(Common),
    /// Check the bundled tables; SELECTOR is one of examples:fast, table:4,
    /// table:5, homog, hilbert:4, hilbert:5, table:1, table:7, experiments, all.
    Verify {
        #[arg(default_value = "all")]
        selector: String,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    /// Generator: symmetric functions (`p[3]`, `2*e[3] - m[2,1]`), raw
    /// polynomials (`x[1,1]*x[2,2]`), `family:A:d` etc., or `vandermonde`.
    #[arg(long = "gen")]
    generators: Vec<String>,
    /// Projective point, comma separated (`1,-3/2,6`).
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Raise ell so that every GL-irreducible is visible.
    #[arg(long)]
    full_mu: bool,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Lift the size guard on the Vandermonde generator.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

fn config(mode: Mode, c: Common) -> Result<JobConfig, CliError> {
    let mut cfg = JobConfig::new(mode, c.n, c.ell);
    cfg.generators = c
        .generators
        .iter()
        .map(|g| Generator::parse(g).map_err(|e| CliError::Usage(format!("--gen {g}: {e}"))))
        .collect::<Result<_, _>>()?;
    cfg.points = c.points.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?;
    cfg.format = c.format.into();
    cfg.full_mu = c.full_mu;
    cfg.threads = c.threads;
    cfg.allow_large = c.allow_large;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match cli.command {
        Command::Frobenius(c) => config(Mode::Frobenius, c),
        Command::Hilbert(c) => config(Mode::Hilbert, c),
        Command::Basis(c) => config(Mode::Basis, c),
        Command::Classify(c) => config(Mode::Classify, c),
        Command::Exceptions(c) => config(Mode::Exceptions, c),
        Command::Verify { selector, format, threads } => {
            let mut cfg = JobConfig::new(Mode::Verify, 1, 1);
            cfg.selector = selector;
            cfg.format = format.into();
            cfg.threads = threads;
            Ok(cfg)
        }
    };
    match cfg.and_then(|c| run(&c)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Mismatch(report)) => {
            print!("{report}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
