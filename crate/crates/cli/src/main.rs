use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvcone::tensorspace::BoundSide;
use curvcone_cli::{
    check4, defpoly, exit, gen, parse_bound, read_file, relax, semiriem_operator, to_curvop, write_file,
    ft_certificate_text, CliResult, Output, RelaxArgs,
};

/// Sectional curvature bounds for algebraic curvature operators.
#[derive(Parser)]
#[command(name = "curvcone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact bound check for n <= 4.
    Check4 {
        file: PathBuf,
        #[command(flatten)]
        opts: Check4Opts,
    },
    /// Prints the defining polynomial value at the operator (n = 4).
    Defpoly {
        file: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        bound: String,
        #[arg(long)]
        project: bool,
    },
    /// Inner/outer relaxation loop for sec >= bound.
    Relax {
        file: PathBuf,
        #[command(flatten)]
        opts: RelaxOpts,
    },
    /// Writes a random operator file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        magnitude: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound queries for a metric of signature nu, given in the file.
    Semiriem {
        #[command(subcommand)]
        query: SemiQuery,
    },
}

#[derive(Subcommand)]
enum SemiQuery {
    /// Exact bound check (n <= 4) after the signature reduction.
    Check4 {
        file: PathBuf,
        #[command(flatten)]
        opts: Check4Opts,
    },
    /// Relaxation loop after the signature reduction.
    Relax {
        file: PathBuf,
        #[command(flatten)]
        opts: RelaxOpts,
    },
}

#[derive(Args)]
struct Check4Opts {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    bound: String,
    /// Check sec <= bound instead of sec >= bound.
    #[arg(long, conflicts_with = "lower")]
    upper: bool,
    #[arg(long)]
    lower: bool,
    #[arg(long)]
    strict: bool,
    /// Project onto the Bianchi subspace instead of rejecting the input.
    #[arg(long)]
    project: bool,
    /// Writes the Finsler–Thorpe certificate here when the bound holds.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct RelaxOpts {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    bound: String,
    #[arg(long, default_value_t = 1)]
    max_m: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long)]
    project: bool,
    /// Writes the SOS certificate here on TRUE.
    #[arg(long)]
    cert: Option<PathBuf>,
    /// Writes the SDP of each visited level to <PREFIX>.m<level>.txt.
    #[arg(long, value_name = "PREFIX")]
    dump_sdp: Option<PathBuf>,
}

fn run_check4(r: &curvcone::tensorspace::CurvOp, o: &Check4Opts) -> CliResult<Output> {
    let side = if o.upper { BoundSide::Upper } else { BoundSide::Lower };
    let (out, cert) = check4(r, &parse_bound(&o.bound)?, side, o.strict)?;
    if let (Some(path), Some(c)) = (&o.cert, cert) {
        write_file(path, &ft_certificate_text(&c))?;
    }
    Ok(out)
}

fn run_relax(r: &curvcone::tensorspace::CurvOp, o: &RelaxOpts) -> CliResult<Output> {
    relax(
        r,
        &RelaxArgs {
            k: parse_bound(&o.bound)?,
            max_m: o.max_m,
            tol: o.tol,
            cert: o.cert.as_deref(),
            dump_sdp: o.dump_sdp.as_deref(),
        },
    )
}

fn load(path: &Path, project: bool) -> CliResult<curvcone::tensorspace::CurvOp> {
    to_curvop(read_file(path)?.operator()?, project)
}

fn run(cli: Cli) -> CliResult<Output> {
    match cli.command {
        Command::Check4 { file, opts } => run_check4(&load(&file, opts.project)?, &opts),
        Command::Defpoly { file, bound, project } => defpoly(&load(&file, project)?, &parse_bound(&bound)?),
        Command::Relax { file, opts } => run_relax(&load(&file, opts.project)?, &opts),
        Command::Gen { n, seed, magnitude, out } => {
            let json = gen(n, seed, magnitude)?;
            match out {
                Some(path) => {
                    write_file(&path, &json)?;
                    Ok(Output {
                        code: exit::HOLDS,
                        text: String::new(),
                    })
                }
                None => Ok(Output {
                    code: exit::HOLDS,
                    text: json,
                }),
            }
        }
        Command::Semiriem { query } => match query {
            SemiQuery::Check4 { file, opts } => run_check4(&semiriem_operator(&read_file(&file)?, opts.project)?, &opts),
            SemiQuery::Relax { file, opts } => run_relax(&semiriem_operator(&read_file(&file)?, opts.project)?, &opts),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::PARSE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
