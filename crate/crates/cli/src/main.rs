use std::fmt::Display;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ybe_core::brace::Brace;
use ybe_core::cabling::cable;
use ybe_core::enumerate::{enumerate_solutions, SolutionFilter};
use ybe_core::format::{self, FormatError};
use ybe_core::perm::minimal_block_systems;
use ybe_core::verify::{self, CorpusSpec, RunConfig};
use ybe_core::{Partition, Solution};

#[derive(Parser)]
#[command(name = "ybe", version, about = "Involutive set-theoretic solutions of the Yang-Baxter equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a solution file.
    Check(Input),
    /// Cycle type of the diagonal map T.
    Tpartition(Input),
    /// Orbits of the permutation group generated by the σ's, one per line.
    Orbits(Input),
    /// Whether the solution splits into invariant pieces.
    Decomposable(Input),
    /// Minimal non-trivial block systems of an indecomposable solution.
    Blocks(Input),
    /// Whether an indecomposable solution is primitive.
    Primitive(Input),
    /// The k-cabled solution.
    Cable {
        #[arg(short)]
        k: usize,
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Additive order of the generators in the associated brace.
    Dehornoy(Input),
    /// Quotient by equal σ rows.
    Retract(Input),
    /// An isomorphism from the first solution onto the second, or "none".
    Iso { first: PathBuf, second: PathBuf },
    /// Every solution of size n up to isomorphism, in canonical form.
    Enumerate(EnumerateArgs),
    /// Run the verification harness over a corpus.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Input {
    /// Solution file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(short)]
    n: usize,
    #[arg(long)]
    indecomposable: bool,
    #[arg(long)]
    square_free: bool,
    /// Required cycle type of T, e.g. "2 2 2" or "3,3".
    #[arg(long)]
    tpartition: Option<Partition>,
    /// Write one file per solution into this directory instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory of .sol files.
    #[arg(long, conflicts_with_all = ["fixtures", "enumerated"])]
    corpus: Option<PathBuf>,
    /// The built-in fixtures (the default).
    #[arg(long, conflicts_with = "enumerated")]
    fixtures: bool,
    /// Every solution of size 2..=N, together with the per-size checks.
    #[arg(long, value_name = "N")]
    enumerated: Option<usize>,
    /// Also write the reports as JSON.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

/// A failed command: message for stderr and exit status.
struct Failure {
    status: u8,
    message: String,
}

fn usage(message: impl Display) -> Failure {
    Failure { status: 2, message: message.to_string() }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map_err(|e| usage(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load(path: &Path) -> Result<Solution, Failure> {
    format::parse_solution(&read_input(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        _ => {
            io::stdout().write_all(text.as_bytes()).map_err(|e| usage(format!("stdout: {e}")))?;
            Ok(())
        }
    }
}

fn require_indecomposable(s: &Solution) -> Result<(), Failure> {
    if s.is_decomposable() {
        return Err(usage("solution is decomposable; blocks and primitivity need a transitive action"));
    }
    Ok(())
}

fn points(xs: &[usize]) -> String {
    xs.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Check(input) => {
            let text = read_input(&input.file)?;
            match format::parse_solution(&text) {
                Ok(s) => println!("valid solution of size {}", s.n()),
                Err(e @ FormatError::Invalid { .. }) => {
                    println!("invalid: {e}");
                    return Ok(1);
                }
                Err(e) => return Err(usage(format!("{}: {e}", input.file.display()))),
            }
        }
        Command::Tpartition(input) => println!("{}", load(&input.file)?.t_partition()),
        Command::Orbits(input) => {
            for orbit in load(&input.file)?.orbits() {
                println!("{}", points(&orbit));
            }
        }
        Command::Decomposable(input) => {
            let s = load(&input.file)?;
            println!("{}", if s.is_decomposable() { "decomposable" } else { "indecomposable" });
        }
        Command::Blocks(input) => {
            let s = load(&input.file)?;
            require_indecomposable(&s)?;
            let mut systems = minimal_block_systems(s.sigmas(), s.n()).map_err(usage)?;
            systems.retain(|sys| !sys.is_trivial());
            if systems.is_empty() {
                println!("none");
            }
            for system in systems {
                println!("{system}");
            }
        }
        Command::Primitive(input) => {
            let s = load(&input.file)?;
            require_indecomposable(&s)?;
            let primitive = s.is_primitive().map_err(usage)?;
            println!("{}", if primitive { "primitive" } else { "imprimitive" });
        }
        Command::Cable { k, file, output } => {
            let cabled = cable(&load(&file)?, k).map_err(usage)?;
            write_output(output.as_deref(), &format::serialize_solution(&cabled))?;
        }
        Command::Dehornoy(input) => {
            let brace = Brace::new(&load(&input.file)?).map_err(usage)?;
            println!("{}", brace.dehornoy_class());
        }
        Command::Retract(input) => {
            let retraction = load(&input.file)?.retract().map_err(usage)?;
            print!(
                "# class of each point: {}\n{}",
                points(&retraction.class_map),
                format::serialize_solution(&retraction.quotient)
            );
        }
        Command::Iso { first, second } => match load(&first)?.is_isomorphic(&load(&second)?) {
            Some(phi) => println!("{phi}"),
            None => println!("none"),
        },
        Command::Enumerate(args) => enumerate(args)?,
        Command::Verify(args) => return verify(args),
    }
    Ok(0)
}

fn enumerate(args: EnumerateArgs) -> Result<(), Failure> {
    let filter = SolutionFilter {
        indecomposable: args.indecomposable.then_some(true),
        square_free: args.square_free.then_some(true),
        t_partition: args.tpartition,
        ..SolutionFilter::none()
    };
    let solutions = enumerate_solutions(args.n, &filter, true).map_err(usage)?;
    match args.output {
        None => write_output(None, &format::serialize_stream(&solutions)),
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            for (i, s) in solutions.iter().enumerate() {
                let path = dir.join(format!("n{}-{:04}.{}", args.n, i + 1, format::FILE_EXTENSION));
                write_output(Some(&path), &format::serialize_solution(s))?;
            }
            eprintln!("wrote {} solutions to {}", solutions.len(), dir.display());
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let mut cfg = RunConfig::default();
    let spec = match (args.corpus, args.enumerated) {
        (Some(dir), _) => CorpusSpec::Directory(dir),
        (None, Some(max_n)) => {
            cfg.partition_sizes = (2..=max_n).collect();
            cfg.primitivity_sizes = (2..=max_n.min(verify::MAX_PRIMITIVITY_N)).collect();
            CorpusSpec::Enumerated { max_n }
        }
        (None, None) => CorpusSpec::Fixtures,
    };
    let reports = verify::run_all(&spec, &cfg).map_err(usage)?;
    print!("{}", verify::render_text(&reports));
    if let Some(path) = args.json {
        write_output(Some(&path), &verify::to_json(&reports))?;
    }
    Ok(if reports.iter().all(|r| r.is_clean()) { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(status) => ExitCode::from(status),
        Err(failure) => {
            eprintln!("ybe: {}", failure.message);
            ExitCode::from(failure.status)
        }
    }
}
