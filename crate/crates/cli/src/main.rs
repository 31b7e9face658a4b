mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use commands::{CliError, Outcome, Status};

#[derive(Parser, Debug)]
#[command(
    name = "gsg",
    version,
    about = "Generalized semifield groups over prime fields"
)]
struct Cli {
    /// Worker threads for parallel enumerations.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the field quotient map GF(p^n) -> GF(p^m).
    GenField(GenFieldArgs),
    /// Report the nonsingular, symmetric and alternating flags of a map.
    Check(CheckArgs),
    /// Verify the semi-extraspecial structure of G(alpha, beta).
    GroupVerify(GroupArgs),
    /// Count and exhibit abelian complements of A.
    Complements(GroupArgs),
    /// Cosets of the image of phi_alpha in the alternating maps.
    Cosets(CosetsArgs),
    /// Search for an isotopism or anti-isotopism between two maps.
    Isotopic(IsotopicArgs),
    /// Read alpha and beta back off the group in a random basis.
    Extract(ExtractArgs),
    /// Embed a class-2 commutator structure into an ultraspecial group.
    Embed(EmbedArgs),
    /// Cross-validate the group against its multiplication table.
    Oracle(OracleArgs),
    /// Search ker phi_alpha for an invertible map giving a symmetric isotope.
    SymIsotope(SymIsotopeArgs),
}

#[derive(Args, Debug, Serialize)]
struct GenFieldArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Output file instead of standard output.
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    /// Map file, `-` for standard input.
    #[arg(long, default_value = "-")]
    map: String,
    #[arg(long, default_value_t = gsg_core::linalg::DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args, Debug, Serialize)]
struct GroupArgs {
    /// Map or group file, `-` for standard input.
    #[arg(long, default_value = "-")]
    alpha: String,
    /// Beta map file; defaults to zero (or the beta of a group file).
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, default_value_t = gsg_core::linalg::DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args, Debug, Serialize)]
struct CosetsArgs {
    #[arg(long, default_value = "-")]
    alpha: String,
    /// Number of representatives to print.
    #[arg(long, default_value_t = 32)]
    limit: usize,
}

#[derive(Args, Debug, Serialize)]
struct IsotopicArgs {
    #[arg(long)]
    a1: String,
    #[arg(long)]
    a2: String,
    /// Search for an anti-isotopism.
    #[arg(long)]
    anti: bool,
    /// Maximum number of (a, c) pairs to visit.
    #[arg(long, default_value_t = gsg_core::isotopy::SEARCH_BUDGET)]
    budget: u128,
    /// Witness output file instead of standard output.
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct ExtractArgs {
    #[arg(long, default_value = "-")]
    alpha: String,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    seed: u64,
    /// Write the isotopism from the extracted alpha to the input alpha here.
    #[arg(long)]
    witness: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct EmbedArgs {
    /// Class-2 file (`kind=class2`) or plain alternating map.
    #[arg(long, default_value = "-")]
    gamma: String,
    /// Nonsingular alpha on the padded dimensions; defaults to the field map.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    #[arg(long, default_value = "-")]
    alpha: String,
    #[arg(long)]
    beta: Option<String>,
    /// Check associativity on every triple.
    #[arg(long)]
    exhaustive: bool,
    /// Seed for sampled associativity checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct SymIsotopeArgs {
    #[arg(long, default_value = "-")]
    alpha: String,
    /// Kernel elements to enumerate or sample.
    #[arg(long, default_value_t = gsg_core::complements::KERNEL_BUDGET)]
    budget: u128,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    command: &'a str,
    inputs: Value,
    results: Value,
    status: &'a str,
    timing_ms: u64,
    version: &'a str,
}

fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::GenField(a) => commands::gen_field(a.p, a.n, a.m, a.output.as_deref()),
        Command::Check(a) => commands::check(&a.map, a.budget),
        Command::GroupVerify(a) => commands::group_verify(&a.alpha, a.beta.as_deref(), a.budget),
        Command::Complements(a) => commands::complements(&a.alpha, a.beta.as_deref()),
        Command::Cosets(a) => commands::cosets(&a.alpha, a.limit),
        Command::Isotopic(a) => {
            commands::isotopic(&a.a1, &a.a2, a.anti, a.budget, a.output.as_deref())
        }
        Command::Extract(a) => {
            commands::extract(&a.alpha, a.beta.as_deref(), a.seed, a.witness.as_deref())
        }
        Command::Embed(a) => commands::embed(&a.gamma, a.alpha.as_deref(), a.output.as_deref()),
        Command::Oracle(a) => commands::oracle(&a.alpha, a.beta.as_deref(), a.exhaustive, a.seed),
        Command::SymIsotope(a) => commands::sym_isotope(&a.alpha, a.budget, a.seed),
    }
}

fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn describe(command: &Command) -> (&'static str, Value) {
    match command {
        Command::GenField(a) => ("gen-field", echo(a)),
        Command::Check(a) => ("check", echo(a)),
        Command::GroupVerify(a) => ("group-verify", echo(a)),
        Command::Complements(a) => ("complements", echo(a)),
        Command::Cosets(a) => ("cosets", echo(a)),
        Command::Isotopic(a) => ("isotopic", echo(a)),
        Command::Extract(a) => ("extract", echo(a)),
        Command::Embed(a) => ("embed", echo(a)),
        Command::Oracle(a) => ("oracle", echo(a)),
        Command::SymIsotope(a) => ("sym-isotope", echo(a)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let (name, inputs) = describe(&cli.command);
    if cli.json {
        let report = Report {
            schema: 1,
            command: name,
            inputs,
            results: outcome.results,
            status: outcome.status.as_str(),
            timing_ms: start.elapsed().as_millis() as u64,
            version: env!("CARGO_PKG_VERSION"),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        print!("{}", outcome.text);
        for line in &outcome.notes {
            eprintln!("{line}");
        }
    }
    ExitCode::from(match outcome.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Inconclusive => 3,
    })
}
