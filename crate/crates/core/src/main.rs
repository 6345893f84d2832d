use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod cli;

use cli::Outcome;

/// Compile finitely-presented groups into linear-system games and analyse them.
///
/// Every command prints a JSON report (`"schema": 1`) on stdout. `--out`
/// writes the command's artifact (a system, presentation, certificate,
/// representation or transcript) when it has one, and the report otherwise.
#[derive(Parser, Debug)]
#[command(name = "lsgame", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output path for the artifact (a directory for `pipeline`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProverKind {
    /// Sample the regular-representation correlation (weight-3 systems).
    Pzk,
    /// Play a strategy file, or one built from a signed representation.
    Strategy,
    /// Play the best classical assignment.
    Classical,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize, double and compile a presentation into a linear system.
    Compile { presentation: PathBuf },
    /// HNN extension turning `w = 1` into `J = 1`.
    Hnn {
        presentation: PathBuf,
        /// Word over the generators; `1` or an empty string is the identity.
        word: String,
        /// Area certificate for `w`, transported to one for the new involution.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// J-normalize and double the generators of a presentation with an involution.
    Double { presentation: PathBuf },
    /// Solution group of a linear system.
    SolutionGroup { system: PathBuf },
    /// Question and answer structure of the game of a system.
    Game { system: PathBuf },
    /// Exact classical value.
    Classical { system: PathBuf },
    /// Winning probability of a strategy.
    Eval(StrategyArgs),
    /// Bias of a strategy and the identity `omega = |beta + 1| / 2`.
    Bias(StrategyArgs),
    /// Commutation defect of a strategy.
    Delta(StrategyArgs),
    /// Exact correlation of the regular-representation strategy.
    PzkCorr { system: PathBuf },
    /// Sample referee transcripts from the regular-representation correlation.
    PzkSample {
        system: PathBuf,
        #[arg(long, default_value_t = 1000)]
        rounds: u64,
    },
    /// Simulate the referee against a prover.
    Protocol {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = ProverKind::Pzk)]
        prover: ProverKind,
        /// Strategy file for `--prover strategy`.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        rounds: u64,
        #[arg(long, default_value_t = 4)]
        dim_cap: usize,
    },
    /// Solve `Mx = c` over GF(2), or give an inconsistency witness.
    Zsolve { system: PathBuf },
    /// Separate the generators of the solution group of a compiled presentation.
    Cycles { presentation: PathBuf },
    /// Search for a signed-permutation or Pauli-type representation.
    RepSearch {
        presentation: PathBuf,
        #[arg(long, default_value_t = 8)]
        dim_cap: usize,
        /// Accept representations with the involution sent to `+I`.
        #[arg(long)]
        any_involution: bool,
    },
    /// NPA-style upper bound on the commuting-operator value.
    Npa {
        system: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Check an area certificate.
    VerifyCert { presentation: PathBuf, certificate: PathBuf },
    /// Transport an area certificate into the solution group.
    TransportCert {
        presentation: PathBuf,
        certificate: PathBuf,
        /// Run the HNN step for this word first; the certificate is then for `w`.
        #[arg(long)]
        word: Option<String>,
    },
    /// Full chain from a presentation and word to a game and its solution group.
    Pipeline {
        presentation: PathBuf,
        word: String,
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Search for a certificate of `w` up to this area when none is given.
        #[arg(long)]
        max_area: Option<usize>,
    },
    /// Run several analyses on one system and aggregate the results.
    Analyze {
        system: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        rounds: Option<u64>,
        #[arg(long)]
        dim_cap: Option<usize>,
    },
}

#[derive(clap::Args, Debug)]
pub struct StrategyArgs {
    system: PathBuf,
    /// Strategy JSON; when absent, a signed representation of the solution
    /// group with `J -> -I` is searched and turned into a strategy.
    strategy: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    dim_cap: usize,
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Compile { .. } => "compile",
        Command::Hnn { .. } => "hnn",
        Command::Double { .. } => "double",
        Command::SolutionGroup { .. } => "solution-group",
        Command::Game { .. } => "game",
        Command::Classical { .. } => "classical",
        Command::Eval(_) => "eval",
        Command::Bias(_) => "bias",
        Command::Delta(_) => "delta",
        Command::PzkCorr { .. } => "pzk-corr",
        Command::PzkSample { .. } => "pzk-sample",
        Command::Protocol { .. } => "protocol",
        Command::Zsolve { .. } => "zsolve",
        Command::Cycles { .. } => "cycles",
        Command::RepSearch { .. } => "rep-search",
        Command::Npa { .. } => "npa",
        Command::VerifyCert { .. } => "verify-cert",
        Command::TransportCert { .. } => "transport-cert",
        Command::Pipeline { .. } => "pipeline",
        Command::Analyze { .. } => "analyze",
    }
}

fn run(cli: &Cli) -> lsgame::Result<Outcome> {
    use cli::commands as c;
    let seed = cli.seed;
    match &cli.command {
        Command::Compile { presentation } => c::compile(presentation),
        Command::Hnn { presentation, word, cert } => c::hnn(presentation, word, cert.as_deref()),
        Command::Double { presentation } => c::double(presentation),
        Command::SolutionGroup { system } => c::solution_group(system),
        Command::Game { system } => c::game(system),
        Command::Classical { system } => c::classical(system),
        Command::Eval(a) => c::eval(&a.system, a.strategy.as_deref(), a.dim_cap),
        Command::Bias(a) => c::bias(&a.system, a.strategy.as_deref(), a.dim_cap),
        Command::Delta(a) => c::delta(&a.system, a.strategy.as_deref(), a.dim_cap),
        Command::PzkCorr { system } => c::pzk_corr(system),
        Command::PzkSample { system, rounds } => c::pzk_sample(system, *rounds, seed),
        Command::Protocol { system, prover, strategy, rounds, dim_cap } => {
            c::protocol(system, *prover, strategy.as_deref(), *rounds, *dim_cap, seed)
        }
        Command::Zsolve { system } => c::zsolve(system),
        Command::Cycles { presentation } => c::cycles(presentation),
        Command::RepSearch { presentation, dim_cap, any_involution } => {
            c::rep_search(presentation, *dim_cap, !any_involution)
        }
        Command::Npa { system, level } => c::npa(system, *level),
        Command::VerifyCert { presentation, certificate } => c::verify_cert(presentation, certificate),
        Command::TransportCert { presentation, certificate, word } => {
            c::transport_cert(presentation, certificate, word.as_deref())
        }
        Command::Pipeline { presentation, word, cert, max_area } => {
            cli::pipeline::pipeline(presentation, word, cert.as_deref(), *max_area, cli.out.as_deref())
        }
        Command::Analyze { system, strategy, level, rounds, dim_cap } => {
            c::analyze(system, strategy.as_deref(), *level, *rounds, *dim_cap, seed)
        }
    }
}

fn with_header(command: &str, body: Value) -> Value {
    let mut report = json!({ "schema": 1, "command": command });
    if let (Value::Object(head), Value::Object(rest)) = (&mut report, body) {
        head.extend(rest);
    }
    report
}

/// Commands whose `--out` receives an artifact rather than the report.
const WITH_ARTIFACT: [&str; 8] =
    ["compile", "hnn", "double", "solution-group", "pzk-corr", "pzk-sample", "rep-search", "transport-cert"];

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = name(&cli.command);
    let (report, code, artifact) = match run(&cli) {
        Ok(o) => (with_header(command, o.report), o.code, o.artifact),
        Err(e) => {
            eprintln!("lsgame {command}: {e}");
            (with_header(command, cli::error_json(&e)), e.exit_code(), None)
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    {
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    let written = match &cli.out {
        Some(path) if WITH_ARTIFACT.contains(&command) => artifact.map_or(Ok(()), |a| std::fs::write(path, a)),
        Some(path) if command != "pipeline" => std::fs::write(path, format!("{text}\n")),
        _ => Ok(()),
    };
    if let Err(e) = written {
        eprintln!("lsgame {command}: cannot write output: {e}");
        return ExitCode::from(5);
    }
    ExitCode::from(code as u8)
}
