use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use asemin::alt_sim::simulation_witness;
use asemin::io::{self, DotOptions};
use asemin::minimize::YoungerSibling;
use asemin::{check_n_conditions, compose, minimize, petc, schedule, Lts};
use clap::{Parser, Subcommand};

/// Minimize transition systems modulo alternating simulation equivalence and
/// schedule PETC traffic models on shared channels.
#[derive(Debug, Parser)]
#[command(name = "asemin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full reduction pipeline and report sizes.
    Minimize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the per-step reduction trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the minimal system as a Graphviz digraph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide alternating simulation equivalence (exit 2 if not equivalent).
    CheckAse { a: PathBuf, b: PathBuf },
    /// Build a traffic model from a traffic spec.
    GenPetc {
        spec: PathBuf,
        /// Build the reduced model (clocks capped at the earliest trigger).
        #[arg(long)]
        reduced: bool,
        /// Prefix an initialization chain of this length.
        #[arg(long, value_name = "T0")]
        init_phase: Option<u32>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Reachable synchronous product of traffic models.
    Compose {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve the collision-avoidance game (exit 2 if unschedulable).
    Schedule {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        channels: usize,
        /// Minimize every component before composing.
        #[arg(long)]
        minimize: bool,
        /// Write the winning region and strategy as JSON.
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Report the four necessary conditions of minimality.
    CheckMin { input: PathBuf },
}

type CliResult<T> = Result<T, String>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_lts(path: &Path) -> CliResult<Lts> {
    io::parse_lts(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn sizes(label: &str, s: asemin::SizeTriple) -> String {
    format!("{label:<10} {:<16} tran_size {}", s.to_string(), s.n_transitions + s.n_initial)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Minimize { input, output, trace, dot } => {
            let s = load_lts(&input)?;
            let (m, t) = minimize(&s);
            println!("{}", sizes("original", t.original));
            println!("{}", sizes("quotient", t.quotient()));
            println!("{}", sizes("minimal", t.minimal));
            if let Some(path) = output {
                write(&path, &io::emit_lts(&m))?;
            }
            if let Some(path) = trace {
                write(&path, &io::emit_json(&t))?;
            }
            if let Some(path) = dot {
                write(&path, &io::emit_dot(&m, &DotOptions::default()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckAse { a, b } => {
            let (sa, sb) = (load_lts(&a)?, load_lts(&b)?);
            let forward = simulation_witness(&sa, &sb);
            let backward = simulation_witness(&sb, &sa);
            for (label, result, left, right) in [("a -> b", &forward, &sa, &sb), ("b -> a", &backward, &sb, &sa)] {
                match result {
                    Ok(r) => {
                        println!("{label}: alternating simulation relation with {} pairs", r.len());
                        for (x, y) in r.named_pairs(left, right) {
                            println!("  ({x}, {y})");
                        }
                    }
                    Err(v) => println!("{label}: no alternating simulation; condition {} fails: {v}", v.condition()),
                }
            }
            if forward.is_ok() && backward.is_ok() {
                println!("equivalent");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("not equivalent");
                Ok(ExitCode::from(2))
            }
        }
        Command::GenPetc { spec, reduced, init_phase, output } => {
            let spec = io::parse_traffic_spec(&read(&spec)?).map_err(|e| e.to_string())?;
            let mut m =
                if reduced { petc::petc_reduced_model(&spec) } else { petc::petc_traffic_model(&spec) }.map_err(|e| e.to_string())?;
            if let Some(t0) = init_phase {
                m = petc::add_init_phase(&m, &spec, t0).map_err(|e| e.to_string())?;
            }
            println!("{}", sizes("model", m.size()));
            write(&output, &io::emit_lts(&m))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compose { models, output } => {
            let models = models.iter().map(|p| load_lts(p)).collect::<CliResult<Vec<_>>>()?;
            let g = compose(&models).map_err(|e| e.to_string())?;
            println!("{}", sizes("product", g.size()));
            write(&output, &io::emit_lts(&g))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Schedule { models, channels, minimize, strategy } => {
            let models = models.iter().map(|p| load_lts(p)).collect::<CliResult<Vec<_>>>()?;
            let start = Instant::now();
            let s = schedule(&models, channels, minimize).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            println!("{}", sizes("game", s.game.size()));
            println!("winning states: {}", s.result.winning.len());
            println!("cpu time: {:.3} s", elapsed.as_secs_f64());
            if let Some(path) = strategy {
                write(&path, &io::emit_strategy(&s.result))?;
            }
            if s.result.schedulable {
                println!("schedulable");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("unschedulable");
                Ok(ExitCode::from(2))
            }
        }
        Command::CheckMin { input } => {
            let r = check_n_conditions(&load_lts(&input)?);
            let mark = |b: bool| if b { "holds" } else { "fails" };
            println!("N1 no equivalent states:    {}", mark(r.n1));
            for (x, y) in &r.equivalent_states {
                println!("  {x} ~ {y}");
            }
            println!("N2 no dominated actions:    {}", mark(r.n2));
            for d in &r.dominated_moves {
                println!("  at {}: {} dominated by {}", d.state, d.dominated, d.by);
            }
            println!("N3 no younger siblings:     {}", mark(r.n3));
            for y in &r.younger_siblings {
                match y {
                    YoungerSibling::Transition { source, action, younger, elder } => {
                        println!("  {source} -{action}-> {younger}, sibling of {elder}")
                    }
                    YoungerSibling::Initial { younger, elder } => println!("  initial {younger}, sibling of {elder}"),
                }
            }
            println!("N4 all states reachable:    {}", mark(r.n4));
            for x in &r.unreachable {
                println!("  {x}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
