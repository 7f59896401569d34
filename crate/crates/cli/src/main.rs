//! `dmm`: check, run and inspect dataflow matrix machine programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use dmm_core::dsl::{load, parse, validate, Diagnostic, Network};
use dmm_core::engine::{Engine, TraceEvent};
use dmm_core::signature::Direction;
use dmm_core::transforms::Registry;

#[derive(Parser)]
#[command(name = "dmm", version, about = "Run dataflow matrix machine programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a program, printing diagnostics.
    Check { file: PathBuf },
    /// Run a program until it halts or the tick limit is reached.
    Run(RunArgs),
    /// Print the network matrix, at load time or after some ticks.
    Dump {
        file: PathBuf,
        /// Run this many ticks first.
        #[arg(long)]
        at: Option<u64>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    file: PathBuf,
    /// Data for an input neuron, as `name=text`. Repeatable.
    #[arg(long = "feed", value_name = "NAME=TEXT", value_parser = name_value)]
    feeds: Vec<(String, String)>,
    /// Ticks per character for a fed string, as `name=k`. Defaults to 1.
    #[arg(long = "rate", value_name = "NAME=K", value_parser = name_rate)]
    rates: Vec<(String, u32)>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    max_ticks: u64,
    /// Port alias to record in the trace. Repeatable.
    #[arg(long = "watch", value_name = "ALIAS")]
    watches: Vec<String>,
    /// Write the trace here. Without it, watched values go to standard output.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the matrix after this tick (0 is load time). Repeatable.
    #[arg(long = "dump-at", value_name = "TICK")]
    dump_at: Vec<u64>,
}

fn name_value(s: &str) -> Result<(String, String), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    Ok((name.to_string(), value.to_string()))
}

fn name_rate(s: &str) -> Result<(String, u32), String> {
    let (name, k) = name_value(s)?;
    match k.parse::<u32>() {
        Ok(k) if k >= 1 => Ok((name, k)),
        _ => Err(format!("rate must be a positive integer, got `{k}`")),
    }
}

enum Failure {
    Program(String),
    Io(String),
    Timeout,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Program(_) => 1,
            Failure::Io(_) => 2,
            Failure::Timeout => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are program errors; 2 is kept for I/O failures.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Check { file } => check(&file),
        Command::Run(args) => run(&args),
        Command::Dump { file, at } => dump(&file, at),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Program(msg) | Failure::Io(msg) if !msg.is_empty() => eprintln!("error: {msg}"),
                _ => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn report(path: &Path, diagnostics: &[Diagnostic]) {
    let mut sorted: Vec<&Diagnostic> = diagnostics.iter().collect();
    sorted.sort_by_key(|d| d.span);
    for d in sorted {
        eprintln!("{}:{d}", path.display());
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn check(path: &Path) -> Result<(), Failure> {
    let src = read(path)?;
    let diagnostics = match parse(&src) {
        Ok(program) => validate(&program, &Registry::standard()),
        Err(e) => e.diagnostics,
    };
    report(path, &diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        // Already reported line by line.
        return Err(Failure::Program(String::new()));
    }
    Ok(())
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    let src = read(path)?;
    let program = parse(&src).map_err(|e| {
        report(path, &e.diagnostics);
        Failure::Program(String::new())
    })?;
    let net = load(&program, &Registry::standard()).map_err(|e| {
        report(path, &e.diagnostics);
        Failure::Program(String::new())
    })?;
    report(path, net.warnings());
    Ok(net)
}

fn start(net: &Network) -> Result<Engine, Failure> {
    net.engine(Arc::new(Registry::standard())).map_err(|e| Failure::Program(e.to_string()))
}

fn print_dump(engine: &Engine, heading: Option<u64>) {
    if let Some(tick) = heading {
        println!("# matrix at tick {tick}");
    }
    print!("{}", engine.matrix().dump(engine.signature()));
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let net = load_network(&args.file)?;
    let mut engine = start(&net)?;

    let rates: BTreeMap<&str, u32> = args.rates.iter().map(|(n, k)| (n.as_str(), *k)).collect();
    for name in rates.keys() {
        if !args.feeds.iter().any(|(n, _)| n == name) {
            return Err(Failure::Program(format!("--rate given for `{name}`, which has no --feed")));
        }
    }
    for (name, text) in &args.feeds {
        let rate = rates.get(name.as_str()).copied().unwrap_or(1);
        let (neuron, binding) = net.feed(name, text, rate).map_err(Failure::Program)?;
        engine.bind(neuron, binding);
    }
    for alias in &args.watches {
        let port = net
            .port(alias, Direction::Output)
            .or_else(|_| net.port(alias, Direction::Input))
            .map_err(|e| Failure::Program(format!("--watch {alias}: {e}")))?;
        engine.watch(port);
    }

    let mut sink: Box<dyn Write> = match &args.trace {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        )),
        None if args.watches.is_empty() => Box::new(io::sink()),
        None => Box::new(io::stdout()),
    };
    let dump_at: BTreeSet<u64> = args.dump_at.iter().copied().collect();
    if dump_at.contains(&0) {
        print_dump(&engine, Some(0));
    }

    let outcome = drive(&mut engine, args.max_ticks, &dump_at, &mut sink);
    let flushed = sink.flush().map_err(|e| Failure::Io(format!("trace: {e}")));
    outcome?;
    flushed?;

    match engine.halt() {
        Some(h) => {
            println!("answer={} tick={}", h.answer, h.tick);
            Ok(())
        }
        None => {
            println!("timeout tick={}", engine.tick_count());
            Err(Failure::Timeout)
        }
    }
}

fn drive(engine: &mut Engine, max_ticks: u64, dump_at: &BTreeSet<u64>, sink: &mut dyn Write) -> Result<(), Failure> {
    for _ in 0..max_ticks {
        let mut written = Ok(());
        let ticked = engine.tick_with(&mut |event: &TraceEvent| {
            if written.is_ok() {
                written = writeln!(sink, "{}", event.to_json());
            }
        });
        written.map_err(|e| Failure::Io(format!("trace: {e}")))?;
        ticked.map_err(|e| Failure::Program(e.to_string()))?;
        if dump_at.contains(&engine.tick_count()) {
            print_dump(engine, Some(engine.tick_count()));
        }
        if engine.halt().is_some() {
            break;
        }
    }
    Ok(())
}

fn dump(path: &Path, at: Option<u64>) -> Result<(), Failure> {
    let net = load_network(path)?;
    let mut engine = start(&net)?;
    for _ in 0..at.unwrap_or(0) {
        if engine.halt().is_some() {
            break;
        }
        engine.tick().map_err(|e| Failure::Program(e.to_string()))?;
    }
    print_dump(&engine, None);
    Ok(())
}
