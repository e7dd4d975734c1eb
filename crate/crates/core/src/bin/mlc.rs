//! Command-line driver for the mu-lambda calculus toolkit.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mulambda::corpus::run_corpus_dir;
use mulambda::interp::{default_env, interp, Fuel, DEFAULT_FUEL};
use mulambda::ir::{comp, default_env as default_comp_env, node_to_dot, Arena, NodeId};
use mulambda::ports::{bind_ports, PortBinding};
use mulambda::rewrite::{reduce_once, reduce_with_trace, DagContext};
use mulambda::sexpr::read_sexpr;
use mulambda::syntax::{parse, syntax_to_dot, SyntaxNode};

#[derive(Parser)]
#[command(
    name = "mlc",
    version,
    about = "Parse, interpret, compile, and normalize mu-lambda calculus programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a source file and dump its syntax tree
    Parse {
        file: PathBuf,
        /// Write the syntax tree as a DOT digraph to this path
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Interpret a source file and print the resulting value
    Run {
        file: PathBuf,
        /// Step budget for the interpreter
        #[arg(long, value_name = "N")]
        fuel: Option<u64>,
    },
    /// Compile a source file to the value graph without reducing it
    Compile {
        file: PathBuf,
        /// Write the compiled graph as a DOT digraph to this path
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Compile a source file and reduce it to normal form
    Reduce {
        file: PathBuf,
        /// Apply a single parallel reduction step instead of the fixpoint
        #[arg(long)]
        once: bool,
        /// Write the reduced graph as a DOT digraph to this path
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        /// Write one DOT file per rewriting step into this directory
        #[arg(long, value_name = "DIR")]
        trace: Option<PathBuf>,
        /// Close a delta port, e.g. --bind in=9 (literals: integer, #t, #f, ())
        #[arg(long = "bind", value_name = "NAME=LITERAL")]
        bind: Vec<String>,
    },
    /// Run a differential corpus: interpreter as oracle, reducer as subject
    Diff {
        corpus_dir: PathBuf,
        /// Oracle step budget applied to entries without a fuel override
        #[arg(long, value_name = "N")]
        fuel: Option<u64>,
    },
    /// Interactive loop: expressions are compiled and reduced; `:i EXPR`
    /// interprets, `:dot PATH` saves the last graph, `:q` quits
    Repl,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Parse { file, dot } => cmd_parse(&file, dot.as_deref()),
        Command::Run { file, fuel } => cmd_run(&file, fuel),
        Command::Compile { file, dot } => cmd_compile(&file, dot.as_deref()),
        Command::Reduce {
            file,
            once,
            dot,
            trace,
            bind,
        } => cmd_reduce(&file, once, dot.as_deref(), trace.as_deref(), &bind),
        Command::Diff { corpus_dir, fuel } => cmd_diff(&corpus_dir, fuel),
        Command::Repl => repl(),
    }
}

fn load_syntax(file: &Path) -> Result<SyntaxNode, String> {
    let text = fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {}", file.display(), e))?;
    let sexpr = read_sexpr(&text).map_err(|e| e.to_string())?;
    parse(&sexpr).map_err(|e| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {}", path.display(), e))
}

fn cmd_parse(file: &Path, dot: Option<&Path>) -> Result<ExitCode, String> {
    let syntax = load_syntax(file)?;
    print!("{}", syntax.pretty());
    if let Some(path) = dot {
        write_file(path, &syntax_to_dot(&syntax))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(file: &Path, fuel: Option<u64>) -> Result<ExitCode, String> {
    let syntax = load_syntax(file)?;
    let mut fuel = Fuel::new(fuel.unwrap_or(DEFAULT_FUEL));
    let value = interp(&default_env(), &syntax, &mut fuel).map_err(|e| e.to_string())?;
    println!("{}", value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_compile(file: &Path, dot: Option<&Path>) -> Result<ExitCode, String> {
    let syntax = load_syntax(file)?;
    let mut arena = Arena::new();
    let env = default_comp_env(&mut arena);
    let root = comp(&mut arena, &env, &syntax).map_err(|e| e.to_string())?;
    println!("{}", arena.printed(root));
    if let Some(path) = dot {
        write_file(path, &node_to_dot(&arena, root))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_bind_literal(arena: &mut Arena, literal: &str) -> Result<NodeId, String> {
    let sexpr = read_sexpr(literal).map_err(|e| format!("bad binding literal: {}", e))?;
    let syntax = parse(&sexpr).map_err(|e| format!("bad binding literal: {}", e))?;
    match syntax {
        SyntaxNode::Integer(_)
        | SyntaxNode::True
        | SyntaxNode::False
        | SyntaxNode::Unit => {
            comp(arena, &mulambda::ir::CompEnv::empty(), &syntax).map_err(|e| e.to_string())
        }
        _ => Err(format!(
            "binding literal must be an integer, #t, #f, or (), got `{}`",
            literal
        )),
    }
}

fn parse_bindings(arena: &mut Arena, specs: &[String]) -> Result<PortBinding, String> {
    let mut bindings = PortBinding::new();
    for spec in specs {
        let Some((name, literal)) = spec.split_once('=') else {
            return Err(format!("binding must look like name=literal, got `{}`", spec));
        };
        let node = parse_bind_literal(arena, literal)?;
        bindings.bind(name.trim(), node);
    }
    Ok(bindings)
}

fn cmd_reduce(
    file: &Path,
    once: bool,
    dot: Option<&Path>,
    trace: Option<&Path>,
    bind: &[String],
) -> Result<ExitCode, String> {
    let syntax = load_syntax(file)?;
    let mut arena = Arena::new();
    let env = default_comp_env(&mut arena);
    let compiled = comp(&mut arena, &env, &syntax).map_err(|e| e.to_string())?;
    let bindings = parse_bindings(&mut arena, bind)?;
    let mut ctx = DagContext::new();
    let root = if bindings.is_empty() {
        compiled
    } else {
        bind_ports(&mut arena, &mut ctx, compiled, &bindings)
    };

    // snapshots are rendered eagerly and written once reduction is done
    let mut snapshots = vec![node_to_dot(&arena, root)];
    let reduced = if once {
        reduce_once(&mut arena, &mut ctx, root).map_err(|e| e.to_string())?
    } else {
        let wants_trace = trace.is_some();
        let mut record = |arena: &Arena, node: NodeId| {
            if wants_trace {
                snapshots.push(node_to_dot(arena, node));
            }
        };
        reduce_with_trace(&mut arena, &mut ctx, root, &mut record).map_err(|e| e.to_string())?
    };
    println!("{}", arena.printed(reduced));

    if let Some(path) = dot {
        write_file(path, &node_to_dot(&arena, reduced))?;
    }
    if let Some(dir) = trace {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {}", dir.display(), e))?;
        snapshots.push(node_to_dot(&arena, reduced));
        for (index, snapshot) in snapshots.iter().enumerate() {
            write_file(&dir.join(format!("step-{:04}.dot", index)), snapshot)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_diff(corpus_dir: &Path, fuel: Option<u64>) -> Result<ExitCode, String> {
    let report = run_corpus_dir(corpus_dir, fuel).map_err(|e| e.to_string())?;
    print!("{}", report);
    if report.failed() > 0 {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn repl() -> Result<ExitCode, String> {
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    let mut last_graph: Option<(Arena, NodeId)> = None;
    loop {
        write!(stdout, "mlc> ").ok();
        stdout.flush().ok();
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => return Ok(ExitCode::SUCCESS),
            Ok(_) => {}
            Err(e) => return Err(e.to_string()),
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == ":q" {
            return Ok(ExitCode::SUCCESS);
        }
        if let Some(path) = line.strip_prefix(":dot ") {
            match &last_graph {
                Some((arena, root)) => {
                    match write_file(Path::new(path.trim()), &node_to_dot(arena, *root)) {
                        Ok(()) => println!("wrote {}", path.trim()),
                        Err(e) => println!("error: {}", e),
                    }
                }
                None => println!("error: no graph yet"),
            }
            continue;
        }
        if let Some(expr) = line.strip_prefix(":i ") {
            match eval_line(expr) {
                Ok(printed) => println!("{}", printed),
                Err(e) => println!("error: {}", e),
            }
            continue;
        }
        match reduce_line(line) {
            Ok((arena, root)) => {
                match diagnose_stuck(&arena, root) {
                    Some(message) => println!("error: {}", message),
                    None => println!("{}", arena.printed(root)),
                }
                last_graph = Some((arena, root));
            }
            Err(e) => println!("error: {}", e),
        }
    }
}

/// A normal form can be stuck on a redex that no amount of further
/// information could fix, e.g. projecting a pair out of an integer. Report
/// those as type mismatches so the loop matches the interpreter's verdict.
fn diagnose_stuck(arena: &Arena, root: NodeId) -> Option<String> {
    use mulambda::ir::NodeData;
    let constant = |id: NodeId| arena.is_ground(id);
    for id in arena.reachable(root) {
        let complaint = match *arena.node(id) {
            NodeData::First(pair) | NodeData::Second(pair)
                if constant(pair) && !matches!(arena.node(pair), NodeData::Pair { .. }) =>
            {
                format!("projection expects a pair, got {}", arena.printed(pair))
            }
            NodeData::Case { value, .. }
                if constant(value)
                    && !matches!(
                        arena.node(value),
                        NodeData::InjectLeft(_) | NodeData::InjectRight(_)
                    ) =>
            {
                format!("case expects an injection, got {}", arena.printed(value))
            }
            NodeData::If { condition, .. }
                if constant(condition)
                    && !matches!(arena.node(condition), NodeData::True | NodeData::False) =>
            {
                format!(
                    "if condition must be a boolean, got {}",
                    arena.printed(condition)
                )
            }
            NodeData::Apply { functional, .. } if constant(functional) => {
                format!(
                    "cannot apply non-functional value {}",
                    arena.printed(functional)
                )
            }
            _ => continue,
        };
        return Some(format!("type mismatch: {}", complaint));
    }
    None
}

fn eval_line(text: &str) -> Result<String, String> {
    let sexpr = read_sexpr(text).map_err(|e| e.to_string())?;
    let syntax = parse(&sexpr).map_err(|e| e.to_string())?;
    let mut fuel = Fuel::default();
    let value = interp(&default_env(), &syntax, &mut fuel).map_err(|e| e.to_string())?;
    Ok(value.to_string())
}

fn reduce_line(text: &str) -> Result<(Arena, NodeId), String> {
    let sexpr = read_sexpr(text).map_err(|e| e.to_string())?;
    let syntax = parse(&sexpr).map_err(|e| e.to_string())?;
    let mut arena = Arena::new();
    let env = default_comp_env(&mut arena);
    let compiled = comp(&mut arena, &env, &syntax).map_err(|e| e.to_string())?;
    let mut ctx = DagContext::new();
    let reduced =
        mulambda::rewrite::reduce(&mut arena, &mut ctx, compiled).map_err(|e| e.to_string())?;
    Ok((arena, reduced))
}
