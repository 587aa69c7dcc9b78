//! `fisheco` command-line front end.
//!
//! Exit codes: 0 success, 1 validation errors, 2 usage or parse error,
//! 3 I/O error. Results go to `out`, diagnostics to `err`.

use std::fs;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fisheco_core::{
    co_fact_checkers, fact_check_events, load_fixture, match_pattern, model_schema, parse,
    regulation_chain, serialize, shared_backer, simulate, simulate_batch, to_dot, to_graphml,
    uncovered_items, Execution, Fixture, Pattern, ScenarioGraph, SchemaId, SpreadParams,
    StyleMap, PRNG_NAME,
};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fisheco", version, about = "Ontology engine for false-information and fact-checking ecosystems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the builtin schema catalogs.
    Schema {
        #[command(subcommand)]
        action: SchemaAction,
    },
    /// Parse and validate a scenario file.
    Validate { file: PathBuf },
    /// Run a named query against a scenario.
    ///
    /// Queries and their arguments:
    ///   fact-check-events <target>
    ///   co-fact-checkers <target>
    ///   uncovered
    ///   shared-backer <a> <b>
    ///   regulation-chain <entity>
    ///   match <pattern>
    ///
    /// Patterns list typed variables, then edges after a semicolon:
    ///   "x:FO, y:UGC; x -fact_checked-> y"
    /// A bare `x` leaves the type open, `y:P{fact_checking=true}` filters on
    /// attributes, `-*->` matches any verb and `-verb@past->` pins the tense.
    #[command(verbatim_doc_comment)]
    Query {
        file: PathBuf,
        #[arg(value_enum)]
        name: QueryName,
        args: Vec<String>,
        /// Emit a JSON array instead of tab-separated rows.
        #[arg(long)]
        json: bool,
        /// Maximum belongs_to path length searched by shared-backer.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Render a scenario as DOT, GraphML or JSON.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Draw true boolean attributes as separate ellipse nodes (DOT only).
        #[arg(long)]
        attrs_as_nodes: bool,
        /// Write to this file instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Simulate the spread of an information item.
    ///
    /// Prints one JSON metadata line, then CSV `step,exposed`
    /// (or `seed,step,exposed` with --seeds).
    Simulate {
        file: PathBuf,
        #[arg(long)]
        item: String,
        #[arg(long = "p")]
        p_share: f64,
        #[arg(long)]
        damp: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Batch mode over a half-open seed range such as `0..100`.
        #[arg(long, value_parser = parse_seed_range)]
        seeds: Option<Range<u64>>,
    },
    /// List or print the shipped scenario fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Debug, Subcommand)]
enum SchemaAction {
    /// Print a catalog table: A, B or merged.
    Show {
        #[arg(value_parser = parse_model)]
        model: SchemaId,
    },
}

#[derive(Debug, Subcommand)]
enum FixtureAction {
    List,
    Dump { name: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QueryName {
    FactCheckEvents,
    CoFactCheckers,
    Uncovered,
    SharedBacker,
    RegulationChain,
    Match,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Graphml,
    Json,
}

fn parse_model(s: &str) -> Result<SchemaId, String> {
    match s.parse::<SchemaId>() {
        Ok(id @ (SchemaId::A | SchemaId::B | SchemaId::Merged)) => Ok(id),
        _ => Err(format!("expected A, B or merged, got {s:?}")),
    }
}

fn parse_seed_range(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 0..100, got {s:?}"))?;
    let start = a.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let end = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
    if start >= end {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok(start..end)
}

/// Command failure carrying its exit code and message.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Schema { action: SchemaAction::Show { model } } => {
            let schema = model_schema(model).map_err(|e| Failure::usage(e.to_string()))?;
            emit(out, &schema.render_table())
        }
        Command::Validate { file } => {
            let text = read(&file)?;
            let g = match parse(&text) {
                Ok(g) => g,
                Err(e) if e.is_semantic() => {
                    emit(out, &format!("{}:{e}\n1 error(s), 0 warning(s)\n", file.display()))?;
                    return Ok(EXIT_INVALID);
                }
                Err(e) => return Err(Failure::usage(format!("{}:{e}", file.display()))),
            };
            let report = g.validate();
            emit(out, &format!("{report}\n"))?;
            Ok(if report.has_errors() { EXIT_INVALID } else { EXIT_OK })
        }
        Command::Query { file, name, args, json, depth } => {
            let g = load(&file)?;
            query(&g, name, &args, json, depth, out)
        }
        Command::Export { file, format, attrs_as_nodes, out: target } => {
            let g = load(&file)?;
            let text = match format {
                ExportFormat::Dot => {
                    to_dot(&g, &StyleMap::default().with_attrs_as_nodes(attrs_as_nodes))
                }
                ExportFormat::Graphml => to_graphml(&g),
                ExportFormat::Json => g.to_json(),
            };
            match target {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
                    Ok(EXIT_OK)
                }
                None => emit(out, &text),
            }
        }
        Command::Simulate { file, item, p_share, damp, steps, seed, seeds } => {
            let g = load(&file)?;
            let params = SpreadParams { p_share, damp, steps, seed };
            simulate_cmd(&g, &item, params, seeds, out)
        }
        Command::Fixtures { action: FixtureAction::List } => {
            let names: String = Fixture::ALL.iter().map(|f| format!("{}\n", f.name())).collect();
            emit(out, &names)
        }
        Command::Fixtures { action: FixtureAction::Dump { name } } => {
            let g = load_fixture(&name).map_err(|e| Failure::usage(e.to_string()))?;
            emit(out, &serialize(&g))
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure { code: EXIT_IO, message: format!("writing output: {e}") })?;
    Ok(EXIT_OK)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<ScenarioGraph, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn arg<'a>(args: &'a [String], n: usize, what: &str) -> Result<&'a str, Failure> {
    if args.len() != n {
        return Err(Failure::usage(format!("{what} takes {n} argument(s), got {}", args.len())));
    }
    Ok(&args[0])
}

fn opt_text<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_owned(), ToString::to_string)
}

fn query(
    g: &ScenarioGraph,
    name: QueryName,
    args: &[String],
    json: bool,
    depth: usize,
    out: &mut dyn Write,
) -> CmdResult {
    let fail = |e: fisheco_core::QueryError| Failure::usage(e.to_string());
    let (value, rows): (serde_json::Value, Vec<String>) = match name {
        QueryName::FactCheckEvents => {
            let target = arg(args, 1, "fact-check-events")?;
            let events = fact_check_events(g, target).map_err(fail)?;
            let rows = events
                .iter()
                .map(|e| {
                    format!(
                        "{}\t{}\t{}\t{}\t{}",
                        e.checker_id,
                        e.checker_type,
                        e.tense,
                        opt_text(&e.date),
                        opt_text(&e.report_id)
                    )
                })
                .collect();
            (json!(events), rows)
        }
        QueryName::CoFactCheckers => {
            let target = arg(args, 1, "co-fact-checkers")?;
            let set = co_fact_checkers(g, target).map_err(fail)?;
            (json!(set), set.into_iter().collect())
        }
        QueryName::Uncovered => {
            if !args.is_empty() {
                return Err(Failure::usage(format!("uncovered takes no arguments, got {}", args.len())));
            }
            let items = uncovered_items(g);
            (json!(items), items)
        }
        QueryName::SharedBacker => {
            if args.len() != 2 {
                return Err(Failure::usage(format!("shared-backer takes 2 arguments, got {}", args.len())));
            }
            let found = shared_backer(g, &args[0], &args[1], depth).map_err(fail)?;
            let rows = found
                .iter()
                .map(|s| format!("{}\t{}\t{}", s.backer, s.path_a.join(" > "), s.path_b.join(" > ")))
                .collect();
            (json!(found), rows)
        }
        QueryName::RegulationChain => {
            let entity = arg(args, 1, "regulation-chain")?;
            let links = regulation_chain(g, entity).map_err(fail)?;
            let rows = links
                .iter()
                .map(|l| {
                    let instruments =
                        if l.instruments.is_empty() { "-".to_owned() } else { l.instruments.join(",") };
                    format!("{}\t{}\t{instruments}", l.regulator, l.tense)
                })
                .collect();
            (json!(links), rows)
        }
        QueryName::Match => {
            let text = arg(args, 1, "match")?;
            let pattern = Pattern::parse(text).map_err(fail)?;
            let found = match_pattern(g, &pattern).map_err(fail)?;
            let rows = found
                .iter()
                .map(|b| b.pairs().iter().map(|(v, id)| format!("{v}={id}")).collect::<Vec<_>>().join("\t"))
                .collect();
            (json!(found), rows)
        }
    };
    if json {
        emit(out, &format!("{value}\n"))
    } else {
        emit(out, &rows.iter().map(|r| format!("{r}\n")).collect::<String>())
    }
}

fn simulate_cmd(
    g: &ScenarioGraph,
    item: &str,
    params: SpreadParams,
    seeds: Option<Range<u64>>,
    out: &mut dyn Write,
) -> CmdResult {
    let fail = |e: fisheco_core::SimError| Failure::usage(e.to_string());
    let seed_meta = match &seeds {
        Some(r) => json!({ "start": r.start, "end": r.end }),
        None => json!(params.seed),
    };
    let meta = json!({
        "item": item,
        "p_share": params.p_share,
        "damp": params.damp,
        "steps": params.steps,
        "seed": seed_meta,
        "prng": PRNG_NAME,
    });
    let mut text = String::new();
    match seeds {
        None => {
            let t = simulate(g, item, &params).map_err(fail)?;
            text.push_str(&format!("{meta}\nstep,exposed\n"));
            for (step, n) in t.exposed_per_step.iter().enumerate() {
                text.push_str(&format!("{step},{n}\n"));
            }
        }
        Some(range) => {
            let runs = simulate_batch(g, item, &params, range, Execution::default()).map_err(fail)?;
            text.push_str(&format!("{meta}\nseed,step,exposed\n"));
            for (seed, t) in runs {
                for (step, n) in t.exposed_per_step.iter().enumerate() {
                    text.push_str(&format!("{seed},{step},{n}\n"));
                }
            }
        }
    }
    emit(out, &text)
}
