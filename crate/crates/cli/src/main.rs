//! `converg` command-line front end.
//!
//! Exit status: 0 on success, 1 on user error (bad query, bad input, unknown
//! vng), 2 on storage faults (I/O, corrupt snapshot). Results go to standard
//! output and diagnostics to standard error.

mod lock;

use std::fmt;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use converg::gen::{self, GenConfig};
use converg::{engine, nquads, Error, ParseMode, Store, Term};

use lock::{Mode, StoreLock};

const STORE_ENV: &str = "CONVERG_STORE";

#[derive(Parser)]
#[command(name = "converg", version, about = "Versioned quad store with a SPARQL-subset query engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create an empty store: `init [DIR]`.
    Init {
        #[arg(value_name = "DIR")]
        operands: Vec<String>,
    },
    /// Ingest one N-Quads file as the next version: `load [DIR] FILE`.
    Load {
        #[arg(value_name = "[DIR] FILE", required = true)]
        operands: Vec<String>,
        #[arg(long)]
        label: Option<String>,
    },
    /// Run a query file, or `-` for standard input: `query [DIR] FILE`.
    Query {
        #[arg(value_name = "[DIR] FILE", required = true)]
        operands: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Triples in versioned graph A but not in B: `diff [DIR] VNG_A VNG_B`.
    Diff {
        #[arg(value_name = "[DIR] VNG_A VNG_B", required = true)]
        operands: Vec<String>,
    },
    /// Print the flat model as N-Quads: `export-flat [DIR]`.
    ExportFlat {
        #[arg(value_name = "DIR")]
        operands: Vec<String>,
    },
    /// Print store statistics as key=value lines: `stats [DIR]`.
    Stats {
        #[arg(value_name = "DIR")]
        operands: Vec<String>,
    },
    /// Write synthetic versions v0001.nq, v0002.nq, ... into --out.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        products: u32,
        #[arg(long)]
        graphs: u32,
        #[arg(long)]
        versions: u32,
        #[arg(long = "change-rate")]
        change_rate: f64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Csv,
}

/// A failure with the context needed to locate it.
struct Failure {
    command: &'static str,
    context: Option<String>,
    message: String,
    storage_fault: bool,
}

impl Failure {
    fn user(command: &'static str, context: Option<String>, message: impl Into<String>) -> Self {
        Self {
            command,
            context,
            message: message.into(),
            storage_fault: false,
        }
    }

    fn from_error(command: &'static str, context: Option<String>, e: impl Into<Error>) -> Self {
        let e = e.into();
        Self {
            command,
            context,
            storage_fault: e.is_storage_fault(),
            message: e.to_string(),
        }
    }

    fn io(command: &'static str, path: &Path, e: io::Error) -> Self {
        Self {
            command,
            context: Some(path.display().to_string()),
            message: e.to_string(),
            storage_fault: true,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "converg {}: ", self.command)?;
        if let Some(c) = &self.context {
            write!(f, "{c}: ")?;
        }
        f.write_str(&self.message)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = io::stdout().lock();
    match run(cli.command, &mut out).and_then(|()| out.flush().map_err(|e| Failure::io("output", Path::new("<stdout>"), e))) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(if f.storage_fault { 2 } else { 1 })
        }
    }
}

/// Splits `[DIR] ARGS...`: with `rest + 1` operands the first is the store,
/// with exactly `rest` the store comes from `CONVERG_STORE`.
fn store_and_args(command: &'static str, mut operands: Vec<String>, rest: usize) -> Result<(PathBuf, Vec<String>), Failure> {
    if operands.len() == rest + 1 {
        let dir = operands.remove(0);
        return Ok((PathBuf::from(dir), operands));
    }
    if operands.len() == rest {
        return match std::env::var_os(STORE_ENV) {
            Some(dir) if !dir.is_empty() => Ok((PathBuf::from(dir), operands)),
            _ => Err(Failure::user(
                command,
                None,
                format!("no store directory given and {STORE_ENV} is not set"),
            )),
        };
    }
    Err(Failure::user(command, None, format!("expected {} operand(s), got {}", rest + 1, operands.len())))
}

/// Locks an existing store and loads it. The existence check comes first so
/// that a mistyped directory does not leave a lock file behind.
fn open_store(command: &'static str, dir: &Path, mode: Mode) -> Result<(StoreLock, Store), Failure> {
    if !dir.join("MANIFEST").is_file() {
        return Err(Failure::user(
            command,
            Some(dir.display().to_string()),
            "no store here; run `converg init` first",
        ));
    }
    let held = lock(command, dir, mode)?;
    let store = Store::load_snapshot(dir).map_err(|e| Failure::from_error(command, Some(dir.display().to_string()), e))?;
    Ok((held, store))
}

fn lock(command: &'static str, dir: &Path, mode: Mode) -> Result<StoreLock, Failure> {
    StoreLock::acquire(dir, mode).map_err(|e| Failure::io(command, &lock::lock_path(dir), e))
}

fn write_out(command: &'static str, out: &mut impl Write, bytes: &[u8]) -> Result<(), Failure> {
    out.write_all(bytes).map_err(|e| Failure::io(command, Path::new("<stdout>"), e))
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Init { operands } => {
            let (dir, _) = store_and_args("init", operands, 0)?;
            let _lock = lock("init", &dir, Mode::Exclusive)?;
            if dir.join("MANIFEST").exists() {
                return Err(Failure::user("init", Some(dir.display().to_string()), "a store already exists here"));
            }
            if dir.is_dir() && dir.read_dir().map_err(|e| Failure::io("init", &dir, e))?.next().is_some() {
                return Err(Failure::user("init", Some(dir.display().to_string()), "directory is not empty"));
            }
            Store::new()
                .save_snapshot(&dir)
                .map_err(|e| Failure::from_error("init", Some(dir.display().to_string()), e))?;
            log::info!("initialised empty store at {}", dir.display());
            Ok(())
        }
        Command::Load { operands, label } => {
            let (dir, args) = store_and_args("load", operands, 1)?;
            let file = PathBuf::from(&args[0]);
            let (_lock, mut store) = open_store("load", &dir, Mode::Exclusive)?;
            let bytes = std::fs::read(&file).map_err(|e| Failure::io("load", &file, e))?;
            let ctx = || Some(file.display().to_string());
            let doc = nquads::parse_nquads(&bytes, ParseMode::Strict).map_err(|e| Failure::from_error("load", ctx(), e))?;
            let report = store
                .ingest_version(&doc, label.as_deref())
                .map_err(|e| Failure::from_error("load", ctx(), e))?;
            store
                .save_snapshot(&dir)
                .map_err(|e| Failure::from_error("load", Some(dir.display().to_string()), e))?;
            write_out("load", out, report.to_string().as_bytes())
        }
        Command::Query { operands, format } => {
            let (dir, args) = store_and_args("query", operands, 1)?;
            let source = &args[0];
            let text = if source == "-" {
                let mut s = String::new();
                io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::io("query", Path::new("<stdin>"), e))?;
                s
            } else {
                std::fs::read_to_string(source).map_err(|e| Failure::io("query", Path::new(source), e))?
            };
            let name = if source == "-" { "<stdin>".to_owned() } else { source.clone() };
            let plan = engine::prepare(&text).map_err(|e| Failure::from_error("query", Some(name.clone()), e))?;
            let (_lock, store) = open_store("query", &dir, Mode::Shared)?;
            let table = engine::execute_plan(&store, &plan, engine::EvalOptions::default())
                .map_err(|e| Failure::from_error("query", Some(name), e))?;
            let text = match format {
                Format::Tsv => table.to_tsv(),
                Format::Csv => table.to_csv(),
            };
            write_out("query", out, text.as_bytes())
        }
        Command::Diff { operands } => {
            let (dir, args) = store_and_args("diff", operands, 2)?;
            let a = vng_term(&args[0])?;
            let b = vng_term(&args[1])?;
            let (_lock, store) = open_store("diff", &dir, Mode::Shared)?;
            let triples = store.diff_vng(&a, &b).map_err(|e| Failure::from_error("diff", None, e))?;
            let mut text = String::new();
            for t in triples {
                text.push_str(&t.to_string());
                text.push('\n');
            }
            write_out("diff", out, text.as_bytes())
        }
        Command::ExportFlat { operands } => {
            let (dir, _) = store_and_args("export-flat", operands, 0)?;
            let (_lock, store) = open_store("export-flat", &dir, Mode::Shared)?;
            write_out("export-flat", out, &nquads::serialize_nquads(&store.export_flat()))
        }
        Command::Stats { operands } => {
            let (dir, _) = store_and_args("stats", operands, 0)?;
            let (_lock, store) = open_store("stats", &dir, Mode::Shared)?;
            write_out("stats", out, store.stats().to_string().as_bytes())
        }
        Command::Gen {
            out: dir,
            products,
            graphs,
            versions,
            change_rate,
            seed,
        } => {
            let cfg = GenConfig {
                products,
                graphs,
                versions,
                change_rate,
                seed,
                ..GenConfig::default()
            };
            let paths = gen::write_versions(&cfg, &dir).map_err(|e| Failure::from_error("gen", None, e))?;
            log::info!("wrote {} versions to {}", paths.len(), dir.display());
            Ok(())
        }
    }
}

/// Accepts `urn:…` or `<urn:…>`.
fn vng_term(arg: &str) -> Result<Term, Failure> {
    let inner = arg.strip_prefix('<').and_then(|s| s.strip_suffix('>')).unwrap_or(arg);
    Term::iri(inner).map_err(|e| Failure::user("diff", Some(arg.to_owned()), e.to_string()))
}
