//! Command-line front end: generation, solving, verification, oracle
//! queries and corpus benchmarking over the text formats of the library.
//!
//! Exit codes: 0 success; 1 certificate rejected by `verify`; 2 parse
//! errors or invalid parameters; 3 generation failure; 4 solver
//! precondition violation; 5 not 2-colorable; 6 internal invariant
//! violation (or an unverified benchmark row); 7 oracle input above the
//! exhaustive limit.

mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use freevertex::colorer::{self, ColorerError};
use freevertex::convert::instance_from_hypergraph;
use freevertex::gen;
use freevertex::hypergraph::{ColoringCertificate, Hypergraph};
use freevertex::io::{self, CertificateFile};
use freevertex::nae::NaeInstance;
use freevertex::oracle::{self, VerifyReason};
use freevertex::solver::{self, SolverError};
use freevertex::{GenError, OracleError};

pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

impl From<io::ParseError> for CliError {
    fn from(e: io::ParseError) -> Self {
        CliError::new(2, format!("parse error: {e}"))
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::InvalidParams(_) => CliError::new(2, e.to_string()),
            GenError::GenerationFailed { .. } => CliError::new(3, e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Precondition(_) => CliError::new(4, e.to_string()),
            SolverError::Internal(_) => CliError::new(6, e.to_string()),
        }
    }
}

impl From<ColorerError> for CliError {
    fn from(e: ColorerError) -> Self {
        match e {
            ColorerError::NotTwoColorable => CliError::new(5, e.to_string()),
            ColorerError::Precondition(_) => CliError::new(4, e.to_string()),
            ColorerError::Internal(_) => CliError::new(6, e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => CliError::new(7, e.to_string()),
            OracleError::InvalidColoring { .. } => CliError::new(2, e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "freevertex",
    version,
    about = "2-colorings with a free vertex for 4-regular 4-uniform hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named or random instance in its text format.
    Gen(GenArgs),
    /// Solve an instance and emit a re-verified JSON certificate.
    Solve(SolveArgs),
    /// Check a JSON certificate against an instance.
    Verify(VerifyArgs),
    /// Exhaustive ground-truth queries on small instances.
    Oracle(OracleArgs),
    /// Run a corpus of seeded solves and emit a CSV summary.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Fano,
    FanoComplement,
    Complete,
    PropFamily,
    RandomRegular,
    RandomLemma,
    RandomNae,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Vertex or variable count.
    #[arg(long)]
    n: Option<usize>,
    /// Edge size / regularity for `complete` and `random-regular`.
    #[arg(long)]
    k: Option<usize>,
    /// Block count for `prop-family`.
    #[arg(long)]
    s: Option<usize>,
    /// Clause count for `random-nae`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; without it the object goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    NaeFree,
    FreeVertex,
    TwoColor,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Hg,
    Cnf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    mode: SolveMode,
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override extension-based input format detection.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Dump the reduction trace to stderr.
    #[arg(long)]
    trace: bool,
    /// On an internal invariant violation, re-solve exhaustively when
    /// within the limit and mark the certificate as a fallback.
    #[arg(long)]
    fallback_oracle: bool,
    /// Exhaustive-oracle limit (also FREEVERTEX_LIMIT).
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    certificate: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleQuery {
    Sat,
    FreeVars,
    FreeSets,
    Fixed,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(value_enum)]
    query: OracleQuery,
    /// Set size for `free-sets`.
    #[arg(long, default_value_t = 1)]
    size: usize,
    /// Coloring certificate for `fixed`.
    #[arg(long)]
    coloring: Option<PathBuf>,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON corpus description; see `bench::CorpusItem`.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => bench::cmd_bench(args.corpus, args.out, args.jobs),
    }
}

fn effective_limit(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("FREEVERTEX_LIMIT")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(oracle::DEFAULT_EXHAUSTIVE_LIMIT)
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::new(2, format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str, counts: &str) -> CliResult<()> {
    match path {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| CliError::new(2, format!("cannot write {}: {e}", path.display())))?;
            println!("{counts}");
        }
        None => {
            print!("{content}");
            eprintln!("{counts}");
        }
    }
    Ok(())
}

fn require_param(value: Option<usize>, name: &str) -> CliResult<usize> {
    value.ok_or_else(|| CliError::new(2, format!("missing required parameter --{name}")))
}

fn cmd_gen(args: GenArgs) -> CliResult<()> {
    enum Object {
        H(Hypergraph),
        I(NaeInstance),
    }
    let object = match args.kind {
        GenKind::Fano => Object::H(gen::fano()),
        GenKind::FanoComplement => Object::H(gen::complement(&gen::fano())),
        GenKind::Complete => {
            let n = require_param(args.n, "n")?;
            let k = require_param(args.k, "k")?;
            Object::H(gen::complete_uniform(n, k)?)
        }
        GenKind::PropFamily => {
            let s = require_param(args.s, "s")?;
            Object::I(gen::proposition_family(s)?)
        }
        GenKind::RandomRegular => {
            let n = require_param(args.n, "n")?;
            let k = require_param(args.k, "k")?;
            Object::H(gen::random_regular_uniform(n, k, args.seed)?)
        }
        GenKind::RandomLemma => {
            let n = require_param(args.n, "n")?;
            Object::H(gen::random_lemma_instance(n, args.seed)?)
        }
        GenKind::RandomNae => {
            let n = require_param(args.n, "n")?;
            let m = require_param(args.m, "m")?;
            Object::I(gen::random_nae_instance(n, m, args.seed)?)
        }
    };
    match object {
        Object::H(h) => write_output(
            args.out.as_deref(),
            &io::write_hypergraph(&h),
            &format!("vertices={} edges={}", h.vertex_count(), h.edge_count()),
        ),
        Object::I(i) => write_output(
            args.out.as_deref(),
            &io::write_nae_instance(&i),
            &format!("variables={} clauses={}", i.var_count(), i.clause_count()),
        ),
    }
}

fn detect_format(path: &Path, flag: Option<Format>) -> CliResult<Format> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("hg") => Ok(Format::Hg),
        Some("cnf") => Ok(Format::Cnf),
        other => Err(CliError::new(
            2,
            format!("cannot infer format from extension {other:?}; pass --format"),
        )),
    }
}

fn emit_certificate(out: Option<&Path>, file: &CertificateFile) -> CliResult<()> {
    let json = file.to_json();
    match out {
        Some(path) => fs::write(path, json.as_bytes())
            .map_err(|e| CliError::new(2, format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let limit = effective_limit(args.limit);
    let text = read_file(&args.input)?;
    match args.mode {
        SolveMode::TwoColor => {
            let h = parse_as_hypergraph(&text, detect_format(&args.input, args.format)?)?;
            let coloring = colorer::two_color(&h)?;
            let cert = ColoringCertificate {
                coloring,
                free_vertex: None,
            };
            let verdict = oracle::verify_coloring_certificate(&h, &cert);
            if !verdict.ok {
                return Err(CliError::new(6, "produced coloring failed re-verification"));
            }
            emit_certificate(args.out.as_deref(), &CertificateFile::from_coloring(&cert))
        }
        SolveMode::FreeVertex => {
            let h = parse_as_hypergraph(&text, detect_format(&args.input, args.format)?)?;
            let cert = match colorer::solve_free_vertex_detailed(&h) {
                Ok((cert, stats)) => {
                    if args.trace {
                        eprintln!(
                            "components={} early-exits={} walks={} absorbed={} nae-solves={}",
                            stats.components,
                            stats.early_exits,
                            stats.walks.len(),
                            stats.absorbed_components,
                            stats.nae_solves
                        );
                    }
                    CertificateFile::from_coloring(&cert)
                }
                Err(ColorerError::Internal(msg)) if args.fallback_oracle => {
                    eprintln!("internal invariant violated ({msg}); falling back to the oracle");
                    let report = oracle::free_vertices(&h, limit)?;
                    let Some(witness) = report.witnesses.first() else {
                        return Err(CliError::new(6, "oracle found no free vertex either"));
                    };
                    let mut file = CertificateFile::from_coloring(witness);
                    file.fallback = true;
                    file
                }
                Err(e) => return Err(e.into()),
            };
            let cert_checked = cert.to_coloring().map_err(CliError::from)?;
            let verdict = oracle::verify_coloring_certificate(&h, &cert_checked);
            if !verdict.ok {
                return Err(CliError::new(
                    6,
                    "produced certificate failed re-verification",
                ));
            }
            emit_certificate(args.out.as_deref(), &cert)
        }
        SolveMode::NaeFree => {
            let i = parse_as_instance(&text, detect_format(&args.input, args.format)?)?;
            let (result, trace) = solver::solve_free_with_trace(&i);
            let cert = match result {
                Ok(certificate) => {
                    if args.trace {
                        eprintln!("{}", trace.dump());
                    }
                    CertificateFile::from_nae(&certificate)
                }
                Err(SolverError::Internal(msg)) => {
                    eprintln!("{}", trace.dump());
                    if !args.fallback_oracle {
                        return Err(SolverError::Internal(msg).into());
                    }
                    eprintln!("internal invariant violated ({msg}); falling back to the oracle");
                    let report = oracle::free_variables(&i, limit)?;
                    let Some(witness) = report.witnesses.first() else {
                        return Err(CliError::new(6, "oracle found no free variable either"));
                    };
                    let mut file = CertificateFile::from_nae(witness);
                    file.fallback = true;
                    file
                }
                Err(e) => return Err(e.into()),
            };
            let cert_checked = cert.to_nae().map_err(CliError::from)?;
            let verdict = oracle::verify_nae_certificate(&i, &cert_checked);
            if !verdict.ok {
                return Err(CliError::new(
                    6,
                    "produced certificate failed re-verification",
                ));
            }
            emit_certificate(args.out.as_deref(), &cert)
        }
    }
}

fn parse_as_hypergraph(text: &str, format: Format) -> CliResult<Hypergraph> {
    match format {
        Format::Hg => Ok(io::parse_hypergraph(text)?),
        Format::Cnf => Err(CliError::new(2, "this command needs a hypergraph input")),
    }
}

fn parse_as_instance(text: &str, format: Format) -> CliResult<NaeInstance> {
    match format {
        Format::Cnf => Ok(io::parse_nae_instance(text)?),
        Format::Hg => {
            let h = io::parse_hypergraph(text)?;
            Ok(instance_from_hypergraph(&h, true)
                .map_err(|e| CliError::new(2, format!("conversion failed: {e}")))?)
        }
    }
}

fn reasons_json(reasons: &[VerifyReason]) -> Vec<String> {
    reasons.iter().map(|r| r.to_string()).collect()
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let instance_text = read_file(&args.instance)?;
    let cert_file = CertificateFile::parse(&read_file(&args.certificate)?)?;
    let format = detect_format(&args.instance, args.format)?;
    let verdict = match (format, cert_file.kind.as_str()) {
        (Format::Hg, "coloring") => {
            let h = io::parse_hypergraph(&instance_text)?;
            let cert = cert_file.to_coloring()?;
            if cert.coloring.len() != h.vertex_count() {
                return Err(CliError::new(2, "certificate and instance sizes differ"));
            }
            oracle::verify_coloring_certificate(&h, &cert)
        }
        (Format::Cnf, "nae") => {
            let i = io::parse_nae_instance(&instance_text)?;
            let cert = cert_file.to_nae()?;
            if cert.assignment.len() != i.var_count() {
                return Err(CliError::new(2, "certificate and instance sizes differ"));
            }
            oracle::verify_nae_certificate(&i, &cert)
        }
        (_, kind) => {
            return Err(CliError::new(
                2,
                format!("certificate kind {kind:?} does not match the input format"),
            ));
        }
    };
    let report = serde_json::json!({
        "ok": verdict.ok,
        "reasons": reasons_json(&verdict.reasons),
    });
    println!("{report:#}");
    if verdict.ok {
        Ok(())
    } else {
        Err(CliError::new(1, "certificate rejected"))
    }
}

fn cmd_oracle(args: OracleArgs) -> CliResult<()> {
    let limit = effective_limit(args.limit);
    let text = read_file(&args.input)?;
    let format = detect_format(&args.input, args.format)?;
    let report = match (args.query, format) {
        (OracleQuery::Sat, Format::Cnf) => {
            let i = io::parse_nae_instance(&text)?;
            serde_json::json!({
                "query": "sat",
                "satisfiable": oracle::is_nae_satisfiable(&i, limit)?,
            })
        }
        (OracleQuery::Sat, Format::Hg) => {
            let h = io::parse_hypergraph(&text)?;
            let colorable = !oracle::free_sets(&h, 0, limit)?.is_empty();
            serde_json::json!({ "query": "sat", "colorable": colorable })
        }
        (OracleQuery::FreeVars, Format::Cnf) => {
            let i = io::parse_nae_instance(&text)?;
            let report = oracle::free_variables(&i, limit)?;
            serde_json::json!({
                "query": "free-vars",
                "satisfiable": report.satisfiable,
                "free_variables": report.free_variables,
            })
        }
        (OracleQuery::FreeVars, Format::Hg) => {
            let h = io::parse_hypergraph(&text)?;
            let report = oracle::free_vertices(&h, limit)?;
            serde_json::json!({
                "query": "free-vars",
                "colorable": report.colorable,
                "free_vertices": report.free_vertices,
            })
        }
        (OracleQuery::FreeSets, Format::Hg) => {
            let h = io::parse_hypergraph(&text)?;
            serde_json::json!({
                "query": "free-sets",
                "size": args.size,
                "free_sets": oracle::free_sets(&h, args.size, limit)?,
            })
        }
        (OracleQuery::FreeSets, Format::Cnf) => {
            return Err(CliError::new(2, "free-sets needs a hypergraph input"));
        }
        (OracleQuery::Fixed, Format::Hg) => {
            let h = io::parse_hypergraph(&text)?;
            let Some(coloring_path) = &args.coloring else {
                return Err(CliError::new(2, "fixed needs --coloring <certificate>"));
            };
            let cert = CertificateFile::parse(&read_file(coloring_path)?)?.to_coloring()?;
            if cert.coloring.len() != h.vertex_count() {
                return Err(CliError::new(2, "certificate and instance sizes differ"));
            }
            // Edges through the free vertex are excluded from the scan,
            // matching how fixture analysis is used on free-vertex
            // certificates.
            let excluded = match cert.free_vertex {
                Some(v) => h.edges_with(v),
                None => Vec::new(),
            };
            let fixed: Vec<usize> = oracle::fixed_vertices(&h, &cert.coloring, &excluded)?
                .into_iter()
                .collect();
            serde_json::json!({
                "query": "fixed",
                "excluded_edges": excluded,
                "fixed_vertices": fixed,
            })
        }
        (OracleQuery::Fixed, Format::Cnf) => {
            return Err(CliError::new(2, "fixed needs a hypergraph input"));
        }
    };
    println!("{report:#}");
    Ok(())
}
