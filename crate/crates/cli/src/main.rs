//! Command-line front end: lattice generation, partition functions, covers,
//! Kasteleyn orientations, enhancements, identity checks and timings.
//!
//! Exit codes: 0 success or identity verified, 1 identity violated, 2 usage
//! or unreadable input, 3 precondition failed, 4 computation could not be
//! completed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value as Json};
use surface_dimer::dimer::{
    first_matching, partition_function, pfaffian_partition, twisted_partition, Method,
    PfaffianSetup,
};
use surface_dimer::identities::{
    verify_klein_vanishing, verify_lattice_equation, verify_main, verify_prop24, verify_thm1,
    verify_thm2, CoverSetting, LatticeEquation, Report, Thm1Variant, Verdict, VerifyOptions,
};
use surface_dimer::io::{
    cover_json, enhancements_json, family_name, graph_json, matrix_csv, read_document, report_json,
    surface_name, table_csv, to_bytes, twisted_json, weight_json, with_orientation, GraphDocument,
};
use surface_dimer::lattices::{generate, translation, Family, LatticeSpec, Surface, Weights};
use surface_dimer::pfaffian::skew_adjacency;
use surface_dimer::quadform::{enumerate_enhancements, induced_cover_form, Enhancement};
use surface_dimer::scalar::{int, parse_rational, rational, Exact};
use surface_dimer::{Error, Mode, TwistedZ, Value, Weight};

const EXIT_VIOLATED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_COMPUTATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "surface-dimer",
    version,
    about = "Dimer models on non-orientable surfaces"
)]
struct Cli {
    /// Worker threads for independent Pfaffians and verifications.
    #[arg(long, global = true, env = "SURFACE_DIMER_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a lattice graph document.
    Gen(GenArgs),
    /// Print the partition function of a graph.
    Z(ZArgs),
    /// Twisted partition functions by homology class, as JSON.
    Twisted(TwistedArgs),
    /// Orientation double cover, as a graph document with its projection.
    Cover(FileOut),
    /// A Kasteleyn orientation, as a graph document or its matrix.
    Kasteleyn(KasteleynArgs),
    /// All quadratic enhancements and the forms they induce on the cover.
    Enhancements(FileOut),
    /// Check one identity and print its report.
    Verify(VerifyArgs),
    /// Time Pfaffian partition functions over a range of sizes, as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long, default_value = "square")]
    family: String,
    #[arg(long)]
    surface: Option<String>,
    #[arg(short, long)]
    m: Option<usize>,
    #[arg(short, long)]
    n: Option<usize>,
    /// `uniform`, `xy:X,Y`, `xyz:X,Y,Z` or `random`.
    #[arg(long, default_value = "uniform")]
    weights: String,
    /// Seed for `--weights random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Lattice spec document, instead of the lattice flags.
    #[arg(long, conflicts_with_all = ["surface", "m", "n"])]
    spec: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ZArgs {
    graph: PathBuf,
    #[arg(long, default_value = "pfaffian")]
    method: Method,
    #[arg(long, default_value = "exact")]
    mode: Mode,
}

#[derive(Args)]
struct TwistedArgs {
    graph: PathBuf,
    #[arg(long, default_value = "brute")]
    method: Method,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FileOut {
    graph: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KasteleynArgs {
    graph: PathBuf,
    /// Print the twisted skew adjacency matrix as CSV instead.
    #[arg(long)]
    matrix: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// eq1|eq2|eq3|thm1i|thm1ii|thm2|prop24|main
    #[arg(long, required_unless_present = "klein_vanishing")]
    identity: Option<String>,
    /// Graph documents; the lattice identities take `-m`, `-n` and `--weights`.
    graphs: Vec<PathBuf>,
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Enhancement values on the homology basis, e.g. `1,2`, for `main`.
    #[arg(long, value_delimiter = ',')]
    enhancement: Option<Vec<u8>>,
    #[arg(long, default_value = "exact")]
    mode: Mode,
    /// Relative tolerance; required with `--mode float`.
    #[arg(long)]
    tol: Option<f64>,
    /// Skip the Pfaffian evaluations.
    #[arg(long)]
    no_pfaffian: bool,
    #[arg(long, hide = true)]
    klein_vanishing: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "square")]
    family: Family,
    #[arg(long, default_value = "torus")]
    surface: Surface,
    /// Inclusive range `A..B` of side lengths.
    #[arg(long, default_value = "10..40")]
    sizes: String,
    #[arg(long, default_value_t = 10)]
    step: usize,
    #[arg(long, default_value = "float")]
    mode: Mode,
    /// Runs per size; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OddVertexCount(_)
            | Error::PreconditionFailed(_)
            | Error::NotLocallyBipartite
            | Error::NoPerfectMatching => EXIT_PRECONDITION,
            Error::LawViolation(_) | Error::Underdetermined(_) | Error::AsymmetryDetected(..) => {
                EXIT_COMPUTATION
            }
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_graph_file(path: &Path) -> CliResult<GraphDocument> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(read_document(&bytes)?)
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn parse_weights(text: &str) -> CliResult<Option<Weights>> {
    let list = |s: &str, count: usize| -> CliResult<Vec<Weight>> {
        let values: Vec<Weight> = s
            .split(',')
            .map(|w| {
                parse_rational(w.trim()).ok_or_else(|| Failure::usage(format!("bad weight `{w}`")))
            })
            .collect::<CliResult<_>>()?;
        if values.len() != count {
            return Err(Failure::usage(format!(
                "expected {count} weights in `{text}`"
            )));
        }
        Ok(values)
    };
    Ok(match text.split_once(':') {
        None if text == "uniform" => Some(Weights::Uniform),
        None if text == "random" => None,
        Some(("xy", rest)) => {
            let v = list(rest, 2)?;
            Some(Weights::Xy(v[0].clone(), v[1].clone()))
        }
        Some(("xyz", rest)) => {
            let v = list(rest, 3)?;
            Some(Weights::Xyz(v[0].clone(), v[1].clone(), v[2].clone()))
        }
        _ => {
            return Err(Failure::usage(format!(
                "unknown weights `{text}` (expected uniform, xy:X,Y, xyz:X,Y,Z or random)"
            )))
        }
    })
}

/// Positive rationals with numerator in 1..=9 and denominator in 1..=4.
fn random_weights(count: usize, seed: u64) -> Vec<Weight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| rational(rng.gen_range(1..=9), rng.gen_range(1..=4)))
        .collect()
}

fn lattice_spec(args: &LatticeArgs) -> CliResult<LatticeSpec> {
    let family: Family = args.family.parse().map_err(Failure::usage)?;
    let surface: Surface = args
        .surface
        .as_deref()
        .ok_or_else(|| Failure::usage("--surface is required"))?
        .parse()
        .map_err(Failure::usage)?;
    let (Some(m), Some(n)) = (args.m, args.n) else {
        return Err(Failure::usage("-m and -n are required"));
    };
    let spec = LatticeSpec::new(family, surface, m, n);
    match parse_weights(&args.weights)? {
        Some(w) => Ok(spec.with_weights(w)),
        None => {
            let edges = generate(&spec)?.graph.num_edges();
            Ok(spec.with_weights(Weights::PerEdge(random_weights(edges, args.seed))))
        }
    }
}

fn gen(args: &GenArgs) -> CliResult<()> {
    let spec = match &args.spec {
        Some(path) => {
            let bytes = fs::read(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            surface_dimer::io::read_spec(&bytes)?
        }
        None => lattice_spec(&args.lattice)?,
    };
    let lattice = generate(&spec)?;
    let tau = translation(&lattice).ok();
    emit(
        args.output.as_deref(),
        &to_bytes(&graph_json(&lattice.graph, tau.as_ref())),
    )
}

fn z(args: &ZArgs) -> CliResult<()> {
    let doc = read_graph_file(&args.graph)?;
    let value = partition_function(&doc.graph, args.method, args.mode)?;
    println!("{value}");
    Ok(())
}

fn twisted(args: &TwistedArgs) -> CliResult<()> {
    let g = read_graph_file(&args.graph)?.graph;
    let setup = PfaffianSetup::new(&g)?;
    let d0 = first_matching(&g);
    let tz = match args.method {
        Method::Brute => twisted_partition(&g, &setup.basis, d0.as_ref())?,
        Method::Pfaffian => {
            let d0 = d0.ok_or(Error::NoPerfectMatching)?;
            let pz = pfaffian_partition::<Exact>(&g, &setup, Some(&d0))?;
            let real = |z: &Exact| z.re.clone();
            TwistedZ {
                dim: setup.basis.dim(),
                classes: pz.classes.unwrap_or_default().iter().map(real).collect(),
                total: real(&pz.total),
                reference: Some(d0),
            }
        }
    };
    emit(
        args.output.as_deref(),
        &to_bytes(&twisted_json(&g, &setup.basis, &tz)),
    )
}

fn cover(args: &FileOut) -> CliResult<()> {
    let g = read_graph_file(&args.graph)?.graph;
    let setting = CoverSetting::new(&g)?;
    emit(
        args.output.as_deref(),
        &to_bytes(&cover_json(&setting.cover)),
    )
}

fn kasteleyn(args: &KasteleynArgs) -> CliResult<()> {
    let g = read_graph_file(&args.graph)?.graph;
    let setup = PfaffianSetup::new(&g)?;
    let bytes = if args.matrix {
        matrix_csv(&skew_adjacency::<Exact>(
            &g,
            &setup.kasteleyn,
            Some(&setup.omega),
        ))
        .into_bytes()
    } else {
        let oriented = with_orientation(&g, &setup.kasteleyn)?;
        let omega = setup.omega.ids();
        let mut doc = graph_json(&oriented, None);
        doc["cuts"]["omega"] = json!(omega);
        to_bytes(&doc)
    };
    emit(args.output.as_deref(), &bytes)
}

fn enhancements(args: &FileOut) -> CliResult<()> {
    let g = read_graph_file(&args.graph)?.graph;
    let setting = CoverSetting::new(&g)?;
    let qs = enumerate_enhancements(&setting.basis)?;
    let forms = qs
        .iter()
        .map(|q| induced_cover_form(&g, &setting.basis, q, &setting.cover, &setting.cover_basis))
        .collect::<surface_dimer::Result<Vec<_>>>()?;
    emit(
        args.output.as_deref(),
        &to_bytes(&enhancements_json(
            &setting.basis,
            &setting.cover_basis,
            &qs,
            &forms,
        )),
    )
}

fn lattice_xy(args: &LatticeArgs) -> CliResult<(Weight, Weight)> {
    match parse_weights(&args.weights)? {
        Some(Weights::Uniform) => Ok((int(1), int(1))),
        Some(Weights::Xy(x, y)) => Ok((x, y)),
        _ => Err(Failure::usage(
            "lattice identities take --weights uniform or xy:X,Y",
        )),
    }
}

fn verify_graph(
    identity: &str,
    doc: &GraphDocument,
    enhancement: Option<&[u8]>,
    opts: &VerifyOptions,
) -> CliResult<Report> {
    let g = &doc.graph;
    let tau = doc.translation.as_ref();
    let report = match identity {
        "prop24" => verify_prop24(g, None, opts)?,
        "thm1i" => verify_thm1(g, Thm1Variant::LocallyBipartite, tau, None, opts)?,
        "thm1ii" => verify_thm1(g, Thm1Variant::Translation, tau, None, opts)?,
        "thm2" => verify_thm2(g, tau, None, opts)?,
        "main" => {
            let q = match enhancement {
                Some(values) => {
                    let basis = CoverSetting::new(g)?.basis;
                    if values.len() != basis.dim() {
                        return Err(Failure::usage(format!(
                            "--enhancement needs {} values",
                            basis.dim()
                        )));
                    }
                    let q = Enhancement::from_basis_values(&basis, values);
                    q.check(&basis)
                        .map_err(|e| Failure::usage(format!("--enhancement: {e}")))?;
                    Some(q)
                }
                None => None,
            };
            verify_main(g, q.as_ref(), None, opts)?
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown identity `{other}` (expected eq1|eq2|eq3|thm1i|thm1ii|thm2|prop24|main)"
            )))
        }
    };
    Ok(report)
}

fn verdict_code(reports: &[Report]) -> u8 {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        EXIT_VIOLATED
    } else if reports
        .iter()
        .any(|r| r.verdict == Verdict::PreconditionFailed)
    {
        EXIT_PRECONDITION
    } else {
        0
    }
}

fn verify(args: &VerifyArgs) -> CliResult<u8> {
    let tol = match (args.mode, args.tol) {
        (Mode::Float, None) => {
            return Err(Failure::usage("--mode float requires --tol"));
        }
        (_, tol) => tol.unwrap_or(1e-9),
    };
    let opts = VerifyOptions {
        mode: args.mode,
        tol,
        pfaffian: !args.no_pfaffian,
    };
    let reports: Vec<Report> = if args.klein_vanishing {
        let docs = read_all(&args.graphs)?;
        docs.par_iter()
            .map(|doc| Ok(verify_klein_vanishing(&doc.graph, None)?))
            .collect::<CliResult<_>>()?
    } else {
        let identity = args.identity.as_deref().unwrap_or_default();
        match identity.parse::<LatticeEquation>() {
            Ok(eq) => {
                if !args.graphs.is_empty() {
                    return Err(Failure::usage(format!(
                        "{identity} builds its own lattices; give -m, -n and --weights"
                    )));
                }
                let (Some(m), Some(n)) = (args.lattice.m, args.lattice.n) else {
                    return Err(Failure::usage(format!("{identity} requires -m and -n")));
                };
                let (x, y) = lattice_xy(&args.lattice)?;
                vec![verify_lattice_equation(eq, m, n, &x, &y, &opts)?]
            }
            Err(_) => {
                let docs = read_all(&args.graphs)?;
                docs.par_iter()
                    .map(|doc| verify_graph(identity, doc, args.enhancement.as_deref(), &opts))
                    .collect::<CliResult<_>>()?
            }
        }
    };
    let out = match reports.as_slice() {
        [single] => report_json(single, args.mode),
        many => Json::Array(many.iter().map(|r| report_json(r, args.mode)).collect()),
    };
    emit(None, &to_bytes(&out))?;
    Ok(verdict_code(&reports))
}

fn read_all(paths: &[PathBuf]) -> CliResult<Vec<GraphDocument>> {
    if paths.is_empty() {
        return Err(Failure::usage("no graph documents given"));
    }
    paths.iter().map(|p| read_graph_file(p)).collect()
}

fn parse_sizes(text: &str, step: usize) -> CliResult<Vec<usize>> {
    let bad = || Failure::usage(format!("bad size range `{text}` (expected A..B)"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b || step == 0 {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

fn bench(args: &BenchArgs) -> CliResult<()> {
    let sizes = parse_sizes(&args.sizes, args.step)?;
    let mut rows = Vec::new();
    for size in sizes {
        let lattice = generate(&LatticeSpec::new(args.family, args.surface, size, size))?;
        let g = &lattice.graph;
        let mut best = f64::INFINITY;
        let mut value = None;
        let mut pfaffians = 0;
        for _ in 0..args.repeat.max(1) {
            let start = Instant::now();
            let setup = PfaffianSetup::new(g)?;
            value = Some(partition_function(g, Method::Pfaffian, args.mode)?);
            best = best.min(start.elapsed().as_secs_f64());
            pfaffians = 1usize << setup.basis.dim();
        }
        let value = value.expect("at least one run");
        rows.push(vec![
            family_name(args.family).to_string(),
            surface_name(args.surface).to_string(),
            size.to_string(),
            size.to_string(),
            g.num_vertices().to_string(),
            g.num_edges().to_string(),
            pfaffians.to_string(),
            format!("{:?}", args.mode).to_lowercase(),
            format!("{best:.6}"),
            match &value {
                Value::Exact(q) => weight_json(q).as_str().unwrap_or_default().to_string(),
                Value::Float(x) => format!("{x:e}"),
            },
        ]);
    }
    let header = [
        "family",
        "surface",
        "rows",
        "cols",
        "vertices",
        "edges",
        "pfaffians",
        "mode",
        "seconds",
        "z",
    ];
    emit(None, table_csv(&header, &rows).as_bytes())
}

fn run(cli: Cli) -> CliResult<u8> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Gen(args) => gen(args).map(|_| 0),
        Command::Z(args) => z(args).map(|_| 0),
        Command::Twisted(args) => twisted(args).map(|_| 0),
        Command::Cover(args) => cover(args).map(|_| 0),
        Command::Kasteleyn(args) => kasteleyn(args).map(|_| 0),
        Command::Enhancements(args) => enhancements(args).map(|_| 0),
        Command::Verify(args) => verify(args),
        Command::Bench(args) => bench(args).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
