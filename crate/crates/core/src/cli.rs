//! Command-line front end: `evolve`, `spectrum` and `bench`.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 unreadable or malformed
//! input, 4 numerical or resource failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analysis::{self, MeasurementDistribution};
use crate::demoral::{self, Blocks, Vertex, VertexBlocks, VertexSet};
use crate::error::{Error, Result};
use crate::evolve::{evolve_closed, evolve_times_with_options, EvolveOptions};
use crate::expaction::KrylovConfig;
use crate::generator::{evolve_generator, local_lind, EvolutionGenerator, DEFAULT_EPSILON};
use crate::graphio::{self, GraphSpec, Orientation};
use crate::linalg::{CsrMatrix, DensityState, Operator, Storage};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "QSW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qswalk", version, about = "Quantum stochastic walks on graphs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a walk and write vertex distributions per time point.
    Evolve(EvolveArgs),
    /// Report the null space and smallest eigenvalues of the generator.
    Spectrum(SpectrumArgs),
    /// Time nonmoralizing path-graph walks over a range of orders.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// One Lindblad operator per arc.
    Local,
    /// A single Lindblad operator equal to the adjacency matrix.
    Global,
    /// Global regime on the enlarged space with the nonmoralizing correction.
    Nonmoralizing,
    /// Unitary walk driven by the undirected adjacency matrix.
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// path:N, er:N:P[:SEED], uer:N:P[:SEED] or file:PATH (.mtx or edge list).
    #[arg(long)]
    graph: GraphSpec,
    #[arg(long, value_enum)]
    regime: Regime,
    /// Smoothing weight in [0, 1]; without it the coherent and dissipative
    /// parts both have weight 1.
    #[arg(long)]
    omega: Option<f64>,
    /// JSON object mapping subspace dimension to a row-major complex matrix;
    /// repeat to add one Lindblad operator per file (nonmoralizing only).
    #[arg(long = "lind-dict")]
    lind_dict: Vec<PathBuf>,
    /// Store operators densely instead of sparsely.
    #[arg(long)]
    dense: bool,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// A single time `T` or `T0:T1:STEPS` for STEPS evenly spaced points.
    #[arg(long, allow_hyphen_values = true)]
    time: TimeSpec,
    /// `mid`, a comma-separated vertex list, or file:PATH with such a list.
    #[arg(long, default_value = "mid")]
    init: InitSpec,
    /// Output file; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Krylov subspace dimension.
    #[arg(long, default_value_t = 30)]
    krylov_dim: usize,
    /// Krylov local error tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Reject initial states that fail validation instead of warning.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Eigenvalues below this modulus count as zero.
    #[arg(long, default_value_t = analysis::DEFAULT_NULL_TOL)]
    tol: f64,
    /// Largest superoperator dimension analysed densely.
    #[arg(long, default_value_t = analysis::DEFAULT_DENSE_CAP)]
    cap: usize,
    /// How many smallest-modulus eigenvalues to print.
    #[arg(long, default_value_t = 10)]
    count: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Graph orders as START:STOP:STEP, inclusive.
    #[arg(long, default_value = "100:1000:100")]
    sizes: String,
    #[arg(long, default_value_t = 40.0)]
    time: f64,
    #[arg(long, default_value_t = 0.5)]
    omega: f64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
struct TimeSpec(Vec<f64>);

impl FromStr for TimeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::arg(format!("invalid time '{x}'")))
        };
        let times = match s.split(':').collect::<Vec<_>>().as_slice() {
            [t] => vec![num(t)?],
            [t0, t1, steps] => {
                let (t0, t1) = (num(t0)?, num(t1)?);
                let steps: usize = steps
                    .parse()
                    .ok()
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::arg(format!("invalid step count '{steps}'")))?;
                if steps == 1 {
                    vec![t0]
                } else {
                    let h = (t1 - t0) / (steps - 1) as f64;
                    (0..steps).map(|k| t0 + h * k as f64).collect()
                }
            }
            _ => return Err(Error::arg(format!("time '{s}' is not T or T0:T1:STEPS"))),
        };
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(Error::arg(format!(
                "time {t} must be finite and non-negative"
            )));
        }
        Ok(TimeSpec(times))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum InitSpec {
    Mid,
    Vertices(Vec<usize>),
    File(PathBuf),
}

fn parse_vertex_list(s: &str) -> Result<Vec<usize>> {
    let list: Vec<usize> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::arg(format!("invalid vertex '{x}'")))
        })
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(Error::arg("initial vertex list is empty"));
    }
    Ok(list)
}

impl FromStr for InitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "mid" {
            Ok(InitSpec::Mid)
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(InitSpec::File(path.into()))
        } else {
            parse_vertex_list(s).map(InitSpec::Vertices)
        }
    }
}

impl InitSpec {
    /// 1-based initial vertices for a graph of order `n`.
    fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        let list = match self {
            InitSpec::Mid => vec![n.div_ceil(2)],
            InitSpec::Vertices(v) => v.clone(),
            InitSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let body: String = text
                    .lines()
                    .map(|l| l.split('#').next().unwrap_or(""))
                    .collect::<Vec<_>>()
                    .join(" ");
                parse_vertex_list(&body).map_err(|e| Error::parse(0, e.to_string()))?
            }
        };
        let mut seen = std::collections::BTreeSet::new();
        for &v in &list {
            if v > n {
                return Err(Error::arg(format!(
                    "initial vertex {v} exceeds graph order {n}"
                )));
            }
            if !seen.insert(v) {
                return Err(Error::arg(format!("initial vertex {v} listed twice")));
            }
        }
        Ok(list)
    }
}

/// Everything needed to evolve and measure one configured walk.
struct Model {
    order: usize,
    regime: Regime,
    storage: Storage,
    hamiltonian: Operator,
    generator: Option<EvolutionGenerator>,
    vertex_set: Option<VertexSet>,
}

impl Model {
    fn state_dim(&self) -> usize {
        self.vertex_set.as_ref().map_or(self.order, VertexSet::size)
    }

    fn generator(&self) -> Result<EvolutionGenerator> {
        match &self.generator {
            Some(g) => Ok(g.clone()),
            None => evolve_generator(&self.hamiltonian, &[], None, None),
        }
    }

    fn initial_state(&self, vertices: &[usize]) -> Result<DensityState> {
        if let Some(vs) = &self.vertex_set {
            let chosen: Vec<Vertex> = vertices.iter().map(|&v| vs[v - 1].clone()).collect();
            return demoral::nm_init(&chosen, vs);
        }
        let n = self.order;
        let w = C64::new(1.0 / vertices.len() as f64, 0.0);
        let triplets = vertices.iter().map(|&v| (v - 1, v - 1, w));
        let m = Operator::Sparse(CsrMatrix::from_triplets(n, n, triplets));
        Ok(DensityState::new_unchecked(m.into_storage(self.storage)))
    }

    fn measure(&self, state: &DensityState) -> Result<MeasurementDistribution> {
        match &self.vertex_set {
            Some(vs) => demoral::nm_measurement(state, vs),
            None => Ok(analysis::measure(state)),
        }
    }
}

/// Reads a Lindblad dictionary: `{"2": [[1, 1], [1, -1]]}` where each
/// entry is a number or a `[re, im]` pair.
fn read_lind_dict(path: &Path) -> Result<VertexBlocks> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let bad = |msg: String| Error::parse(0, format!("{}: {msg}", path.display()));
    let object = value
        .as_object()
        .ok_or_else(|| bad("expected an object keyed by dimension".into()))?;
    let mut map = BTreeMap::new();
    for (key, rows) in object {
        let d: usize = key
            .parse()
            .ok()
            .filter(|&d| d >= 1)
            .ok_or_else(|| bad(format!("key '{key}' is not a positive dimension")))?;
        let rows = rows
            .as_array()
            .filter(|r| r.len() == d)
            .ok_or_else(|| bad(format!("entry '{key}' must have {d} rows")))?;
        let mut m = ndarray::Array2::zeros((d, d));
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == d).ok_or_else(|| {
                bad(format!(
                    "row {} of entry '{key}' must have {d} columns",
                    i + 1
                ))
            })?;
            for (j, x) in row.iter().enumerate() {
                m[[i, j]] = match x {
                    serde_json::Value::Number(v) => C64::new(v.as_f64().unwrap_or(f64::NAN), 0.0),
                    serde_json::Value::Array(p) if p.len() == 2 => C64::new(
                        p[0].as_f64().unwrap_or(f64::NAN),
                        p[1].as_f64().unwrap_or(f64::NAN),
                    ),
                    _ => {
                        return Err(bad(format!(
                            "entry '{key}' ({}, {}) is not a number",
                            i + 1,
                            j + 1
                        )))
                    }
                };
                if !m[[i, j]].is_finite() {
                    return Err(bad(format!(
                        "entry '{key}' ({}, {}) is not finite",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        map.insert(d, Operator::Dense(m));
    }
    Ok(Blocks::ByDegree(map))
}

fn build_model(args: &ModelArgs) -> Result<Model> {
    let storage = if args.dense {
        Storage::Dense
    } else {
        Storage::Sparse
    };
    let directed = args.graph.is_directed();
    let (a_in, h) = if directed {
        let out = graphio::adjacency(&args.graph, Orientation::Out)?;
        (
            graphio::orient(&out, Orientation::In),
            graphio::orient(&out, Orientation::Undirected),
        )
    } else {
        let h = graphio::adjacency(&args.graph, Orientation::Undirected)?;
        (h.clone(), h)
    };
    let (a_in, h) = (a_in.into_storage(storage), h.into_storage(storage));
    if !args.lind_dict.is_empty() && args.regime != Regime::Nonmoralizing {
        return Err(Error::arg(
            "--lind-dict applies to the nonmoralizing regime only",
        ));
    }
    let order = h.dim();
    let mut model = Model {
        order,
        regime: args.regime,
        storage,
        hamiltonian: h.clone(),
        generator: None,
        vertex_set: None,
    };
    match args.regime {
        Regime::Closed => {
            if args.omega.is_some() {
                log::warn!("--omega has no effect in the closed regime");
            }
        }
        Regime::Local => {
            let ls: Vec<Operator> = local_lind(&a_in, DEFAULT_EPSILON)?
                .into_iter()
                .map(|l| l.into_storage(storage))
                .collect();
            model.generator = Some(evolve_generator(&h, &ls, None, args.omega)?);
        }
        Regime::Global => {
            model.generator = Some(evolve_generator(&h, &[a_in], None, args.omega)?);
        }
        Regime::Nonmoralizing => {
            let dicts = if args.lind_dict.is_empty() {
                vec![Blocks::Default]
            } else {
                args.lind_dict
                    .iter()
                    .map(|p| read_lind_dict(p))
                    .collect::<Result<Vec<_>>>()?
            };
            let mut ls = Vec::new();
            let mut vs = None;
            for dict in &dicts {
                let (l, v) = demoral::nm_lind(&a_in, dict, DEFAULT_EPSILON)?;
                ls.push(l.into_storage(storage));
                vs = Some(v);
            }
            let vs = vs.expect("at least one dictionary");
            let hg = demoral::nm_glob_ham_on(&h, &vs, &Blocks::Default, DEFAULT_EPSILON)?
                .into_storage(storage);
            let hl = demoral::nm_loc_ham(&vs, &Blocks::Default)?.into_storage(storage);
            model.generator = Some(evolve_generator(&hg, &ls, Some(&hl), args.omega)?);
            model.hamiltonian = hg;
            model.vertex_set = Some(vs);
        }
    }
    Ok(model)
}

#[derive(Serialize)]
struct Moments {
    time: f64,
    mean: f64,
    second_central: f64,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    graph: String,
    regime: Regime,
    omega: Option<f64>,
    order: usize,
    state_dim: usize,
    storage: Storage,
    initial_vertices: &'a [usize],
    krylov: KrylovConfig,
    threads: usize,
    build_seconds: f64,
    evolve_seconds: f64,
    moments: Vec<Moments>,
}

#[derive(Serialize)]
struct TimePoint<'a> {
    time: f64,
    probabilities: &'a [f64],
}

#[derive(Serialize)]
struct JsonReport<'a> {
    metadata: &'a RunMetadata<'a>,
    results: Vec<TimePoint<'a>>,
}

fn graph_label(spec: &GraphSpec) -> String {
    match spec {
        GraphSpec::Path { n } => format!("path:{n}"),
        GraphSpec::ErdosRenyi {
            n,
            p,
            directed,
            seed,
        } => {
            format!("{}:{n}:{p}:{seed}", if *directed { "er" } else { "uer" })
        }
        GraphSpec::File { path } => format!("file:{}", path.display()),
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn cmd_evolve(args: &EvolveArgs) -> Result<()> {
    let krylov = KrylovConfig {
        subspace_dim: args.krylov_dim,
        tolerance: args.tol,
        ..KrylovConfig::default()
    };
    krylov.validate()?;
    let opts = EvolveOptions {
        krylov,
        strict: args.strict,
    };
    let times = &args.time.0;

    let start = Instant::now();
    let model = build_model(&args.model)?;
    let init = args.init.resolve(model.order)?;
    let rho0 = model.initial_state(&init)?;
    let build_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let states = match model.regime {
        Regime::Closed => times
            .iter()
            .map(|&t| evolve_closed(&model.hamiltonian, &rho0, t))
            .collect::<Result<Vec<_>>>()?,
        _ => {
            let f = model
                .generator
                .as_ref()
                .expect("open regimes build a generator");
            evolve_times_with_options(f, &rho0, times, &opts)?
        }
    };
    let evolve_seconds = start.elapsed().as_secs_f64();

    let mut dists = Vec::with_capacity(states.len());
    let mut moments = Vec::with_capacity(states.len());
    for (&t, state) in times.iter().zip(&states) {
        let d = model.measure(state)?.centered_at(0);
        moments.push(Moments {
            time: t,
            mean: analysis::moment(&d, 1, false)?,
            second_central: analysis::moment(&d, 2, true)?,
        });
        dists.push(d);
    }

    let meta = RunMetadata {
        graph: graph_label(&args.model.graph),
        regime: model.regime,
        omega: args.model.omega,
        order: model.order,
        state_dim: model.state_dim(),
        storage: model.storage,
        initial_vertices: &init,
        krylov,
        threads: rayon::current_num_threads(),
        build_seconds,
        evolve_seconds,
        moments,
    };

    // Rows are ordered by time, then vertex, independent of evaluation order.
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut sink = open_output(args.out.as_deref())?;
    match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(["time", "vertex", "probability"])
                .map_err(csv_error)?;
            for &k in &order {
                for (v, p) in dists[k].probs().iter().enumerate() {
                    w.serialize((times[k], v + 1, p)).map_err(csv_error)?;
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let report = JsonReport {
                metadata: &meta,
                results: order
                    .iter()
                    .map(|&k| TimePoint {
                        time: times[k],
                        probabilities: dists[k].probs(),
                    })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut sink, &report).map_err(std::io::Error::from)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    if let (Some(out), Format::Csv) = (&args.out, args.format) {
        let meta_path = out.with_extension("meta.json");
        let text = serde_json::to_string_pretty(&meta).map_err(std::io::Error::from)?;
        std::fs::write(meta_path, text + "\n")?;
    }
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let model = build_model(&args.model)?;
    let f = model.generator()?;
    let spectrum = analysis::spectrum(&f, args.cap)?;
    let null = spectrum.iter().filter(|l| l.norm() < args.tol).count();
    let mut out = std::io::stdout().lock();
    writeln!(out, "null_dim: {null}")?;
    writeln!(out, "smallest eigenvalues:")?;
    for l in spectrum.iter().take(args.count) {
        writeln!(out, "  {:+.12e} {:+.12e}i", l.re, l.im)?;
    }
    if null == 1 {
        let rho = analysis::stationary_state(&f, args.tol, args.cap)?;
        writeln!(out, "stationary distribution:")?;
        for (v, p) in model.measure(&rho)?.probs().iter().enumerate() {
            writeln!(out, "  {} {:.12}", v + 1, p)?;
        }
    }
    Ok(())
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::arg(format!("sizes '{s}' is not START:STOP:STEP"));
    let parts: Vec<usize> = s
        .split(':')
        .map(|x| x.parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [start, stop, step] if *start >= 1 && *step >= 1 && start <= stop => {
            Ok((*start..=*stop).step_by(*step).collect())
        }
        _ => Err(bad()),
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let sizes = parse_sizes(&args.sizes)?;
    if !(args.time >= 0.0 && args.time.is_finite()) {
        return Err(Error::arg("bench time must be finite and non-negative"));
    }
    let mut sink = open_output(args.out.as_deref())?;
    let mut w = csv::Writer::from_writer(&mut sink);
    w.write_record(["order", "state_dim", "superoperator_dim", "seconds"])
        .map_err(csv_error)?;
    for order in sizes {
        let start = Instant::now();
        let model = build_model(&ModelArgs {
            graph: GraphSpec::Path { n: order },
            regime: Regime::Nonmoralizing,
            omega: Some(args.omega),
            lind_dict: Vec::new(),
            dense: false,
        })?;
        let rho0 = model.initial_state(&[order.div_ceil(2)])?;
        let f = model
            .generator
            .as_ref()
            .expect("nonmoralizing builds a generator");
        evolve_times_with_options(f, &rho0, &[args.time], &EvolveOptions::default())?;
        let seconds = start.elapsed().as_secs_f64();
        log::info!("order {order}: {seconds:.3} s");
        w.serialize((order, f.state_dim(), f.dim(), seconds))
            .map_err(csv_error)?;
        w.flush()?;
    }
    Ok(())
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) => 2,
        Error::Parse { .. } | Error::Io(_) => 3,
        Error::Numerical(_) | Error::Analysis(_) | Error::Resource(_) => 4,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        value.parse().ok().filter(|&k| k >= 1).ok_or_else(|| {
            Error::arg(format!("{THREADS_ENV}='{value}' is not a positive integer"))
        })?;
    // A pool that already exists (a second call in one process) is kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.render().to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("qswalk: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Bench(a) => cmd_bench(a),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qswalk: {e}");
            exit_code(&e)
        }
    }
}
