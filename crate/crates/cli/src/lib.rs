// SPDX-License-Identifier: Apache-2.0

//! Subcommands of the `signed-influence` binary.

pub mod dot;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use signed_influence::centrality::{absolute_centrality, flip_edge_signs, perturb_initial, WhatIfResult};
use signed_influence::dynamics::{
    simulate, steady_state_by, SimulationOptions, SteadyStateMethod, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use signed_influence::influence::individual_influence;
use signed_influence::io::{
    diff_values, load_value, round_sig, AnalysisReport, CentralitySection, ConvergenceReport, FileError,
    InfluenceReport, NetworkFile, Provenance, SpectrumReport, SteadyStateReport,
};
use signed_influence::mason::{collective_influence, GainMethod, MasonLimits};
use signed_influence::{Error, Pipeline};

/// Largest `|Θx(0) − z|` accepted by `influence --check`, relative to `max(1, |z|)`.
pub const CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "signed-influence",
    version,
    about = "Influence analysis for signed opinion networks"
)]
pub struct Cli {
    /// Worker threads for gain enumeration; 0 uses every core.
    #[arg(long, global = true, env = "SIGNED_INFLUENCE_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GainArg {
    Mason,
    Solve,
    Auto,
}

impl From<GainArg> for GainMethod {
    fn from(g: GainArg) -> Self {
        match g {
            GainArg::Mason => GainMethod::Mason,
            GainArg::Solve => GainMethod::Solve,
            GainArg::Auto => GainMethod::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Direct,
    Eigen,
    Iteration,
}

impl From<RouteArg> for SteadyStateMethod {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Direct => SteadyStateMethod::DirectSolve,
            RouteArg::Eigen => SteadyStateMethod::Eigenprojection,
            RouteArg::Iteration => SteadyStateMethod::Iteration,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct GainOpts {
    #[arg(long, value_enum, default_value = "auto")]
    pub method: GainArg,
    /// Cap on enumerated paths plus loops per gain.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_objects: usize,
    /// Cap on loop sets per determinant.
    #[arg(long, default_value_t = 100_000)]
    pub max_subsets: usize,
}

impl GainOpts {
    fn limits(&self) -> MasonLimits {
        MasonLimits {
            max_objects: self.max_objects,
            max_subsets: self.max_subsets,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sinks, agent roles and the convergence verdict.
    Classify {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Iterates the opinion update and reports the steady state.
    Simulate {
        file: PathBuf,
        /// Trajectory CSV, one row per recorded step.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = 1)]
        record_every: usize,
        /// Steady-state route; defaults to direct solve or eigenprojection by verdict.
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Collective gains and individual influence.
    Influence {
        file: PathBuf,
        #[command(flatten)]
        gain: GainOpts,
        /// Verify the influence matrix against a simulated limit.
        #[arg(long)]
        check: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Absolute influence centrality and ranking.
    Centrality {
        file: PathBuf,
        #[command(flatten)]
        gain: GainOpts,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Effect of flipping edge signs or perturbing one initial opinion.
    Whatif {
        file: PathBuf,
        #[arg(long = "flip-edge", num_args = 2, value_names = ["FROM", "TO"], action = ArgAction::Append)]
        flip_edge: Vec<usize>,
        #[arg(long, num_args = 2, value_names = ["AGENT", "DELTA"], allow_negative_numbers = true)]
        perturb: Option<Vec<String>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Signal-flow graph in DOT format.
    ExportSfg {
        file: PathBuf,
        #[arg(long)]
        reduced: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compares two reports; exits 3 when they differ.
    Diff {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        #[arg(long, default_value_t = 0.0)]
        atol: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Exit status for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ComplexityCapExceeded { .. } => 4,
        Error::NonConvergedEstimate { .. }
        | Error::IterationCapReached { .. }
        | Error::DegenerateEigenspace { .. }
        | Error::SingularSystem { .. } => 1,
        _ => 2,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::new(exit_code(&e), e.to_string())
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Invalid(inner) => inner.into(),
            other => CliError::new(2, other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(1, format!("{}: {e}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(1, e.to_string())),
    }
}

struct Loaded {
    file: NetworkFile,
    pipeline: Pipeline,
}

fn load(path: &Path) -> CliResult<Loaded> {
    let file = NetworkFile::load(path)?;
    let pipeline = Pipeline::new(file.network()?, file.params()?)?;
    Ok(Loaded { file, pipeline })
}

fn require_x0(file: &NetworkFile) -> CliResult<Vec<f64>> {
    match file.initial_opinions() {
        Some(x) => Ok(x?),
        None => Err(CliError::new(2, "the network file has no x0")),
    }
}

fn base_report(l: &Loaded, sim: &SimulationOptions, limits: &MasonLimits) -> AnalysisReport {
    let p = &l.pipeline;
    let mut r = AnalysisReport::new(&p.network, &p.classification, Provenance::new(sim, limits));
    r.convergence = Some(ConvergenceReport::new(&p.verdict));
    r.spectra = p.spectra.iter().map(SpectrumReport::new).collect();
    r
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // A second call only fails when the pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    configure_jobs(cli.jobs);
    match cli.command {
        Command::Classify { file, output } => cmd_classify(&file, output.as_deref()),
        Command::Simulate {
            file,
            csv,
            tol,
            max_iters,
            record_every,
            route,
            output,
        } => {
            let opts = SimulationOptions {
                tol,
                max_iters,
                record_every,
            };
            cmd_simulate(&file, csv.as_deref(), opts, route, output.as_deref())
        }
        Command::Influence {
            file,
            gain,
            check,
            output,
        } => cmd_influence(&file, &gain, check, output.as_deref()),
        Command::Centrality { file, gain, output } => cmd_centrality(&file, &gain, output.as_deref()),
        Command::Whatif {
            file,
            flip_edge,
            perturb,
            output,
        } => cmd_whatif(&file, &flip_edge, perturb.as_deref(), output.as_deref()),
        Command::ExportSfg { file, reduced, dot } => cmd_export_sfg(&file, reduced, dot.as_deref()),
        Command::Diff {
            left,
            right,
            rtol,
            atol,
        } => cmd_diff(&left, &right, rtol, atol),
    }
}

fn cmd_classify(path: &Path, output: Option<&Path>) -> CliResult<()> {
    let l = load(path)?;
    let r = base_report(&l, &SimulationOptions::default(), &MasonLimits::default());
    emit(&r.to_toml_string(), output)
}

fn write_csv(path: &Path, states: &[(usize, Vec<f64>)], n: usize) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    let header: Vec<String> = std::iter::once("k".to_string())
        .chain((0..n).map(|i| format!("x_{i}")))
        .collect();
    let fail = |e: csv::Error| CliError::new(1, format!("{}: {e}", path.display()));
    w.write_record(&header).map_err(fail)?;
    for (k, x) in states {
        let row: Vec<String> = std::iter::once(k.to_string())
            .chain(x.iter().map(|v| format!("{}", round_sig(*v))))
            .collect();
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

#[derive(Serialize)]
struct TrajectorySection {
    iterations: usize,
    converged: bool,
    residual: f64,
    final_state: Vec<f64>,
}

#[derive(Serialize)]
struct SimulationReport {
    #[serde(flatten)]
    report: AnalysisReport,
    trajectory: TrajectorySection,
}

fn cmd_simulate(
    path: &Path,
    csv_path: Option<&Path>,
    opts: SimulationOptions,
    route: Option<RouteArg>,
    output: Option<&Path>,
) -> CliResult<()> {
    let l = load(path)?;
    let x0 = require_x0(&l.file)?;
    let p = &l.pipeline;
    let log = simulate(&p.matrices, &x0, opts)?;
    if let Some(c) = csv_path {
        write_csv(c, &log.states, p.n())?;
    }
    log.ensure_converged(opts.max_iters)?;
    let steady = match route {
        Some(r) => steady_state_by(r.into(), &p.matrices, &p.classification, &x0, opts)?,
        None => p.steady_state(&x0)?,
    };
    let mut report = base_report(&l, &opts, &MasonLimits::default());
    report.steady_state = Some(SteadyStateReport::new(&steady));
    let out = SimulationReport {
        report,
        trajectory: TrajectorySection {
            iterations: log.iterations,
            converged: log.converged,
            residual: round_sig(log.residual),
            final_state: log.final_state().iter().copied().map(round_sig).collect(),
        },
    };
    emit(&toml::to_string(&out).expect("reports always serialise"), output)
}

fn influence_report(l: &Loaded, gain: &GainOpts) -> CliResult<(AnalysisReport, signed_influence::InfluenceMatrix)> {
    let p = &l.pipeline;
    let limits = gain.limits();
    let c = collective_influence(&p.reduced_sfg()?, gain.method.into(), &limits)?;
    let theta = individual_influence(&c, &p.classification, &p.spectra)?;
    let mut r = base_report(l, &SimulationOptions::default(), &limits);
    r.influence = Some(InfluenceReport::new(&c, &theta));
    if let Some(Ok(x0)) = l.file.initial_opinions() {
        r.steady_state = Some(SteadyStateReport::new(&p.steady_state(&x0)?));
    }
    Ok((r, theta))
}

fn cmd_influence(path: &Path, gain: &GainOpts, check: bool, output: Option<&Path>) -> CliResult<()> {
    let l = load(path)?;
    let (report, theta) = influence_report(&l, gain)?;
    if check {
        let x0 = require_x0(&l.file)?;
        let opts = SimulationOptions {
            tol: 1e-13,
            ..SimulationOptions::default()
        };
        let log = simulate(&l.pipeline.matrices, &x0, opts)?;
        log.ensure_converged(opts.max_iters)?;
        let predicted = theta.apply(&x0);
        for (i, (a, b)) in predicted.iter().zip(log.final_state()).enumerate() {
            if (a - b).abs() > CHECK_TOL * b.abs().max(1.0) {
                return Err(CliError::new(
                    3,
                    format!("influence check failed at agent {i}: theta x0 = {a}, simulated {b}"),
                ));
            }
        }
    }
    emit(&report.to_toml_string(), output)
}

fn cmd_centrality(path: &Path, gain: &GainOpts, output: Option<&Path>) -> CliResult<()> {
    let l = load(path)?;
    let (mut report, theta) = influence_report(&l, gain)?;
    report.centrality = Some(CentralitySection::new(&absolute_centrality(&theta)));
    emit(&report.to_toml_string(), output)
}

#[derive(Serialize)]
struct WhatIfSection {
    kind: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    flipped_edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agent: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    mean_abs_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit_deviation: Option<f64>,
    unchanged: Vec<usize>,
    baseline: Vec<f64>,
    modified: Vec<f64>,
    deltas: Vec<f64>,
}

#[derive(Serialize)]
struct WhatIfReport {
    schema_version: u32,
    whatif: WhatIfSection,
}

fn whatif_section(kind: &'static str, r: &WhatIfResult) -> WhatIfSection {
    let round = |v: &[f64]| v.iter().copied().map(round_sig).collect();
    WhatIfSection {
        kind,
        flipped_edges: Vec::new(),
        agent: None,
        delta: None,
        mean_abs_deviation: round_sig(r.mean_abs_deviation),
        unit_deviation: r.unit_deviation.map(round_sig),
        unchanged: r.unchanged.clone(),
        baseline: round(&r.baseline),
        modified: round(&r.modified),
        deltas: round(&r.deltas),
    }
}

fn cmd_whatif(path: &Path, flips: &[usize], perturb: Option<&[String]>, output: Option<&Path>) -> CliResult<()> {
    let section = match (flips.is_empty(), perturb) {
        (false, None) => {
            let l = load(path)?;
            let x0 = require_x0(&l.file)?;
            let edges: Vec<(usize, usize)> = flips.chunks(2).map(|c| (c[0], c[1])).collect();
            let r = flip_edge_signs(&l.pipeline, &x0, &edges)?;
            WhatIfSection {
                flipped_edges: edges.iter().map(|&(a, b)| [a, b]).collect(),
                ..whatif_section("flip-edge", &r)
            }
        }
        (true, Some(args)) => {
            let agent: usize = args[0]
                .parse()
                .map_err(|_| CliError::new(2, format!("bad agent id {}", args[0])))?;
            let delta: f64 = args[1]
                .parse()
                .map_err(|_| CliError::new(2, format!("bad perturbation {}", args[1])))?;
            let l = load(path)?;
            let x0 = require_x0(&l.file)?;
            let r = perturb_initial(&l.pipeline, &x0, agent, delta)?;
            WhatIfSection {
                agent: Some(agent),
                delta: Some(delta),
                ..whatif_section("perturb", &r)
            }
        }
        _ => return Err(CliError::new(2, "give either --flip-edge pairs or one --perturb")),
    };
    let report = WhatIfReport {
        schema_version: signed_influence::io::SCHEMA_VERSION,
        whatif: section,
    };
    emit(&toml::to_string(&report).expect("reports always serialise"), output)
}

fn cmd_export_sfg(path: &Path, reduced: bool, dot_path: Option<&Path>) -> CliResult<()> {
    let l = load(path)?;
    let (g, name) = if reduced {
        (l.pipeline.reduced_sfg()?, "reduced_sfg")
    } else {
        (l.pipeline.full_sfg(), "sfg")
    };
    emit(&dot::to_dot(&g, name), dot_path)
}

fn cmd_diff(left: &Path, right: &Path, rtol: f64, atol: f64) -> CliResult<()> {
    let a = load_value(left)?;
    let b = load_value(right)?;
    let d = diff_values(&a, &b, rtol, atol);
    if d.is_empty() {
        return Ok(());
    }
    let mut text = d.join("\n");
    text.push('\n');
    emit(&text, None)?;
    Err(CliError::new(3, format!("{} difference(s)", d.len())))
}
