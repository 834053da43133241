//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 input error, 4 capacity error.
//! Output is JSON unless `--format csv` is given; every command is
//! deterministic under a fixed `--seed` unless `--timing` is set.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bench::{boundary_lower_bound, gen_hsc, gen_rqc, BenchSidecar, HscSpec, RqcSpec};
use crate::circuit::{parse, serialize, Circuit, MetricsReport};
use crate::emit::{emit, resource_bounds, EmitScheme, GhzPrep};
use crate::engine::{bits_to_string, run_shot, sample, shot_rng, EngineError};
use crate::gadgetize::gadgetize;
use crate::hybrid::{estimate_all, plan, HybridError};
use crate::pauli::PauliOperator;
use crate::statevector::{BackendError, BackendKind};

pub const WORKERS_ENV: &str = "PBC_WORKERS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Capacity(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Capacity(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Capacity(m) => m,
        }
    }
}

fn capacity(e: &BackendError) -> CliError {
    CliError::Capacity(format!("{e}; try --backend dummy"))
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::Capacity { .. } => capacity(&e),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Backend(b) => b.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<HybridError> for CliError {
    fn from(e: HybridError) -> Self {
        match e {
            HybridError::Backend(b) => b.into(),
            HybridError::Engine(en) => en.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_error!(
    crate::circuit::CircuitError,
    crate::emit::EmitError,
    crate::bench::BenchError,
    crate::pauli::PauliError,
    std::io::Error,
    serde_json::Error
);

#[derive(Debug, Parser)]
#[command(name = "pbc", version, about = "Pauli-based computation for Clifford+T circuits")]
pub struct Cli {
    /// Worker threads (default: the PBC_WORKERS variable, else all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a circuit shot by shot.
    Sample(SampleArgs),
    /// Estimate output probabilities with virtual qubits.
    Hybrid(HybridArgs),
    /// Generate benchmark circuits.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Emit the adaptive circuit for one shot or for a list of Paulis.
    Emit(EmitArgs),
    /// Print resource bounds and boundary-line values.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum SchemeArg {
    #[default]
    Aux,
    Cascade,
    CascadeElide,
    Ghz,
    GhzConst,
}

impl From<SchemeArg> for EmitScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Aux => EmitScheme::AuxQubit,
            SchemeArg::Cascade => EmitScheme::CnotCascade {
                elide_uncompute: false,
            },
            SchemeArg::CascadeElide => EmitScheme::CnotCascade {
                elide_uncompute: true,
            },
            SchemeArg::Ghz => EmitScheme::GhzFanout {
                prep: GhzPrep::Tree,
            },
            SchemeArg::GhzConst => EmitScheme::GhzFanout {
                prep: GhzPrep::ConstDepth,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum BackendArg {
    #[default]
    Statevector,
    Dummy,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Statevector => BackendKind::StateVector,
            BackendArg::Dummy => BackendKind::Dummy,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BackendArg::Statevector)]
    pub backend: BackendArg,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Include wall-clock timings (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Include per-shot traces.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub circuit: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub shots: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Aux)]
    pub scheme: SchemeArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HybridArgs {
    pub circuit: PathBuf,
    #[arg(long, short, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p_fail: f64,
    /// Output bit to estimate (default: all, each with its own budget).
    #[arg(long)]
    pub qubit: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Hidden-shift circuit.
    Hsc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        nccz: usize,
        #[arg(long, default_value_t = 10)]
        nzcz: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hidden string as 0/1 characters.
        #[arg(long)]
        hidden: Option<String>,
        /// Circuit file; the sidecar goes to the same path plus `.json`.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Grid random circuit.
    Rqc {
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cycles: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_retries: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// Circuit file, or a file with one Pauli per line when --paulis is set.
    pub input: PathBuf,
    #[arg(long)]
    pub paulis: bool,
    #[arg(long, value_enum, default_value_t = SchemeArg::Aux)]
    pub scheme: SchemeArg,
    /// Shot index whose measurement record is emitted.
    #[arg(long, default_value_t = 0)]
    pub shot: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// T-counts for the resource-bound table.
    #[arg(long, num_args = 1..)]
    pub t: Vec<usize>,
    /// Cycle counts for the boundary-line table.
    #[arg(long, num_args = 1..)]
    pub cycles: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    let workers = match cli.workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => match v.parse::<usize>() {
                Ok(w) => Some(w),
                Err(_) => {
                    let _ = writeln!(stderr, "error: {WORKERS_ENV} must be a positive integer");
                    return 2;
                }
            },
            Err(_) => None,
        },
    };
    if workers == Some(0) {
        let _ = writeln!(stderr, "error: worker count must be positive");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(out) => match out.write(stdout) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {}", e.message());
                e.code()
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

/// Result of a command: text for stdout or a file, plus extra files.
struct Output {
    text: String,
    path: Option<PathBuf>,
    files: Vec<(PathBuf, String)>,
}

impl Output {
    fn new(text: String, path: Option<PathBuf>) -> Self {
        Output {
            text,
            path,
            files: Vec::new(),
        }
    }

    fn write(self, stdout: &mut dyn Write) -> Result<(), CliError> {
        for (p, content) in &self.files {
            std::fs::write(p, content)?;
        }
        match self.path {
            Some(p) => std::fs::write(p, &self.text)?,
            None => stdout.write_all(self.text.as_bytes())?,
        }
        Ok(())
    }
}

fn dispatch(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Sample(a) => cmd_sample(&a),
        Command::Hybrid(a) => cmd_hybrid(&a),
        Command::Gen(g) => cmd_gen(g),
        Command::Emit(a) => cmd_emit(&a),
        Command::Bounds(a) => cmd_bounds(&a),
    }
}

fn read_circuit(path: &Path) -> Result<Circuit, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Spread {
    fn of(values: impl IntoIterator<Item = f64>) -> Option<Spread> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        Some(Spread {
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

fn cmd_sample(a: &SampleArgs) -> Result<Output, CliError> {
    let c = read_circuit(&a.circuit)?;
    let gc = gadgetize(&c)?;
    let start = Instant::now();
    let res = sample(&gc, a.shots, a.common.backend.into(), a.common.seed)?;
    let elapsed = start.elapsed();
    let scheme: EmitScheme = a.scheme.into();
    let metrics = res
        .results
        .iter()
        .map(|r| Ok(emit(&r.quantum_paulis, gc.t, scheme)?.circuit.metrics()))
        .collect::<Result<Vec<_>, CliError>>()?;
    if a.common.format == Some(Format::Csv) {
        let mut s = String::from("output,count\n");
        for (k, v) in &res.histogram {
            s += &format!("{k},{v}\n");
        }
        return Ok(Output::new(s, a.common.output.clone()));
    }
    let bounds = resource_bounds(gc.t.max(1));
    let mut report = json!({
        "circuit": gc.summary(),
        "shots": a.shots,
        "seed": a.common.seed,
        "backend": BackendKind::from(a.common.backend),
        "histogram": res.histogram,
        "quantum_measurements": Spread::of(res.results.iter().map(|r| r.stats.num_quantum_measurements as f64)),
        "emitted": {
            "scheme": scheme,
            "depth": Spread::of(metrics.iter().map(|m| m.depth as f64)),
            "count_1q": Spread::of(metrics.iter().map(|m| m.count_1q as f64)),
            "count_cnot": Spread::of(metrics.iter().map(|m| m.count_cnot as f64)),
            "bounds": bounds,
        },
    });
    if a.common.trace {
        report["trace"] = Value::Array(
            res.results
                .iter()
                .map(|r| json!({"output": r.output_string(), "trace": r.trace_records()}))
                .collect(),
        );
    }
    if a.common.timing {
        report["timing"] = json!({
            "wall_time_s": elapsed.as_secs_f64(),
            "classical_ms_per_shot": Spread::of(res.results.iter().map(|r| r.stats.wall_time.as_secs_f64() * 1e3)),
        });
    }
    Ok(Output::new(to_json(&report)?, a.common.output.clone()))
}

fn cmd_hybrid(a: &HybridArgs) -> Result<Output, CliError> {
    let c = read_circuit(&a.circuit)?;
    let gc = gadgetize(&c)?;
    let outputs: Vec<usize> = match a.qubit {
        Some(q) => vec![q],
        None => (0..gc.output_cbits.len()).collect(),
    };
    let start = Instant::now();
    let mut report = estimate_all(
        &gc,
        &outputs,
        a.k,
        a.epsilon,
        a.p_fail,
        a.common.backend.into(),
        a.common.seed,
        a.common.trace,
    )?;
    if a.common.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    if a.common.format == Some(Format::Csv) {
        let mut s = String::from("output,p_hat,epsilon,N\n");
        for e in &report.estimates {
            s += &format!("{},{},{},{}\n", e.output, e.p_hat, e.half_width, e.n);
        }
        return Ok(Output::new(s, a.common.output.clone()));
    }
    let mut v = serde_json::to_value(&report)?;
    v["n_naive"] = json!(plan(a.k, a.epsilon, a.p_fail)?.n_naive);
    Ok(Output::new(to_json(&v)?, a.common.output.clone()))
}

fn sidecar_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn generated(circuit: &Circuit, sidecar: BenchSidecar, output: Option<PathBuf>) -> Result<Output, CliError> {
    let text = serialize(circuit);
    let side = to_json(&sidecar)?;
    Ok(match output {
        Some(p) => {
            let mut o = Output::new(side.clone(), None);
            o.files.push((p.clone(), text));
            o.files.push((sidecar_path(&p), side));
            o
        }
        None => Output::new(to_json(&json!({"circuit": text, "sidecar": sidecar}))?, None),
    })
}

fn parse_bits(s: &str) -> Result<Vec<bool>, CliError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("hidden string must be 0/1 characters, got {s:?}"))),
        })
        .collect()
}

fn cmd_gen(g: GenCommand) -> Result<Output, CliError> {
    match g {
        GenCommand::Hsc {
            n,
            nccz,
            nzcz,
            seed,
            hidden,
            output,
        } => {
            let spec = HscSpec {
                n,
                n_ccz: nccz,
                n_zcz: nzcz,
                seed,
                hidden: hidden.as_deref().map(parse_bits).transpose()?,
            };
            let hsc = gen_hsc(&spec)?;
            let sidecar = BenchSidecar {
                spec: serde_json::to_value(&spec)?,
                hidden_string: Some(bits_to_string(&hsc.hidden_string)),
                achieved_t_count: hsc.circuit.t_count(),
            };
            generated(&hsc.circuit, sidecar, output)
        }
        GenCommand::Rqc {
            cols,
            rows,
            cycles,
            t,
            seed,
            max_retries,
            output,
        } => {
            let spec = RqcSpec {
                cols,
                rows,
                cycles,
                t_target: t,
                seed,
                max_retries,
            };
            let c = gen_rqc(&spec)?;
            let sidecar = BenchSidecar {
                spec: serde_json::to_value(&spec)?,
                hidden_string: None,
                achieved_t_count: c.t_count(),
            };
            generated(&c, sidecar, output)
        }
    }
}

fn read_paulis(path: &Path) -> Result<(Vec<PauliOperator>, usize), CliError> {
    let text = std::fs::read_to_string(path)?;
    let paulis = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<PauliOperator>())
        .collect::<Result<Vec<_>, _>>()?;
    let t = paulis
        .first()
        .map(PauliOperator::width)
        .ok_or_else(|| CliError::Input(format!("{}: no Paulis", path.display())))?;
    Ok((paulis, t))
}

fn cmd_emit(a: &EmitArgs) -> Result<Output, CliError> {
    let (paulis, t) = if a.paulis {
        read_paulis(&a.input)?
    } else {
        let gc = gadgetize(&read_circuit(&a.input)?)?;
        let backend = BackendKind::from(a.common.backend);
        let mut b = backend.create(gc.t)?;
        let mut rng = shot_rng(a.common.seed, a.shot);
        let r = run_shot(&gc, &[], b.as_mut(), &mut rng)?;
        (r.quantum_paulis, gc.t)
    };
    let e = emit(&paulis, t, a.scheme.into())?;
    let report = json!({
        "metrics": MetricsReport::of(&e.circuit),
        "bounds": resource_bounds(t.max(1)),
        "sidecar": e.sidecar(t),
    });
    let text = serialize(&e.circuit);
    Ok(match &a.common.output {
        Some(p) => {
            let mut o = Output::new(to_json(&report)?, None);
            o.files.push((p.clone(), text));
            o.files.push((sidecar_path(p), to_json(&e.sidecar(t))?));
            o
        }
        None => {
            let mut v = report;
            v["circuit"] = json!(text);
            Output::new(to_json(&v)?, None)
        }
    })
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Output, CliError> {
    if a.t.is_empty() && a.cycles.is_empty() {
        return Err(CliError::Usage("bounds needs --t and/or --cycles".into()));
    }
    if a.t.contains(&0) {
        return Err(CliError::Usage("--t must be at least 1".into()));
    }
    match a.format {
        Format::Csv => {
            let mut s = String::new();
            if !a.t.is_empty() {
                s += "t,n_hs_ub,n_cnot_ub,depth_ub\n";
                for &t in &a.t {
                    let b = resource_bounds(t);
                    s += &format!("{t},{},{},{}\n", b.n_hs_ub, b.n_cnot_ub, b.depth_ub);
                }
            }
            if !a.cycles.is_empty() {
                s += "cycles,t_lower_bound\n";
                for &c in &a.cycles {
                    s += &format!("{c},{:.4}\n", boundary_lower_bound(c));
                }
            }
            Ok(Output::new(s, None))
        }
        Format::Json => {
            let v = json!({
                "resource_bounds": a.t.iter().map(|&t| json!({"t": t, "bounds": resource_bounds(t)})).collect::<Vec<_>>(),
                "boundary": a.cycles.iter().map(|&c| json!({"cycles": c, "t_lower_bound": boundary_lower_bound(c)})).collect::<Vec<_>>(),
            });
            Ok(Output::new(to_json(&v)?, None))
        }
    }
}
