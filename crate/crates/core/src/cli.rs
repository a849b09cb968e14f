//! Command-line configuration, run dispatch and report files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cases::CaseSpec;
use crate::diagnostics::{energy_monotone, ConvergenceReport, EnergyCheck, ErrorNorms, LevelResult};
use crate::error::{Error, Result};
use crate::fv::DEFAULT_THETA;
use crate::run::{hex, run_case, Field, RunOptions, RunOutcome};
use crate::scheme::SchemeKind;
use crate::timestep::{Integrator, Termination, TimeConfig, DEFAULT_CFL, DEFAULT_MAX_STEPS};

/// Cells per run above which `--large` is required.
pub const DESK_CELLS: usize = 160 * 160;
/// Final time above which `--large` is required.
pub const DESK_TIME: f64 = 100.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Debug, Parser, Default)]
#[command(name = "gflux", version, about = "Global-flux and finite-volume solvers for 2D hyperbolic balance laws")]
pub struct Cli {
    /// Test case id.
    #[arg(long)]
    pub case: Option<String>,
    /// gf, fv1 or fv2.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Cells per direction.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Comma-separated mesh sizes of a convergence study.
    #[arg(long)]
    pub convergence: Option<String>,
    #[arg(long)]
    pub tfinal: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// euler or rk2.
    #[arg(long)]
    pub integrator: Option<String>,
    /// Generalized minmod parameter of fv2.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Target Mach number of the Euler vortex.
    #[arg(long)]
    pub mach: Option<f64>,
    /// Background velocity of the Euler vortex.
    #[arg(long)]
    pub u0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// Case parameter override `name=value`; repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[arg(long = "steady-tol")]
    pub steady_tol: Option<f64>,
    #[arg(long = "max-steps")]
    pub max_steps: Option<usize>,
    /// Write the field every k steps.
    #[arg(long = "output-every")]
    pub output_every: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key=value` lines mirroring the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Allow runs beyond desk scale.
    #[arg(long)]
    pub large: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Single { nx: usize, ny: usize },
    Convergence(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseSpec,
    pub scheme: SchemeKind,
    pub mode: Mode,
    pub options: RunOptions,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub large: bool,
}

const KEYS: [&str; 21] = [
    "case",
    "scheme",
    "n",
    "nx",
    "ny",
    "convergence",
    "tfinal",
    "cfl",
    "integrator",
    "theta",
    "mach",
    "u0",
    "v0",
    "param",
    "steady_tol",
    "max_steps",
    "output_every",
    "out",
    "threads",
    "large",
    "config",
];

/// Parses `key=value` lines; `#` starts a comment. Keys accept `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got '{line}'", n + 1)))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) || key == "config" {
            return Err(Error::Config(format!("line {}: unknown key '{}'", n + 1, k.trim())));
        }
        map.entry(key).or_default().push(v.trim().to_string());
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("malformed value for {key}: '{v}'")))
}

fn parse_list(v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|s| num("convergence", s.trim())).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("malformed value for {key}: '{v}'"))),
    }
}

/// Merges a config file (if any) with the flags; flags win.
pub fn build_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(p) => parse_config_file(&fs::read_to_string(p)?)?,
        None => BTreeMap::new(),
    };
    let last = |k: &str| file.get(k).and_then(|v| v.last()).map(String::as_str);
    let pick_num = |flag: Option<f64>, k: &str| -> Result<Option<f64>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => last(k).map(|v| num(k, v)).transpose(),
        }
    };
    let pick_usize = |flag: Option<usize>, k: &str| -> Result<Option<usize>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => last(k).map(|v| num(k, v)).transpose(),
        }
    };

    let case_id = cli
        .case
        .as_deref()
        .or(last("case"))
        .ok_or_else(|| Error::Config("--case is required".into()))?;
    let mut case: CaseSpec = case_id.parse()?;
    let scheme: SchemeKind = cli.scheme.as_deref().or(last("scheme")).unwrap_or("gf").parse()?;

    let mut params: Vec<String> = file.get("param").cloned().unwrap_or_default();
    params.extend(cli.params.iter().cloned());
    for (k, flag) in [("mach", cli.mach), ("u0", cli.u0), ("v0", cli.v0)] {
        if let Some(v) = pick_num(flag, k)? {
            params.push(format!("{k}={v}"));
        }
    }
    for p in &params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("parameter must be name=value, got '{p}'")))?;
        case.set_param(k.trim(), num(k, v.trim())?)?;
    }

    let n = pick_usize(cli.n, "n")?;
    let nx = pick_usize(cli.nx, "nx")?;
    let ny = pick_usize(cli.ny, "ny")?;
    let conv = match &cli.convergence {
        Some(v) => Some(parse_list(v)?),
        None => last("convergence").map(parse_list).transpose()?,
    };
    let mode = match conv {
        Some(list) => {
            if n.is_some() || nx.is_some() || ny.is_some() {
                return Err(Error::Config("--convergence excludes --n/--nx/--ny".into()));
            }
            if list.len() < 2 {
                return Err(Error::Config("--convergence needs at least two meshes".into()));
            }
            if !case.has_exact_solution() {
                return Err(Error::Config(format!("case {} has no exact solution for a convergence study", case.id())));
            }
            Mode::Convergence(list)
        }
        None => {
            let base = n.unwrap_or(40);
            Mode::Single {
                nx: nx.unwrap_or(base),
                ny: ny.unwrap_or(base),
            }
        }
    };

    let integrator: Integrator = cli.integrator.as_deref().or(last("integrator")).unwrap_or("rk2").parse()?;
    let time = TimeConfig {
        integrator,
        cfl: pick_num(cli.cfl, "cfl")?.unwrap_or(DEFAULT_CFL),
        t_final: pick_num(cli.tfinal, "tfinal")?.unwrap_or_else(|| case.default_t_final()),
        max_steps: pick_usize(cli.max_steps, "max_steps")?.unwrap_or(DEFAULT_MAX_STEPS),
        steady_tol: pick_num(cli.steady_tol, "steady_tol")?.unwrap_or_else(|| case.default_steady_tol()),
        fixed_dt: None,
    };
    time.validate()?;
    let options = RunOptions {
        scheme,
        theta: pick_num(cli.theta, "theta")?.unwrap_or(DEFAULT_THETA),
        time,
        output_every: pick_usize(cli.output_every, "output_every")?,
    };
    crate::scheme::Scheme::from_kind(scheme, options.theta)?;
    let large = cli.large || last("large").map(|v| parse_bool("large", v)).transpose()?.unwrap_or(false);
    let cfg = RunConfig {
        case,
        scheme,
        mode,
        options,
        out: cli.out.clone().or_else(|| last("out").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out")),
        threads: pick_usize(cli.threads, "threads")?,
        large,
    };
    cfg.check_scale()?;
    Ok(cfg)
}

impl RunConfig {
    fn meshes(&self) -> Vec<(usize, usize)> {
        match &self.mode {
            Mode::Single { nx, ny } => vec![(*nx, *ny)],
            Mode::Convergence(l) => l.iter().map(|&n| (n, n)).collect(),
        }
    }

    fn check_scale(&self) -> Result<()> {
        if self.large {
            return Ok(());
        }
        let cells = self.meshes().iter().map(|(a, b)| a * b).max().unwrap_or(0);
        let mut t = self.options.time.t_final;
        if let CaseSpec::EulerVortexPerturbed { t_pre, .. } = self.case {
            t = t.max(t_pre);
        }
        if cells > DESK_CELLS || t > DESK_TIME {
            return Err(Error::Config(format!(
                "run exceeds desk scale ({cells} cells, t_final {t}); pass --large to proceed"
            )));
        }
        Ok(())
    }

    /// Normalized `key = value` lines of the effective configuration.
    pub fn echo(&self) -> String {
        let mut lines = vec![
            format!("case = {}", self.case.id()),
            format!("scheme = {}", self.scheme.name()),
        ];
        for (k, v) in self.case.params() {
            lines.push(format!("param.{k} = {v}"));
        }
        match &self.mode {
            Mode::Single { nx, ny } => {
                lines.push(format!("nx = {nx}"));
                lines.push(format!("ny = {ny}"));
            }
            Mode::Convergence(l) => lines.push(format!(
                "convergence = {}",
                l.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
            )),
        }
        let t = &self.options.time;
        lines.push(format!("integrator = {}", t.integrator.name()));
        lines.push(format!("cfl = {}", t.cfl));
        lines.push(format!("tfinal = {}", t.t_final));
        lines.push(format!("steady_tol = {}", t.steady_tol));
        lines.push(format!("max_steps = {}", t.max_steps));
        lines.push(format!("theta = {}", self.options.theta));
        if let Some(k) = self.options.output_every {
            lines.push(format!("output_every = {k}"));
        }
        lines.join("\n") + "\n"
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::echo`].
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.echo().as_bytes()))[..16].to_string()
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub config_hash: String,
    pub case: String,
    pub scheme: String,
    pub nx: usize,
    pub ny: usize,
    pub t_final: f64,
    pub steps: usize,
    pub termination: Termination,
    pub steady_residual: f64,
    pub max_steady_residual: f64,
    pub conservation_drift: Vec<f64>,
    pub components: Vec<&'static str>,
    pub errors: Option<ErrorNorms>,
    pub scaled_momentum_error: Option<f64>,
    pub max_mach: Option<f64>,
    pub min_density: Option<f64>,
    pub all_finite: bool,
    pub energy: Vec<f64>,
    pub energy_check: Option<EnergyCheck>,
    pub pre_run_digest: Option<String>,
    pub field_digest: String,
    pub wall_time: f64,
}

impl Summary {
    pub fn new(cfg: &RunConfig, out: &RunOutcome) -> Self {
        let energy_check = (!out.energy.is_empty()).then(|| energy_monotone(&out.energy, &out.dts, 1.0));
        Summary {
            config_hash: cfg.hash(),
            case: cfg.case.id().into(),
            scheme: cfg.scheme.name().into(),
            nx: out.grid.nx,
            ny: out.grid.ny,
            t_final: out.stats.t,
            steps: out.stats.steps,
            termination: out.stats.termination,
            steady_residual: out.stats.final_residual(),
            max_steady_residual: out.stats.max_residual(),
            conservation_drift: out.conservation_drift.clone(),
            components: out.field.component_names(),
            errors: out.errors.clone(),
            scaled_momentum_error: out.scaled_momentum_error,
            max_mach: out.max_mach,
            min_density: out.min_density,
            all_finite: out.field.all_finite(),
            energy: out.energy.clone(),
            energy_check,
            pre_run_digest: out.pre_run_digest.clone(),
            field_digest: out.field.digest(),
            wall_time: out.wall_time,
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Executes a configuration and writes its report files.
pub fn execute(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out)?;
    let hash = cfg.hash();
    write(&cfg.out.join("config.txt"), &format!("# config_hash={hash}\n{}", cfg.echo()))?;
    match &cfg.mode {
        Mode::Single { nx, ny } => {
            let grid = cfg.case.grid(*nx, *ny)?;
            let mut io_err = None;
            let out = run_case(&cfg.case, *nx, *ny, &cfg.options, |n, _, f: &Field| {
                if io_err.is_none() {
                    io_err = write(&cfg.out.join(format!("field_{n:07}.csv")), &f.to_csv(&grid, &hash)).err();
                }
            })?;
            if let Some(e) = io_err {
                return Err(e);
            }
            write(&cfg.out.join("field_final.csv"), &out.field.to_csv(&out.grid, &hash))?;
            let summary = Summary::new(cfg, &out);
            write(&cfg.out.join("summary.json"), &serde_json::to_string_pretty(&summary)?)?;
            eprintln!(
                "{} {} {}x{}: t={} steps={} residual={:.3e}",
                cfg.case.id(),
                cfg.scheme.name(),
                nx,
                ny,
                out.stats.t,
                out.stats.steps,
                out.stats.final_residual()
            );
        }
        Mode::Convergence(list) => {
            let report = convergence(cfg, list, &hash)?;
            write(&cfg.out.join("convergence.csv"), &report.to_csv())?;
            write(&cfg.out.join("convergence.json"), &report.to_json()?)?;
            eprint!("{}", report.to_csv());
        }
    }
    Ok(())
}

/// Runs each mesh in turn and collects errors against the exact solution.
pub fn convergence(cfg: &RunConfig, list: &[usize], hash: &str) -> Result<ConvergenceReport> {
    let mut levels = Vec::new();
    let mut components = Vec::new();
    for &n in list {
        let out = run_case(&cfg.case, n, n, &cfg.options, |_, _, _| {})?;
        components = out.field.component_names().iter().map(|s| s.to_string()).collect();
        levels.push(LevelResult {
            nx: n,
            ny: n,
            errors: out
                .errors
                .clone()
                .ok_or_else(|| Error::Config("no exact solution".into()))?,
            conservation_drift: out.conservation_drift.clone(),
            steps: out.stats.steps,
            wall_time: out.wall_time,
        });
    }
    Ok(ConvergenceReport {
        case: cfg.case.id().into(),
        scheme: cfg.scheme.name().into(),
        components,
        levels,
        config_hash: hash.into(),
    })
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match execute(&cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_abort() {
                EXIT_ABORT
            } else {
                EXIT_USAGE
            }
        }
    }
}
