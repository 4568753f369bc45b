//! `maxop <subcommand> [flags]`. Flags are layered over defaults and a
//! `--config` JSON file overrides both. `MAXOP_THREADS` caps the rayon pool.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcmodel::{FunctionSource, PiecewiseLinearFn};
use crate::kernels::{make_kernel, KernelFamily, KernelSpec};
use crate::oracle::BruteForce;
use crate::scalespace::{maximal_profile, Grid};
use crate::suite::{continuity_grid, perturbation, run_suite, Suite, SuiteConfig, SuiteOutcome};
use crate::svg::Plot;
use crate::verify::{continuity_experiment, fmt17, to_json, ContinuityReport, ContinuitySequence, SequenceMode, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "maxop", version, about = "Maximal functions of Poisson, heat and fractional Poisson kernels")]
pub struct Cli {
    /// JSON file whose fields override the command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel constants, or a table of phi with `tabulate`.
    Kernel {
        #[command(subcommand)]
        action: Option<KernelAction>,
        #[command(flatten)]
        common: Common,
    },
    /// Maximal function of one input on a uniform grid (CSV: x, u, ustar, tstar).
    Maximal {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overlay plot of |u| and u*.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a check suite over the seeded corpus.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        corpus_n: Option<usize>,
    },
    /// Error table E_j for a sequence u_j -> u.
    Continuity {
        #[command(flatten)]
        common: Common,
        /// Perturbation g as function JSON (inline or path); seeded when absent.
        #[arg(long)]
        perturbation: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<u32>>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Dense-ladder oracle next to the certified search.
    Bruteforce {
        #[command(flatten)]
        common: Common,
        /// Run over the seeded corpus instead of one function.
        #[arg(long)]
        corpus: bool,
        #[arg(long)]
        corpus_n: Option<usize>,
        #[arg(long)]
        scales: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum KernelAction {
    /// CSV of (x, phi(x)) plus an SVG plot.
    Tabulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelArg {
    Poisson,
    Heat,
    Fracpoisson,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Additive,
    Translate,
    Jitter,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Fractional order, within [0.01, 0.99].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Function JSON, inline or a path. Defaults to the unit tent.
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub grid_span: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Every setting that a config file may carry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub kernel: Option<KernelArg>,
    pub alpha: Option<f64>,
    pub function: Option<FunctionSource>,
    pub perturbation: Option<FunctionSource>,
    pub grid_n: Option<usize>,
    pub grid_span: Option<f64>,
    pub tol: Option<f64>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub suite: Option<Suite>,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub corpus_n: Option<usize>,
    pub mode: Option<ModeArg>,
    pub indices: Option<Vec<u32>>,
    pub scales: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config { field: "config".into(), reason: e.to_string() })
    }

    /// Fields set here replace the ones in `base`.
    pub fn over(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            kernel: self.kernel.or(base.kernel),
            alpha: self.alpha.or(base.alpha),
            function: self.function.or(base.function),
            perturbation: self.perturbation.or(base.perturbation),
            grid_n: self.grid_n.or(base.grid_n),
            grid_span: self.grid_span.or(base.grid_span),
            tol: self.tol.or(base.tol),
            delta: self.delta.or(base.delta),
            seed: self.seed.or(base.seed),
            suite: self.suite.or(base.suite),
            out: self.out.or(base.out),
            out_dir: self.out_dir.or(base.out_dir),
            corpus_n: self.corpus_n.or(base.corpus_n),
            mode: self.mode.or(base.mode),
            indices: self.indices.or(base.indices),
            scales: self.scales.or(base.scales),
        }
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kernels: Vec<KernelSpec>,
    pub function: PiecewiseLinearFn,
    pub perturbation: Option<PiecewiseLinearFn>,
    pub grid_n: usize,
    pub grid_span: f64,
    pub tol: f64,
    pub delta: f64,
    pub seed: u64,
    pub suite: Suite,
    pub out: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub corpus_n: usize,
    pub mode: ModeArg,
    pub indices: Vec<u32>,
    pub scales: usize,
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::Config { field: field.into(), reason: reason.into() }
}

impl RunConfig {
    /// `kernel` unset means all three families when `all_by_default`,
    /// otherwise Poisson.
    pub fn resolve(c: ConfigFile, all_by_default: bool) -> Result<Self> {
        let alpha = c.alpha.unwrap_or(0.5);
        if !(0.01..=0.99).contains(&alpha) {
            return Err(bad("alpha", format!("{alpha} is outside [0.01, 0.99]")));
        }
        let frac = || make_kernel(KernelFamily::FractionalPoisson, Some(alpha)).map_err(|e| bad("alpha", e.to_string()));
        let kernel = c.kernel.unwrap_or(if all_by_default { KernelArg::All } else { KernelArg::Poisson });
        let kernels = match kernel {
            KernelArg::Poisson => vec![KernelSpec::poisson()],
            KernelArg::Heat => vec![KernelSpec::heat()],
            KernelArg::Fracpoisson => vec![frac()?],
            KernelArg::All => vec![KernelSpec::poisson(), KernelSpec::heat(), frac()?],
        };
        let function = match c.function {
            Some(src) => src.build().map_err(|e| bad("function", e.to_string()))?,
            None => PiecewiseLinearFn::tent(0.0, 1.0, 1.0)?,
        };
        let perturbation = c.perturbation.map(|p| p.build().map_err(|e| bad("perturbation", e.to_string()))).transpose()?;
        let grid_n = c.grid_n.unwrap_or(512);
        if grid_n < 16 {
            return Err(bad("grid-n", format!("{grid_n} is below 16")));
        }
        let grid_span = c.grid_span.unwrap_or(6.0);
        if !(grid_span > 0.0 && grid_span.is_finite()) {
            return Err(bad("grid-span", "must be positive and finite"));
        }
        let tol = c.tol.unwrap_or(1e-5);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(bad("tol", "must lie in (0, 1)"));
        }
        let delta = c.delta.unwrap_or(10.0 * tol);
        if !(delta > tol) {
            return Err(bad("delta", format!("{delta} must exceed tol {tol}")));
        }
        let corpus_n = c.corpus_n.unwrap_or(20);
        if corpus_n == 0 {
            return Err(bad("corpus-n", "must be at least 1"));
        }
        let indices = c.indices.unwrap_or_else(|| vec![1, 2, 4, 8, 16, 32, 64]);
        if indices.is_empty() || indices.contains(&0) || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("indices", "must be positive and increasing"));
        }
        let scales = c.scales.unwrap_or(crate::oracle::DENSE_SCALES);
        if scales < 16 {
            return Err(bad("scales", "must be at least 16"));
        }
        Ok(Self {
            kernels,
            function,
            perturbation,
            grid_n,
            grid_span,
            tol,
            delta,
            seed: c.seed.unwrap_or(7),
            suite: c.suite.unwrap_or(Suite::All),
            out: c.out,
            out_dir: c.out_dir.unwrap_or_else(|| PathBuf::from("maxop-out")),
            corpus_n,
            mode: c.mode.unwrap_or(ModeArg::Additive),
            indices,
            scales,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::symmetric(self.grid_span, self.grid_n)
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            corpus_n: self.corpus_n,
            kernels: self.kernels.clone(),
            grid_n: self.grid_n,
            grid_span: self.grid_span,
            tol: self.tol,
            delta: Some(self.delta),
        }
    }
}

fn parse_source(field: &str, text: &str) -> Result<FunctionSource> {
    let body = if text.trim_start().starts_with('{') { text.to_string() } else { fs::read_to_string(text)? };
    serde_json::from_str(&body).map_err(|e| bad(field, e.to_string()))
}

fn flags(c: &Common) -> Result<ConfigFile> {
    Ok(ConfigFile {
        kernel: c.kernel,
        alpha: c.alpha,
        function: c.function.as_deref().map(|s| parse_source("function", s)).transpose()?,
        grid_n: c.grid_n,
        grid_span: c.grid_span,
        tol: c.tol,
        delta: c.delta,
        seed: c.seed,
        ..ConfigFile::default()
    })
}

fn layered(cli_config: &Option<PathBuf>, from_flags: ConfigFile, all_by_default: bool) -> Result<RunConfig> {
    let merged = match cli_config {
        Some(p) => ConfigFile::load(p)?.over(from_flags),
        None => from_flags,
    };
    RunConfig::resolve(merged, all_by_default)
}

/// Caps the global pool at `MAXOP_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MAXOP_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| bad("MAXOP_THREADS", format!("`{v}` is not a positive integer")))?;
    if n == 0 {
        return Err(bad("MAXOP_THREADS", "must be positive"));
    }
    // a pool that already exists (e.g. second call in one process) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(fs::File::create(p)?)
        }
        None => Box::new(std::io::stdout()),
    })
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    Ok(())
}

#[derive(Serialize)]
struct KernelSummary {
    kernel: String,
    family: KernelFamily,
    alpha: Option<f64>,
    norm_const: f64,
    peak: f64,
    mass_by_quadrature: f64,
}

fn cmd_kernel(cfg: &RunConfig, action: &Option<KernelAction>) -> Result<i32> {
    match action {
        None => {
            let rows = cfg
                .kernels
                .iter()
                .map(|k| {
                    Ok(KernelSummary {
                        kernel: k.label(),
                        family: k.family(),
                        alpha: k.alpha(),
                        norm_const: k.norm_const(),
                        peak: k.peak(),
                        mass_by_quadrature: k.mass_by_panels(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            println!("{}", to_json(&rows)?);
        }
        Some(KernelAction::Tabulate { out, svg, .. }) => {
            let grid = cfg.grid()?;
            let mut w = csv::Writer::from_writer(sink(out)?);
            let mut header = vec!["x".to_string()];
            header.extend(cfg.kernels.iter().map(|k| format!("phi_{}", k.label())));
            w.write_record(&header)?;
            for &x in grid.points() {
                let mut row = vec![fmt17(x)];
                row.extend(cfg.kernels.iter().map(|k| fmt17(k.value(x))));
                w.write_record(&row)?;
            }
            w.flush()?;
            if let Some(path) = svg {
                let plot = cfg.kernels.iter().fold(Plot::new("kernels", "x", "phi(x)"), |p, k| {
                    p.series(&k.label(), grid.points().iter().map(|&x| (x, k.value(x))).collect())
                });
                write_file(path, &plot.render())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_maximal(cfg: &RunConfig, svg: &Option<PathBuf>) -> Result<i32> {
    let grid = cfg.grid()?;
    let k = &cfg.kernels[0];
    let u = &cfg.function;
    let p = maximal_profile(u, k, &grid, cfg.tol)?;
    let mut w = csv::Writer::from_writer(sink(&cfg.out)?);
    w.write_record(["x", "u", "ustar", "tstar"])?;
    for i in 0..p.len() {
        let x = p.grid[i];
        w.write_record([fmt17(x), fmt17(u.eval(x)), fmt17(p.ustar[i]), fmt17(p.tstar[i])])?;
    }
    w.flush()?;
    if let Some(path) = svg {
        let abs: Vec<(f64, f64)> = p.grid.iter().map(|&x| (x, u.eval(x).abs())).collect();
        let star: Vec<(f64, f64)> = p.grid.iter().copied().zip(p.ustar.iter().copied()).collect();
        let plot = Plot::new(&format!("maximal function, {}", k.label()), "x", "value").series("|u|", abs).series("u*", star);
        write_file(path, &plot.render())?;
    }
    Ok(EXIT_OK)
}

fn continuity_csv(path: &Path, reports: &[ContinuityReport]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "kernel", "j", "w11_distance", "sup_distance", "e_total", "e_contact", "e_detached", "e_contact_exact", "e_coarse",
        "resolution_ok",
    ])?;
    for r in reports {
        for row in &r.rows {
            w.write_record([
                r.kernel.clone(),
                row.j.to_string(),
                fmt17(row.w11_distance),
                fmt17(row.sup_distance),
                fmt17(row.e_total),
                fmt17(row.e_contact),
                fmt17(row.e_detached),
                fmt17(row.e_contact_exact),
                fmt17(row.e_coarse),
                row.resolution_ok.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn continuity_svg(path: &Path, reports: &[ContinuityReport]) -> Result<()> {
    let plot = reports.iter().fold(Plot::new("E_j against j", "j", "E_j").log_log(), |p, r| {
        p.series(&r.kernel, r.rows.iter().map(|row| (row.j as f64, row.e_total)).collect())
    });
    write_file(path, &plot.render())
}

/// Writes one JSON file per check, `summary.csv`, and the continuity table
/// and plot when present. Returns the paths of failing reports.
pub fn write_outcome(dir: &Path, outcome: &SuiteOutcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut failing = Vec::new();
    for name in outcome.check_names() {
        let entries: Vec<_> = outcome.entries.iter().filter(|e| e.check == name).collect();
        let path = dir.join(format!("{}.json", name.replace(':', "_")));
        write_file(&path, &(to_json(&entries)? + "\n"))?;
        if entries.iter().any(|e| !e.ok()) {
            failing.push(path);
        }
    }
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(["function", "kernel", "check", "verdict", "ok", "lhs", "rhs", "slack"])?;
    for e in &outcome.entries {
        let verdict = match e.report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
            Verdict::Inconclusive => "inconclusive",
        };
        w.write_record([
            e.function.clone(),
            e.kernel.clone(),
            e.check.clone(),
            verdict.to_string(),
            e.ok().to_string(),
            fmt17(e.report.lhs),
            fmt17(e.report.rhs),
            fmt17(e.report.slack),
        ])?;
    }
    w.flush()?;
    if !outcome.continuity.is_empty() {
        write_file(&dir.join("continuity_tables.json"), &(to_json(&outcome.continuity)? + "\n"))?;
        continuity_csv(&dir.join("continuity.csv"), &outcome.continuity)?;
        continuity_svg(&dir.join("continuity.svg"), &outcome.continuity)?;
    }
    Ok(failing)
}

fn report_failures(failing: &[PathBuf]) -> i32 {
    if failing.is_empty() {
        EXIT_OK
    } else {
        for p in failing {
            eprintln!("failed: {}", p.display());
        }
        EXIT_CHECK_FAILED
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    let outcome = run_suite(cfg.suite, &cfg.suite_config())?;
    let failing = write_outcome(&cfg.out_dir, &outcome)?;
    println!("{} reports in {}", outcome.entries.len(), cfg.out_dir.display());
    Ok(report_failures(&failing))
}

fn cmd_continuity(cfg: &RunConfig) -> Result<i32> {
    let g = match &cfg.perturbation {
        Some(g) => g.clone(),
        None => perturbation(cfg.seed, 0)?,
    };
    let mode = match cfg.mode {
        ModeArg::Additive => SequenceMode::Additive,
        ModeArg::Translate => SequenceMode::Translate,
        ModeArg::Jitter => SequenceMode::Jitter { seed: cfg.seed },
    };
    let seq = ContinuitySequence::new(cfg.function.clone(), g, cfg.indices.clone(), mode)?;
    let s = seq.members().iter().map(|m| m.support_radius()).fold(seq.base.support_radius(), f64::max) + 0.5;
    let h = 2.0 * s / (cfg.grid_n - 1) as f64;
    let reports = cfg
        .kernels
        .par_iter()
        .map(|k| {
            let grid = continuity_grid(&seq, k, h, cfg.tol)?.with_points(&seq.all_breakpoints());
            continuity_experiment(&seq, k, &grid, cfg.tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let dir = &cfg.out_dir;
    let json = dir.join("continuity.json");
    write_file(&json, &(to_json(&reports)? + "\n"))?;
    continuity_csv(&dir.join("continuity.csv"), &reports)?;
    continuity_svg(&dir.join("continuity.svg"), &reports)?;
    for r in &reports {
        println!("{}: E = {:?} ({:?})", r.kernel, r.errors(), r.summary.verdict);
    }
    let ok = reports.iter().all(|r| r.summary.verdict == Verdict::Pass);
    Ok(report_failures(if ok { &[] } else { std::slice::from_ref(&json) }))
}

fn cmd_bruteforce(cfg: &RunConfig, corpus: bool) -> Result<i32> {
    let fns: Vec<(String, PiecewiseLinearFn)> = if corpus {
        crate::corpus::generate_corpus(cfg.seed, cfg.corpus_n)?
            .into_iter()
            .enumerate()
            .map(|(i, f)| (format!("corpus-{i:03}"), f))
            .collect()
    } else {
        vec![("input".to_string(), cfg.function.clone())]
    };
    let grid = cfg.grid()?;
    let mut rows = Vec::new();
    for (id, f) in &fns {
        for k in &cfg.kernels {
            let p = maximal_profile(f, k, &grid, cfg.tol)?;
            let bf = BruteForce::new(f, k).with_scales(cfg.scales);
            let dense: Vec<_> = grid.points().par_iter().map(|&x| bf.maximal_at(x)).collect();
            for (i, m) in dense.into_iter().enumerate() {
                rows.push((id.clone(), k.label(), p.grid[i], p.ustar[i], m.value, m.t));
            }
        }
    }
    let mut w = csv::Writer::from_writer(sink(&cfg.out)?);
    w.write_record(["function", "kernel", "x", "ustar", "oracle", "oracle_t", "gap"])?;
    let mut worst = 0.0_f64;
    for (id, k, x, s, o, t) in &rows {
        worst = worst.max((s - o).abs());
        w.write_record([id.clone(), k.clone(), fmt17(*x), fmt17(*s), fmt17(*o), fmt17(*t), fmt17((s - o).abs())])?;
    }
    w.flush()?;
    let limit = cfg.tol.max(1e-5);
    eprintln!("max |ustar - oracle| = {worst:e} (limit {limit:e})");
    Ok(if worst <= limit { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn run(cli: Cli) -> Result<i32> {
    configure_threads()?;
    match &cli.command {
        Command::Kernel { action, common } => {
            let mut layer = flags(common)?;
            if let Some(KernelAction::Tabulate { common: inner, .. }) = action {
                layer = flags(inner)?.over(layer);
            }
            let cfg = layered(&cli.config, layer, true)?;
            cmd_kernel(&cfg, action)
        }
        Command::Maximal { common, out, svg } => {
            let cfg = layered(&cli.config, ConfigFile { out: out.clone(), ..flags(common)? }, false)?;
            cmd_maximal(&cfg, svg)
        }
        Command::Verify { common, suite, out_dir, corpus_n } => {
            let suite = suite.as_deref().map(str::parse::<Suite>).transpose()?;
            let layer = ConfigFile { suite, out_dir: out_dir.clone(), corpus_n: *corpus_n, ..flags(common)? };
            cmd_verify(&layered(&cli.config, layer, true)?)
        }
        Command::Continuity { common, perturbation, mode, indices, out_dir } => {
            let perturbation = perturbation.as_deref().map(|s| parse_source("perturbation", s)).transpose()?;
            let layer = ConfigFile {
                perturbation,
                mode: *mode,
                indices: indices.clone(),
                out_dir: out_dir.clone(),
                ..flags(common)?
            };
            cmd_continuity(&layered(&cli.config, layer, true)?)
        }
        Command::Bruteforce { common, corpus, corpus_n, scales, out } => {
            let layer = ConfigFile { corpus_n: *corpus_n, scales: *scales, out: out.clone(), ..flags(common)? };
            cmd_bruteforce(&layered(&cli.config, layer, false)?, *corpus)
        }
    }
}

/// Parses `std::env::args`, runs, and maps errors to the usage exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e @ Error::Config { .. }) => {
            eprintln!("usage error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CHECK_FAILED
        }
    }
}
