//! Check suites over the seeded corpus. Every (function, kernel) job is pure
//! and runs on the rayon pool; entries come back sorted by
//! (function id, kernel, check name).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::generate_corpus;
use crate::error::{Error, Result};
use crate::funcmodel::PiecewiseLinearFn;
use crate::kernels::KernelSpec;
use crate::scalespace::{maximal_profile, Grid, MaximalProfile};
use crate::variation::extremal_partition;
use crate::verify::{
    check_convex_limit, check_domination, check_finite_intervals, check_lemma6, check_prop5, check_subharmonicity,
    check_tail_bound, check_transfer_identity, check_uniform_bound, check_variation_diminishing, continuity_experiment,
    fixtures, pick_tail_radius, ContinuityReport, ContinuitySequence, ConvexSample, PropertyReport, SequenceMode,
    Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Subharmonicity,
    Uniform,
    Tail,
    Lemma6,
    Prop5,
    Continuity,
    Variation,
    Controls,
}

impl Suite {
    pub const EVERY: [Suite; 7] =
        [Suite::Subharmonicity, Suite::Uniform, Suite::Tail, Suite::Lemma6, Suite::Prop5, Suite::Continuity, Suite::Variation];

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EVERY.to_vec(),
            s => vec![s],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config { field: "suite".into(), reason: format!("unknown suite `{s}`") })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub corpus_n: usize,
    pub kernels: Vec<KernelSpec>,
    pub grid_n: usize,
    pub grid_span: f64,
    pub tol: f64,
    /// Detachment threshold; `None` uses `10 err` per profile.
    pub delta: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            corpus_n: 20,
            kernels: vec![KernelSpec::poisson(), KernelSpec::heat(), KernelSpec::fractional(0.5).expect("valid alpha")],
            grid_n: 801,
            grid_span: 6.0,
            tol: 1e-7,
            delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub function: String,
    pub kernel: String,
    pub check: String,
    pub report: PropertyReport,
}

impl Entry {
    /// Negative controls are expected to fail; everything else must not
    /// fail or be inconclusive.
    pub fn ok(&self) -> bool {
        if self.check.starts_with("control:") {
            self.report.is_failure()
        } else {
            !matches!(self.report.verdict, Verdict::Fail | Verdict::Inconclusive)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub entries: Vec<Entry>,
    pub continuity: Vec<ContinuityReport>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.entries.iter().all(Entry::ok)
    }

    pub fn check_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.entries.iter().map(|e| e.check.clone()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Seeded compactly supported perturbation `g_i` with `||g_i||_{1,1} = 1`,
/// drawn from its own stream so it does not depend on how many other
/// perturbations were requested.
pub fn perturbation(seed: u64, i: u64) -> Result<PiecewiseLinearFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i + 1);
    let interior = rng.gen_range(3..=6);
    let span = rng.gen_range(0.5..2.0);
    let shift = rng.gen_range(-1.0..1.0);
    let g = PiecewiseLinearFn::random_pl(&mut rng, interior, span, 1.0, true)?.translate(shift);
    Ok(g.scale(1.0 / g.norm_w11()))
}

/// Scale factor `lambda_i` in `[0.01, 0.5]` on the same stream family.
pub fn perturbation_scale(seed: u64, i: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i + 1_000_001);
    rng.gen_range(0.01..0.5)
}

/// Seeded sawtooth instances for the partition-transfer identity.
pub fn sawtooth_instances(seed: u64, n: usize) -> Result<Vec<PiecewiseLinearFn>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(7_000_000);
    (0..n)
        .map(|_| {
            let teeth = rng.gen_range(2..=5);
            let width = rng.gen_range(0.6..1.4);
            let floor = rng.gen_range(0.0..0.7);
            PiecewiseLinearFn::sawtooth(-0.5 * teeth as f64 * width, teeth, width, 1.0, floor)
        })
        .collect()
}

fn uniform_grid(cfg: &SuiteConfig, fns: &[&PiecewiseLinearFn]) -> Result<Grid> {
    let mut extra = Vec::new();
    for f in fns {
        extra.extend_from_slice(f.breakpoints());
    }
    Ok(Grid::symmetric(cfg.grid_span, cfg.grid_n)?.with_points(&extra))
}

fn profile(u: &PiecewiseLinearFn, k: &KernelSpec, grid: &Grid, tol: f64) -> Result<MaximalProfile> {
    maximal_profile(u, k, grid, tol)
}

fn delta_for(cfg: &SuiteConfig, p: &MaximalProfile) -> f64 {
    cfg.delta.unwrap_or(10.0 * p.err).max(10.0 * p.err)
}

fn entry(function: &str, k: &KernelSpec, report: PropertyReport) -> Entry {
    Entry { function: function.to_string(), kernel: k.label(), check: report.name.clone(), report }
}

struct Job<'a> {
    id: String,
    index: u64,
    u: &'a PiecewiseLinearFn,
    kernel: &'a KernelSpec,
}

fn corpus_job(suite: Suite, cfg: &SuiteConfig, job: &Job) -> Result<Vec<Entry>> {
    let (u, k) = (job.u, job.kernel);
    let e = |r: PropertyReport| entry(&job.id, k, r);
    let mut out = Vec::new();
    match suite {
        Suite::Subharmonicity => {
            let p = profile(u, k, &uniform_grid(cfg, &[u])?, cfg.tol)?;
            out.push(e(check_domination(&p, u, cfg.tol)));
            out.push(e(check_subharmonicity(&p, u, delta_for(cfg, &p))?));
        }
        Suite::Variation => {
            let reach = 64.0 * cfg.grid_span;
            let h = 2.0 * cfg.grid_span / (cfg.grid_n - 1) as f64;
            let grid = Grid::graded(-cfg.grid_span, cfg.grid_span, h, reach, 1.02, 0.05 * reach)?.with_points(u.breakpoints());
            let p = profile(u, k, &grid, cfg.tol)?;
            out.push(e(check_variation_diminishing(u, &p)));
        }
        Suite::Uniform => {
            let g = perturbation(cfg.seed, job.index)?;
            let u_j = u.add(&g.scale(perturbation_scale(cfg.seed, job.index)));
            let grid = uniform_grid(cfg, &[u, &u_j])?;
            let p = profile(u, k, &grid, cfg.tol)?;
            let pj = profile(&u_j, k, &grid, cfg.tol)?;
            out.push(e(check_uniform_bound(u, &u_j, &p, &pj)?));
        }
        Suite::Tail => {
            let r = pick_tail_radius(u, None, k, 0.1, cfg.tol)?;
            let s = u.support_radius().max(1e-3);
            let h = 2.0 * s / (cfg.grid_n - 1) as f64;
            let grid = Grid::graded(-s, s, h, 4.0 * r, 1.02, 0.05 * r)?.with_points(&[-r, r]).with_points(u.breakpoints());
            let p = profile(u, k, &grid, cfg.tol)?;
            out.push(e(check_tail_bound(u, &p, r)?.with("eps", 0.1)));
        }
        Suite::Lemma6 => {
            let g = perturbation(cfg.seed, job.index)?;
            let u_j = u.add(&g.scale(0.01));
            let grid = uniform_grid(cfg, &[u, &u_j])?;
            let pj = profile(&u_j, k, &grid, cfg.tol)?;
            let v = u.abs_part().derivative();
            let eps = v.l1_distance(&u_j.abs_part().derivative());
            out.push(e(check_lemma6(u, &u_j, &pj, &v, eps)?));
        }
        Suite::Prop5 => {
            let g = perturbation(cfg.seed, job.index)?;
            let seq = ContinuitySequence::new(u.clone(), g, vec![1, 2, 4, 8, 16, 32, 64], SequenceMode::Additive)?;
            let grid = uniform_grid(cfg, &[u])?.with_points(&seq.all_breakpoints());
            let p = profile(u, k, &grid, cfg.tol)?;
            let ps = seq.members().iter().map(|m| profile(m, k, &grid, cfg.tol)).collect::<Result<Vec<_>>>()?;
            out.push(e(check_prop5(u, &seq, &p, &ps, -cfg.grid_span, cfg.grid_span)?));
        }
        Suite::Continuity | Suite::Controls | Suite::All => {}
    }
    Ok(out)
}

/// Transfer identity on one sawtooth: the extremal partition of `u*` over
/// the support is carried to `|u|`.
pub fn transfer_instance(u: &PiecewiseLinearFn, k: &KernelSpec, grid_n: usize, tol: f64) -> Result<PropertyReport> {
    let (lo, hi) = u.support();
    let grid = Grid::uniform(lo - 1.0, hi + 1.0, grid_n)?.with_points(u.breakpoints());
    let p = profile(u, k, &grid, tol)?;
    let pi = extremal_partition(&p.grid, &p.ustar, lo, hi, 1e-9)?;
    check_transfer_identity(u, &p, &pi, (lo, hi))
}

/// The tent `u = (1 - |x|)_+` with `u_j = u + g/j`, `j = 1, 2, ..., 64`.
pub fn tent_sequence(seed: u64) -> Result<ContinuitySequence> {
    let tent = PiecewiseLinearFn::tent(0.0, 1.0, 1.0)?;
    ContinuitySequence::new(tent, perturbation(seed, 0)?, vec![1, 2, 4, 8, 16, 32, 64], SequenceMode::Additive)
}

/// Grid for a continuity run: spacing `h` on the joint support (plus a
/// margin of 0.5) growing by 2% per step out to the tail radius.
pub fn continuity_grid(seq: &ContinuitySequence, kernel: &KernelSpec, h: f64, tol: f64) -> Result<Grid> {
    let scale = seq.base.derivative_l1();
    let r = pick_tail_radius(&seq.base, seq.members().first(), kernel, 0.01 * scale, tol)?;
    let s = seq.members().iter().map(|m| m.support_radius()).fold(seq.base.support_radius(), f64::max) + 0.5;
    Grid::graded(-s, s, h, r.max(s), 1.02, 1.0)
}

fn continuity_entries(seq: &ContinuitySequence, k: &KernelSpec, cfg: &SuiteConfig) -> Result<(Vec<Entry>, ContinuityReport)> {
    let s = seq.members().iter().map(|m| m.support_radius()).fold(seq.base.support_radius(), f64::max) + 0.5;
    let h = 2.0 * s / (cfg.grid_n - 1) as f64;
    let grid = continuity_grid(seq, k, h, cfg.tol)?.with_points(&seq.all_breakpoints());
    let report = continuity_experiment(seq, k, &grid, cfg.tol)?;
    let base = profile(&seq.base, k, &grid, cfg.tol)?;
    let ps = seq.members().iter().map(|m| profile(m, k, &grid, cfg.tol)).collect::<Result<Vec<_>>>()?;
    let v = seq.base.abs_part().derivative();
    let id = "tent";
    let mut out = vec![
        entry(id, k, report.summary.clone()),
        entry(id, k, check_finite_intervals(&seq.base, seq, &base, &ps, &v, delta_for(cfg, &base))?),
    ];
    // beyond every support all maximal functions are detached, hence convex
    let lo = s;
    let hi = s + 1.0;
    let members = ps.iter().map(|p| ConvexSample::from_profile(p, lo, hi)).collect::<Result<Vec<_>>>()?;
    let limit = ConvexSample::from_profile(&base, lo, hi)?;
    out.push(entry(id, k, check_convex_limit(&members, &limit, 4.0 * base.err)));
    Ok((out, report))
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    if cfg.grid_n < 16 {
        return Err(Error::Config { field: "grid_n".into(), reason: "must be at least 16".into() });
    }
    if cfg.kernels.is_empty() {
        return Err(Error::Config { field: "kernel".into(), reason: "no kernels selected".into() });
    }
    let corpus = generate_corpus(cfg.seed, cfg.corpus_n)?;
    let mut entries = Vec::new();
    let mut continuity = Vec::new();
    for s in suite.expand() {
        match s {
            Suite::Continuity => {
                let seq = tent_sequence(cfg.seed)?;
                let runs = cfg.kernels.par_iter().map(|k| continuity_entries(&seq, k, cfg)).collect::<Result<Vec<_>>>()?;
                for (e, r) in runs {
                    entries.extend(e);
                    continuity.push(r);
                }
            }
            Suite::Controls => {
                for k in &cfg.kernels {
                    for r in fixtures::negative_controls(k)? {
                        entries.push(Entry { function: "fixture".into(), kernel: k.label(), check: format!("control:{}", r.name), report: r });
                    }
                }
            }
            _ => {
                let jobs: Vec<Job> = corpus
                    .iter()
                    .enumerate()
                    .flat_map(|(i, u)| {
                        cfg.kernels.iter().map(move |kernel| Job { id: format!("corpus-{i:03}"), index: i as u64, u, kernel })
                    })
                    .collect();
                let done = jobs.par_iter().map(|j| corpus_job(s, cfg, j)).collect::<Result<Vec<_>>>()?;
                entries.extend(done.into_iter().flatten());
                if s == Suite::Prop5 {
                    let saws = sawtooth_instances(cfg.seed, 10)?;
                    let pairs: Vec<(usize, &KernelSpec)> =
                        (0..saws.len()).flat_map(|i| cfg.kernels.iter().map(move |k| (i, k))).collect();
                    let reports = pairs
                        .par_iter()
                        .map(|&(i, k)| transfer_instance(&saws[i], k, cfg.grid_n, cfg.tol).map(|r| entry(&format!("sawtooth-{i:03}"), k, r)))
                        .collect::<Result<Vec<_>>>()?;
                    entries.extend(reports);
                }
            }
        }
    }
    entries.sort_by(|a, b| (&a.function, &a.kernel, &a.check).cmp(&(&b.function, &b.kernel, &b.check)));
    continuity.sort_by(|a, b| a.kernel.cmp(&b.kernel));
    Ok(SuiteOutcome { entries, continuity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { corpus_n: 4, kernels: vec![KernelSpec::poisson()], grid_n: 201, ..SuiteConfig::default() }
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("lemma6".parse::<Suite>().unwrap(), Suite::Lemma6);
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn perturbations_are_normalized_and_stable() {
        let g = perturbation(3, 5).unwrap();
        assert!((g.norm_w11() - 1.0).abs() < 1e-12);
        assert_eq!(g, perturbation(3, 5).unwrap());
        assert_ne!(g, perturbation(3, 6).unwrap());
        let l = perturbation_scale(3, 5);
        assert!((0.01..0.5).contains(&l));
    }

    #[test]
    fn small_suites_pass_and_sort() {
        for s in [Suite::Subharmonicity, Suite::Uniform, Suite::Lemma6, Suite::Variation] {
            let out = run_suite(s, &small()).unwrap();
            assert!(out.ok(), "{s:?}: {:?}", out.entries.iter().filter(|e| !e.ok()).collect::<Vec<_>>());
            let keys: Vec<_> = out.entries.iter().map(|e| (&e.function, &e.kernel, &e.check)).collect();
            assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn controls_count_as_ok_when_failing() {
        let out = run_suite(Suite::Controls, &small()).unwrap();
        assert!(out.ok());
        assert!(out.entries.iter().all(|e| e.report.is_failure()));
    }
}
