use serde::Serialize;

use super::report::{PropertyReport, Witness};
use super::sampled::{
    coarsen, indices_within, second_differences, slope_distance, slope_distance_to_constant,
    slope_distance_to_step, tends_to_zero, variation_on, Resolution,
};
use super::sequence::ContinuitySequence;
use crate::detachment::{decompose, detachment_set};
use crate::error::{Error, Result};
use crate::funcmodel::{PiecewiseLinearFn, StepFunction};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::scalespace::{MaximalProfile, ScaleSpace, SearchOptions};
use crate::variation::{
    extremal_partition, sampled_variation, total_variation, transfer_partition, var_over_partition, Partition,
    TransferOutcome,
};

/// Witness lists are truncated to this many entries; the full count goes to
/// the metadata.
const MAX_WITNESSES: usize = 16;

/// Ceiling for the variation ratio of the Poisson and heat maximal functions.
pub const VARIATION_RATIO_LIMIT: f64 = 1.02;

/// Fraction of the named scale below which a sequence counts as tending to 0.
pub const VANISHING_FRACTION: f64 = 0.05;

fn truncate(mut w: Vec<Witness>) -> (Vec<Witness>, usize) {
    let n = w.len();
    w.truncate(MAX_WITNESSES);
    (w, n)
}

fn ensure_same_grid(a: &MaximalProfile, b: &MaximalProfile) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::InvalidGrid("profiles are sampled on different grids".into()));
    }
    if a.kernel != b.kernel {
        return Err(Error::InvalidGrid("profiles use different kernels".into()));
    }
    Ok(())
}

fn grid_ends(p: &MaximalProfile) -> (f64, f64) {
    (p.grid[0], p.grid[p.grid.len() - 1])
}

/// `u* >= |u| - tol` at every grid point.
pub fn check_domination(profile: &MaximalProfile, u: &PiecewiseLinearFn, tol: f64) -> PropertyReport {
    let gap = profile.gap(u);
    let mut witnesses = Vec::new();
    let mut worst = 0.0_f64;
    for (x, g) in profile.grid.iter().zip(&gap) {
        worst = worst.max(-g);
        if *g < -tol {
            witnesses.push(Witness::at(*x, format!("u* - |u| = {g:e}")));
        }
    }
    let (witnesses, violations) = truncate(witnesses);
    PropertyReport::inequality("domination", worst, 0.0, tol, witnesses)
        .with("kernel", profile.kernel.label())
        .with("violations", violations)
}

/// Second differences of `ustar` on every component of the detachment set
/// must be at least `-4 err`.
pub fn check_subharmonicity(profile: &MaximalProfile, u: &PiecewiseLinearFn, delta: f64) -> Result<PropertyReport> {
    let d = detachment_set(profile, u, delta)?;
    let slack = 4.0 * profile.err;
    let mut worst = 0.0_f64;
    let mut triples = 0usize;
    let mut witnesses = Vec::new();
    for iv in d.iter() {
        let r = indices_within(&profile.grid, iv.lo, iv.hi);
        for (i, sd) in second_differences(&profile.grid, &profile.ustar, r) {
            triples += 1;
            worst = worst.max(-sd);
            if sd < -slack {
                witnesses.push(Witness::at(profile.grid[i], format!("second difference {sd:e}")));
            }
        }
    }
    let (witnesses, violations) = truncate(witnesses);
    Ok(PropertyReport::inequality("subharmonicity", worst, 0.0, slack, witnesses)
        .with("kernel", profile.kernel.label())
        .with("delta", delta)
        .with("components", d.len())
        .with("triples", triples)
        .with("violations", violations))
}

/// `max |u_j* - u*| <= ||u_j - u||_{1,1} + 2 err` on a shared grid.
pub fn check_uniform_bound(
    u: &PiecewiseLinearFn,
    u_j: &PiecewiseLinearFn,
    profile: &MaximalProfile,
    profile_j: &MaximalProfile,
) -> Result<PropertyReport> {
    ensure_same_grid(profile, profile_j)?;
    let (mut lhs, mut at) = (0.0_f64, profile.grid[0]);
    for ((x, a), b) in profile.grid.iter().zip(&profile.ustar).zip(&profile_j.ustar) {
        let d = (a - b).abs();
        if d > lhs {
            lhs = d;
            at = *x;
        }
    }
    let rhs = u_j.sub(u).norm_w11();
    let slack = 2.0 * profile.err.max(profile_j.err);
    let witnesses = if lhs > rhs + slack { vec![Witness::at(at, format!("|u_j* - u*| = {lhs:e}"))] } else { vec![] };
    Ok(PropertyReport::inequality("uniform_bound", lhs, rhs, slack, witnesses).with("kernel", profile.kernel.label()))
}

/// Largest radius tried before giving up.
pub const TAIL_RADIUS_LIMIT: f64 = 1e6;

/// Smallest `R = r_0 2^k`, starting from the support radius, such that for
/// `w = |u|` (and `|u_j|`) the tail variation outside `[-R, R]` is at most
/// `eps/4` and `w*(R) - w(R) + w*(-R) - w(-R) < eps/4`.
pub fn pick_tail_radius(
    u: &PiecewiseLinearFn,
    u_j: Option<&PiecewiseLinearFn>,
    kernel: &KernelSpec,
    eps: f64,
    tol: f64,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Config { field: "eps".into(), reason: "must be positive".into() });
    }
    let fns: Vec<&PiecewiseLinearFn> = std::iter::once(u).chain(u_j).collect();
    let spaces: Vec<ScaleSpace> = fns.iter().map(|f| ScaleSpace::new(f, kernel)).collect();
    let opts = SearchOptions::with_tol(tol);
    let mut r = fns.iter().map(|f| f.support_radius()).fold(0.0, f64::max);
    if r <= 0.0 {
        r = 1.0;
    }
    loop {
        let mut ok = true;
        for s in &spaces {
            let w = s.abs();
            let tail = total_variation(w, r, f64::INFINITY) + total_variation(w, f64::NEG_INFINITY, -r);
            if tail > eps / 4.0 {
                ok = false;
                break;
            }
            let gap = s.maximal_at(r, &opts)?.value - w.eval(r) + s.maximal_at(-r, &opts)?.value - w.eval(-r);
            if !(gap < eps / 4.0) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(r);
        }
        r *= 2.0;
        if r > TAIL_RADIUS_LIMIT {
            return Err(Error::TailRadius { radius: r, limit: TAIL_RADIUS_LIMIT });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct TailSide {
    lhs: f64,
    rhs: f64,
    /// `u*(R) - 2 min u* + u*(end)` over the samples of the tail.
    closed_form: f64,
    /// `u*(end)`, the variation beyond the grid when the grid end lies
    /// outside the support (where `u*` is monotone).
    remainder: f64,
}

/// Sampled `int_[R, inf) |(u*)'| <= |u*(R) - |u|(R)| + int_[R, inf) ||u|'|`,
/// and the mirrored bound on `(-inf, -R]`. `R` and `-R` must be grid points.
pub fn check_tail_bound(u: &PiecewiseLinearFn, profile: &MaximalProfile, r: f64) -> Result<PropertyReport> {
    let abs = u.abs_part();
    let (x0, xn) = grid_ends(profile);
    let (s_lo, s_hi) = abs.support();
    let side = |from: f64, to: f64, end_outside: bool| -> Result<TailSide> {
        let (lo, hi) = if from < to { (from, to) } else { (to, from) };
        let var = variation_on(&profile.grid, &profile.ustar, lo, hi);
        let end_value = profile.value_at(to)?;
        let remainder = if end_outside { end_value } else { 0.0 };
        let min = profile
            .grid
            .iter()
            .zip(&profile.ustar)
            .filter(|(x, _)| (lo..=hi).contains(*x))
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        let at = profile.value_at(from)?;
        let tv = if from < to { total_variation(&abs, from, f64::INFINITY) } else { total_variation(&abs, f64::NEG_INFINITY, from) };
        Ok(TailSide {
            lhs: var + remainder,
            rhs: (at - abs.eval(from)).abs() + tv,
            closed_form: at - 2.0 * min + end_value,
            remainder,
        })
    };
    if !(r > 0.0) || -r < x0 || r > xn {
        return Err(Error::Config { field: "radius".into(), reason: format!("{r} must be positive and inside the grid") });
    }
    let right = side(r, xn, xn >= s_hi)?;
    let left = side(-r, x0, x0 <= s_lo)?;
    let slack = 4.0 * profile.err;
    let mut witnesses = Vec::new();
    for (x, s) in [(r, right), (-r, left)] {
        if s.lhs > s.rhs + slack {
            witnesses.push(Witness::at(x, format!("tail variation {:e} exceeds {:e}", s.lhs, s.rhs)));
        }
    }
    let worse = if right.lhs - right.rhs >= left.lhs - left.rhs { right } else { left };
    Ok(PropertyReport::inequality("tail_bound", worse.lhs, worse.rhs, slack, witnesses)
        .with("kernel", profile.kernel.label())
        .with("radius", r)
        .with("right", right)
        .with("left", left))
}

/// Per-component record of the detachment-interior estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Lemma6Component {
    gap: usize,
    lo: f64,
    hi: f64,
    alpha: f64,
    lhs: f64,
    shifted_lhs: f64,
    shifted_rhs: f64,
    correction: f64,
}

/// On the components of `D_j` that avoid every breakpoint of `v`,
/// `int |(u_j*)' - u_j'| <= 4 eps + correction`, where the correction adds
/// `(u_j* - |u_j|)` at the first and last sample of each component. Also
/// checks, per component with `v = alpha` there,
/// `int |(u_j* - alpha x)'| <= int |(|u_j| - alpha x)'| + correction`.
/// The functions enter through `|u|`, `|u_j|`; the check is not applicable
/// unless `|| |u|' - |u_j|' ||_1 <= eps` and `|| |u|' - v ||_1 <= eps`.
pub fn check_lemma6(
    u: &PiecewiseLinearFn,
    u_j: &PiecewiseLinearFn,
    profile_j: &MaximalProfile,
    v: &StepFunction,
    eps: f64,
) -> Result<PropertyReport> {
    let du = u.abs_part().derivative();
    let abs_j = u_j.abs_part();
    let dj = abs_j.derivative();
    let e_uj = du.l1_distance(&dj);
    let e_v = du.l1_distance(v);
    let within = |e: f64| e <= eps * (1.0 + 1e-12) + 1e-15;
    if !(within(e_uj) && within(e_v)) {
        return Ok(PropertyReport::not_applicable(
            "lemma6",
            format!("derivative distances {e_uj:e} and {e_v:e} exceed eps {eps:e}"),
        ));
    }
    let err = profile_j.err;
    let delta = 10.0 * err;
    let d = detachment_set(profile_j, u_j, delta)?;
    let dec = decompose(&d, v);
    let grid = &profile_j.grid;
    let w = &profile_j.ustar;
    let gap = |i: usize| w[i] - abs_j.eval(grid[i]);
    let mut comps = Vec::new();
    let mut witnesses = Vec::new();
    for (k, iv) in dec.d2_intervals() {
        let r = indices_within(grid, iv.lo, iv.hi);
        if r.len() < 2 {
            continue;
        }
        let (first, last) = (r.start, r.end - 1);
        let (lo, hi) = (grid[first], grid[last]);
        let alpha = v.gap_level(k);
        let c = Lemma6Component {
            gap: k,
            lo,
            hi,
            alpha,
            lhs: slope_distance_to_step(grid, w, &dj, lo, hi),
            shifted_lhs: slope_distance_to_constant(grid, w, alpha, lo, hi),
            shifted_rhs: dj.l1_distance_to_constant_on(alpha, lo, hi),
            correction: gap(first) + gap(last),
        };
        if c.shifted_lhs > c.shifted_rhs + c.correction + 4.0 * err {
            witnesses.push(Witness::at(
                0.5 * (lo + hi),
                format!("int |(u_j* - L)'| = {:e} exceeds {:e} + correction {:e}", c.shifted_lhs, c.shifted_rhs, c.correction),
            ));
        }
        comps.push(c);
    }
    let lhs: f64 = comps.iter().map(|c| c.lhs).sum();
    let correction: f64 = comps.iter().map(|c| c.correction).sum();
    let chain = 2.0 * comps.iter().map(|c| c.shifted_rhs).sum::<f64>() + correction;
    let rhs = 4.0 * eps + correction;
    let slack = 4.0 * err * comps.len().max(1) as f64;
    let (witnesses, violations) = truncate(witnesses);
    Ok(PropertyReport::inequality("lemma6", lhs, rhs, slack, witnesses)
        .with("kernel", profile_j.kernel.label())
        .with("eps", eps)
        .with("derivative_distance", e_uj)
        .with("simple_distance", e_v)
        .with("delta", delta)
        .with("correction", correction)
        .with("chain_bound", chain)
        .with("ratio_to_4eps", if eps > 0.0 { lhs / (4.0 * eps) } else { 0.0 })
        .with("components", comps)
        .with("violations", violations))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct FiniteIntervalsRow {
    j: u32,
    integral: f64,
    components: usize,
}

/// `int over D_j^1 |(u_j*)' - (u*)'|` must tend to zero along the sequence,
/// where `D_j^1` collects the components of `D_j` containing a breakpoint of
/// `v`. On every such component the sampled variation of `u_j*` must also
/// equal `u_j*(first) - 2 min u_j* + u_j*(last)`.
pub fn check_finite_intervals(
    u: &PiecewiseLinearFn,
    seq: &ContinuitySequence,
    base: &MaximalProfile,
    profiles: &[MaximalProfile],
    v: &StepFunction,
    delta: f64,
) -> Result<PropertyReport> {
    if profiles.len() != seq.len() {
        return Err(Error::InvalidSequence("one profile per sequence member required".into()));
    }
    let (x0, xn) = grid_ends(base);
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    let mut slack = 0.0_f64;
    for ((&j, u_j), p) in seq.indices.iter().zip(seq.members()).zip(profiles) {
        ensure_same_grid(base, p)?;
        slack = slack.max(4.0 * p.err);
        let dec = decompose(&detachment_set(p, u_j, delta)?, v);
        let mut integral = 0.0;
        for iv in dec.d1.iter() {
            integral += slope_distance(&p.grid, &p.ustar, &base.ustar, iv.lo.max(x0), iv.hi.min(xn));
            let r = indices_within(&p.grid, iv.lo, iv.hi);
            if r.len() < 2 {
                continue;
            }
            let s = &p.ustar[r.clone()];
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            let closed = s[0] - 2.0 * min + s[s.len() - 1];
            let var = sampled_variation(s);
            if (var - closed).abs() > 10.0 * p.err {
                witnesses.push(Witness::at(
                    p.grid[r.start],
                    format!("j = {j}: sampled variation {var:e} differs from endpoint formula {closed:e}"),
                ));
            }
        }
        rows.push(FiniteIntervalsRow { j, integral, components: dec.d1.len() });
    }
    let values: Vec<f64> = rows.iter().map(|r| r.integral).collect();
    let scale = u.derivative_l1();
    let vanishes = tends_to_zero(&values, scale, VANISHING_FRACTION, slack);
    let last = values.last().copied().unwrap_or(0.0);
    if !vanishes {
        witnesses.push(Witness::global(format!("integrals {values:?} do not tend to zero")));
    }
    let (witnesses, violations) = truncate(witnesses);
    Ok(PropertyReport::decided("finite_intervals", vanishes, last, VANISHING_FRACTION * scale, slack, witnesses)
        .with("kernel", base.kernel.label())
        .with("delta", delta)
        .with("rows", rows)
        .with("violations", violations))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Prop5Row {
    j: u32,
    variation: f64,
    difference: f64,
    /// The same difference from every other sample.
    coarse_difference: f64,
    cells: usize,
    doubled_points: usize,
    bookkeeping_lhs: f64,
    bookkeeping_rhs: f64,
    transfers: usize,
    inconclusive_transfers: usize,
    max_identity_residual: f64,
    chain_residual: f64,
}

/// Sampled `int_a^b |(u_j*)'|` must approach `int_a^b |(u*)'|`. For each
/// member the partition bookkeeping is rebuilt: the cells
/// of `P` (breakpoints of `|u|` and extrema of `u*`), the extremal
/// partitions `P~_i` of `u_j*` per cell, their transfers to `|u_j|`, and the
/// doubled-endpoint set `P~~`, which must satisfy `|P~~| <= 3K + 1` and
/// `Var(u_j*, P~~) <= Var(u*, P~~) + 12 K ||u_j - u||_inf`.
pub fn check_prop5(
    u: &PiecewiseLinearFn,
    seq: &ContinuitySequence,
    base: &MaximalProfile,
    profiles: &[MaximalProfile],
    a: f64,
    b: f64,
) -> Result<PropertyReport> {
    if profiles.len() != seq.len() {
        return Err(Error::InvalidSequence("one profile per sequence member required".into()));
    }
    let grid = &base.grid;
    let first = grid.partition_point(|&x| x < a);
    let end = grid.partition_point(|&x| x <= b);
    if end < first + 2 {
        return Err(Error::InvalidGrid(format!("fewer than two samples in [{a}, {b}]")));
    }
    let (a, b) = (grid[first], grid[end - 1]);
    let v_base = variation_on(grid, &base.ustar, a, b);
    let v_coarse = {
        let (cg, cv) = coarsen(grid, &base.ustar);
        variation_on(&cg, &cv, a, b)
    };
    let abs_u = u.abs_part();
    let mut p_pts: Vec<f64> = extremal_partition(grid, &base.ustar, a, b, 1e-9)?.points().to_vec();
    p_pts.extend(abs_u.breakpoints().iter().copied().filter(|&x| x > a && x < b && base.index_of(x).is_some()));
    let p = Partition::from_unsorted(p_pts)?;
    let k_cells = p.len() - 1;

    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    let mut slack = 0.0_f64;
    for ((&j, u_j), pj) in seq.indices.iter().zip(seq.members()).zip(profiles) {
        ensure_same_grid(base, pj)?;
        let err = pj.err.max(base.err);
        slack = slack.max(8.0 * err);
        let abs_j = u_j.abs_part();
        let mut doubled = Vec::new();
        let mut transfers = 0;
        let mut inconclusive = 0;
        let mut max_residual = 0.0_f64;
        let mut star_pts: Vec<f64> = Vec::new();
        let mut star_ends: Vec<f64> = Vec::new();
        let mut cell_sum = 0.0;
        let mut var_tilde = 0.0;
        for cell in p.points().windows(2) {
            let pi = extremal_partition(grid, &pj.ustar, cell[0], cell[1], 1e-9)?;
            let pts = pi.points();
            let n = pts.len() - 1;
            doubled.extend([pts[0], pts[1.min(n)], pts[n.saturating_sub(1)], pts[n]]);
            if n >= 2 {
                let vals: Vec<f64> = pts[1..n].iter().map(|&x| pj.value_at(x)).collect::<Result<_>>()?;
                var_tilde += sampled_variation(&vals) - (vals[vals.len() - 1] - vals[0]).abs();
            }
            if n < 3 {
                continue;
            }
            match transfer_partition(u_j, pj, &pi, (cell[0], cell[1])) {
                Ok(TransferOutcome::Transferred { points, lhs, rhs }) => {
                    transfers += 1;
                    let residual = (lhs - rhs).abs();
                    max_residual = max_residual.max(residual);
                    if residual > 10.0 * err {
                        witnesses.push(Witness::at(cell[0], format!("j = {j}: transfer identity {lhs:e} vs {rhs:e}")));
                    }
                    let sp = points.points();
                    let ends = [sp[0], sp[sp.len() - 1]];
                    cell_sum += lhs;
                    star_pts.extend_from_slice(sp);
                    star_ends.extend_from_slice(&ends);
                }
                Ok(TransferOutcome::Unchanged { .. }) => {}
                Ok(TransferOutcome::Inconclusive { .. }) | Err(Error::Bracket { .. }) => inconclusive += 1,
                Err(e) => return Err(e),
            }
        }
        let doubled = Partition::from_unsorted(doubled)?;
        if doubled.len() > 3 * k_cells + 1 {
            witnesses.push(Witness::global(format!("j = {j}: |P~~| = {} exceeds 3K+1 = {}", doubled.len(), 3 * k_cells + 1)));
        }
        let book_lhs = var_over_partition(|x| pj.value_at(x).unwrap_or(f64::NAN), &doubled);
        let book_rhs = var_over_partition(|x| base.value_at(x).unwrap_or(f64::NAN), &doubled) + 12.0 * k_cells as f64 * u_j.sub(u).norm_sup();
        let book_slack = 4.0 * err * doubled.len() as f64;
        if !(book_lhs <= book_rhs + book_slack) {
            witnesses.push(Witness::global(format!("j = {j}: Var(u_j*, P~~) = {book_lhs:e} exceeds {book_rhs:e}")));
        }
        // chain: union-partition difference equals the cell sum,
        // and the cell sum of the u_j* side equals Var(u_j*, P~) - Var(u_j*, P~~)
        let mut chain_residual = 0.0_f64;
        if !star_pts.is_empty() {
            let base_pts = p.points().to_vec();
            let full = Partition::from_unsorted(base_pts.iter().copied().chain(star_pts.iter().copied()).collect())?;
            let ends = Partition::from_unsorted(base_pts.into_iter().chain(star_ends).collect())?;
            let diff = var_over_partition(|x| abs_j.eval(x), &full) - var_over_partition(|x| abs_j.eval(x), &ends);
            chain_residual = (diff - cell_sum).abs();
        }
        let mut tilde_all: Vec<f64> = Vec::new();
        for cell in p.points().windows(2) {
            tilde_all.extend_from_slice(extremal_partition(grid, &pj.ustar, cell[0], cell[1], 1e-9)?.points());
        }
        let tilde_all = Partition::from_unsorted(tilde_all)?;
        let split = var_over_partition(|x| pj.value_at(x).unwrap_or(f64::NAN), &tilde_all) - book_lhs;
        chain_residual = chain_residual.max((split - var_tilde).abs());
        let scale_tol = 1e-10 * (1.0 + v_base);
        if chain_residual > scale_tol {
            witnesses.push(Witness::global(format!("j = {j}: partition chain off by {chain_residual:e}")));
        }
        let v_j = variation_on(grid, &pj.ustar, a, b);
        let (cj, cv) = coarsen(grid, &pj.ustar);
        rows.push(Prop5Row {
            j,
            variation: v_j,
            difference: (v_j - v_base).abs(),
            coarse_difference: (variation_on(&cj, &cv, a, b) - v_coarse).abs(),
            cells: k_cells,
            doubled_points: doubled.len(),
            bookkeeping_lhs: book_lhs,
            bookkeeping_rhs: book_rhs,
            transfers,
            inconclusive_transfers: inconclusive,
            max_identity_residual: max_residual,
            chain_residual,
        });
    }
    let diffs: Vec<f64> = rows.iter().map(|r| r.difference).collect();
    let scale = if v_base > 0.0 { v_base } else { 1.0 };
    // below the disagreement of the two resolutions the differences carry no
    // ordering information
    let noise = rows.iter().rev().take(3).map(|r| (r.difference - r.coarse_difference).abs()).fold(0.0, f64::max);
    let slack = 2.0 * slack + noise;
    let converges = tends_to_zero(&diffs, scale, VANISHING_FRACTION, slack);
    if !converges {
        witnesses.push(Witness::global(format!("variation differences {diffs:?} do not tend to zero")));
    }
    let last = diffs.last().copied().unwrap_or(0.0);
    let (witnesses, violations) = truncate(witnesses);
    Ok(PropertyReport::decided("prop5", converges, last, VANISHING_FRACTION * scale, slack, witnesses)
        .with("kernel", base.kernel.label())
        .with("interval", [a, b])
        .with("base_variation", v_base)
        .with("resolution_noise", noise)
        .with("partition", &p)
        .with("rows", rows)
        .with("violations", violations))
}

/// Samples of a function on an interval of convexity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexSample {
    pub lo: f64,
    pub hi: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ConvexSample {
    pub fn new(lo: f64, hi: f64, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 3 {
            return Err(Error::InvalidGrid("need at least three samples".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("sample grid must increase".into()));
        }
        Ok(Self { lo, hi, grid, values })
    }

    /// `f` sampled at `n` even points of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(lo, hi, grid, values)
    }

    /// Profile samples strictly inside `(lo, hi)`.
    pub fn from_profile(p: &MaximalProfile, lo: f64, hi: f64) -> Result<Self> {
        let r = indices_within(&p.grid, lo, hi);
        Self::new(lo, hi, p.grid[r.clone()].to_vec(), p.ustar[r].to_vec())
    }

    /// Slope of the interpolant on the cell containing `x`.
    pub fn slope_at(&self, x: f64) -> f64 {
        let n = self.grid.len();
        let i = self.grid.partition_point(|&g| g <= x).clamp(1, n - 1);
        (self.values[i] - self.values[i - 1]) / (self.grid[i] - self.grid[i - 1])
    }

    fn concavity(&self, slack: f64) -> Option<(f64, f64)> {
        second_differences(&self.grid, &self.values, 0..self.grid.len())
            .into_iter()
            .find(|(_, d)| *d < -slack)
            .map(|(i, d)| (self.grid[i], d))
    }
}

/// Each `w_j` must be convex (precondition), the limit `w` must be convex,
/// and the slopes of `w_j` must approach those of `w` on a common interior
/// grid: at the last index the largest deviation is below 1% of the range of
/// slopes of `w` there.
pub fn check_convex_limit(members: &[ConvexSample], limit: &ConvexSample, slack: f64) -> PropertyReport {
    let mut witnesses = Vec::new();
    for (k, m) in members.iter().enumerate() {
        if let Some((x, d)) = m.concavity(slack) {
            witnesses.push(Witness::at(x, format!("precondition: member {k} not convex (second difference {d:e})")));
        }
    }
    if let Some((x, d)) = limit.concavity(slack) {
        witnesses.push(Witness::at(x, format!("limit not convex (second difference {d:e})")));
    }
    let lo = members.iter().map(|m| m.lo).fold(limit.lo, f64::max);
    let hi = members.iter().map(|m| m.hi).fold(limit.hi, f64::min);
    if members.is_empty() || !(hi > lo) {
        return PropertyReport::not_applicable("convex_limit", "members share no interval with the limit");
    }
    let w = hi - lo;
    let probes: Vec<f64> = (0..33).map(|i| lo + w * (0.1 + 0.8 * i as f64 / 32.0)).collect();
    let target: Vec<f64> = probes.iter().map(|&x| limit.slope_at(x)).collect();
    let range = target.iter().copied().fold(f64::NEG_INFINITY, f64::max) - target.iter().copied().fold(f64::INFINITY, f64::min);
    let deviations: Vec<f64> = members
        .iter()
        .map(|m| probes.iter().zip(&target).map(|(&x, t)| (m.slope_at(x) - t).abs()).fold(0.0, f64::max))
        .collect();
    let last = *deviations.last().expect("members nonempty");
    let rhs = 0.01 * range;
    let tiny = 1e-9;
    PropertyReport::inequality("convex_limit", last, rhs, tiny, witnesses)
        .with("interval", [lo, hi])
        .with("slope_deviations", deviations)
        .with("slope_range", range)
}

/// `Var(u*) / ||u'||_1`, with `Var(u*)` the sampled variation over the grid
/// plus `u*` at grid ends lying outside the support (beyond the support
/// `u*` is monotone and vanishes at infinity). Pass/fail only for the
/// Poisson and heat kernels.
pub fn check_variation_diminishing(u: &PiecewiseLinearFn, profile: &MaximalProfile) -> PropertyReport {
    let denom = u.derivative_l1();
    let (x0, xn) = grid_ends(profile);
    let (s_lo, s_hi) = u.abs_part().support();
    let mut num = variation_on(&profile.grid, &profile.ustar, x0, xn);
    let n = profile.len();
    if x0 <= s_lo {
        num += profile.ustar[0];
    }
    if xn >= s_hi {
        num += profile.ustar[n - 1];
    }
    let (cg, cv) = coarsen(&profile.grid, &profile.ustar);
    let coarse = variation_on(&cg, &cv, x0, xn) + (num - variation_on(&profile.grid, &profile.ustar, x0, xn));
    let ratio = if denom > 0.0 { num / denom } else { 0.0 };
    let coarse_ratio = if denom > 0.0 { coarse / denom } else { 0.0 };
    let res = Resolution::compare(ratio, coarse_ratio, 1e-9);
    let report = match profile.kernel.family() {
        KernelFamily::FractionalPoisson => PropertyReport::measurement("variation_ratio", ratio),
        _ => PropertyReport::inequality("variation_ratio", ratio, VARIATION_RATIO_LIMIT, 0.0, vec![]),
    };
    report.with("kernel", profile.kernel.label()).with("resolution", res)
}

/// Transfers the extremal partition `pi` of `u*` on `cell` and checks the
/// identity `Var(|u|, P*) - Var(|u|, ends*) = Var(u*, P) - Var(u*, ends)`
/// within `10 err`. A failed bracket is reported as a failure with the
/// offending index.
pub fn check_transfer_identity(
    u: &PiecewiseLinearFn,
    profile: &MaximalProfile,
    pi: &Partition,
    cell: (f64, f64),
) -> Result<PropertyReport> {
    let tau = 10.0 * profile.err;
    let name = "transfer_identity";
    let report = match transfer_partition(u, profile, pi, cell) {
        Ok(TransferOutcome::Inconclusive { k, margin }) => {
            PropertyReport::inequality(name, 0.0, 0.0, tau, vec![]).inconclusive(format!("margin {margin:e} at k = {k}"))
        }
        Ok(out) => {
            let (lhs, rhs) = out.sides().expect("conclusive outcome");
            let residual = (lhs - rhs).abs();
            let w = if residual > tau { vec![Witness::global(format!("identity sides {lhs:e} and {rhs:e}"))] } else { vec![] };
            PropertyReport::inequality(name, residual, 0.0, tau, w)
                .with("lhs_side", lhs)
                .with("rhs_side", rhs)
                .with("transferred", out.points())
        }
        Err(Error::Bracket { k, lo, hi }) => PropertyReport::inequality(
            name,
            f64::INFINITY,
            0.0,
            tau,
            vec![Witness::at(lo, format!("no level crossing for k = {k} on [{lo}, {hi}]"))],
        ),
        Err(e) => return Err(e),
    };
    Ok(report.with("kernel", profile.kernel.label()).with("points", pi.len()).with("cell", [cell.0, cell.1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalespace::{maximal_profile, Grid};
    use crate::verify::report::Verdict;
    use crate::verify::sequence::SequenceMode;

    const TOL: f64 = 1e-7;

    fn tent() -> PiecewiseLinearFn {
        PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap()
    }

    fn profile(u: &PiecewiseLinearFn, k: &KernelSpec, span: f64, n: usize) -> MaximalProfile {
        let grid = Grid::symmetric(span, n).unwrap().with_points(u.breakpoints());
        maximal_profile(u, k, &grid, TOL).unwrap()
    }

    #[test]
    fn tent_is_subharmonic_off_contact() {
        for k in [KernelSpec::poisson(), KernelSpec::heat()] {
            let p = profile(&tent(), &k, 4.0, 161);
            let r = check_subharmonicity(&p, &tent(), 10.0 * TOL).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.metadata["components"].as_u64().unwrap() >= 2);
        }
    }

    #[test]
    fn uniform_bound_identity_and_perturbation() {
        let k = KernelSpec::poisson();
        let u = tent();
        let p = profile(&u, &k, 3.0, 61);
        let same = check_uniform_bound(&u, &u, &p, &p).unwrap();
        assert!(same.passed && same.lhs <= 2.0 * p.err);
        let uj = u.add(&u.scale(0.1));
        let grid = Grid::symmetric(3.0, 61).unwrap().with_points(u.breakpoints());
        let pj = maximal_profile(&uj, &k, &grid, TOL).unwrap();
        let r = check_uniform_bound(&u, &uj, &p, &pj).unwrap();
        assert!(r.passed);
        assert!((r.rhs - 0.3).abs() < 1e-12);
        assert!((r.lhs - 0.1).abs() < 1e-6);
    }

    #[test]
    fn tail_radius_and_bound() {
        let k = KernelSpec::poisson();
        let r = pick_tail_radius(&tent(), None, &k, 0.1, TOL).unwrap();
        assert!(r >= 1.0);
        let ss = ScaleSpace::new(&tent(), &k);
        let opts = SearchOptions::with_tol(TOL);
        let at_r = ss.maximal_at(r, &opts).unwrap().value;
        assert!(2.0 * at_r < 0.025 + 1e-9);
        let span = 2.0 * r;
        let p = profile(&tent(), &k, span, 4 * (span as usize) + 1);
        let rep = check_tail_bound(&tent(), &p, r).unwrap();
        assert!(rep.passed, "{rep:?}");
        let right = &rep.metadata["right"];
        let closed = right["closed_form"].as_f64().unwrap();
        let lhs = right["lhs"].as_f64().unwrap() - right["remainder"].as_f64().unwrap();
        assert!((closed - lhs).abs() < 1e-9, "{closed} vs {lhs}");
    }

    #[test]
    fn lemma6_on_unperturbed_tent() {
        let k = KernelSpec::poisson();
        let u = tent();
        let p = profile(&u, &k, 4.0, 801);
        let r = check_lemma6(&u, &u, &p, &u.derivative(), 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let far = u.add(&PiecewiseLinearFn::tent(2.0, 0.5, 1.0).unwrap());
        let na = check_lemma6(&u, &far, &p, &u.derivative(), 1e-6).unwrap();
        assert_eq!(na.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn convex_limit_of_shifted_parabolas() {
        let members: Vec<ConvexSample> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|j| ConvexSample::from_fn(-1.0, 1.0, 101, |x| x * x + 1.0 / j).unwrap())
            .collect();
        let limit = ConvexSample::from_fn(-1.0, 1.0, 101, |x| x * x).unwrap();
        assert!(check_convex_limit(&members, &limit, 1e-9).passed);
    }

    #[test]
    fn tent_variation_ratio() {
        let p = profile(&tent(), &KernelSpec::poisson(), 8.0, 321);
        let r = check_variation_diminishing(&tent(), &p);
        assert!(r.passed, "{r:?}");
        assert!(r.lhs <= 1.0 + 1e-6 && r.lhs >= 0.9, "{}", r.lhs);
    }

    #[test]
    fn constant_sequence_has_no_error() {
        let k = KernelSpec::poisson();
        let u = tent();
        let seq = ContinuitySequence::constant(u.clone(), vec![1, 2, 4]).unwrap();
        let p = profile(&u, &k, 4.0, 401);
        let ps = vec![p.clone(); 3];
        let fi = check_finite_intervals(&u, &seq, &p, &ps, &u.derivative(), 10.0 * TOL).unwrap();
        assert!(fi.passed, "{fi:?}");
        let p5 = check_prop5(&u, &seq, &p, &ps, -4.0, 4.0).unwrap();
        assert!(p5.passed, "{p5:?}");
    }

    #[test]
    fn prop5_on_additive_sequence() {
        let k = KernelSpec::poisson();
        let u = tent();
        let g = PiecewiseLinearFn::tent(0.3, 0.4, 0.5).unwrap();
        let seq = ContinuitySequence::new(u.clone(), g, vec![1, 2, 4, 8], SequenceMode::Additive).unwrap();
        let grid = Grid::symmetric(4.0, 401).unwrap().with_points(&seq.all_breakpoints());
        let p = maximal_profile(&u, &k, &grid, TOL).unwrap();
        let ps: Vec<_> = seq.members().iter().map(|m| maximal_profile(m, &k, &grid, TOL).unwrap()).collect();
        let r = check_prop5(&u, &seq, &p, &ps, -4.0, 4.0).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
