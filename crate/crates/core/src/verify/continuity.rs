use serde::Serialize;

use super::checks::{pick_tail_radius, VANISHING_FRACTION};
use super::report::{PropertyReport, Witness};
use super::sampled::{cell_slopes, coarsen, slope_distance, tends_to_zero, Resolution};
use super::sequence::ContinuitySequence;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::scalespace::{Grid, MaximalProfile, ScaleSpace, SearchOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub j: u32,
    pub w11_distance: f64,
    pub sup_distance: f64,
    /// `int |(u_j*)' - (u*)'|` over the grid span.
    pub e_total: f64,
    /// Part of `e_total` on cells where the base is in contact.
    pub e_contact: f64,
    /// Part of `e_total` on the remaining (detached) cells.
    pub e_detached: f64,
    /// Contact part recomputed with `(u*)' = |u|'` on the contact cells.
    pub e_contact_exact: f64,
    /// `e_total` from every other sample.
    pub e_coarse: f64,
    pub resolution_ok: bool,
    /// `|e_total - (e_contact_exact + e_detached)|`.
    pub split_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub kernel: String,
    pub grid_points: usize,
    pub grid_span: [f64; 2],
    pub tail_radius: Option<f64>,
    pub delta: f64,
    pub derivative_norm: f64,
    pub rows: Vec<ContinuityRow>,
    pub summary: PropertyReport,
}

impl ContinuityReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.e_total).collect()
    }
}

/// Profiles of the base and every member on `grid` (merged with all
/// breakpoints), then [`continuity_from_profiles`]. The grid must reach the
/// tail radius for `eps = 0.01 ||u'||_1`.
pub fn continuity_experiment(
    seq: &ContinuitySequence,
    kernel: &KernelSpec,
    grid: &Grid,
    tol: f64,
) -> Result<ContinuityReport> {
    let grid = grid.with_points(&seq.all_breakpoints());
    let pts = grid.points();
    let scale = seq.base.derivative_l1();
    let radius = if scale > 0.0 {
        let r = pick_tail_radius(&seq.base, seq.members().first(), kernel, 0.01 * scale, tol)?;
        if pts[0] > -r || pts[pts.len() - 1] < r {
            return Err(Error::InvalidGrid(format!("grid [{}, {}] does not reach the tail radius {r}", pts[0], pts[pts.len() - 1])));
        }
        Some(r)
    } else {
        None
    };
    let opts = SearchOptions::with_tol(tol);
    let base = ScaleSpace::new(&seq.base, kernel).profile(&grid, &opts)?;
    let profiles = seq
        .members()
        .iter()
        .map(|m| ScaleSpace::new(m, kernel).profile(&grid, &opts))
        .collect::<Result<Vec<_>>>()?;
    let mut report = continuity_from_profiles(seq, &base, &profiles)?;
    report.tail_radius = radius;
    Ok(report)
}

/// The error table `E_j = int |(u_j*)' - (u*)'|` from precomputed profiles.
/// A cell belongs to the contact part when `u* - |u| <= delta` at both ends,
/// `delta = 10 err`. Passes when `E_j` tends to zero relative to
/// `||u'||_1`, every row splits consistently, and the two resolutions agree.
pub fn continuity_from_profiles(
    seq: &ContinuitySequence,
    base: &MaximalProfile,
    profiles: &[MaximalProfile],
) -> Result<ContinuityReport> {
    if profiles.len() != seq.len() {
        return Err(Error::InvalidSequence("one profile per sequence member required".into()));
    }
    let grid = &base.grid;
    let (x0, xn) = (grid[0], grid[grid.len() - 1]);
    let err = profiles.iter().map(|p| p.err).fold(base.err, f64::max);
    let delta = 10.0 * err;
    let abs = seq.base.abs_part();
    let gap = base.gap(&seq.base);
    let contact: Vec<bool> = gap.windows(2).map(|g| g[0] <= delta && g[1] <= delta).collect();
    let transitions = contact.windows(2).filter(|w| w[0] != w[1]).count();
    let split_slack = 2.0 * delta * (transitions + 1) as f64 + 10.0 * err;
    let base_slopes = cell_slopes(grid, &base.ustar);
    let du = abs.derivative();
    let u_slopes: Vec<f64> = grid.windows(2).map(|w| du.eval(0.5 * (w[0] + w[1]))).collect();
    let scale = seq.base.derivative_l1();
    let floor = 1e-3 * scale.max(f64::MIN_POSITIVE);
    let (cg, cb) = coarsen(grid, &base.ustar);

    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    let distances = seq.distances();
    for ((&j, p), w11) in seq.indices.iter().zip(profiles).zip(distances) {
        if p.grid != *grid {
            return Err(Error::InvalidGrid("profiles are sampled on different grids".into()));
        }
        let s = cell_slopes(grid, &p.ustar);
        let (mut e_contact, mut e_detached, mut e_exact) = (0.0, 0.0, 0.0);
        for i in 0..s.len() {
            let h = grid[i + 1] - grid[i];
            let d = (s[i] - base_slopes[i]).abs() * h;
            if contact[i] {
                e_contact += d;
                e_exact += (s[i] - u_slopes[i]).abs() * h;
            } else {
                e_detached += d;
            }
        }
        let e_total = e_contact + e_detached;
        let (_, cj) = coarsen(grid, &p.ustar);
        let e_coarse = slope_distance(&cg, &cj, &cb, x0, xn);
        let res = Resolution::compare(e_total, e_coarse, floor);
        let split_residual = (e_total - (e_exact + e_detached)).abs();
        if split_residual > 2.0 * split_slack {
            witnesses.push(Witness::global(format!("j = {j}: contact/detached split off by {split_residual:e}")));
        }
        let sup_distance = p.ustar.iter().zip(&base.ustar).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        rows.push(ContinuityRow {
            j,
            w11_distance: w11,
            sup_distance,
            e_total,
            e_contact,
            e_detached,
            e_contact_exact: e_exact,
            e_coarse,
            resolution_ok: res.agree,
            split_residual,
        });
    }
    let e: Vec<f64> = rows.iter().map(|r| r.e_total).collect();
    let slack = 4.0 * err;
    let vanishes = tends_to_zero(&e, scale, VANISHING_FRACTION, slack);
    if !vanishes {
        witnesses.push(Witness::global(format!("E_j = {e:?} does not tend to zero")));
    }
    let last = e.last().copied().unwrap_or(0.0);
    let mut summary = PropertyReport::decided("continuity", vanishes, last, VANISHING_FRACTION * scale, slack, witnesses)
        .with("kernel", base.kernel.label())
        .with("split_slack", split_slack)
        .with("resolution_floor", floor);
    if rows.iter().any(|r| !r.resolution_ok) {
        summary = summary.inconclusive("the two grid resolutions disagree by more than 5%");
    }
    Ok(ContinuityReport {
        kernel: base.kernel.label(),
        grid_points: grid.len(),
        grid_span: [x0, xn],
        tail_radius: None,
        delta,
        derivative_norm: scale,
        rows,
        summary,
    })
}
