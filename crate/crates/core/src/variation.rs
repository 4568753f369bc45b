//! Partition variation, alternating extremal partitions of sampled functions,
//! and the transfer of an extremal partition of `u*` to points where `|u|`
//! takes the same values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcmodel::PiecewiseLinearFn;
use crate::scalespace::MaximalProfile;

/// Strictly increasing, nonempty set of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<f64>);

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPartition("empty partition".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPartition("non-finite point".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition("points must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    /// Sorted, deduplicated union of arbitrary finite points.
    pub fn from_unsorted(mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(|a, b| a.total_cmp(b));
        points.dedup();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn union(&self, other: &Partition) -> Partition {
        let mut v: Vec<f64> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        Partition(v)
    }

    pub fn is_refined_by(&self, other: &Partition) -> bool {
        self.0.iter().all(|p| other.0.binary_search_by(|q| q.total_cmp(p)).is_ok())
    }
}

/// `Var(w, P) = sum |w(a_{i+1}) - w(a_i)|`.
pub fn var_over_partition(w: impl Fn(f64) -> f64, p: &Partition) -> f64 {
    let vals: Vec<f64> = p.points().iter().map(|&x| w(x)).collect();
    sampled_variation(&vals)
}

/// Sum of absolute increments of consecutive samples.
pub fn sampled_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `int_a^b |f'|`, exact for piecewise-linear `f`.
pub fn total_variation(f: &PiecewiseLinearFn, a: f64, b: f64) -> f64 {
    let bp = f.breakpoints();
    bp.windows(2)
        .zip(f.slopes())
        .map(|(w, s)| {
            let len = (w[1].min(b) - w[0].max(a)).max(0.0);
            if len > 0.0 { s.abs() * len } else { 0.0 }
        })
        .sum()
}

/// Indices of the samples of `values` that lie in `[a, b]` on `grid`.
fn window(grid: &[f64], a: f64, b: f64) -> std::ops::Range<usize> {
    let lo = grid.partition_point(|&x| x < a);
    let hi = grid.partition_point(|&x| x <= b);
    lo..hi
}

/// Alternating local extrema of the samples of `w` in `[a, b]`, endpoints
/// included. Plateaus contribute their first point. `Var(w, P)` then equals
/// the sampled variation on `[a, b]`; the error case is a window too small to
/// carry any variation while `eps` asks for a certificate.
pub fn extremal_partition(grid: &[f64], values: &[f64], a: f64, b: f64, eps: f64) -> Result<Partition> {
    if grid.len() != values.len() {
        return Err(Error::InvalidPartition("grid and values differ in length".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidPartition("eps must be positive".into()));
    }
    let r = window(grid, a, b);
    if r.len() < 2 {
        return Err(Error::InvalidPartition(format!(
            "fewer than two samples in [{a}, {b}]; achieved variation 0"
        )));
    }
    let (x, v) = (&grid[r.clone()], &values[r]);
    let idx = extremal_indices(v);
    let p = Partition(idx.iter().map(|&i| x[i]).collect());
    let achieved: f64 = sampled_variation(&idx.iter().map(|&i| v[i]).collect::<Vec<_>>());
    let full = sampled_variation(v);
    if achieved < full - eps {
        return Err(Error::InvalidPartition(format!("achieved variation {achieved} of {full}")));
    }
    Ok(p)
}

/// First index, every turning point (first sample of a plateau), last index.
pub fn extremal_indices(v: &[f64]) -> Vec<usize> {
    let n = v.len();
    let mut out = vec![0];
    let mut dir = 0.0_f64;
    let mut run_start = 0;
    for i in 1..n {
        let d = v[i] - v[i - 1];
        if d == 0.0 {
            continue;
        }
        let s = d.signum();
        if dir != 0.0 && s != dir && run_start != 0 {
            out.push(run_start);
        }
        dir = s;
        run_start = i;
    }
    if n > 1 {
        out.push(n - 1);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TransferOutcome {
    /// The interior points were replaced by level matches on `|u|`.
    Transferred { points: Partition, lhs: f64, rhs: f64 },
    /// At most two gaps, or all interior values equal: both sides vanish.
    Unchanged { points: Partition, lhs: f64, rhs: f64 },
    /// The level at the local maximum `k` exceeds the largest value of `|u|`
    /// on its bracket by less than `2 * err`: within certification error the
    /// crossing may or may not exist.
    Inconclusive { k: usize, margin: f64 },
}

impl TransferOutcome {
    pub fn sides(&self) -> Option<(f64, f64)> {
        match self {
            TransferOutcome::Transferred { lhs, rhs, .. } | TransferOutcome::Unchanged { lhs, rhs, .. } => {
                Some((*lhs, *rhs))
            }
            TransferOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn points(&self) -> Option<&Partition> {
        match self {
            TransferOutcome::Transferred { points, .. } | TransferOutcome::Unchanged { points, .. } => Some(points),
            TransferOutcome::Inconclusive { .. } => None,
        }
    }
}

/// `Var(P) - |w(last) - w(first)|` over the listed interior values.
fn excess(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    sampled_variation(values) - (values[values.len() - 1] - values[0]).abs()
}

/// Transfers the extremal partition `pi = {a_0 < ... < a_n}` of `u*` on the
/// cell `[a_0, a_n]` to points `a*_1 < ... < a*_{n-1}` with
/// `|u|(a*_k) = u*(a_k)`. Each point of `pi` must be a grid point of
/// `profile`. Local maxima are matched first, on the segment from `a_k` to the
/// maximizer of `|u|` on `[a_{k-1}, a_{k+1}]`; a local minimum is then matched
/// between `a_k` and the transferred point of its right neighbour (or, for
/// the last interior point, between the transferred left neighbour and
/// `a_k`).
pub fn transfer_partition(
    u: &PiecewiseLinearFn,
    profile: &MaximalProfile,
    pi: &Partition,
    cell: (f64, f64),
) -> Result<TransferOutcome> {
    let a = pi.points();
    if a[0] != cell.0 || a[a.len() - 1] != cell.1 {
        return Err(Error::InvalidPartition(format!("partition does not span the cell [{}, {}]", cell.0, cell.1)));
    }
    let levels: Vec<f64> = a.iter().map(|&x| profile.value_at(x)).collect::<Result<_>>()?;
    transfer_points(&u.abs_part(), a, &levels, profile.err)
}

/// Core of [`transfer_partition`] on explicit levels `levels[k] = u*(a_k)`.
pub fn transfer_points(abs: &PiecewiseLinearFn, a: &[f64], levels: &[f64], err: f64) -> Result<TransferOutcome> {
    let n = a.len() - 1;
    let interior = if n >= 2 { &levels[1..n] } else { &levels[0..0] };
    let unchanged = |lhs: f64, rhs: f64| {
        let pts = if n >= 2 { a[1..n].to_vec() } else { a.to_vec() };
        Ok(TransferOutcome::Unchanged { points: Partition(pts), lhs, rhs })
    };
    if n <= 2 {
        return unchanged(0.0, 0.0);
    }
    if interior.windows(2).all(|w| w[0] == w[1]) {
        return unchanged(0.0, 0.0);
    }
    // alternation: a point is a local max iff it rises from its left neighbour
    let mut star = vec![f64::NAN; n];
    for k in 1..n {
        if levels[k] <= levels[k - 1] {
            continue;
        }
        if abs.eval(a[k]) >= levels[k] {
            star[k] = a[k];
            continue;
        }
        let (z, top) = abs.argmax_on(a[k - 1], a[k + 1]);
        let margin = top - levels[k];
        if margin < -2.0 * err {
            return Err(Error::Bracket { k, lo: a[k - 1], hi: a[k + 1] });
        }
        if margin < 0.0 {
            return Ok(TransferOutcome::Inconclusive { k, margin });
        }
        star[k] = abs
            .level_crossing(levels[k], a[k], z)
            .ok_or(Error::Bracket { k, lo: a[k].min(z), hi: a[k].max(z) })?;
    }
    for k in 1..n {
        if !star[k].is_nan() {
            continue;
        }
        let (from, to, neighbour) = if k < n - 1 { (a[k], star[k + 1], k + 1) } else { (star[k - 1], a[k], k - 1) };
        if to.is_nan() || from.is_nan() {
            return Err(Error::Bracket { k, lo: a[k - 1], hi: a[k + 1] });
        }
        if levels[neighbour] <= levels[k] {
            return Err(Error::InvalidPartition(format!("levels do not alternate at k = {k}")));
        }
        let start = if k < n - 1 { from } else { to };
        let end = if k < n - 1 { to } else { from };
        star[k] = abs
            .level_crossing(levels[k], start, end)
            .ok_or(Error::Bracket { k, lo: from, hi: to })?;
    }
    let pts = star[1..].to_vec();
    if pts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPartition(format!("transferred points out of order: {pts:?}")));
    }
    let lhs = excess(&pts.iter().map(|&x| abs.eval(x)).collect::<Vec<_>>());
    let rhs = excess(interior);
    Ok(TransferOutcome::Transferred { points: Partition(pts), lhs, rhs })
}
