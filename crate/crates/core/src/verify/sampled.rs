//! Derivative integrals of sampled functions. A profile is read as its
//! piecewise-linear interpolant `I_h w`, whose derivative is the forward
//! difference on each grid cell; integrals over `[lo, hi]` weight each cell by
//! its overlap with the window.

use serde::Serialize;

use crate::funcmodel::StepFunction;

/// Fraction by which two resolutions may disagree.
pub const RESOLUTION_AGREEMENT: f64 = 0.05;

pub fn cell_slopes(grid: &[f64], values: &[f64]) -> Vec<f64> {
    grid.windows(2).zip(values.windows(2)).map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0])).collect()
}

fn overlap(x0: f64, x1: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (a, b) = (x0.max(lo), x1.min(hi));
    (b > a).then_some((a, b))
}

/// `int_lo^hi |(I_h w)'|`.
pub fn variation_on(grid: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    slope_integral(grid, &cell_slopes(grid, values), lo, hi, |s, a, b| s.abs() * (b - a))
}

/// `int_lo^hi |(I_h w)' - (I_h v)'|` for two profiles on one grid.
pub fn slope_distance(grid: &[f64], w: &[f64], v: &[f64], lo: f64, hi: f64) -> f64 {
    let sw = cell_slopes(grid, w);
    let sv = cell_slopes(grid, v);
    let diff: Vec<f64> = sw.iter().zip(&sv).map(|(a, b)| a - b).collect();
    slope_integral(grid, &diff, lo, hi, |s, a, b| s.abs() * (b - a))
}

/// `int_lo^hi |(I_h w)' - f|` for an exact step function `f`.
pub fn slope_distance_to_step(grid: &[f64], w: &[f64], f: &StepFunction, lo: f64, hi: f64) -> f64 {
    slope_integral(grid, &cell_slopes(grid, w), lo, hi, |s, a, b| f.l1_distance_to_constant_on(s, a, b))
}

/// `int_lo^hi |(I_h w)' - c|`.
pub fn slope_distance_to_constant(grid: &[f64], w: &[f64], c: f64, lo: f64, hi: f64) -> f64 {
    slope_integral(grid, &cell_slopes(grid, w), lo, hi, |s, a, b| (s - c).abs() * (b - a))
}

fn slope_integral(grid: &[f64], slopes: &[f64], lo: f64, hi: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let start = grid.partition_point(|&x| x <= lo).saturating_sub(1);
    let mut total = 0.0;
    for i in start..slopes.len() {
        if grid[i] >= hi {
            break;
        }
        if let Some((a, b)) = overlap(grid[i], grid[i + 1], lo, hi) {
            total += f(slopes[i], a, b);
        }
    }
    total
}

/// Every other sample, always keeping the last one: the same function read
/// at roughly twice the spacing.
pub fn coarsen(grid: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let mut idx: Vec<usize> = (0..n).step_by(2).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    (idx.iter().map(|&i| grid[i]).collect(), idx.iter().map(|&i| values[i]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolution {
    pub fine: f64,
    pub coarse: f64,
    /// Values below this are treated as zero and always agree.
    pub floor: f64,
    pub agree: bool,
}

impl Resolution {
    pub fn compare(fine: f64, coarse: f64, floor: f64) -> Self {
        let scale = fine.abs().max(coarse.abs());
        let agree = scale <= floor || (fine - coarse).abs() <= RESOLUTION_AGREEMENT * scale;
        Self { fine, coarse, floor, agree }
    }
}

/// Second differences `w_{i-1} - 2 w_i + w_{i+1}` generalised to uneven
/// spacing: twice the gap between the chord through the neighbours and
/// `w_i`. Returned with the index of the middle sample.
pub fn second_differences(grid: &[f64], values: &[f64], range: std::ops::Range<usize>) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    if range.len() < 3 {
        return out;
    }
    for i in range.start + 1..range.end - 1 {
        let lam = (grid[i] - grid[i - 1]) / (grid[i + 1] - grid[i - 1]);
        let chord = values[i - 1] * (1.0 - lam) + values[i + 1] * lam;
        out.push((i, 2.0 * (chord - values[i])));
    }
    out
}

/// Indices of grid points strictly inside `(lo, hi)`.
pub fn indices_within(grid: &[f64], lo: f64, hi: f64) -> std::ops::Range<usize> {
    grid.partition_point(|&x| x <= lo)..grid.partition_point(|&x| x < hi)
}

/// "Tends to zero" along a sequence: the final value is within `slack`, or
/// the last three values strictly decrease and the final value is below
/// `fraction * scale`.
pub fn tends_to_zero(values: &[f64], scale: f64, fraction: f64, slack: f64) -> bool {
    let Some(&last) = values.last() else { return true };
    if last <= slack {
        return true;
    }
    let n = values.len();
    n >= 3 && values[n - 3] > values[n - 2] && values[n - 2] > values[n - 1] && last < fraction * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variation_and_distances() {
        let g = [0.0, 1.0, 2.0, 3.0];
        let w = [0.0, 2.0, 1.0, 1.0];
        assert_eq!(variation_on(&g, &w, 0.0, 3.0), 3.0);
        assert_eq!(variation_on(&g, &w, 0.5, 1.5), 1.5);
        assert_eq!(variation_on(&g, &w, -10.0, 10.0), 3.0);
        let v = [0.0, 1.0, 1.0, 1.0];
        assert_eq!(slope_distance(&g, &w, &v, 0.0, 3.0), 2.0);
        let f = StepFunction::new(vec![0.0, 1.0, 2.0], vec![2.0, -1.0]).unwrap();
        assert_eq!(slope_distance_to_step(&g, &w, &f, 0.0, 3.0), 0.0);
        assert_eq!(slope_distance_to_constant(&g, &w, 1.0, 0.0, 2.0), 3.0);
    }

    #[test]
    fn second_differences_detect_concavity() {
        let g = [0.0, 0.5, 2.0, 3.0];
        let convex: Vec<f64> = g.iter().map(|x| x * x).collect();
        assert!(second_differences(&g, &convex, 0..4).iter().all(|(_, d)| *d >= 0.0));
        let concave: Vec<f64> = convex.iter().map(|v| -v).collect();
        assert!(second_differences(&g, &concave, 0..4).iter().all(|(_, d)| *d < 0.0));
        let uniform = [0.0, 1.0, 2.0];
        let d = second_differences(&uniform, &[1.0, 0.0, 1.0], 0..3);
        assert_eq!(d, vec![(1, 2.0)]);
    }

    #[test]
    fn zero_rule() {
        assert!(tends_to_zero(&[3.0, 2.0, 1.0, 0.1], 10.0, 0.05, 0.0));
        assert!(!tends_to_zero(&[3.0, 2.0, 1.0, 0.6], 10.0, 0.05, 0.0));
        assert!(!tends_to_zero(&[0.1, 0.2, 0.3], 100.0, 0.05, 0.0));
        assert!(tends_to_zero(&[1e-9, 1e-9, 1e-9], 1.0, 0.05, 1e-8));
        assert!(Resolution::compare(1.0, 1.04, 0.0).agree);
        assert!(!Resolution::compare(1.0, 1.2, 0.0).agree);
        assert!(Resolution::compare(1e-9, 1e-7, 1e-6).agree);
        assert_eq!(coarsen(&[0.0, 1.0, 2.0, 3.0], &[0.0; 4]).0, vec![0.0, 2.0, 3.0]);
    }
}
