//! Scale-space extension `u~(x, t) = (|u| * phi_t)(x)` and the maximal function
//! `u*(x) = sup_{t >= 0} u~(x, t)`.
//!
//! On each linear segment of `|u|` the convolution is closed form in the kernel
//! antiderivatives, so `u~` is exact to rounding. The sup over `t` is found on a
//! geometric scale ladder that stops once the decay bound `phi(0) ||u||_1 / t`
//! drops below the best value seen. Every ladder local maximum is then refined
//! by golden-section search in `log t`. The `t -> 0` value `|u|(x)` is always a
//! candidate, so profiles dominate `|u|` exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcmodel::PiecewiseLinearFn;
use crate::kernels::KernelSpec;

/// Library default certification tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Strictly increasing sample positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("non-finite grid point".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidGrid(format!("uniform grid needs n >= 2 and lo < hi, got n={n}")));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
        pts[n - 1] = hi;
        Self::new(pts)
    }

    /// Uniform grid on `[-span, span]`.
    pub fn symmetric(span: f64, n: usize) -> Result<Self> {
        Self::uniform(-span, span, n)
    }

    /// Spacing `h` on `[core_lo, core_hi]`, then spacing growing by `ratio`
    /// per step out to `[-span, span]`, capped at `max_step`. Both `-span`
    /// and `span` are grid points.
    pub fn graded(core_lo: f64, core_hi: f64, h: f64, span: f64, ratio: f64, max_step: f64) -> Result<Self> {
        if !(h > 0.0 && core_hi > core_lo && span >= core_hi.max(-core_lo) && ratio >= 1.0) {
            return Err(Error::InvalidGrid("graded grid parameters out of range".into()));
        }
        let n_core = ((core_hi - core_lo) / h).ceil() as usize;
        let hc = (core_hi - core_lo) / n_core as f64;
        let mut pts: Vec<f64> = (0..=n_core).map(|i| core_lo + i as f64 * hc).collect();
        let mut step = hc;
        let mut x = core_hi;
        while x < span {
            step = (step * ratio).min(max_step);
            x = (x + step).min(span);
            if span - x < 0.25 * step {
                x = span;
            }
            pts.push(x);
        }
        let mut step = hc;
        let mut x = core_lo;
        let mut left = Vec::new();
        while x > -span {
            step = (step * ratio).min(max_step);
            x = (x - step).max(-span);
            if x + span < 0.25 * step {
                x = -span;
            }
            left.push(x);
        }
        left.reverse();
        left.extend(pts);
        Self::new(left)
    }

    /// Grid with `extra` points merged in (points outside the span included).
    pub fn with_points(&self, extra: &[f64]) -> Self {
        let mut pts: Vec<f64> = self.0.iter().chain(extra.iter()).copied().collect();
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        Self(pts)
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

    pub fn min_spacing(&self) -> f64 {
        self.0.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Ladder ratio `rho`, at most 1.25.
    pub ratio: f64,
    /// Smallest ladder scale; derived from the data when `None`.
    pub t_min: Option<f64>,
    /// Ladder length budget before the search reports an uncertified sup.
    pub max_steps: usize,
    /// Certification tolerance.
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { ratio: 1.1, t_min: None, max_steps: 20_000, tol: DEFAULT_TOL }
    }
}

impl SearchOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config { field: "tol".into(), reason: "must be positive".into() });
        }
        if !(self.ratio > 1.0 && self.ratio <= 1.25) {
            return Err(Error::Config { field: "ratio".into(), reason: "must lie in (1, 1.25]".into() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximum {
    pub value: f64,
    /// A maximizing scale; 0 when the `t -> 0` endpoint `|u|(x)` wins.
    pub t: f64,
}

/// `|u|` together with a kernel, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct ScaleSpace {
    abs: PiecewiseLinearFn,
    slopes: Vec<f64>,
    kernel: KernelSpec,
    l1: f64,
    min_segment: f64,
}

impl ScaleSpace {
    pub fn new(u: &PiecewiseLinearFn, kernel: &KernelSpec) -> Self {
        let abs = u.abs_part();
        let slopes = abs.slopes();
        let l1 = abs.norm_l1();
        let min_segment = abs
            .breakpoints()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        Self { abs, slopes, kernel: kernel.clone(), l1, min_segment }
    }

    pub fn abs(&self) -> &PiecewiseLinearFn {
        &self.abs
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn extension(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveScale(t));
        }
        Ok(self.value(x, t))
    }

    /// `u~(x, t)` for `t > 0`. On the segment `[b_i, b_{i+1}]`, with
    /// `z = (x - y) / t` and `|u|(y) = A_i - s_i t z`, the contribution is
    /// `A_i (F(z_i) - F(z_{i+1})) - s_i t (G(z_i) - G(z_{i+1}))` where `F`, `G`
    /// are the kernel's `cdf` and `moment`.
    fn value(&self, x: f64, t: f64) -> f64 {
        let b = self.abs.breakpoints();
        let v = self.abs.values();
        let k = &self.kernel;
        let z0 = (x - b[0]) / t;
        let mut f_prev = k.cdf(z0);
        let mut g_prev = k.moment(z0);
        let mut total = 0.0;
        for i in 0..b.len() - 1 {
            let z = (x - b[i + 1]) / t;
            let f_next = k.cdf(z);
            let g_next = k.moment(z);
            if v[i] != 0.0 || v[i + 1] != 0.0 {
                let s = self.slopes[i];
                let a = v[i] + s * (x - b[i]);
                total += a * (f_prev - f_next) - s * t * (g_prev - g_next);
            }
            f_prev = f_next;
            g_prev = g_next;
        }
        total.max(0.0)
    }

    fn default_t_min(&self) -> f64 {
        1e-2 * self.min_segment
    }

    pub fn maximal_at(&self, x: f64, opts: &SearchOptions) -> Result<Maximum> {
        opts.validate()?;
        let endpoint = self.abs.eval(x);
        if self.l1 == 0.0 {
            return Ok(Maximum { value: 0.0, t: 0.0 });
        }
        let ratio = opts.ratio;
        let mut best = Maximum { value: endpoint, t: 0.0 };
        let t_min = opts.t_min.unwrap_or_else(|| self.default_t_min());

        let mut ts: Vec<f64> = Vec::with_capacity(256);
        let mut fs: Vec<f64> = Vec::with_capacity(256);
        let mut t = t_min;
        loop {
            let f = self.value(x, t);
            ts.push(t);
            fs.push(f);
            if f > best.value {
                best = Maximum { value: f, t };
            }
            let bound = self.kernel.sup_decay_bound(t, self.l1);
            if ts.len() >= 3 && bound < best.value {
                break;
            }
            if ts.len() >= opts.max_steps {
                return Err(Error::Uncertified { x, best: best.value, gap: bound - best.value });
            }
            t *= ratio;
        }

        // a first ladder value above both its neighbour and |u|(x) means a
        // hump below t_min: extend downwards
        let mut extended = 0;
        while fs[0] > fs[1] && fs[0] > endpoint && extended < 400 {
            let t = ts[0] / ratio;
            let f = self.value(x, t);
            ts.insert(0, t);
            fs.insert(0, f);
            if f > best.value {
                best = Maximum { value: f, t };
            }
            extended += 1;
        }

        let n = ts.len();
        for j in 0..n - 1 {
            let left_ok = j == 0 || fs[j] > fs[j - 1];
            if left_ok && fs[j] >= fs[j + 1] {
                let lo = if j == 0 { ts[0] / ratio } else { ts[j - 1] };
                let hi = ts[j + 1];
                let flo = if j == 0 { self.value(x, lo) } else { fs[j - 1] };
                let cand = self.golden(x, lo, hi, flo, fs[j + 1], 1e-2 * opts.tol);
                if cand.value > best.value {
                    best = cand;
                }
            }
        }
        Ok(best)
    }

    /// Golden-section maximization of `t -> u~(x, t)` over `[lo, hi]` in
    /// `log t`, stopping when the spread of the four bracket values is at
    /// most `spread_tol`.
    fn golden(&self, x: f64, lo: f64, hi: f64, flo: f64, fhi: f64, spread_tol: f64) -> Maximum {
        const G: f64 = 0.618_033_988_749_894_8;
        let eval = |s: f64| self.value(x, s.exp());
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let (mut fa, mut fb) = (flo, fhi);
        let mut c = b - G * (b - a);
        let mut d = a + G * (b - a);
        let mut fc = eval(c);
        let mut fd = eval(d);
        for _ in 0..200 {
            let top = fc.max(fd);
            let bottom = fa.min(fb).min(fc).min(fd);
            if top - bottom <= spread_tol || b - a < 1e-13 {
                break;
            }
            if fc >= fd {
                b = d;
                fb = fd;
                d = c;
                fd = fc;
                c = b - G * (b - a);
                fc = eval(c);
            } else {
                a = c;
                fa = fc;
                c = d;
                fc = fd;
                d = a + G * (b - a);
                fd = eval(d);
            }
        }
        let mut best = Maximum { value: fa, t: a.exp() };
        for (v, s) in [(fb, b), (fc, c), (fd, d)] {
            if v > best.value {
                best = Maximum { value: v, t: s.exp() };
            }
        }
        best
    }

    pub fn profile(&self, grid: &Grid, opts: &SearchOptions) -> Result<MaximalProfile> {
        opts.validate()?;
        let mut local = *opts;
        if local.t_min.is_none() {
            let h = if grid.len() > 1 { grid.min_spacing() } else { f64::INFINITY };
            local.t_min = Some((0.1 * h).min(self.default_t_min()));
        }
        let results: Vec<Maximum> = grid
            .points()
            .par_iter()
            .map(|&x| self.maximal_at(x, &local))
            .collect::<Result<Vec<_>>>()?;
        Ok(MaximalProfile {
            grid: grid.points().to_vec(),
            ustar: results.iter().map(|m| m.value).collect(),
            tstar: results.iter().map(|m| m.t).collect(),
            err: opts.tol,
            kernel: self.kernel.clone(),
        })
    }
}

/// Sampled maximal function with its maximizing scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalProfile {
    pub grid: Vec<f64>,
    pub ustar: Vec<f64>,
    pub tstar: Vec<f64>,
    /// Uniform certified error bound on `ustar`.
    pub err: f64,
    pub kernel: KernelSpec,
}

impl MaximalProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the grid point exactly equal to `x`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let i = self.grid.partition_point(|&g| g < x);
        (i < self.grid.len() && self.grid[i] == x).then_some(i)
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        self.index_of(x).map(|i| self.ustar[i]).ok_or(Error::OffGrid(x))
    }

    /// `ustar - |u|` at every grid point.
    pub fn gap(&self, u: &PiecewiseLinearFn) -> Vec<f64> {
        self.grid.iter().zip(&self.ustar).map(|(&x, &s)| s - u.eval(x).abs()).collect()
    }
}

pub fn extension(u: &PiecewiseLinearFn, k: &KernelSpec, x: f64, t: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Config { field: "tol".into(), reason: "must be positive".into() });
    }
    ScaleSpace::new(u, k).extension(x, t)
}

pub fn maximal_at(u: &PiecewiseLinearFn, k: &KernelSpec, x: f64, tol: f64) -> Result<Maximum> {
    ScaleSpace::new(u, k).maximal_at(x, &SearchOptions::with_tol(tol))
}

pub fn maximal_profile(u: &PiecewiseLinearFn, k: &KernelSpec, grid: &Grid, tol: f64) -> Result<MaximalProfile> {
    ScaleSpace::new(u, k).profile(grid, &SearchOptions::with_tol(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_simpson;

    fn tent() -> PiecewiseLinearFn {
        PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap()
    }

    fn kernels() -> Vec<KernelSpec> {
        vec![KernelSpec::poisson(), KernelSpec::heat(), KernelSpec::fractional(0.5).unwrap()]
    }

    #[test]
    fn zero_function() {
        for k in kernels() {
            let z = PiecewiseLinearFn::zero();
            assert_eq!(extension(&z, &k, 0.3, 2.0, 1e-9).unwrap(), 0.0);
            assert_eq!(maximal_at(&z, &k, 0.3, 1e-7).unwrap(), Maximum { value: 0.0, t: 0.0 });
            let p = maximal_profile(&z, &k, &Grid::symmetric(2.0, 9).unwrap(), 1e-7).unwrap();
            assert!(p.ustar.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn rejects_bad_scale() {
        let s = ScaleSpace::new(&tent(), &KernelSpec::poisson());
        assert!(s.extension(0.0, 0.0).is_err());
        assert!(s.extension(0.0, -1.0).is_err());
        assert!(extension(&tent(), &KernelSpec::poisson(), 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn approximate_identity_limit() {
        let v = extension(&tent(), &KernelSpec::poisson(), 0.0, 1e-4, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-2, "{v}");
    }

    #[test]
    fn closed_form_matches_direct_quadrature() {
        let u = PiecewiseLinearFn::new(vec![-1.0, -0.2, 0.5, 2.0], vec![0.0, 1.5, -0.7, 0.0]).unwrap();
        let a = u.abs_part();
        for k in kernels() {
            let s = ScaleSpace::new(&u, &k);
            for &(x, t) in &[(0.0, 1.0), (0.3, 0.05), (-3.0, 2.0), (10.0, 7.0), (0.5, 0.5)] {
                let mut q = 0.0;
                for w in a.breakpoints().windows(2) {
                    q += adaptive_simpson(|y| a.eval(y) * k.value((x - y) / t) / t, w[0], w[1], 1e-13)
                        .unwrap()
                        .value;
                }
                let v = s.extension(x, t).unwrap();
                assert!((v - q).abs() < 1e-10, "{} x={x} t={t}: {v} vs {q}", k.label());
            }
        }
    }

    #[test]
    fn tent_poisson_at_peak_and_far() {
        let k = KernelSpec::poisson();
        let m = maximal_at(&tent(), &k, 0.0, 1e-7).unwrap();
        assert!(m.value > 0.5 && m.value <= 1.0);
        assert!(m.value >= 0.999);
        let far = maximal_at(&tent(), &k, 100.0, 1e-7).unwrap();
        assert!(far.value > 0.0);
        assert!(far.t > 0.0);
        // phi_t(100) * ||u||_1 is maximal near t = 100, where it is 1/(2 pi 100)
        assert!((far.value - 1.0 / (200.0 * std::f64::consts::PI)).abs() < 1e-5);
    }

    #[test]
    fn profile_dominates_and_translates() {
        for k in kernels() {
            let grid = Grid::symmetric(3.0, 61).unwrap();
            let p = maximal_profile(&tent(), &k, &grid, 1e-7).unwrap();
            for (x, s) in p.grid.iter().zip(&p.ustar) {
                assert!(*s >= tent().eval(*x));
            }
            let a = 0.75;
            let shifted = Grid::new(grid.points().iter().map(|x| x + a).collect()).unwrap();
            let q = maximal_profile(&tent().translate(a), &k, &shifted, 1e-7).unwrap();
            for (s, r) in p.ustar.iter().zip(&q.ustar) {
                assert!((s - r).abs() <= 2e-7, "{} {s} {r}", k.label());
            }
        }
    }

    #[test]
    fn graded_grid_shape() {
        let g = Grid::graded(-1.5, 1.5, 0.01, 40.0, 1.05, 1.0).unwrap();
        assert_eq!(g.points()[0], -40.0);
        assert_eq!(*g.points().last().unwrap(), 40.0);
        assert!(g.min_spacing() > 0.0);
        let h = g.with_points(&[0.123, 40.0]);
        assert!(h.index_of_point(0.123));
    }

    impl Grid {
        fn index_of_point(&self, x: f64) -> bool {
            self.0.contains(&x)
        }
    }
}
