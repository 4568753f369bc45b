//! Compactly supported continuous piecewise-linear functions.
//!
//! A [`PiecewiseLinearFn`] is the discrete stand-in for an element of
//! `W^{1,1}(R)`: it vanishes at its first and last breakpoint, is linear in
//! between and zero outside. Its weak derivative is the [`StepFunction`] of
//! slopes, so every norm used by the maximal-operator checks is an exact finite
//! sum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidFunction("need at least two breakpoints".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("non-finite breakpoint or value".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::InvalidFunction(
                "first and last values must be exactly 0 (compact support)".into(),
            ));
        }
        Ok(Self { breakpoints, values })
    }

    /// The zero function, represented on `[0, 1]`.
    pub fn zero() -> Self {
        Self { breakpoints: vec![0.0, 1.0], values: vec![0.0, 0.0] }
    }

    /// Tent of the given height centered at `center` with support
    /// `[center - half_width, center + half_width]`.
    pub fn tent(center: f64, half_width: f64, height: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidFunction("tent half width must be positive".into()));
        }
        Self::new(
            vec![center - half_width, center, center + half_width],
            vec![0.0, height, 0.0],
        )
    }

    /// Sawtooth with `teeth` symmetric teeth of width `tooth_width` starting at `start`.
    /// Consecutive teeth meet at level `floor` (fraction of `height`), so the
    /// valleys between teeth sit above zero.
    pub fn sawtooth(start: f64, teeth: usize, tooth_width: f64, height: f64, floor: f64) -> Result<Self> {
        if teeth == 0 || !(tooth_width > 0.0) {
            return Err(Error::InvalidFunction("sawtooth needs >= 1 tooth of positive width".into()));
        }
        let mut b = vec![start];
        let mut v = vec![0.0];
        for i in 0..teeth {
            let left = start + i as f64 * tooth_width;
            b.push(left + 0.5 * tooth_width);
            v.push(height);
            b.push(left + tooth_width);
            v.push(if i + 1 == teeth { 0.0 } else { floor * height });
        }
        Self::new(b, v)
    }

    /// Plateau staircase: a ramp of width `ramp` into each level, each level held
    /// for `width`, and a final ramp back to zero.
    pub fn steps(start: f64, levels: &[f64], width: f64, ramp: f64) -> Result<Self> {
        if levels.is_empty() || !(width > 0.0) || !(ramp > 0.0) {
            return Err(Error::InvalidFunction("steps needs levels, width > 0, ramp > 0".into()));
        }
        let mut b = vec![start];
        let mut v = vec![0.0];
        let mut x = start;
        for &level in levels {
            x += ramp;
            b.push(x);
            v.push(level);
            x += width;
            b.push(x);
            v.push(level);
        }
        b.push(x + ramp);
        v.push(0.0);
        Self::new(b, v)
    }

    /// Random piecewise-linear function with `interior` free breakpoints in
    /// `[-span, span]` and values uniform in `[-amp, amp]` (signed when
    /// `signed`, otherwise nonnegative).
    pub fn random_pl(rng: &mut impl Rng, interior: usize, span: f64, amp: f64, signed: bool) -> Result<Self> {
        let n = interior.max(1) + 2;
        let mut gaps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = gaps.iter().sum();
        for g in gaps.iter_mut() {
            *g *= 2.0 * span / total;
        }
        let mut b = Vec::with_capacity(n);
        let mut x = -span;
        b.push(x);
        for g in &gaps[..gaps.len() - 1] {
            x += g;
            b.push(x);
        }
        b.push(span);
        let mut v = vec![0.0; n];
        for (i, value) in v.iter_mut().enumerate().take(n - 1).skip(1) {
            let mag = rng.gen_range(0.1 * amp..amp);
            *value = if signed && i % 2 == 0 { -mag } else { mag };
        }
        Self::new(b, v)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    /// Smallest `r` with `supp f ⊂ [-r, r]`.
    pub fn support_radius(&self) -> f64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        let n = b.len();
        if !(x > b[0] && x < b[n - 1]) {
            return 0.0;
        }
        // first index with b[i] > x; x lies in [b[i-1], b[i])
        let i = b.partition_point(|&p| p <= x);
        let (x0, x1) = (b[i - 1], b[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        if x == x0 {
            return v0;
        }
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Slope on each segment `(b_i, b_{i+1})`.
    pub fn slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| (v[1] - v[0]) / (b[1] - b[0]))
            .collect()
    }

    pub fn derivative(&self) -> StepFunction {
        StepFunction { breakpoints: self.breakpoints.clone(), levels: self.slopes() }
    }

    pub fn norm_l1(&self) -> f64 {
        let mut total = 0.0;
        for (b, v) in self.breakpoints.windows(2).zip(self.values.windows(2)) {
            let h = b[1] - b[0];
            let (a, c) = (v[0], v[1]);
            if a * c >= 0.0 {
                total += 0.5 * (a.abs() + c.abs()) * h;
            } else {
                // two triangles meeting at the exact zero crossing
                total += 0.5 * (a * a + c * c) / (a.abs() + c.abs()) * h;
            }
        }
        total
    }

    /// `||f'||_1`, the total variation of `f`.
    pub fn derivative_l1(&self) -> f64 {
        self.values.windows(2).map(|v| (v[1] - v[0]).abs()).sum()
    }

    pub fn norm_w11(&self) -> f64 {
        self.norm_l1() + self.derivative_l1()
    }

    /// `sup |f|`, attained at a breakpoint.
    pub fn norm_sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `|f|`, with every sign change inserted as a breakpoint.
    pub fn abs_part(&self) -> Self {
        if self.values.iter().all(|&v| v >= 0.0) {
            return self.clone();
        }
        let mut b = Vec::with_capacity(self.breakpoints.len() * 2);
        let mut v = Vec::with_capacity(self.breakpoints.len() * 2);
        b.push(self.breakpoints[0]);
        v.push(0.0);
        for i in 0..self.breakpoints.len() - 1 {
            let (b0, b1) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            if v0 * v1 < 0.0 {
                let root = b0 - v0 * (b1 - b0) / (v1 - v0);
                if root > b0 && root < b1 {
                    b.push(root);
                    v.push(0.0);
                }
            }
            b.push(b1);
            v.push(v1.abs());
        }
        Self { breakpoints: b, values: v }
    }

    fn on_points(points: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let values = points.iter().map(|&x| f(x)).collect();
        Self { breakpoints: points, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        let points = merge_sorted(&self.breakpoints, &other.breakpoints);
        Self::on_points(points, |x| self.eval(x) + other.eval(x))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let points = merge_sorted(&self.breakpoints, &other.breakpoints);
        Self::on_points(points, |x| self.eval(x) - other.eval(x))
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * lambda).collect(),
        }
    }

    /// `x -> f(x - a)`.
    pub fn translate(&self, a: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|b| b + a).collect(),
            values: self.values.clone(),
        }
    }

    /// Moves breakpoint `i` by `shifts[i]`, keeping values. Fails if the
    /// order of the breakpoints is not preserved.
    pub fn jitter(&self, shifts: &[f64]) -> Result<Self> {
        if shifts.len() != self.breakpoints.len() {
            return Err(Error::InvalidFunction("one shift per breakpoint required".into()));
        }
        let b = self.breakpoints.iter().zip(shifts).map(|(b, s)| b + s).collect();
        Self::new(b, self.values.clone())
    }

    /// First solution of `f(y) = level` met when walking from `from` to `to`.
    /// Exact: `f` is linear between consecutive breakpoints.
    pub fn level_crossing(&self, level: f64, from: f64, to: f64) -> Option<f64> {
        let g = |y: f64| self.eval(y) - level;
        let g_from = g(from);
        if g_from == 0.0 {
            return Some(from);
        }
        let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
        // interior breakpoints ordered in walking direction
        let mut nodes: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        if from > to {
            nodes.reverse();
        }
        nodes.push(to);
        let mut prev = from;
        let mut g_prev = g_from;
        for &node in &nodes {
            let g_node = g(node);
            if g_node == 0.0 {
                return Some(node);
            }
            if (g_prev < 0.0) != (g_node < 0.0) {
                // f is linear between prev and node
                let root = prev + g_prev * (node - prev) / (g_prev - g_node);
                return Some(root.clamp(prev.min(node), prev.max(node)));
            }
            prev = node;
            g_prev = g_node;
        }
        None
    }

    /// Maximizer of `f` over `[lo, hi]` (a breakpoint or an endpoint).
    pub fn argmax_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut best = (lo, self.eval(lo));
        for &b in self.breakpoints.iter().filter(|&&b| b > lo && b < hi) {
            let v = self.eval(b);
            if v > best.1 {
                best = (b, v);
            }
        }
        let v = self.eval(hi);
        if v > best.1 {
            best = (hi, v);
        }
        best
    }
}

fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    out.sort_by(|x, y| x.total_cmp(y));
    out.dedup();
    out
}

/// Step function `sum_i alpha_i chi_(a_i, a_{i+1})`, zero outside
/// `[a_1, a_{N+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || levels.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidFunction(
                "step function needs N+1 >= 2 breakpoints and N levels".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        if breakpoints.iter().chain(levels.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("non-finite step data".into()));
        }
        Ok(Self { breakpoints, levels })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Levels on the `N` bounded gaps.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of bounded pieces `N`.
    pub fn pieces(&self) -> usize {
        self.levels.len()
    }

    /// Level on gap `i` in `0..=N+1`, where gap 0 is `(-inf, a_1)` and gap
    /// `N+1` is `(a_{N+1}, inf)`; both unbounded gaps carry level 0.
    pub fn gap_level(&self, i: usize) -> f64 {
        if i == 0 || i > self.levels.len() {
            0.0
        } else {
            self.levels[i - 1]
        }
    }

    /// Gap `i` as `(lo, hi)` with infinite ends for the unbounded gaps.
    pub fn gap(&self, i: usize) -> (f64, f64) {
        let n = self.breakpoints.len();
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
        let hi = if i >= n { f64::INFINITY } else { self.breakpoints[i] };
        (lo, hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        if !(x > b[0] && x < b[b.len() - 1]) {
            return 0.0;
        }
        let i = b.partition_point(|&p| p <= x);
        self.levels[i - 1]
    }

    pub fn norm_l1(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.levels)
            .map(|(b, l)| (b[1] - b[0]) * l.abs())
            .sum()
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        let points = merge_sorted(&self.breakpoints, &other.breakpoints);
        points
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                (w[1] - w[0]) * (self.eval(mid) - other.eval(mid)).abs()
            })
            .sum()
    }

    /// `int_lo^hi |self - c|` for a constant `c`, exact.
    pub fn l1_distance_to_constant_on(&self, c: f64, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let mut cuts: Vec<f64> = self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi).collect();
        cuts.insert(0, lo);
        cuts.push(hi);
        cuts.windows(2)
            .map(|w| {
                let mid = if w[0].is_finite() && w[1].is_finite() {
                    0.5 * (w[0] + w[1])
                } else if w[0].is_finite() {
                    w[0] + 1.0
                } else {
                    w[1] - 1.0
                };
                let len = w[1] - w[0];
                let d = (self.eval(mid) - c).abs();
                if d == 0.0 { 0.0 } else { len * d }
            })
            .sum()
    }

    /// Simple-function approximation with `||self - v||_1 <= eps` and no more
    /// pieces than `self`. Adjacent levels are merged into the level of the
    /// first piece of a run whenever they lie within `eps / L` of it, where `L`
    /// is the length of the support.
    pub fn simple_approx(&self, eps: f64) -> Self {
        if !(eps > 0.0) {
            return self.clone();
        }
        let total = self.breakpoints[self.breakpoints.len() - 1] - self.breakpoints[0];
        let threshold = eps / total;
        let mut b = vec![self.breakpoints[0]];
        let mut levels: Vec<f64> = Vec::new();
        let mut anchor = self.levels[0];
        for (i, &level) in self.levels.iter().enumerate().skip(1) {
            if (level - anchor).abs() > threshold {
                b.push(self.breakpoints[i]);
                levels.push(anchor);
                anchor = level;
            }
        }
        b.push(self.breakpoints[self.breakpoints.len() - 1]);
        levels.push(anchor);
        Self { breakpoints: b, levels }
    }
}

/// JSON description of a function: either explicit data or a named generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSource {
    Explicit { breakpoints: Vec<f64>, values: Vec<f64> },
    Generated {
        #[serde(rename = "type")]
        kind: GeneratorKind,
        #[serde(default)]
        params: serde_json::Map<String, serde_json::Value>,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Tent,
    Steps,
    Sawtooth,
    RandomPl,
}

impl FunctionSource {
    pub fn build(&self) -> Result<PiecewiseLinearFn> {
        match self {
            FunctionSource::Explicit { breakpoints, values } => {
                PiecewiseLinearFn::new(breakpoints.clone(), values.clone())
            }
            FunctionSource::Generated { kind, params, seed } => {
                let num = |key: &str, default: f64| -> Result<f64> {
                    match params.get(key) {
                        None => Ok(default),
                        Some(v) => v.as_f64().ok_or_else(|| {
                            Error::InvalidFunction(format!("parameter `{key}` must be a number"))
                        }),
                    }
                };
                match kind {
                    GeneratorKind::Tent => PiecewiseLinearFn::tent(
                        num("center", 0.0)?,
                        num("half_width", 1.0)?,
                        num("height", 1.0)?,
                    ),
                    GeneratorKind::Sawtooth => PiecewiseLinearFn::sawtooth(
                        num("start", -2.0)?,
                        num("teeth", 4.0)? as usize,
                        num("tooth_width", 1.0)?,
                        num("height", 1.0)?,
                        num("floor", 0.25)?,
                    ),
                    GeneratorKind::Steps => {
                        let levels = match params.get("levels") {
                            None => vec![1.0, 0.5, 1.5],
                            Some(v) => v
                                .as_array()
                                .and_then(|a| a.iter().map(|x| x.as_f64()).collect::<Option<Vec<_>>>())
                                .ok_or_else(|| {
                                    Error::InvalidFunction("`levels` must be an array of numbers".into())
                                })?,
                        };
                        PiecewiseLinearFn::steps(
                            num("start", -2.0)?,
                            &levels,
                            num("width", 1.0)?,
                            num("ramp", 0.25)?,
                        )
                    }
                    GeneratorKind::RandomPl => {
                        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                        PiecewiseLinearFn::random_pl(
                            &mut rng,
                            num("interior", 6.0)? as usize,
                            num("span", 2.0)?,
                            num("amp", 1.0)?,
                            params.get("signed").and_then(|v| v.as_bool()).unwrap_or(true),
                        )
                    }
                }
            }
        }
    }
}

impl From<&PiecewiseLinearFn> for FunctionSource {
    fn from(f: &PiecewiseLinearFn) -> Self {
        FunctionSource::Explicit { breakpoints: f.breakpoints.clone(), values: f.values.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, any, Strategy};

    fn tent() -> PiecewiseLinearFn {
        PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn eval_tent() {
        let f = tent();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(7.0), 0.0);
        assert_eq!(f.eval(-1.0), 0.0);
    }

    #[test]
    fn derivative_levels() {
        assert_eq!(tent().derivative().levels(), &[1.0, -1.0]);
        assert_eq!(PiecewiseLinearFn::zero().derivative().levels(), &[0.0]);
        let f = PiecewiseLinearFn::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.derivative().levels(), &[2.0, -1.0]);
    }

    #[test]
    fn norms() {
        let f = tent();
        assert_eq!(f.norm_l1(), 1.0);
        assert_eq!(f.derivative().norm_l1(), 2.0);
        assert_eq!(f.norm_w11(), 3.0);
        assert_eq!(PiecewiseLinearFn::zero().norm_w11(), 0.0);
        let g = f.scale(-2.0);
        assert_eq!(g.norm_l1(), 2.0);
        assert_eq!(g.norm_w11(), 6.0);
        assert_eq!(f.scale(3.0).norm_w11(), 9.0);
    }

    #[test]
    fn abs_part_inserts_crossing() {
        let f = PiecewiseLinearFn {
            breakpoints: vec![-1.0, 0.0, 2.0, 3.0],
            values: vec![0.0, -1.0, 1.0, 0.0],
        };
        let a = f.abs_part();
        assert_eq!(a.breakpoints(), &[-1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(a.values(), &[0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(tent().abs_part(), tent());
        assert_eq!(tent().scale(-1.0).abs_part(), tent());
    }

    #[test]
    fn algebra() {
        let f = tent();
        let z = f.add(&f.scale(-1.0));
        assert!(z.is_zero());
        assert_eq!(z.norm_w11(), 0.0);
        assert_eq!(f.translate(2.0).eval(2.0), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseLinearFn::new(vec![0.0], vec![0.0]).is_err());
        assert!(PiecewiseLinearFn::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseLinearFn::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(PiecewiseLinearFn::new(vec![0.0, f64::NAN], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn simple_approx_cases() {
        let df = tent().derivative();
        assert_eq!(df.simple_approx(0.0), df);
        assert_eq!(df.simple_approx(0.0).breakpoints().len(), 3);

        let df = StepFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 1.0005]).unwrap();
        let v = df.simple_approx(0.01);
        assert_eq!(v.pieces(), 1);
        let err = df.l1_distance(&v);
        assert!(err <= 0.0005 + 1e-15, "err = {err}");
        assert!(err <= 0.01);
    }

    #[test]
    fn gap_conventions() {
        let df = tent().derivative();
        assert_eq!(df.gap_level(0), 0.0);
        assert_eq!(df.gap_level(1), 1.0);
        assert_eq!(df.gap_level(2), -1.0);
        assert_eq!(df.gap_level(3), 0.0);
        assert_eq!(df.gap(0), (f64::NEG_INFINITY, -1.0));
        assert_eq!(df.gap(3), (1.0, f64::INFINITY));
    }

    #[test]
    fn level_crossing_finds_exact_root() {
        let f = tent();
        assert_eq!(f.level_crossing(0.5, -1.0, 0.0), Some(-0.5));
        assert_eq!(f.level_crossing(0.25, 0.0, 1.0), Some(0.75));
        assert_eq!(f.level_crossing(2.0, -1.0, 1.0), None);
    }

    #[test]
    fn json_sources() {
        let s: FunctionSource = serde_json::from_str(r#"{"breakpoints":[-1,0,1],"values":[0,1,0]}"#).unwrap();
        assert_eq!(s.build().unwrap(), tent());
        let s: FunctionSource =
            serde_json::from_str(r#"{"type":"tent","params":{"half_width":2.0},"seed":0}"#).unwrap();
        assert_eq!(s.build().unwrap().support(), (-2.0, 2.0));
        let s: FunctionSource = serde_json::from_str(r#"{"type":"random_pl","seed":3}"#).unwrap();
        let a = s.build().unwrap();
        assert_eq!(a, s.build().unwrap());
        let s: FunctionSource = serde_json::from_str(r#"{"type":"sawtooth","params":{"teeth":3}}"#).unwrap();
        assert_eq!(s.build().unwrap().breakpoints().len(), 7);
        let s: FunctionSource = serde_json::from_str(r#"{"type":"steps"}"#).unwrap();
        assert!(s.build().unwrap().norm_w11() > 0.0);
    }

    fn arb_pl() -> impl Strategy<Value = PiecewiseLinearFn> {
        (2usize..10, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            PiecewiseLinearFn::random_pl(&mut rng, n, 3.0, 2.0, true).unwrap()
        })
    }

    proptest! {
        #[test]
        fn abs_never_increases_w11(f in arb_pl()) {
            let a = f.abs_part();
            prop_assert!(a.norm_w11() <= f.norm_w11() * (1.0 + 1e-12) + 1e-12);
            prop_assert!((a.norm_l1() - f.norm_l1()).abs() <= 1e-12 * (1.0 + f.norm_l1()));
            for x in a.breakpoints() {
                prop_assert!((a.eval(*x) - f.eval(*x).abs()).abs() <= 1e-12);
            }
        }

        #[test]
        fn eval_exact_at_breakpoints(f in arb_pl()) {
            for (b, v) in f.breakpoints().iter().zip(f.values()) {
                prop_assert_eq!(f.eval(*b), *v);
            }
        }

        #[test]
        fn algebra_is_pointwise_exact(f in arb_pl(), g in arb_pl(), lambda in -3.0f64..3.0, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = f.add(&g.scale(lambda));
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(-4.0..4.0);
                let expect = f.eval(x) + lambda * g.eval(x);
                prop_assert!((s.eval(x) - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
            }
        }

        #[test]
        fn simple_approx_within_eps(f in arb_pl(), eps in 0.0f64..2.0) {
            let df = f.derivative();
            let v = df.simple_approx(eps);
            prop_assert!(df.l1_distance(&v) <= eps + 1e-12);
            prop_assert!(v.pieces() <= df.pieces());
        }
    }
}
