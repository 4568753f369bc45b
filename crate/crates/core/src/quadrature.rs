//! One-dimensional quadrature: adaptive Simpson with Richardson correction and
//! fixed Gauss–Legendre rules.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the local error estimates.
    pub error: f64,
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
///
/// Fails with the achieved error when the recursion depth runs out before the
/// local estimates meet their share of `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Integral> {
    const MAX_DEPTH: u32 = 48;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut ok = true;
    let (value, error) = simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut ok);
    if ok {
        Ok(Integral { value, error })
    } else {
        Err(Error::Quadrature { achieved: error, requested: tol })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    ok: &mut bool,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let err = delta.abs() / 15.0;
    if err <= tol || depth == 0 || m <= a || m >= b {
        if err > tol {
            *ok = false;
        }
        return (left + right + delta / 15.0, err);
    }
    let (lv, le) = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok);
    let (rv, re) = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
    (lv + rv, le + re)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        let r = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((r.value - 4.0).abs() < 1e-12);
        let r = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-11);
        let r = adaptive_simpson(|x: f64| 1.0 / (1.0 + x * x), -10.0, 10.0, 1e-13).unwrap();
        assert!((r.value - 2.0 * 10f64.atan()).abs() < 1e-11);
    }

    #[test]
    fn gauss_legendre_exact_for_degree_2n_minus_1() {
        for n in 1..12 {
            let g = GaussLegendre::new(n);
            let deg = 2 * n - 1;
            let got = g.integrate(|x| x.powi(deg as i32) + x.powi(deg as i32 - 1), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0) + 1.0 / deg as f64;
            assert!((got - exact).abs() < 1e-13, "n={n}: {got} vs {exact}");
        }
        let w: f64 = GaussLegendre::new(8).weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }
}
