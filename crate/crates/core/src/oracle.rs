//! Brute-force reference for the maximal function: Gauss–Legendre quadrature of
//! the convolution in the rescaled variable `z = (x - y) / t`, maximized over a
//! dense logarithmic scale ladder. Shares nothing with the closed-form path
//! except the kernel density itself.

use crate::funcmodel::PiecewiseLinearFn;
use crate::kernels::{KernelFamily, KernelSpec};
use crate::quadrature::GaussLegendre;
use crate::scalespace::Maximum;

/// Default number of ladder scales.
pub const DENSE_SCALES: usize = 10_000;

#[derive(Debug, Clone)]
pub struct BruteForce {
    abs: PiecewiseLinearFn,
    kernel: KernelSpec,
    rule: GaussLegendre,
    l1: f64,
    scales: usize,
}

impl BruteForce {
    pub fn new(u: &PiecewiseLinearFn, kernel: &KernelSpec) -> Self {
        let abs = u.abs_part();
        let l1 = abs.norm_l1();
        Self { abs, kernel: kernel.clone(), rule: GaussLegendre::new(8), l1, scales: DENSE_SCALES }
    }

    pub fn with_scales(mut self, scales: usize) -> Self {
        self.scales = scales.max(2);
        self
    }

    /// `(|u| * phi_t)(x)` by panel quadrature in `z`.
    pub fn extension(&self, x: f64, t: f64) -> f64 {
        let b = self.abs.breakpoints();
        let (y_lo, y_hi) = (b[0], b[b.len() - 1]);
        let mut z_lo = (x - y_hi) / t;
        let mut z_hi = (x - y_lo) / t;
        if self.kernel.family() == KernelFamily::Heat {
            z_lo = z_lo.max(-7.0);
            z_hi = z_hi.min(7.0);
        }
        if z_lo >= z_hi {
            return 0.0;
        }
        let mut cuts: Vec<f64> = b.iter().map(|&y| (x - y) / t).filter(|z| *z > z_lo && *z < z_hi).collect();
        cuts.push(z_lo);
        cuts.push(z_hi);
        if z_lo < 0.0 && z_hi > 0.0 {
            cuts.push(0.0);
        }
        // panels growing geometrically away from the kernel peak
        let mut s = 0.125;
        while s < z_hi.max(-z_lo) {
            for c in [s, -s] {
                if c > z_lo && c < z_hi {
                    cuts.push(c);
                }
            }
            s *= 2.0;
        }
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (za, zb) = (w[0], w[1]);
            let ga = self.abs.eval(x - t * za);
            let gb = self.abs.eval(x - t * zb);
            if ga == 0.0 && gb == 0.0 {
                continue;
            }
            let slope = (gb - ga) / (zb - za);
            total += self.rule.integrate(|z| (ga + slope * (z - za)) * self.kernel.value(z), za, zb);
        }
        total
    }

    /// Largest of `|u|(x)` and the extension over the dense ladder.
    pub fn maximal_at(&self, x: f64) -> Maximum {
        let endpoint = self.abs.eval(x);
        if self.l1 == 0.0 {
            return Maximum { value: 0.0, t: 0.0 };
        }
        let (lo, hi) = self.abs.support();
        let width = hi - lo;
        let t_lo = 1e-5 * width;
        let reach = (x - lo).abs().max((x - hi).abs()) + width;
        let coarse = log_ladder(t_lo, 1e3 * reach, 64);
        let floor = coarse.iter().map(|&t| self.extension(x, t)).fold(endpoint, f64::max);
        let mut best = Maximum { value: endpoint, t: 0.0 };
        if floor <= 0.0 {
            return best;
        }
        // beyond t_hi the decay bound is below a value already attained
        let t_hi = self.kernel.peak() * self.l1 / floor;
        if t_hi <= t_lo {
            return best;
        }
        for t in log_ladder(t_lo, t_hi, self.scales) {
            let v = self.extension(x, t);
            if v > best.value {
                best = Maximum { value: v, t };
            }
        }
        best
    }
}

fn log_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalespace::{ScaleSpace, SearchOptions};

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let u = PiecewiseLinearFn::new(vec![-2.0, -0.5, 0.0, 1.0, 3.0], vec![0.0, 2.0, -1.0, 0.5, 0.0]).unwrap();
        for k in [KernelSpec::poisson(), KernelSpec::heat(), KernelSpec::fractional(0.3).unwrap()] {
            let bf = BruteForce::new(&u, &k);
            let ss = ScaleSpace::new(&u, &k);
            for &x in &[-1.0, 0.0, 0.2, 5.0, -50.0] {
                for &t in &[1e-4, 0.01, 0.3, 1.0, 10.0, 1e3] {
                    let a = bf.extension(x, t);
                    let b = ss.extension(x, t).unwrap();
                    assert!((a - b).abs() < 1e-9, "{} x={x} t={t}: {a} vs {b}", k.label());
                }
            }
        }
    }

    #[test]
    fn dense_ladder_never_beats_certified_search() {
        let u = PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap();
        let k = KernelSpec::poisson();
        let bf = BruteForce::new(&u, &k).with_scales(2000);
        let ss = ScaleSpace::new(&u, &k);
        for &x in &[0.0, 0.9, 1.5, 4.0] {
            let a = bf.maximal_at(x);
            let b = ss.maximal_at(x, &SearchOptions::default()).unwrap();
            assert!(a.value <= b.value + 1e-9);
            assert!(b.value - a.value < 1e-5, "x={x}: {} vs {}", a.value, b.value);
        }
    }
}
