//! The three admissible kernel families in dimension one.
//!
//! Every kernel is even, nonincreasing on `[0, inf)` and has unit mass. Besides
//! point values each kernel exposes the two antiderivatives the scale-space
//! evaluator needs: `cdf(z) = int_0^z phi` and `moment(z) = int_0^z s phi(s) ds`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, GaussLegendre};

/// Mass tolerance enforced at construction.
pub const MASS_TOL: f64 = 1e-10;

const HEAT_CUTOFF: f64 = 6.5;
const POWER_CORE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Poisson,
    Heat,
    #[serde(rename = "fracpoisson")]
    FractionalPoisson,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Poisson => "poisson",
            KernelFamily::Heat => "heat",
            KernelFamily::FractionalPoisson => "fracpoisson",
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(KernelFamily::Poisson),
            "heat" => Ok(KernelFamily::Heat),
            "fracpoisson" | "fractional" | "fractional_poisson" => Ok(KernelFamily::FractionalPoisson),
            other => Err(Error::InvalidKernel(format!("unknown kernel family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSpec {
    family: KernelFamily,
    alpha: Option<f64>,
    norm_const: f64,
    /// `int_R (1 + x^2)^{-beta} dx` for the fractional family, i.e. the
    /// complete beta value `B(1/2, beta - 1/2)`.
    #[serde(skip)]
    shape_mass: f64,
}

/// Builds a kernel and checks its mass by an independent quadrature.
pub fn make_kernel(family: KernelFamily, alpha: Option<f64>) -> Result<KernelSpec> {
    let spec = match family {
        KernelFamily::Poisson => {
            KernelSpec { family, alpha: None, norm_const: 1.0 / PI, shape_mass: PI }
        }
        KernelFamily::Heat => {
            let core = adaptive_simpson(|x| (-x * x).exp(), 0.0, HEAT_CUTOFF, 1e-14)?;
            let tail_bound = (-HEAT_CUTOFF * HEAT_CUTOFF).exp() / (2.0 * HEAT_CUTOFF);
            let err = 2.0 * (core.error + tail_bound);
            if err > MASS_TOL {
                return Err(Error::Quadrature { achieved: err, requested: MASS_TOL });
            }
            let mass = 2.0 * core.value;
            KernelSpec { family, alpha: None, norm_const: 1.0 / mass, shape_mass: mass }
        }
        KernelFamily::FractionalPoisson => {
            let alpha = alpha.ok_or_else(|| {
                Error::InvalidKernel("fractional Poisson kernel needs alpha".into())
            })?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidKernel(format!("alpha must lie in (0,1), got {alpha}")));
            }
            let c = normalize_fractional(alpha)?;
            KernelSpec { family, alpha: Some(alpha), norm_const: c, shape_mass: 1.0 / c }
        }
    };
    let mass = spec.mass_by_panels();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MassCheck { mass, tol: MASS_TOL });
    }
    Ok(spec)
}

/// `C_1^alpha = (int_R (1 + x^2)^{-(2 - alpha)/2} dx)^{-1}`.
///
/// The core `[-X, X]` is integrated by adaptive Simpson; the two tails are
/// summed from their convergent expansion in powers of `1/x^2`. `alpha = 0`
/// is accepted as the Poisson limit.
pub fn normalize_fractional(alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidKernel(format!("alpha must lie in [0,1), got {alpha}")));
    }
    let beta = 1.0 - 0.5 * alpha;
    let core = adaptive_simpson(|x| (-beta * (x * x).ln_1p()).exp(), 0.0, POWER_CORE, 1e-14)?;
    let (tail, tail_err) = power_tail(beta, POWER_CORE);
    let err = 2.0 * (core.error + tail_err);
    if err > MASS_TOL {
        return Err(Error::Quadrature { achieved: err, requested: MASS_TOL });
    }
    Ok(1.0 / (2.0 * (core.value + tail)))
}

/// Majorant `int_{|x|>X} (1+x^2)^{-(2-alpha)/2} dx <= 2 X^{alpha-1} / (1-alpha)`.
pub fn fractional_tail_majorant(alpha: f64, x: f64) -> f64 {
    2.0 * x.powf(alpha - 1.0) / (1.0 - alpha)
}

/// `int_x^inf (1 + s^2)^{-beta} ds` for `x >= 2` from the binomial expansion
/// of `(1 + s^{-2})^{-beta}`. Returns the sum and the first omitted term,
/// which bounds the truncation error (the series alternates with decreasing
/// terms).
pub fn power_tail(beta: f64, x: f64) -> (f64, f64) {
    debug_assert!(x >= 2.0);
    let inv2 = 1.0 / (x * x);
    let mut coeff = 1.0;
    let mut pow = x.powf(1.0 - 2.0 * beta);
    let mut sum = 0.0_f64;
    for k in 0..200 {
        let kf = k as f64;
        let term = coeff * pow / (2.0 * beta + 2.0 * kf - 1.0);
        if term.abs() <= 1e-18 * sum.abs() {
            return (sum, term.abs());
        }
        sum += term;
        coeff *= -(beta + kf) / (kf + 1.0);
        pow *= inv2;
    }
    (sum, f64::INFINITY)
}

impl KernelSpec {
    pub fn poisson() -> Self {
        make_kernel(KernelFamily::Poisson, None).expect("Poisson kernel is well formed")
    }

    pub fn heat() -> Self {
        make_kernel(KernelFamily::Heat, None).expect("heat kernel is well formed")
    }

    pub fn fractional(alpha: f64) -> Result<Self> {
        make_kernel(KernelFamily::FractionalPoisson, Some(alpha))
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Short identifier, e.g. `poisson` or `fracpoisson(0.5)`.
    pub fn label(&self) -> String {
        match self.alpha {
            Some(a) => format!("{}({a})", self.family.name()),
            None => self.family.name().to_string(),
        }
    }

    fn beta(&self) -> f64 {
        1.0 - 0.5 * self.alpha.unwrap_or(0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        let x2 = x * x;
        match self.family {
            KernelFamily::Poisson => self.norm_const / (1.0 + x2),
            KernelFamily::Heat => self.norm_const * (-x2).exp(),
            KernelFamily::FractionalPoisson => self.norm_const * (-self.beta() * x2.ln_1p()).exp(),
        }
    }

    /// `phi(0)`, also `||phi||_inf`.
    pub fn peak(&self) -> f64 {
        self.norm_const
    }

    /// Dilation `phi_t(x) = phi(x / t) / t`.
    pub fn scaled_value(&self, t: f64, x: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveScale(t));
        }
        Ok(self.value(x / t) / t)
    }

    /// `phi(0) * l1 / t`, a bound on `(|u| * phi_t)(x)` uniform in `x` when
    /// `||u||_1 = l1`.
    pub fn sup_decay_bound(&self, t: f64, l1: f64) -> f64 {
        self.peak() * l1 / t
    }

    /// `int_0^z phi` (odd in `z`).
    pub fn cdf(&self, z: f64) -> f64 {
        match self.family {
            KernelFamily::Poisson => self.norm_const * z.atan(),
            KernelFamily::Heat => {
                self.norm_const * 0.5 * PI.sqrt() * libm::erf(z)
            }
            KernelFamily::FractionalPoisson => {
                z.signum() * self.norm_const * power_cdf(self.beta(), self.shape_mass, z.abs())
            }
        }
    }

    /// `int_0^z s phi(s) ds` (even in `z`).
    pub fn moment(&self, z: f64) -> f64 {
        let z2 = z * z;
        match self.family {
            KernelFamily::Poisson => 0.5 * self.norm_const * z2.ln_1p(),
            KernelFamily::Heat => -0.5 * self.norm_const * (-z2).exp_m1(),
            KernelFamily::FractionalPoisson => {
                let p = 1.0 - self.beta();
                self.norm_const * (p * z2.ln_1p()).exp_m1() / (2.0 * p)
            }
        }
    }

    /// Total mass by composite Gauss–Legendre on a geometric panel ladder,
    /// plus the analytic tail beyond the last panel.
    pub fn mass_by_panels(&self) -> f64 {
        let rule = GaussLegendre::new(16);
        let mut edges = vec![0.0, 0.5];
        let far = match self.family {
            KernelFamily::Heat => 8.0,
            _ => 1024.0,
        };
        while *edges.last().unwrap() < far {
            let next = edges.last().unwrap() * 2.0;
            edges.push(next);
        }
        let core: f64 = edges
            .windows(2)
            .map(|w| rule.integrate(|x| self.value(x), w[0], w[1]))
            .sum();
        let tail = match self.family {
            KernelFamily::Poisson => self.norm_const * (1.0 / far).atan(),
            KernelFamily::Heat => 0.0,
            KernelFamily::FractionalPoisson => self.norm_const * power_tail(self.beta(), far).0,
        };
        2.0 * (core + tail)
    }
}

/// `int_0^z (1 + s^2)^{-beta} ds` for `z >= 0`, through the incomplete beta
/// function `B(w; 1/2, beta - 1/2) / 2` with `w = z^2 / (1 + z^2)`.
/// `full` is `int_R (1 + s^2)^{-beta} ds = B(1/2, beta - 1/2)`.
fn power_cdf(beta: f64, full: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z.is_infinite() {
        return 0.5 * full;
    }
    let z2 = z * z;
    if z <= 1.0 {
        // z (1+z^2)^{-beta} * sum_n (beta)_n / (3/2)_n w^n
        let w = z2 / (1.0 + z2);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..200 {
            let nf = n as f64;
            term *= (beta + nf - 1.0) / (0.5 + nf) * w;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        z * (-beta * z2.ln_1p()).exp() * sum
    } else {
        // complement: B(x; b, 1/2) with x = 1 / (1 + z^2), b = beta - 1/2
        let b = beta - 0.5;
        let x = 1.0 / (1.0 + z2);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..200 {
            let nf = n as f64;
            term *= (beta + nf - 1.0) / (b + nf) * x;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        let lower = x.powf(b) * (z / (1.0 + z2).sqrt()) / b * sum;
        0.5 * (full - lower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernels() -> Vec<KernelSpec> {
        vec![
            KernelSpec::poisson(),
            KernelSpec::heat(),
            KernelSpec::fractional(0.5).unwrap(),
            KernelSpec::fractional(0.1).unwrap(),
            KernelSpec::fractional(0.9).unwrap(),
        ]
    }

    #[test]
    fn peak_values() {
        assert!((KernelSpec::poisson().value(0.0) - 1.0 / PI).abs() < 1e-16);
        assert!((KernelSpec::heat().value(0.0) - 0.5641895835477563).abs() < 1e-12);
    }

    #[test]
    fn alpha_validation() {
        assert!(KernelSpec::fractional(0.0).is_err());
        assert!(KernelSpec::fractional(1.0).is_err());
        assert!(KernelSpec::fractional(-0.2).is_err());
        assert!(make_kernel(KernelFamily::FractionalPoisson, None).is_err());
        assert!(normalize_fractional(1.0).is_err());
    }

    #[test]
    fn fractional_limit_is_poisson_constant() {
        let c0 = normalize_fractional(0.0).unwrap();
        assert!((c0 - 1.0 / PI).abs() < 1e-12, "{c0}");
    }

    #[test]
    fn fractional_constant_matches_gamma_closed_form() {
        use statrs::function::gamma::ln_gamma;
        for &alpha in &[0.01, 0.25, 0.5, 0.75, 0.9, 0.99] {
            let beta: f64 = 1.0 - 0.5 * alpha;
            let beta_fn = (ln_gamma(0.5) + ln_gamma(beta - 0.5) - ln_gamma(beta)).exp();
            let c = normalize_fractional(alpha).unwrap();
            assert!((c - 1.0 / beta_fn).abs() < 1e-10, "alpha={alpha}: {c} vs {}", 1.0 / beta_fn);
        }
    }

    #[test]
    fn tail_series_below_majorant() {
        for &alpha in &[0.1, 0.5, 0.9] {
            let beta = 1.0 - 0.5 * alpha;
            for &x in &[2.0, 4.0, 50.0] {
                let (tail, err) = power_tail(beta, x);
                assert!(err < 1e-15 * tail.max(1e-300) + 1e-300 || err < 1e-16);
                assert!(2.0 * tail <= fractional_tail_majorant(alpha, x));
                let q = adaptive_simpson(|s| (-beta * (s * s).ln_1p()).exp(), x, 1e3 * x, 1e-12).unwrap();
                // remaining piece beyond 1e3 x is below the majorant there
                assert!(tail >= q.value && tail - q.value <= 0.5 * fractional_tail_majorant(alpha, 1e3 * x));
            }
        }
    }

    fn pieces(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let n = ((hi - lo).ceil() as usize).max(1);
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|i| adaptive_simpson(&f, lo + i as f64 * h, lo + (i + 1) as f64 * h, 1e-15).unwrap().value)
            .sum()
    }

    #[test]
    fn cdf_and_moment_match_quadrature() {
        for k in kernels() {
            for &z in &[0.0, 0.3, 1.0, 1.5, 2.5, 7.0, 40.0, -0.7, -3.0] {
                let (lo, hi) = if z >= 0.0 { (0.0, z) } else { (z, 0.0) };
                let sign = if z >= 0.0 { 1.0 } else { -1.0 };
                let q = pieces(|s| k.value(s), lo, hi) * sign;
                assert!((k.cdf(z) - q).abs() < 1e-11, "{} cdf({z}) {} vs {q}", k.label(), k.cdf(z));
                let m = pieces(|s| s * k.value(s), lo, hi) * sign;
                assert!((k.moment(z) - m).abs() < 1e-11, "{} moment({z})", k.label());
            }
            assert!((k.cdf(f64::INFINITY) - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_mass_symmetry_monotonicity() {
        for k in kernels() {
            assert!((k.mass_by_panels() - 1.0).abs() < MASS_TOL);
            let mut prev = f64::INFINITY;
            for i in 0..1000 {
                let x = i as f64 * 0.01;
                let v = k.value(x);
                assert_eq!(v, k.value(-x));
                assert!(v >= 0.0 && v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn dilation() {
        let p = KernelSpec::poisson();
        assert!((p.scaled_value(2.0, 0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!(p.scaled_value(0.0, 1.0).is_err());
        assert!(p.scaled_value(-1.0, 1.0).is_err());
        for k in kernels() {
            for &x in &[0.0, 0.5, -3.0] {
                assert_eq!(k.scaled_value(1.0, x).unwrap(), k.value(x));
            }
            for &t in &[0.1, 1.0, 10.0] {
                // mass of phi_t: int phi(x/t)/t dx over R through the cdf at +/- inf
                let m = adaptive_simpson(|x| k.scaled_value(t, x).unwrap(), -50.0 * t, 50.0 * t, 1e-13)
                    .unwrap()
                    .value
                    + 2.0 * (0.5 - k.cdf(50.0));
                assert!((m - 1.0).abs() < 1e-9, "{} t={t}: {m}", k.label());
            }
        }
    }

    #[test]
    fn decay_bound_values() {
        let p = KernelSpec::poisson();
        assert!((p.sup_decay_bound(10.0, 1.0) - 1.0 / (10.0 * PI)).abs() < 1e-17);
        assert_eq!(p.sup_decay_bound(3.0, 0.0), 0.0);
    }

    #[test]
    fn fractional_converges_to_poisson() {
        let p = KernelSpec::poisson();
        let mut prev = f64::INFINITY;
        for &alpha in &[0.1, 0.01, 0.001] {
            let k = KernelSpec::fractional(alpha).unwrap();
            let sup = (0..=1000)
                .map(|i| -5.0 + 0.01 * i as f64)
                .map(|x| (k.value(x) - p.value(x)).abs())
                .fold(0.0, f64::max);
            assert!(sup < prev, "alpha={alpha}: {sup} not below {prev}");
            prev = sup;
        }
        assert!(prev < 1e-3);
    }
}
