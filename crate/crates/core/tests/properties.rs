use maxop::{extension, maximal_at, KernelSpec, PiecewiseLinearFn};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;

fn kernel(i: usize) -> KernelSpec {
    match i {
        0 => KernelSpec::poisson(),
        1 => KernelSpec::heat(),
        _ => KernelSpec::fractional(0.5).unwrap(),
    }
}

fn random_fn(seed: u64, signed: bool) -> PiecewiseLinearFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PiecewiseLinearFn::random_pl(&mut rng, 5, 2.0, 1.0, signed).unwrap()
}

/// Composite Simpson on a fine uniform mesh of the support, refined at the
/// breakpoints; written independently of the crate's quadrature.
fn simpson_extension(u: &PiecewiseLinearFn, k: &KernelSpec, x: f64, t: f64) -> f64 {
    let b = u.abs_part();
    let pts = b.breakpoints();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let n = 2000;
        let h = (w[1] - w[0]) / n as f64;
        let f = |y: f64| b.eval(y) * k.value((x - y) / t) / t;
        let mut s = f(w[0]) + f(w[1]);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(w[0] + i as f64 * h);
        }
        total += s * h / 3.0;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_matches_independent_quadrature(seed in 0u64..1000, ki in 0usize..3, x in -4.0f64..4.0, lt in -1.0f64..1.5) {
        let u = random_fn(seed, true);
        let k = kernel(ki);
        let t = 10f64.powf(lt);
        let closed = extension(&u, &k, x, t, TOL).unwrap();
        let simpson = simpson_extension(&u, &k, x, t);
        prop_assert!((closed - simpson).abs() < 1e-8, "{closed} vs {simpson}");
    }

    #[test]
    fn maximal_dominates_every_scale_and_is_bounded(seed in 0u64..1000, ki in 0usize..3, x in -4.0f64..4.0, lt in -2.0f64..2.0) {
        let u = random_fn(seed, true);
        let k = kernel(ki);
        let m = maximal_at(&u, &k, x, TOL).unwrap();
        prop_assert!(m.value >= u.eval(x).abs() - 1e-15);
        prop_assert!(m.value >= extension(&u, &k, x, 10f64.powf(lt), TOL).unwrap() - TOL);
        prop_assert!(m.value <= u.norm_sup() + TOL);
    }

    #[test]
    fn translation_and_scaling(seed in 0u64..1000, ki in 0usize..3, x in -3.0f64..3.0, a in -2.0f64..2.0, lambda in -3.0f64..3.0) {
        let u = random_fn(seed, true);
        let k = kernel(ki);
        let base = maximal_at(&u, &k, x, TOL).unwrap().value;
        let shifted = maximal_at(&u.translate(a), &k, x + a, TOL).unwrap().value;
        prop_assert!((base - shifted).abs() < 3.0 * TOL);
        let scaled = maximal_at(&u.scale(lambda), &k, x, TOL).unwrap().value;
        prop_assert!((scaled - lambda.abs() * base).abs() < 3.0 * TOL * (1.0 + lambda.abs()));
    }

    #[test]
    fn sublinear(s1 in 0u64..1000, s2 in 0u64..1000, ki in 0usize..3, x in -3.0f64..3.0) {
        let (u, v) = (random_fn(s1, true), random_fn(s2, false));
        let k = kernel(ki);
        let sum = maximal_at(&u.add(&v), &k, x, TOL).unwrap().value;
        let parts = maximal_at(&u, &k, x, TOL).unwrap().value + maximal_at(&v, &k, x, TOL).unwrap().value;
        prop_assert!(sum <= parts + 3.0 * TOL);
    }
}

#[test]
fn far_field_of_poisson_tent() {
    // for |x| >> 1 the Poisson extension of a unit-mass bump is close to
    // t / (pi (t^2 + x^2)), maximized at t = |x| with value 1 / (2 pi |x|)
    let tent = PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap();
    for x in [50.0, 200.0, 1000.0] {
        let m = maximal_at(&tent, &KernelSpec::poisson(), x, 1e-12).unwrap();
        let far = 1.0 / (2.0 * std::f64::consts::PI * x);
        assert!((m.value - far).abs() < far * 1.0 / (x * x), "x = {x}: {} vs {far}", m.value);
        assert!((m.t / x - 1.0).abs() < 1e-3);
    }
}
