// Unit-mass kernels, their closed-form cdf and first moment, and dilations.

use maxop::{KernelFamily, KernelSpec, Result};

pub fn run() -> Result<()> {
    let kernels = [KernelSpec::poisson(), KernelSpec::heat(), KernelSpec::fractional(0.5)?, KernelSpec::fractional(0.9)?];
    println!("{:<18} {:>12} {:>12} {:>12} {:>12}", "kernel", "C", "mass", "cdf(1)", "phi_2(1)");
    for k in &kernels {
        let mass = k.mass_by_panels();
        assert!((mass - 1.0).abs() < 1e-9);
        println!(
            "{:<18} {:>12.6e} {:>12.9} {:>12.9} {:>12.6e}",
            k.label(),
            k.norm_const(),
            mass,
            k.cdf(1.0),
            k.scaled_value(2.0, 1.0)?
        );
    }
    // the decay bound caps (|u| * phi_t)(x) by phi(0) ||u||_1 / t
    let k = KernelSpec::poisson();
    for t in [1.0, 10.0, 100.0] {
        println!("t = {t:>5}: sup bound for ||u||_1 = 1 is {:.4e}", k.sup_decay_bound(t, 1.0));
    }
    assert_eq!(k.family(), KernelFamily::Poisson);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
