// Certified search against the dense scale-ladder oracle on corpus functions.

use maxop::corpus::generate_corpus;
use maxop::oracle::BruteForce;
use maxop::{KernelSpec, Result, ScaleSpace, SearchOptions};

pub fn run() -> Result<()> {
    let corpus = generate_corpus(7, 4)?;
    let opts = SearchOptions::with_tol(1e-7);
    for k in [KernelSpec::poisson(), KernelSpec::heat(), KernelSpec::fractional(0.5)?] {
        let mut worst = 0.0_f64;
        for u in &corpus {
            let fast = ScaleSpace::new(u, &k);
            let slow = BruteForce::new(u, &k).with_scales(2000);
            for i in 0..5 {
                let x = -4.0 + 2.0 * i as f64;
                let a = fast.maximal_at(x, &opts)?;
                let b = slow.maximal_at(x);
                assert!(b.value <= a.value + 1e-7);
                worst = worst.max(a.value - b.value);
            }
        }
        println!("{:<18} max(certified - dense) = {worst:.3e}", k.label());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
