// Certified maximal function of a tent and of a signed function on a grid.

use maxop::{maximal_at, maximal_profile, Grid, KernelSpec, PiecewiseLinearFn, Result};

pub fn run() -> Result<()> {
    let tent = PiecewiseLinearFn::tent(0.0, 1.0, 1.0)?;
    let k = KernelSpec::poisson();
    let grid = Grid::symmetric(3.0, 13)?;
    let p = maximal_profile(&tent, &k, &grid, 1e-7)?;
    println!("{:>7} {:>10} {:>12} {:>12}", "x", "|u|", "u*", "t*");
    for i in 0..p.len() {
        let x = p.grid[i];
        println!("{x:>7.3} {:>10.6} {:>12.9} {:>12.5e}", tent.eval(x).abs(), p.ustar[i], p.tstar[i]);
    }
    println!("certified error bound {:.2e}", p.err);

    // far away the supremum is attained at t = |x|: u*(x) ~ 1 / (2 pi |x|)
    let far = maximal_at(&tent, &k, 100.0, 1e-9)?;
    println!("u*(100) = {:.9e}, t* = {:.3}", far.value, far.t);

    let signed = PiecewiseLinearFn::new(vec![-2.0, -1.0, 0.0, 1.0, 2.0], vec![0.0, 1.0, -0.5, 0.8, 0.0])?;
    let q = maximal_profile(&signed, &KernelSpec::heat(), &Grid::symmetric(2.5, 11)?, 1e-7)?;
    let gaps = q.gap(&signed);
    assert!(gaps.iter().all(|&g| g >= -1e-7));
    println!("heat, signed input: min(u* - |u|) = {:.3e}", gaps.iter().copied().fold(f64::INFINITY, f64::min));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
