// Detachment set {u* > |u| + delta} of a sawtooth and its split by the
// breakpoints of a simple function.

use maxop::detachment::{decompose, detachment_set};
use maxop::verify::to_json;
use maxop::{maximal_profile, Grid, KernelSpec, PiecewiseLinearFn, Result};

pub fn run() -> Result<()> {
    let u = PiecewiseLinearFn::sawtooth(-2.0, 4, 1.0, 1.0, 0.2)?;
    let grid = Grid::symmetric(4.0, 401)?.with_points(u.breakpoints());
    let p = maximal_profile(&u, &KernelSpec::poisson(), &grid, 1e-7)?;
    let d = detachment_set(&p, &u, 10.0 * p.err)?;
    println!("{} components", d.len());
    for iv in d.iter() {
        println!("  ({:.4}, {:.4})", iv.lo, iv.hi);
    }
    let v = u.derivative();
    let dec = decompose(&d, &v);
    println!("{}", to_json(&dec)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
