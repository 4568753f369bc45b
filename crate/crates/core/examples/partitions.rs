// Extremal partition of u* on a sawtooth and its transfer to |u|: the
// variation differences over the moved points agree.

use maxop::variation::{extremal_partition, transfer_partition, var_over_partition, TransferOutcome};
use maxop::verify::check_transfer_identity;
use maxop::{maximal_profile, Grid, KernelSpec, PiecewiseLinearFn, Result};

pub fn run() -> Result<()> {
    let u = PiecewiseLinearFn::sawtooth(-2.0, 4, 1.0, 1.0, 0.3)?;
    let grid = Grid::symmetric(3.0, 601)?.with_points(u.breakpoints());
    let p = maximal_profile(&u, &KernelSpec::heat(), &grid, 1e-8)?;
    let pi = extremal_partition(&p.grid, &p.ustar, -2.0, 2.0, 1e-9)?;
    println!("extremal points of u*: {:?}", pi.points());
    let ustar = |x: f64| p.value_at(x).unwrap_or(f64::NAN);
    println!("Var(u*, P) = {:.9}", var_over_partition(ustar, &pi));
    match transfer_partition(&u, &p, &pi, (-2.0, 2.0))? {
        TransferOutcome::Transferred { points, lhs, rhs } => {
            println!("transferred: {:?}", points.points());
            println!("Var(|u|) side {lhs:.9}, Var(u*) side {rhs:.9}");
        }
        other => println!("{other:?}"),
    }
    let r = check_transfer_identity(&u, &p, &pi, (-2.0, 2.0))?;
    println!("{}: {:?} (residual {:.2e})", r.name, r.verdict, r.lhs);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
