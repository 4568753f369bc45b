// E_j = int |(u_j*)' - (u*)'| for a tent under three kinds of convergence.

use maxop::suite::continuity_grid;
use maxop::verify::{continuity_experiment, ContinuitySequence, SequenceMode};
use maxop::{KernelSpec, PiecewiseLinearFn, Result};

pub fn run() -> Result<()> {
    let tol = 1e-7;
    let u = PiecewiseLinearFn::tent(0.0, 1.0, 1.0)?;
    let g = PiecewiseLinearFn::tent(0.5, 0.5, 1.0)?;
    let k = KernelSpec::heat();
    for mode in [SequenceMode::Additive, SequenceMode::Translate, SequenceMode::Jitter { seed: 11 }] {
        let seq = ContinuitySequence::new(u.clone(), g.clone(), vec![1, 2, 4, 8, 16, 32, 64], mode)?;
        let grid = continuity_grid(&seq, &k, 0.01, tol)?.with_points(&seq.all_breakpoints());
        let rep = continuity_experiment(&seq, &k, &grid, tol)?;
        println!("{mode:?}: {} grid points, tail radius {:?}", rep.grid_points, rep.tail_radius);
        for row in &rep.rows {
            println!(
                "  j = {:>2}  ||u_j - u||_11 = {:.3e}  E = {:.4e}  (contact {:.3e}, detached {:.3e})",
                row.j, row.w11_distance, row.e_total, row.e_contact, row.e_detached
            );
        }
        println!("  {:?}", rep.summary.verdict);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
