// Each inequality check on a tent and an additive perturbation of it.

use maxop::verify::{
    check_domination, check_lemma6, check_prop5, check_subharmonicity, check_tail_bound, check_uniform_bound,
    check_variation_diminishing, pick_tail_radius, ContinuitySequence, PropertyReport, SequenceMode,
};
use maxop::{maximal_profile, Grid, KernelSpec, PiecewiseLinearFn, Result};

fn show(r: &PropertyReport) {
    println!("{:<16} {:<14} lhs {:>12.5e}  rhs {:>12.5e}  slack {:.1e}", r.name, format!("{:?}", r.verdict), r.lhs, r.rhs, r.slack);
}

pub fn run() -> Result<()> {
    let tol = 1e-7;
    let k = KernelSpec::poisson();
    let u = PiecewiseLinearFn::tent(0.0, 1.0, 1.0)?;
    let g = PiecewiseLinearFn::tent(0.4, 0.3, 0.5)?;
    let u_j = u.add(&g.scale(0.01));
    let grid = Grid::symmetric(4.0, 801)?.with_points(u.breakpoints()).with_points(g.breakpoints());
    let p = maximal_profile(&u, &k, &grid, tol)?;
    let pj = maximal_profile(&u_j, &k, &grid, tol)?;

    show(&check_domination(&p, &u, tol));
    show(&check_subharmonicity(&p, &u, 10.0 * p.err)?);
    show(&check_uniform_bound(&u, &u_j, &p, &pj)?);

    let r = pick_tail_radius(&u, None, &k, 0.1, tol)?;
    let tail_grid = Grid::graded(-1.0, 1.0, 0.01, 4.0 * r, 1.02, 0.05 * r)?.with_points(&[-r, r]);
    show(&check_tail_bound(&u, &maximal_profile(&u, &k, &tail_grid, tol)?, r)?);
    show(&check_variation_diminishing(&u, &maximal_profile(&u, &k, &tail_grid, tol)?));

    let v = u.derivative();
    let eps = v.l1_distance(&u_j.abs_part().derivative());
    show(&check_lemma6(&u, &u_j, &pj, &v, eps)?);

    let seq = ContinuitySequence::new(u.clone(), g, vec![1, 2, 4, 8, 16, 32, 64], SequenceMode::Additive)?;
    let ps = seq.members().iter().map(|m| maximal_profile(m, &k, &grid, tol)).collect::<Result<Vec<_>>>()?;
    show(&check_prop5(&u, &seq, &p, &ps, -4.0, 4.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
