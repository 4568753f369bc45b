//! Injected-violation inputs, one per checker. Each returns the report the
//! checker produces on a deliberately corrupted profile or sequence; every
//! one of them is expected to fail.

use super::checks::{
    check_convex_limit, check_domination, check_finite_intervals, check_lemma6, check_prop5, check_subharmonicity, check_tail_bound,
    check_transfer_identity, check_uniform_bound, check_variation_diminishing, ConvexSample,
};
use super::continuity::continuity_from_profiles;
use super::report::PropertyReport;
use super::sequence::ContinuitySequence;
use crate::detachment::detachment_set;
use crate::error::Result;
use crate::funcmodel::PiecewiseLinearFn;
use crate::kernels::KernelSpec;
use crate::scalespace::{maximal_profile, Grid, MaximalProfile};
use crate::variation::extremal_partition;

const TOL: f64 = 1e-7;

fn tent() -> PiecewiseLinearFn {
    PiecewiseLinearFn::tent(0.0, 1.0, 1.0).expect("valid tent")
}

fn tent_profile(kernel: &KernelSpec, span: f64, n: usize) -> Result<MaximalProfile> {
    let grid = Grid::symmetric(span, n)?.with_points(tent().breakpoints());
    maximal_profile(&tent(), kernel, &grid, TOL)
}

/// Adds `height * (1 - |x - c| / w)_+` to the samples.
fn bump(p: &MaximalProfile, c: f64, w: f64, height: f64) -> MaximalProfile {
    let mut q = p.clone();
    for (x, v) in q.grid.iter().zip(q.ustar.iter_mut()) {
        *v += height * (1.0 - (x - c).abs() / w).max(0.0);
    }
    q
}

/// Adds an alternating `+-amp` pattern to samples with `lo < x < hi`.
fn zigzag(p: &MaximalProfile, lo: f64, hi: f64, amp: f64) -> MaximalProfile {
    let mut q = p.clone();
    let mut sign = 1.0;
    for (x, v) in q.grid.iter().zip(q.ustar.iter_mut()) {
        if *x > lo && *x < hi {
            *v += amp * (1.0 + sign);
            sign = -sign;
        }
    }
    q
}

pub fn dipped_below_function(kernel: &KernelSpec) -> Result<PropertyReport> {
    let p = tent_profile(kernel, 3.0, 61)?;
    Ok(check_domination(&bump(&p, 0.0, 0.2, -1e-3), &tent(), TOL))
}

pub fn concave_bump_in_detachment(kernel: &KernelSpec) -> Result<PropertyReport> {
    let p = tent_profile(kernel, 4.0, 161)?;
    check_subharmonicity(&bump(&p, 2.5, 0.2, 1e-3), &tent(), 10.0 * TOL)
}

pub fn uniform_spike(kernel: &KernelSpec) -> Result<PropertyReport> {
    let p = tent_profile(kernel, 3.0, 61)?;
    check_uniform_bound(&tent(), &tent(), &p, &bump(&p, 0.5, 0.1, 0.5))
}

pub fn oscillating_tail(kernel: &KernelSpec) -> Result<PropertyReport> {
    let p = tent_profile(kernel, 8.0, 321)?;
    check_tail_bound(&tent(), &zigzag(&p, 4.0, 8.0, 1e-3), 4.0)
}

/// A narrow bump where the tent is in contact, inside the gap `(0, 1)` of
/// `u'`: the shifted profile has an interior maximum there.
pub fn lemma6_interior_maximum(kernel: &KernelSpec) -> Result<PropertyReport> {
    let p = tent_profile(kernel, 4.0, 801)?;
    let d = detachment_set(&p, &tent(), 10.0 * TOL)?;
    let right = d.iter().filter(|iv| iv.hi > 0.0).map(|iv| iv.lo).fold(1.0, f64::min).max(0.1);
    let fake = bump(&p, 0.5 * right, 0.2 * right, 0.05);
    check_lemma6(&tent(), &tent(), &fake, &tent().derivative(), 1e-6)
}

fn stuck_sequence(kernel: &KernelSpec) -> Result<(ContinuitySequence, MaximalProfile, Vec<MaximalProfile>)> {
    let seq = ContinuitySequence::constant(tent(), vec![1, 2, 4, 8])?;
    let p = tent_profile(kernel, 4.0, 401)?;
    let d = detachment_set(&p, &tent(), 10.0 * TOL)?;
    let right = d.intervals().last().map(|iv| iv.lo).unwrap_or(1.0);
    let fake = zigzag(&p, right + 0.2, right + 1.2, 2e-3);
    Ok((seq, p, vec![fake; 4]))
}

pub fn finite_intervals_not_vanishing(kernel: &KernelSpec) -> Result<PropertyReport> {
    let (seq, p, fakes) = stuck_sequence(kernel)?;
    check_finite_intervals(&tent(), &seq, &p, &fakes, &tent().derivative(), 10.0 * TOL)
}

/// Every member carries the same smooth bump in the right tail, so the
/// variation gap stays put and is resolved at both sample spacings.
pub fn prop5_not_converging(kernel: &KernelSpec) -> Result<PropertyReport> {
    let seq = ContinuitySequence::constant(tent(), vec![1, 2, 4, 8])?;
    let p = tent_profile(kernel, 4.0, 401)?;
    let fakes = vec![bump(&p, 2.5, 0.5, 0.02); 4];
    check_prop5(&tent(), &seq, &p, &fakes, -4.0, 4.0)
}

pub fn continuity_not_vanishing(kernel: &KernelSpec) -> Result<PropertyReport> {
    let (seq, p, fakes) = stuck_sequence(kernel)?;
    Ok(continuity_from_profiles(&seq, &p, &fakes)?.summary)
}

pub fn nonconvex_member() -> Result<PropertyReport> {
    let members = [1.0, 2.0, 4.0]
        .iter()
        .map(|j| ConvexSample::from_fn(-1.0, 1.0, 101, |x| x * x + 1.0 / j - if *j == 2.0 { 0.5 * (-50.0 * x * x).exp() } else { 0.0 }))
        .collect::<Result<Vec<_>>>()?;
    let limit = ConvexSample::from_fn(-1.0, 1.0, 101, |x| x * x)?;
    Ok(check_convex_limit(&members, &limit, 1e-9))
}

pub fn inflated_variation() -> Result<PropertyReport> {
    let p = tent_profile(&KernelSpec::poisson(), 4.0, 161)?;
    Ok(check_variation_diminishing(&tent(), &zigzag(&p, -3.0, 3.0, 1e-2)))
}

/// The level of one local maximum raised above every value of `|u|` nearby.
pub fn transfer_without_crossing(kernel: &KernelSpec) -> Result<PropertyReport> {
    let u = PiecewiseLinearFn::sawtooth(-2.0, 4, 1.0, 1.0, 0.0)?;
    let grid = Grid::symmetric(3.0, 601)?.with_points(u.breakpoints());
    let p = maximal_profile(&u, kernel, &grid, TOL)?;
    let pi = extremal_partition(&p.grid, &p.ustar, -2.0, 2.0, 1e-9)?;
    let peak = pi.points()[1..pi.len() - 1]
        .iter()
        .copied()
        .find(|&x| p.value_at(x).map(|v| v > 0.5).unwrap_or(false))
        .unwrap_or(pi.points()[1]);
    let mut fake = p.clone();
    let i = fake.index_of(peak).expect("partition points are grid points");
    fake.ustar[i] += 1.0;
    check_transfer_identity(&u, &fake, &pi, (pi.first(), pi.last()))
}

/// Every negative control, in a fixed order.
pub fn negative_controls(kernel: &KernelSpec) -> Result<Vec<PropertyReport>> {
    Ok(vec![
        dipped_below_function(kernel)?,
        concave_bump_in_detachment(kernel)?,
        uniform_spike(kernel)?,
        oscillating_tail(kernel)?,
        lemma6_interior_maximum(kernel)?,
        finite_intervals_not_vanishing(kernel)?,
        prop5_not_converging(kernel)?,
        continuity_not_vanishing(kernel)?,
        nonconvex_member()?,
        inflated_variation()?,
        transfer_without_crossing(kernel)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_control_fails() {
        for k in [KernelSpec::poisson(), KernelSpec::heat(), KernelSpec::fractional(0.5).unwrap()] {
            let reports = negative_controls(&k).unwrap();
            assert_eq!(reports.len(), 11);
            for r in reports {
                assert!(r.is_failure(), "{} did not fail for {}: {r:?}", r.name, k.label());
            }
        }
    }
}
