use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcmodel::PiecewiseLinearFn;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SequenceMode {
    /// `u + g / j`.
    Additive,
    /// `u(. - 1/j)`.
    Translate,
    /// Breakpoint `b_i` moved to `b_i + theta_i / j` with seeded
    /// `|theta_i| < 0.4 * (smallest gap)`.
    Jitter { seed: u64 },
}

/// A sequence `u_j -> u` in `W^{1,1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuitySequence {
    pub base: PiecewiseLinearFn,
    pub perturbation: PiecewiseLinearFn,
    pub indices: Vec<u32>,
    pub mode: SequenceMode,
    #[serde(skip)]
    members: Vec<PiecewiseLinearFn>,
}

impl ContinuitySequence {
    /// Builds every member and checks that `||u_j - u||_{1,1}` is
    /// nonincreasing along `indices` and strictly smaller at the end than at
    /// the start (unless it vanishes throughout).
    pub fn new(base: PiecewiseLinearFn, perturbation: PiecewiseLinearFn, indices: Vec<u32>, mode: SequenceMode) -> Result<Self> {
        if indices.is_empty() || indices.contains(&0) {
            return Err(Error::InvalidSequence("indices must be nonempty and positive".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSequence("indices must increase".into()));
        }
        let thetas = match mode {
            SequenceMode::Jitter { seed } => {
                let gap = base.breakpoints().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..base.breakpoints().len()).map(|_| rng.gen_range(-0.4..0.4) * gap).collect()
            }
            _ => Vec::new(),
        };
        let members = indices
            .iter()
            .map(|&j| {
                let jf = j as f64;
                match mode {
                    SequenceMode::Additive => Ok(base.add(&perturbation.scale(1.0 / jf))),
                    SequenceMode::Translate => Ok(base.translate(1.0 / jf)),
                    SequenceMode::Jitter { .. } => {
                        base.jitter(&thetas.iter().map(|t| t / jf).collect::<Vec<_>>())
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let seq = Self { base, perturbation, indices, mode, members };
        let d = seq.distances();
        if d.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            return Err(Error::InvalidSequence(format!("distances to the base do not decrease: {d:?}")));
        }
        if d.len() > 1 && d[0] > 0.0 && !(d[d.len() - 1] < d[0]) {
            return Err(Error::InvalidSequence("sequence does not approach its base".into()));
        }
        Ok(seq)
    }

    /// `u_j = u` for every `j`.
    pub fn constant(base: PiecewiseLinearFn, indices: Vec<u32>) -> Result<Self> {
        Self::new(base, PiecewiseLinearFn::zero(), indices, SequenceMode::Additive)
    }

    pub fn members(&self) -> &[PiecewiseLinearFn] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `||u_j - u||_{1,1}` per member.
    pub fn distances(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.sub(&self.base).norm_w11()).collect()
    }

    /// Every breakpoint of the base and of all members, sorted.
    pub fn all_breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.base.breakpoints().to_vec();
        for m in &self.members {
            v.extend_from_slice(m.breakpoints());
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> PiecewiseLinearFn {
        PiecewiseLinearFn::tent(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn modes_converge() {
        let g = PiecewiseLinearFn::tent(0.5, 0.5, 1.0).unwrap();
        let idx = vec![1, 2, 4, 8, 16, 32, 64];
        for mode in [SequenceMode::Additive, SequenceMode::Translate, SequenceMode::Jitter { seed: 3 }] {
            let s = ContinuitySequence::new(tent(), g.clone(), idx.clone(), mode).unwrap();
            let d = s.distances();
            assert!(d[6] < d[0], "{mode:?}");
            assert_eq!(s.len(), 7);
        }
        let a = ContinuitySequence::new(tent(), g.clone(), idx.clone(), SequenceMode::Additive).unwrap();
        assert!((a.distances()[0] - g.norm_w11()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(ContinuitySequence::constant(tent(), vec![]).is_err());
        assert!(ContinuitySequence::constant(tent(), vec![2, 1]).is_err());
        assert!(ContinuitySequence::constant(tent(), vec![0, 1]).is_err());
        let c = ContinuitySequence::constant(tent(), vec![1, 2, 3]).unwrap();
        assert!(c.distances().iter().all(|&d| d == 0.0));
    }
}
