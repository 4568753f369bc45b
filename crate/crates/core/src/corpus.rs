use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcmodel::PiecewiseLinearFn;

/// Seeded mix cycling through tents, sawtooths, staircases and signed random
/// functions, each scaled to `||f||_{1,1} = 1`. Supports stay inside
/// `[-4, 4]`.
pub fn generate_corpus(seed: u64, n: usize) -> Result<Vec<PiecewiseLinearFn>> {
    if n == 0 {
        return Err(Error::Config { field: "n".into(), reason: "corpus size must be at least 1".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let f = match i % 4 {
                0 => PiecewiseLinearFn::tent(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0), 1.0)?,
                1 => {
                    let teeth = rng.gen_range(2..=5);
                    let width = rng.gen_range(0.5..1.4);
                    let start = -0.5 * teeth as f64 * width;
                    PiecewiseLinearFn::sawtooth(start, teeth, width, 1.0, rng.gen_range(0.0..0.6))?
                }
                2 => {
                    let count = rng.gen_range(2..=4);
                    let levels: Vec<f64> = (0..count).map(|_| rng.gen_range(0.2..1.5)).collect();
                    let width = rng.gen_range(0.3..1.0);
                    let ramp = rng.gen_range(0.1..0.5);
                    let start = -0.5 * (count as f64 * (width + ramp) + ramp);
                    PiecewiseLinearFn::steps(start, &levels, width, ramp)?
                }
                _ => {
                    let interior = rng.gen_range(3..=8);
                    let span = rng.gen_range(1.0..3.0);
                    PiecewiseLinearFn::random_pl(&mut rng, interior, span, 1.0, true)?
                }
            };
            Ok(f.scale(1.0 / f.norm_w11()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_and_deterministic() {
        let c = generate_corpus(7, 20).unwrap();
        assert_eq!(c.len(), 20);
        for f in &c {
            assert!((f.norm_w11() - 1.0).abs() < 1e-12);
            assert!(f.support_radius() <= 4.0);
        }
        assert_eq!(c, generate_corpus(7, 20).unwrap());
        assert_ne!(c, generate_corpus(8, 20).unwrap());
        assert!(c.iter().any(|f| f.values().iter().any(|&v| v < 0.0)));
        assert!(generate_corpus(7, 0).is_err());
    }
}
