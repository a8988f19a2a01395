use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PennerPoint, TrianglePoint};
use crate::scalar::Q;
use crate::triangulation::DecoratedTriangulation;

/// Seeded source of positive rationals `p/q` with `1 <= p, q <= 1000`.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rational(&mut self) -> Q {
        let n: i64 = self.rng.gen_range(1..=1000);
        let d: i64 = self.rng.gen_range(1..=1000);
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn rationals(&mut self, n: usize) -> Vec<Q> {
        (0..n).map(|_| self.rational()).collect()
    }

    pub fn penner(&mut self, d: &DecoratedTriangulation) -> PennerPoint {
        PennerPoint(self.rationals(d.num_edges()))
    }

    pub fn triangle(&mut self, d: &DecoratedTriangulation) -> TrianglePoint {
        TrianglePoint(
            (0..d.num_triangles())
                .map(|_| [self.rational(), self.rational()])
                .collect(),
        )
    }

    pub fn weights(&mut self, d: &DecoratedTriangulation) -> Vec<Q> {
        self.rationals(d.num_punctures())
    }

    /// Uniform double in `[lo, hi)`.
    pub fn real(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        let xs = a.rationals(200);
        assert_eq!(xs, b.rationals(200));
        for x in xs {
            assert!(x.numer() >= &BigInt::from(1) && x.numer() <= &BigInt::from(1000));
            assert!(x.denom() <= &BigInt::from(1000));
        }
    }
}
