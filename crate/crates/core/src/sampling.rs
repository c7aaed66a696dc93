//! Seeded pseudo-random rationals, points and gauges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{frac, q, Q};

/// Deterministic generator for every sampled check.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational `p / d` with `|p| <= 30`, `1 <= d <= 7`.
pub fn nonzero_q<R: Rng>(r: &mut R) -> Q {
    loop {
        let p: i64 = r.random_range(-30..=30);
        if p != 0 {
            let d: i64 = r.random_range(1..=7);
            return frac(p, d);
        }
    }
}

/// Integer point of the plane with every coordinate nonzero.
pub fn plane_point<R: Rng>(r: &mut R) -> [Q; 3] {
    let mut c = || loop {
        let x: i64 = r.random_range(-40..=40);
        if x != 0 {
            return q(x);
        }
    };
    [c(), c(), c()]
}

/// Gauge element with nonzero entries.
pub fn gauge<R: Rng>(r: &mut R, n: usize) -> Vec<Q> {
    (0..n).map(|_| nonzero_q(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<Q> = (0..5).map(|_| nonzero_q(&mut rng(7))).collect();
        let mut g = rng(7);
        let b: Vec<Q> = (0..5).map(|_| nonzero_q(&mut g)).collect();
        assert_eq!(a[0], b[0]);
        assert!(b.iter().all(|x| !x.is_zero()));
        assert!(plane_point(&mut g).iter().all(|x| !x.is_zero()));
    }
}
