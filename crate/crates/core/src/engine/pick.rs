use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform seeded pick of an index in `0..n`.
///
/// # Panics
/// If `n == 0`.
pub fn pick(n: usize, seed: u64) -> usize {
    assert!(n > 0, "cannot pick from an empty set");
    ChaCha8Rng::seed_from_u64(seed).gen_range(0..n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_and_determinism() {
        assert_eq!(pick(1, 42), 0);
        for seed in 0..50 {
            assert_eq!(pick(5, seed), pick(5, seed));
            assert!(pick(5, seed) < 5);
        }
    }

    #[test]
    fn roughly_uniform() {
        let mut counts = [0usize; 3];
        for seed in 0..3000 {
            counts[pick(3, seed)] += 1;
        }
        assert!(counts.iter().all(|&c| (800..1200).contains(&c)), "{counts:?}");
    }
}
