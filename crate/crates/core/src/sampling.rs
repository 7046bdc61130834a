use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws `trials` outcomes from a discrete law given by `weights` and returns
/// the count per index. Mass missing from `sum(weights) < 1` is returned as
/// the final `unassigned` count. Trial `t` uses ChaCha8 stream `t` of `seed`,
/// so counts do not depend on evaluation order.
pub fn draw_counts(weights: &[f64], trials: u64, seed: u64) -> (Vec<u64>, u64) {
    let mut counts = vec![0u64; weights.len()];
    let mut unassigned = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        match weights.iter().position(|w| {
            acc += w;
            u < acc
        }) {
            Some(i) => counts[i] += 1,
            None => unassigned += 1,
        }
    }
    (counts, unassigned)
}
