use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based generator; one value-owned stream per caller.
pub type RngStream = ChaCha8Rng;

/// Stream `index` under `seed`. Distinct indices give independent streams and
/// the same (seed, index) pair always reproduces the same sequence.
pub fn substream(seed: u64, index: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
