//! Seed derivation. Every run gets one root seed from its experiment and seed
//! index; subsystems draw from separate ChaCha streams of that root, so arms
//! of an experiment share placements while their other draws stay apart.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Placement = 1,
    Proposals = 2,
    Respawn = 3,
    PhaseInit = 4,
    Scramble = 5,
    Deaths = 6,
    Shuffle = 7,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn root_seed(kind: ExperimentKind, seed: u64) -> u64 {
    splitmix64(splitmix64(kind as u64 + 1) ^ seed)
}

pub fn stream(root: u64, s: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(s as u64);
    rng
}
