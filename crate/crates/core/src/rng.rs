//! Seed stream splitting.
//!
//! Every stochastic draw in a run comes from a ChaCha8 generator keyed by
//! `(master seed, stream, a, b)`. The key is four SplitMix64 outputs of a
//! state that absorbs each component in turn, so streams never overlap and
//! do not depend on evaluation order or worker count:
//!
//! | stream        | `a`         | `b`          |
//! |---------------|-------------|--------------|
//! | `Init`        | 0           | agent index  |
//! | `Mutation`    | generation  | agent index  |
//! | `Reproduce`   | generation  | 0            |
//! | `SugarLayout` | generation  | 0            |
//! | `GameLayout`  | 0           | 0            |
//! | `GridSugar`   | generation  | 0            |
//! | `RandomSearch`| generation  | agent index  |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Mutation = 2,
    Reproduce = 3,
    SugarLayout = 4,
    GameLayout = 5,
    GridSugar = 6,
    RandomSearch = 7,
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives independent random streams from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStreams {
    master: u64,
}

impl SeedStreams {
    pub fn new(master: u64) -> Self {
        SeedStreams { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn rng(&self, stream: Stream, a: u64, b: u64) -> ChaCha8Rng {
        let mut state = self.master;
        for part in [stream as u64, a, b] {
            let mut absorbed = state ^ part.wrapping_mul(0xD1B5_4A32_D192_ED03);
            state = splitmix64(&mut absorbed);
        }
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}
