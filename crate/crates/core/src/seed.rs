//! Named random sub-streams derived from one master seed.
//!
//! Every consumer of randomness (world generation, policy, the three
//! oracles, the creature) draws from its own ChaCha stream, so changing how
//! many numbers one consumer draws never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stream {
    WorldGen,
    Policy,
    Alpha,
    Beta,
    Chi,
    Creature,
    /// Free-form sub-stream, e.g. one per composite component.
    Indexed(u32),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::WorldGen => 1,
            Stream::Policy => 2,
            Stream::Alpha => 3,
            Stream::Beta => 4,
            Stream::Chi => 5,
            Stream::Creature => 6,
            Stream::Indexed(i) => 0x1_0000 + i as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seed(pub u64);

impl Seed {
    pub fn stream(self, stream: Stream) -> Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream.id());
        rng
    }

    /// Derive a child seed, used when one seed must fan out to several
    /// independent owners (components of a product, lives of a batch).
    pub fn child(self, index: u64) -> Seed {
        // splitmix64 finaliser over (seed, index)
        let mut z = self.0 ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }
}
