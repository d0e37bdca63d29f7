//! Seed derivation and the sampling primitives shared by every randomized
//! construction.
//!
//! All randomness comes from ChaCha8 keyed by a 64-bit seed, with one
//! ChaCha stream per independent unit of work (a frame column, a trial
//! component). Normals use Box–Muller on 53-bit uniforms. Changing any of
//! this changes golden outputs, so bump [`GENERATOR_VERSION`] if you do.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GENERATOR_VERSION: &str = "chacha8-stream+box-muller/v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes two words into a seed. Per-trial seeds are `hash64(base_seed, trial)`.
#[inline]
pub fn hash64(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.wrapping_mul(GOLDEN_GAMMA))
}

pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Uniform on [0, 1) with 53 random bits.
#[inline]
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on (0, 1].
#[inline]
fn uniform_open_low<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal sampler (Box–Muller, both outputs used).
pub struct Normal<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> Normal<R> {
    pub fn new(rng: R) -> Self {
        Normal { rng, spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = uniform_open_low(&mut self.rng);
        let u2 = uniform(&mut self.rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }
}
