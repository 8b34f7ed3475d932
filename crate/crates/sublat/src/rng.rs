//! Seedable, portable pseudo-randomness for reproducible model ensembles.
//!
//! The generator is SplitMix64 (the 64-bit finalizer of Steele, Lea and
//! Flood): a counter advanced by the golden-gamma increment and scrambled by
//! two xorshift-multiply rounds. Its output stream depends only on the seed,
//! never on platform word size or library version, which is what makes the
//! seeded example matrices in this crate reproducible. Normal deviates come
//! from the Box-Muller transform on consecutive uniforms.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 pseudo-random generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

/// The SplitMix64 output scrambler applied to a single word.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Generator for substream `stream` of `seed`; decorrelated streams let
    /// grid points or cases draw independently of evaluation order.
    pub fn derive(seed: u64, stream: u64) -> Self {
        Self::new(seed ^ mix(stream.wrapping_add(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform deviate in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Standard normal deviate via Box-Muller; consumes two uniforms.
    pub fn standard_normal(&mut self) -> f64 {
        // u1 in (0, 1] so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
