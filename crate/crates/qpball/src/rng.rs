//! Deterministic 64-bit PRNG with per-stream derivation.
//!
//! All randomness in the crate flows through [`SplitMix64`] so that instance
//! generation and multistart local search are bit-identical across platforms
//! and independent of thread scheduling. Streams are derived from a
//! `(seed, stream)` pair; distinct pairs give decorrelated sequences.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// splitmix64 generator (Steele, Lea & Flood).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derives a stream for `(seed, stream)`: the seed is mixed first, then
    /// offset by the stream index, so adjacent streams start far apart in
    /// state space.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut g = SplitMix64::new(seed);
        let base = g.next_u64();
        let mut h = SplitMix64::new(base ^ mix64(stream.wrapping_add(GOLDEN)));
        h.next_u64();
        h
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the Box–Muller transform (one value per call;
    /// the paired value is discarded to keep the stream layout simple).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Exp(1) sample.
    pub fn next_exp(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }

    /// Uniform point on the standard simplex (flat Dirichlet), sampled as
    /// normalized exponentials.
    pub fn next_simplex_point(&mut self, m: usize) -> Vec<f64> {
        let mut x: Vec<f64> = (0..m).map(|_| self.next_exp()).collect();
        let s: f64 = x.iter().sum();
        for v in &mut x {
            *v /= s;
        }
        x
    }
}
