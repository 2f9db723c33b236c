//! Keyed counter-based random streams.
//!
//! The generator is SplitMix64 used in counter mode: output `i` of the stream
//! with key `k` is `mix64(k + (i + 1)·φ)`, where φ is the 64-bit golden ratio
//! increment. Any draw can be recomputed from `(key, index)` alone, which is
//! what makes lazily labelled trees and thread-count-independent trial
//! batches possible.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const SCALE_53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finaliser (Stafford variant 13).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` of `seed`.
///
/// Used for per-trial streams: trial `t` of a batch seeded with `s` always
/// runs on `substream(s, t)`, whichever thread picks it up.
#[inline]
pub fn substream(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ 0x6a09_e667_f3bc_c908) ^ mix64(index.wrapping_add(0xbb67_ae85_84ca_a73b)))
}

/// Raw 64-bit draw `index` of the stream keyed by `key`.
#[inline]
pub fn draw(key: u64, index: u64) -> u64 {
    mix64(key.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Uniform on [0, 1) with 53 bits of resolution.
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    (bits >> 11) as f64 * SCALE_53
}

/// Uniform on (0, 1] with 53 bits of resolution.
#[inline]
pub fn unit_closed(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * SCALE_53
}

/// Sequential view of a keyed stream, usable wherever `rand` wants an RNG.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key: mix64(seed),
            counter: 0,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        unit_open(self.next_u64())
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let out = draw(self.key, self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand::rand_core::impls::fill_bytes_via_next(self, dst)
    }
}

/// Which of the three per-vertex variables of a coupled decoration a draw is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Channel {
    /// The base labels X.
    Base = 0,
    /// The fresh labels Z used where the coupling does not reuse X.
    Fresh = 1,
    /// The reuse thresholds W.
    Threshold = 2,
}

/// Random-access per-vertex variables for one decoration stream.
#[derive(Debug, Clone, Copy)]
pub struct VertexField {
    key: u64,
}

impl VertexField {
    pub fn new(seed: u64) -> Self {
        VertexField { key: mix64(seed) }
    }

    #[inline]
    pub fn bits(&self, vertex: u64, channel: Channel) -> u64 {
        draw(self.key, vertex.wrapping_mul(3).wrapping_add(channel as u64))
    }

    /// X or Z label of `vertex`, uniform on [0, 1).
    #[inline]
    pub fn label(&self, vertex: u64, channel: Channel) -> f64 {
        unit_open(self.bits(vertex, channel))
    }

    /// Reuse threshold W of `vertex`, uniform on (0, 1], so `W <= 0` never
    /// holds and `W <= 1` always does.
    #[inline]
    pub fn threshold(&self, vertex: u64) -> f64 {
        unit_closed(self.bits(vertex, Channel::Threshold))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_random_access_agree() {
        let mut rng = CounterRng::new(17);
        let key = mix64(17);
        for i in 0..100 {
            assert_eq!(rng.next_u64(), draw(key, i));
        }
    }

    #[test]
    fn substreams_differ() {
        let a: Vec<u64> = (0..64).map(|t| substream(5, t)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(a.len(), b.len());
        assert_ne!(substream(5, 0), substream(6, 0));
    }

    #[test]
    fn unit_ranges() {
        assert_eq!(unit_open(0), 0.0);
        assert!(unit_open(u64::MAX) < 1.0);
        assert!(unit_closed(0) > 0.0);
        assert_eq!(unit_closed(u64::MAX), 1.0);
    }

    #[test]
    fn uniform_mean_and_variance() {
        let mut rng = CounterRng::new(99);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        // se(mean) = sqrt(1/12/n) ~ 6.5e-4
        assert!((mean - 0.5).abs() < 3e-3, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 2e-3, "var {var}");
    }
}
