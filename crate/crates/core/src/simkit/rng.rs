//! Keyed, counter-based random streams.
//!
//! Each stream is identified by `(root_seed, experiment_id, replicate_index)`.
//! The key is hashed into a 64-bit base and an odd 64-bit increment; draw `i`
//! is `mix64(base + i * increment)`, the SplitMix64 output function applied
//! to a Weyl sequence. Streams are therefore cheap to create, independent of
//! creation order, and never share state.

use crate::error::{Error, Result};
use crate::numerics::normal_quantile;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// Murmur3 finalizer variant; forces the increment odd with enough bit flips.
fn mix_gamma(z: u64) -> u64 {
    let mut z = (z ^ (z >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
    z = (z ^ (z >> 33)).wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    z = (z ^ (z >> 33)) | 1;
    if (z ^ (z >> 1)).count_ones() < 24 {
        z ^ 0xaaaa_aaaa_aaaa_aaaa
    } else {
        z
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// A reproducible random stream owned by one replicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    root_seed: u64,
    experiment_id: String,
    replicate_index: u64,
    base: u64,
    increment: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(root_seed: u64, experiment_id: &str, replicate_index: u64) -> Self {
        let mut h = mix64(root_seed ^ 0x5851_f42d_4c95_7f2d);
        h = mix64(h ^ fnv1a(experiment_id.as_bytes()));
        h = mix64(h.wrapping_add(replicate_index.wrapping_mul(GOLDEN_GAMMA)));
        let increment = mix_gamma(h.wrapping_add(GOLDEN_GAMMA));
        RngStream {
            root_seed,
            experiment_id: experiment_id.to_owned(),
            replicate_index,
            base: h,
            increment,
            counter: 0,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn experiment_id(&self) -> &str {
        &self.experiment_id
    }

    pub fn replicate_index(&self) -> u64 {
        self.replicate_index
    }

    /// Number of 64-bit values consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.base.wrapping_add(self.counter.wrapping_mul(self.increment)))
    }

    /// Uniform on the open interval `(0, 1)`, 53 bits of resolution.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`; `p <= 0` never fires and `p >= 1` always does.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform01() < p
    }

    #[inline]
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform01()
    }

    /// Standard normal by inversion; consumes exactly one value.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        normal_quantile(self.uniform01())
    }

    #[inline]
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    /// Draw from a validated distribution.
    pub fn draw(&mut self, dist: &Distribution) -> Result<f64> {
        dist.validate()?;
        Ok(match *dist {
            Distribution::Bernoulli { p } => f64::from(u8::from(self.bernoulli(p))),
            Distribution::Uniform { low, high } => self.uniform(low, high),
            Distribution::Normal { mean, sd } => self.normal(mean, sd),
        })
    }
}

/// Shorthand for [`RngStream::new`].
pub fn make_stream(root_seed: u64, experiment_id: &str, replicate_index: u64) -> RngStream {
    RngStream::new(root_seed, experiment_id, replicate_index)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Draws 0 or 1.
    Bernoulli { p: f64 },
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, sd: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Bernoulli { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::domain(format!("Bernoulli probability {p} outside [0, 1]")))
            }
            Distribution::Uniform { low, high }
                if !(low < high) || !low.is_finite() || !high.is_finite() =>
            {
                Err(Error::domain(format!("uniform bounds need low < high, got ({low}, {high})")))
            }
            Distribution::Normal { mean, sd } if !(sd > 0.0) || !mean.is_finite() || !sd.is_finite() => {
                Err(Error::domain(format!("normal needs finite mean and sd > 0, got ({mean}, {sd})")))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_keys_replay() {
        let mut a = make_stream(42, "pool", 0);
        let mut b = make_stream(42, "pool", 0);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn differing_keys_diverge() {
        let first = |seed, id: &str, rep| make_stream(seed, id, rep).next_u64();
        let base = first(42, "pool", 0);
        assert_ne!(base, first(42, "pool", 1));
        assert_ne!(base, first(43, "pool", 0));
        assert_ne!(base, first(42, "mh", 0));
        let mut a = make_stream(42, "pool", 0);
        let mut b = make_stream(43, "pool", 0);
        let same = (0..1000).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn degenerate_bernoulli() {
        let mut s = make_stream(1, "b", 0);
        for _ in 0..10_000 {
            assert_eq!(s.draw(&Distribution::Bernoulli { p: 0.0 }).unwrap(), 0.0);
            assert_eq!(s.draw(&Distribution::Bernoulli { p: 1.0 }).unwrap(), 1.0);
        }
    }

    #[test]
    fn uniform01_is_open() {
        let mut s = make_stream(3, "u", 0);
        for _ in 0..100_000 {
            let u = s.uniform01();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn invalid_parameters() {
        let mut s = make_stream(1, "x", 0);
        for d in [
            Distribution::Bernoulli { p: -0.1 },
            Distribution::Bernoulli { p: 1.5 },
            Distribution::Uniform { low: 1.0, high: 1.0 },
            Distribution::Normal { mean: 0.0, sd: 0.0 },
            Distribution::Normal { mean: 0.0, sd: -1.0 },
        ] {
            assert!(matches!(s.draw(&d), Err(Error::Domain(_))), "{d:?}");
        }
        assert_eq!(s.position(), 0, "rejected draws must not advance the stream");
    }

    #[test]
    fn each_draw_consumes_one_value() {
        let mut s = make_stream(9, "n", 0);
        s.normal(0.0, 1.0);
        s.uniform(0.0, 8.0);
        s.bernoulli(0.5);
        assert_eq!(s.position(), 3);
    }
}
