//! Binomial shot-noise model for magnitude-only measurements.
//!
//! Every draw is addressed by `(seed, signal, index)`: the three numbers are
//! mixed with SplitMix64 into the seed of a fresh ChaCha8 stream, so results
//! do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
}

/// Address of one sampled quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleKey {
    pub signal: u64,
    pub index: u64,
}

impl SampleKey {
    pub fn new(signal: u64, index: u64) -> Self {
        Self { signal, index }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::invalid("shots must be positive"));
        }
        Ok(Self { shots, seed })
    }

    fn rng(&self, key: SampleKey) -> ChaCha8Rng {
        let s = splitmix64(splitmix64(splitmix64(self.seed) ^ key.signal) ^ key.index);
        ChaCha8Rng::seed_from_u64(s)
    }

    /// M0 / M with M0 ~ Binomial(M, p).
    pub fn estimate_abs2(&self, p: f64, key: SampleKey) -> Result<f64> {
        if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let p = p.clamp(0.0, 1.0);
        if self.shots == 0 {
            return Err(Error::invalid("shots must be positive"));
        }
        let dist = Binomial::new(self.shots, p).map_err(|e| Error::invalid(format!("binomial: {e}")))?;
        let successes = dist.sample(&mut self.rng(key));
        Ok(successes as f64 / self.shots as f64)
    }

    /// sqrt(scale * estimate(|f|^2 / scale)); `scale` is the squared norm of
    /// the (unnormalized) state whose overlap `f` is.
    pub fn noisy_magnitude(&self, f_value: C64, scale: f64, key: SampleKey) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(Error::invalid(format!("scale must be positive, got {scale}")));
        }
        let p = f_value.norm_sqr() / scale;
        Ok((scale * self.estimate_abs2(p, key)?).sqrt())
    }
}

/// ||Phi + c psi||^2 for unit vectors with overlap <Phi|psi>.
pub fn interference_scale(overlap: C64, coeff: C64) -> f64 {
    1.0 + coeff.norm_sqr() + 2.0 * (coeff * overlap).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(shots: u64, seed: u64) -> ShotConfig {
        ShotConfig::new(shots, seed).unwrap()
    }

    #[test]
    fn endpoints_are_exact() {
        for shots in [1, 17, 1_000_000] {
            let c = cfg(shots, 3);
            assert_eq!(c.estimate_abs2(0.0, SampleKey::new(0, 0)).unwrap(), 0.0);
            assert_eq!(c.estimate_abs2(1.0, SampleKey::new(0, 0)).unwrap(), 1.0);
        }
        assert_eq!(cfg(10, 0).noisy_magnitude(C64::new(0.0, 0.0), 1.0, SampleKey::new(0, 0)).unwrap(), 0.0);
        assert_eq!(cfg(10, 0).noisy_magnitude(C64::new(1.0, 0.0), 1.0, SampleKey::new(0, 0)).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_probability() {
        let c = cfg(10, 0);
        assert!(c.estimate_abs2(1.0 + 1e-6, SampleKey::new(0, 0)).is_err());
        assert!(c.estimate_abs2(-1e-6, SampleKey::new(0, 0)).is_err());
        assert!(c.estimate_abs2(1.0 + 1e-10, SampleKey::new(0, 0)).is_ok());
        assert!(c.noisy_magnitude(C64::new(1.5, 0.0), 2.0, SampleKey::new(0, 0)).is_err());
    }

    #[test]
    fn interference_magnitude_bound() {
        // orthogonal unit components: |f3|^2 <= 2, sampled p = 1.4 / 2
        let f3 = C64::new(1.4f64.sqrt(), 0.0);
        let scale = interference_scale(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        assert_eq!(scale, 2.0);
        let c = cfg(1000, 9);
        let v = c.noisy_magnitude(f3, scale, SampleKey::new(1, 2)).unwrap();
        assert!((0.0..=2.0f64.sqrt()).contains(&v));
        let p = c.estimate_abs2(0.7, SampleKey::new(1, 2)).unwrap();
        assert_eq!(v, (2.0 * p).sqrt());
        assert!(c.noisy_magnitude(C64::new(2.8f64.sqrt(), 0.0), scale, SampleKey::new(1, 2)).is_err());
    }

    #[test]
    fn streams_are_addressed() {
        let c = cfg(1000, 42);
        let a = c.estimate_abs2(0.5, SampleKey::new(1, 7)).unwrap();
        let _ = c.estimate_abs2(0.5, SampleKey::new(2, 7)).unwrap();
        assert_eq!(a, c.estimate_abs2(0.5, SampleKey::new(1, 7)).unwrap());
        let draws: std::collections::HashSet<u64> =
            (0..20).map(|i| c.estimate_abs2(0.5, SampleKey::new(1, i)).unwrap().to_bits()).collect();
        assert!(draws.len() > 5);
    }

    #[test]
    fn quarter_probability_mean() {
        let p = 0.25;
        let mean: f64 = (0..100).map(|s| cfg(1_000_000, s).estimate_abs2(p, SampleKey::new(0, 0)).unwrap()).sum::<f64>() / 100.0;
        // standard error of a single estimate; the mean of 100 is tighter still
        assert!((mean - p).abs() < 3.0 * (p * (1.0 - p) / 1e6).sqrt());
    }
}
