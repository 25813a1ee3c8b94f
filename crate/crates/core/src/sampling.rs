//! Seeded random streams and the normal, chi and chi-square variates used by
//! the ensemble samplers.
//!
//! The base generator is ChaCha8, which is counter based: a `(seed,
//! stream_index)` pair selects a key and a stream id, so substreams are
//! reproducible no matter which thread consumes them or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{param_err, Result};

/// A deterministic random stream identified by `(seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Derive the `index`-th child stream. Children of the same parent are
    /// independent of each other and of the parent, and depend only on the
    /// parent's identity, never on how much of the parent has been consumed.
    pub fn substream(&self, index: u64) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(self.stream_index.wrapping_add(0x9e37_79b9)));
        RngStream::new(key, index)
    }

    /// Uniform draw on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_index on an empty range");
        // Lemire's multiply-shift with rejection.
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.rng.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One draw from `Normal(mean, std_dev^2)`.
pub fn sample_normal(stream: &mut RngStream, mean: f64, std_dev: f64) -> Result<f64> {
    if !mean.is_finite() {
        return param_err(format!("normal mean must be finite, got {mean}"));
    }
    if !(std_dev.is_finite() && std_dev > 0.0) {
        return param_err(format!(
            "normal std_dev must be finite and positive, got {std_dev}"
        ));
    }
    let z: f64 = StandardNormal.sample(stream);
    Ok(mean + std_dev * z)
}

/// One chi-square draw with `k > 0` (not necessarily integer) degrees of
/// freedom, drawn as `Gamma(shape = k/2, scale = 2)`.
pub fn sample_chi_square(stream: &mut RngStream, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return param_err(format!(
            "chi-square degrees of freedom must be positive, got {k}"
        ));
    }
    let gamma = Gamma::new(0.5 * k, 2.0).expect("shape and scale checked positive");
    Ok(gamma.sample(stream))
}

/// One chi draw: the square root of a chi-square with `k` degrees of freedom.
pub fn sample_chi(stream: &mut RngStream, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return param_err(format!("chi degrees of freedom must be positive, got {k}"));
    }
    sample_chi_square(stream, k).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn same_seed_same_values() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 0);
        let x = sample_normal(&mut a, 0.0, 1.0).unwrap();
        let y = sample_normal(&mut b, 0.0, 1.0).unwrap();
        assert_eq!(x.to_bits(), y.to_bits());
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        assert_ne!(a.next_u64(), b.next_u64());
        let p = RngStream::new(42, 0);
        let mut c0 = p.substream(0);
        let mut c1 = p.substream(1);
        assert_ne!(c0.next_u64(), c1.next_u64());
    }

    #[test]
    fn substream_ignores_parent_position() {
        let p = RngStream::new(9, 3);
        let mut consumed = p.clone();
        for _ in 0..10 {
            consumed.next_u64();
        }
        assert_eq!(p.substream(5).next_u64(), consumed.substream(5).next_u64());
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut s = RngStream::new(1, 0);
        assert!(sample_normal(&mut s, 5.0, 0.0).is_err());
        assert!(sample_normal(&mut s, 5.0, f64::NAN).is_err());
        assert!(sample_normal(&mut s, f64::INFINITY, 1.0).is_err());
        assert!(sample_chi(&mut s, 0.0).is_err());
        assert!(sample_chi(&mut s, -1.0).is_err());
        assert!(sample_chi_square(&mut s, 0.0).is_err());
    }

    #[test]
    fn normal_moments() {
        let mut s = RngStream::new(11, 0);
        let sd = 2f64.sqrt();
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_normal(&mut s, 0.0, sd).unwrap())
            .collect();
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 4.0 * (2.0 / 1e6f64).sqrt(), "mean {m}");
        assert!((v - 2.0).abs() < 0.02, "variance {v}");
    }

    #[test]
    fn chi_two_mean() {
        let mut s = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_chi(&mut s, 2.0).unwrap())
            .collect();
        let (m, _) = mean_var(&xs);
        let expected = (std::f64::consts::PI / 2.0).sqrt();
        assert!((m - expected).abs() < 0.01 * expected, "mean {m}");
    }

    #[test]
    fn chi_square_four_moments() {
        let mut s = RngStream::new(13, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_chi_square(&mut s, 4.0).unwrap())
            .collect();
        let (m, v) = mean_var(&xs);
        assert!((m - 4.0).abs() < 0.04, "mean {m}");
        assert!((v - 8.0).abs() < 0.16, "variance {v}");
    }

    #[test]
    fn chi_concentrates_for_large_dof() {
        let k = 1e6;
        let mut s = RngStream::new(14, 0);
        let trials = 10_000;
        let close = (0..trials)
            .filter(|_| (sample_chi(&mut s, k).unwrap() / k.sqrt() - 1.0).abs() < 0.01)
            .count();
        assert!(close as f64 >= 0.999 * trials as f64, "{close} of {trials}");
    }

    #[test]
    fn uniform_index_in_range() {
        let mut s = RngStream::new(15, 0);
        for n in [1usize, 2, 7, 1000] {
            for _ in 0..1000 {
                assert!(s.uniform_index(n) < n);
            }
        }
    }
}
