//! Voltage time series and the operations that act on them directly.

mod csv_io;
mod synthetic;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub use csv_io::{fmt_f64, read_csv, read_csv_from, write_csv, write_csv_to, SeriesSet};
pub use synthetic::{generate_synthetic, SyntheticSourceConfig};

/// A uniformly sampled voltage time series.
///
/// Always holds at least one sample, every sample is finite and the sample
/// rate is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageSeries {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl VoltageSeries {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSeries(
                "series must hold at least one sample".into(),
            ));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidSeries(format!(
                "sample rate must be finite and positive, got {sample_rate}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "sample {i} is not finite ({})",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Builds a series from samples derived from an already valid series.
    ///
    /// Callers guarantee a nonempty, finite sample vector.
    pub(crate) fn from_parts(samples: Vec<f64>, sample_rate: f64) -> Self {
        debug_assert!(!samples.is_empty());
        debug_assert!(samples.iter().all(|x| x.is_finite()));
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![0.0; len], sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Number of samples, `d`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    /// `sqrt(<v|v> / d)`.
    pub fn rms(&self) -> f64 {
        (self.energy() / self.len() as f64).sqrt()
    }

    /// `<v|v>`, i.e. `d * rms^2`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &VoltageSeries) -> Result<f64> {
        Error::ensure_same_len(self.len(), other.len())?;
        Ok(dot_slices(&self.samples, &other.samples))
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Elementwise sum. The sample rate of `self` is kept.
    pub fn add(&self, other: &VoltageSeries) -> Result<VoltageSeries> {
        Error::ensure_same_len(self.len(), other.len())?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        VoltageSeries::new(samples, self.sample_rate)
    }

    pub fn scale(&self, factor: f64) -> Result<VoltageSeries> {
        VoltageSeries::new(
            self.samples.iter().map(|x| x * factor).collect(),
            self.sample_rate,
        )
    }

    /// Contiguous sub-series `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<VoltageSeries> {
        if start >= end || end > self.len() {
            return Err(Error::parameter(format!(
                "slice {start}..{end} is empty or exceeds length {}",
                self.len()
            )));
        }
        Ok(Self::from_parts(
            self.samples[start..end].to_vec(),
            self.sample_rate,
        ))
    }
}

pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Adds i.i.d. zero-mean Gaussian noise with variance `rms(v)^2 / snr`.
///
/// `snr` is a linear power ratio. `f64::INFINITY` means "no noise" and
/// returns the input unchanged.
pub fn add_noise(v: &VoltageSeries, snr: f64, seed: u64) -> Result<VoltageSeries> {
    if snr.is_nan() || snr <= 0.0 {
        return Err(Error::parameter(format!("snr must be positive, got {snr}")));
    }
    let power = v.energy() / v.len() as f64;
    if power == 0.0 {
        return Err(Error::UndefinedSnr);
    }
    if snr.is_infinite() {
        return Ok(v.clone());
    }
    let sigma = (power / snr).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = v
        .samples()
        .iter()
        .map(|x| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x + sigma * z
        })
        .collect();
    VoltageSeries::new(samples, v.sample_rate())
}

/// Number of samples in the training prefix: `round(fraction * d)`, halves
/// rounded up.
pub fn train_len(len: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::parameter(format!(
            "train fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n = (fraction * len as f64 + 0.5).floor() as usize;
    if n == 0 || n >= len {
        return Err(Error::parameter(format!(
            "train fraction {fraction} on {len} samples leaves an empty part"
        )));
    }
    Ok(n)
}

/// Splits into a contiguous training prefix and test suffix.
pub fn split_train_test(
    v: &VoltageSeries,
    fraction: f64,
) -> Result<(VoltageSeries, VoltageSeries)> {
    let n = train_len(v.len(), fraction)?;
    Ok((v.slice(0, n)?, v.slice(n, v.len())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(x: &[f64]) -> VoltageSeries {
        VoltageSeries::new(x.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn rms_examples() {
        assert_eq!(series(&[1.0, 1.0, 1.0, 1.0]).rms(), 1.0);
        assert!((series(&[3.0, -4.0]).rms() - 3.535_533_905_932_737_6).abs() < 1e-15);
        assert_eq!(series(&[0.0, 0.0, 0.0]).rms(), 0.0);
    }

    #[test]
    fn dot_examples() {
        assert_eq!(series(&[1.0, 2.0]).dot(&series(&[3.0, 4.0])).unwrap(), 11.0);
        assert_eq!(series(&[1.0, -1.0]).dot(&series(&[1.0, 1.0])).unwrap(), 0.0);
        let v = series(&[0.3, -1.7, 2.2]);
        let d = v.len() as f64;
        assert!((v.dot(&v).unwrap() - d * v.rms().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn dot_rejects_length_mismatch() {
        let err = series(&[1.0]).dot(&series(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::Dimension { left: 1, right: 2 }));
    }

    #[test]
    fn invalid_series_rejected() {
        assert!(VoltageSeries::new(vec![], 1.0).is_err());
        assert!(VoltageSeries::new(vec![f64::NAN], 1.0).is_err());
        assert!(VoltageSeries::new(vec![f64::INFINITY], 1.0).is_err());
        assert!(VoltageSeries::new(vec![1.0], 0.0).is_err());
        assert!(VoltageSeries::new(vec![1.0], -5.0).is_err());
    }

    #[test]
    fn split_examples() {
        let v = VoltageSeries::new((0..10).map(f64::from).collect(), 1.0).unwrap();
        let (a, b) = split_train_test(&v, 0.8).unwrap();
        assert_eq!((a.len(), b.len()), (8, 2));
        assert_eq!(b.samples(), &[8.0, 9.0]);

        let v5 = VoltageSeries::new(vec![0.0; 5], 1.0).unwrap();
        let (a, b) = split_train_test(&v5, 0.5).unwrap();
        assert_eq!((a.len(), b.len()), (3, 2));

        assert!(split_train_test(&v, 0.99).is_err());
        assert!(split_train_test(&v, 0.01).is_err());
        assert!(split_train_test(&v, 0.0).is_err());
        assert!(split_train_test(&v, 1.0).is_err());
    }

    #[test]
    fn noise_infinite_snr_is_identity() {
        let v = series(&[1.0, -2.0, 0.5]);
        assert_eq!(add_noise(&v, f64::INFINITY, 3).unwrap(), v);
    }

    #[test]
    fn noise_rejects_zero_power_and_bad_snr() {
        assert!(matches!(
            add_noise(&series(&[0.0, 0.0]), 5.0, 1),
            Err(Error::UndefinedSnr)
        ));
        assert!(add_noise(&series(&[1.0]), 0.0, 1).is_err());
        assert!(add_noise(&series(&[1.0]), -1.0, 1).is_err());
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let v = series(&[1.0, -2.0, 0.5, 0.25]);
        assert_eq!(
            add_noise(&v, 2.0, 9).unwrap(),
            add_noise(&v, 2.0, 9).unwrap()
        );
        assert_ne!(
            add_noise(&v, 2.0, 9).unwrap(),
            add_noise(&v, 2.0, 10).unwrap()
        );
    }

    #[test]
    fn noise_hits_requested_snr() {
        // Estimate the injected noise variance from the residual.
        let d = 100_000;
        let v =
            VoltageSeries::new((0..d).map(|i| (i as f64 * 0.05).sin()).collect(), 100.0).unwrap();
        let noisy = add_noise(&v, 5.0, 42).unwrap();
        let noise_power = v
            .samples()
            .iter()
            .zip(noisy.samples())
            .map(|(a, b)| (b - a).powi(2))
            .sum::<f64>()
            / d as f64;
        let signal_power = v.rms().powi(2);
        let estimated = signal_power / noise_power;
        assert!(
            (estimated - 5.0).abs() / 5.0 < 0.05,
            "estimated snr {estimated}"
        );

        let grown = noisy.rms().powi(2);
        assert!((grown - signal_power * (1.0 + 1.0 / 5.0)).abs() / signal_power <= 0.05);
    }
}
