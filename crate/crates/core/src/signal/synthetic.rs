use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::VoltageSeries;
use crate::error::{Error, Result};

/// Two single-degree-of-freedom resonators sharing one band-limited
/// Gaussian drive.
///
/// `amp1`/`amp2` are the RMS voltages of the respective outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSourceConfig {
    pub f1: f64,
    pub f2: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub amp1: f64,
    pub amp2: f64,
    pub drive_bandwidth: f64,
    pub duration: f64,
    pub sample_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSourceConfig {
    fn default() -> Self {
        Self {
            f1: 25.0,
            f2: 25.5,
            zeta1: 0.0005,
            zeta2: 0.0005,
            amp1: 0.6,
            amp2: 0.4,
            drive_bandwidth: 100.0,
            duration: 4.0,
            sample_rate: 1000.0,
            seed: 0,
        }
    }
}

/// Settling time budget before recording starts, in time constants.
const SETTLE_TIME_CONSTANTS: f64 = 5.0;
/// Hard cap on discarded warm-up samples.
const MAX_WARMUP: usize = 500_000;

impl SyntheticSourceConfig {
    pub fn validate(&self) -> Result<()> {
        let nyquist = self.sample_rate / 2.0;
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::config("sample_rate must be positive"));
        }
        for (name, f) in [("f1", self.f1), ("f2", self.f2)] {
            if !(f > 0.0 && f < nyquist) {
                return Err(Error::config(format!(
                    "{name} = {f} must lie in (0, sample_rate/2 = {nyquist})"
                )));
            }
        }
        for (name, z) in [("zeta1", self.zeta1), ("zeta2", self.zeta2)] {
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::config(format!("{name} = {z} must lie in (0, 1)")));
            }
        }
        for (name, a) in [("amp1", self.amp1), ("amp2", self.amp2)] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::config(format!(
                    "{name} = {a} must be finite and >= 0"
                )));
            }
        }
        if !(self.drive_bandwidth.is_finite() && self.drive_bandwidth > 0.0) {
            return Err(Error::config("drive_bandwidth must be positive"));
        }
        if !(self.duration.is_finite() && self.duration * self.sample_rate >= 2.0) {
            return Err(Error::config(format!(
                "duration {} s yields fewer than 2 samples at {} Hz",
                self.duration, self.sample_rate
            )));
        }
        Ok(())
    }

    /// Number of recorded samples.
    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    fn warmup(&self) -> usize {
        let slowest = [(self.f1, self.zeta1), (self.f2, self.zeta2)]
            .iter()
            .map(|&(f, z)| 1.0 / (z * 2.0 * std::f64::consts::PI * f))
            .fold(0.0, f64::max);
        ((SETTLE_TIME_CONSTANTS * slowest * self.sample_rate).ceil() as usize).min(MAX_WARMUP)
    }
}

/// `x'' + 2 zeta w x' + w^2 x = w^2 u`, integrated with RK4 under a
/// zero-order-hold input.
struct Resonator {
    omega: f64,
    zeta: f64,
    substeps: usize,
    h: f64,
    x: f64,
    xdot: f64,
}

impl Resonator {
    fn new(f: f64, zeta: f64, sample_rate: f64) -> Self {
        let omega = 2.0 * std::f64::consts::PI * f;
        let dt = 1.0 / sample_rate;
        // keep omega * h well inside RK4's stability region
        let substeps = ((omega * dt) / 0.25).ceil().max(1.0) as usize;
        Self {
            omega,
            zeta,
            substeps,
            h: dt / substeps as f64,
            x: 0.0,
            xdot: 0.0,
        }
    }

    fn deriv(&self, x: f64, xdot: f64, u: f64) -> (f64, f64) {
        let w2 = self.omega * self.omega;
        (xdot, w2 * (u - x) - 2.0 * self.zeta * self.omega * xdot)
    }

    fn step(&mut self, u: f64) -> f64 {
        let h = self.h;
        for _ in 0..self.substeps {
            let (x, v) = (self.x, self.xdot);
            let (k1x, k1v) = self.deriv(x, v, u);
            let (k2x, k2v) = self.deriv(x + 0.5 * h * k1x, v + 0.5 * h * k1v, u);
            let (k3x, k3v) = self.deriv(x + 0.5 * h * k2x, v + 0.5 * h * k2v, u);
            let (k4x, k4v) = self.deriv(x + h * k3x, v + h * k3v, u);
            self.x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            self.xdot = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        self.x
    }
}

fn scale_to_rms(raw: Vec<f64>, amp: f64) -> Vec<f64> {
    let power = raw.iter().map(|x| x * x).sum::<f64>() / raw.len() as f64;
    if amp == 0.0 || power == 0.0 {
        return vec![0.0; raw.len()];
    }
    let k = amp / power.sqrt();
    raw.into_iter().map(|x| x * k).collect()
}

/// Synthesizes the two sub-harvester outputs. Deterministic in `cfg.seed`.
pub fn generate_synthetic(cfg: &SyntheticSourceConfig) -> Result<(VoltageSeries, VoltageSeries)> {
    cfg.validate()?;
    let len = cfg.sample_count();
    let warmup = cfg.warmup();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let alpha = (-2.0 * std::f64::consts::PI * cfg.drive_bandwidth / cfg.sample_rate).exp();

    let mut r1 = Resonator::new(cfg.f1, cfg.zeta1, cfg.sample_rate);
    let mut r2 = Resonator::new(cfg.f2, cfg.zeta2, cfg.sample_rate);
    let mut drive = 0.0;
    let mut out1 = Vec::with_capacity(len);
    let mut out2 = Vec::with_capacity(len);
    for k in 0..warmup + len {
        let w: f64 = StandardNormal.sample(&mut rng);
        drive = alpha * drive + (1.0 - alpha) * w;
        let y1 = r1.step(drive);
        let y2 = r2.step(drive);
        if k >= warmup {
            out1.push(y1);
            out2.push(y2);
        }
    }

    let v1 = VoltageSeries::new(scale_to_rms(out1, cfg.amp1), cfg.sample_rate)?;
    let v2 = VoltageSeries::new(scale_to_rms(out2, cfg.amp2), cfg.sample_rate)?;
    Ok((v1, v2))
}
