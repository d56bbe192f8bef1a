//! Full-wave diode bridge with the linearized diode `V = V0 + I R`.
//!
//! The bridge is memoryless and drives a pure resistive load. Each
//! conduction path crosses two diodes, so the series circuit is
//! `|v| = 2 (V0 + I R) + I R_load`.

use crate::error::{Error, Result};
use crate::signal::VoltageSeries;

/// Room-temperature thermal voltage `kT/e`.
pub const THERMAL_VOLTAGE: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeBridgeParams {
    /// Forward-drop intercept of a single diode (V).
    pub v0: f64,
    /// Incremental resistance of a single diode (Ω).
    pub r: f64,
    /// Load resistance (Ω).
    pub r_load: f64,
    /// Thermal voltage floor (V); a `v0` below it is suspicious but allowed.
    pub v_th: f64,
}

impl Default for DiodeBridgeParams {
    fn default() -> Self {
        Self {
            v0: 0.1,
            r: 1.0,
            r_load: 8.0,
            v_th: THERMAL_VOLTAGE,
        }
    }
}

impl DiodeBridgeParams {
    pub fn new(v0: f64, r: f64, r_load: f64) -> Result<Self> {
        let p = Self {
            v0,
            r,
            r_load,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v0.is_finite() && self.v0 >= 0.0) {
            return Err(Error::config(format!(
                "diode v0 must be >= 0, got {}",
                self.v0
            )));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::config(format!(
                "diode r must be >= 0, got {}",
                self.r
            )));
        }
        if !(self.r_load.is_finite() && self.r_load > 0.0) {
            return Err(Error::config(format!(
                "load resistance must be > 0, got {}",
                self.r_load
            )));
        }
        Ok(())
    }

    /// Warning text when the forward drop sits below the thermal voltage.
    pub fn thermal_warning(&self) -> Option<String> {
        (self.v0 < self.v_th).then(|| {
            format!(
                "diode v0 = {} V is below the thermal voltage {} V; a real bridge cannot drop less",
                self.v0, self.v_th
            )
        })
    }

    /// Total forward drop across a conduction path.
    pub fn path_drop(&self) -> f64 {
        2.0 * self.v0
    }

    /// Conduction current for an instantaneous input voltage.
    #[inline]
    pub fn current(&self, v: f64) -> f64 {
        ((v.abs() - 2.0 * self.v0) / (self.r_load + 2.0 * self.r)).max(0.0)
    }

    /// Instantaneous dissipation of one diode, `I V0 + I^2 R`.
    #[inline]
    pub fn diode_power(&self, current: f64) -> f64 {
        current * self.v0 + current * current * self.r
    }

    /// Instantaneous dissipation of the bridge (two diodes in the path).
    #[inline]
    pub fn bridge_power(&self, current: f64) -> f64 {
        2.0 * self.diode_power(current)
    }
}

/// Load voltage and bridge dissipation, sample by sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeOutput {
    /// `I R_load`, nonnegative everywhere.
    pub load: VoltageSeries,
    /// Conduction current (A).
    pub current: Vec<f64>,
    /// Bridge dissipation (W).
    pub dissipation: Vec<f64>,
}

pub fn bridge_rectify(v: &VoltageSeries, p: &DiodeBridgeParams) -> BridgeOutput {
    let current: Vec<f64> = v.samples().iter().map(|&x| p.current(x)).collect();
    let load = current.iter().map(|i| i * p.r_load).collect();
    let dissipation = current.iter().map(|&i| p.bridge_power(i)).collect();
    BridgeOutput {
        load: VoltageSeries::from_parts(load, v.sample_rate()),
        current,
        dissipation,
    }
}

/// Rectifies each source separately and sums the load voltages, avoiding
/// destructive interference between the sources.
pub fn bridge_per_source_then_sum(
    v1: &VoltageSeries,
    v2: &VoltageSeries,
    p: &DiodeBridgeParams,
) -> Result<VoltageSeries> {
    Error::ensure_same_len(v1.len(), v2.len())?;
    bridge_rectify(v1, p).load.add(&bridge_rectify(v2, p).load)
}

/// Mean bridge dissipation (W).
pub fn average_dissipation(v: &VoltageSeries, p: &DiodeBridgeParams) -> f64 {
    let out = bridge_rectify(v, p);
    out.dissipation.iter().sum::<f64>() / out.dissipation.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(x: &[f64]) -> VoltageSeries {
        VoltageSeries::new(x.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn hand_solved_circuit() {
        // 1.0 = 2 (0.1 + I) + 8 I  =>  I = 0.08 A
        let p = DiodeBridgeParams::default();
        let out = bridge_rectify(&series(&[1.0, -1.0]), &p);
        for k in 0..2 {
            assert!((out.current[k] - 0.08).abs() < 1e-15);
            assert!((out.load.samples()[k] - 0.64).abs() < 1e-15);
            assert!((out.dissipation[k] - 0.0288).abs() < 1e-15);
        }
        assert!((average_dissipation(&series(&[1.0; 5]), &p) - 0.0288).abs() < 1e-15);
    }

    #[test]
    fn below_threshold_does_not_conduct() {
        let p = DiodeBridgeParams::default();
        let out = bridge_rectify(&series(&[0.2, -0.2, 0.1, 0.0]), &p);
        assert!(out.load.samples().iter().all(|&x| x == 0.0));
        assert!(out.dissipation.iter().all(|&x| x == 0.0));
        assert_eq!(average_dissipation(&series(&[0.0; 4]), &p), 0.0);
        assert!(average_dissipation(&series(&[0.0, 0.0, 0.21]), &p) > 0.0);
    }

    #[test]
    fn full_wave_symmetry() {
        let p = DiodeBridgeParams::default();
        let v = series(&[0.3, -1.2, 2.5, -0.05]);
        let neg = v.scale(-1.0).unwrap();
        assert_eq!(bridge_rectify(&v, &p), bridge_rectify(&neg, &p));
    }

    #[test]
    fn per_source_examples() {
        let p = DiodeBridgeParams::default();
        let v1 = series(&[0.5, -1.0, 2.0]);
        let zero = series(&[0.0; 3]);
        assert_eq!(
            bridge_per_source_then_sum(&v1, &zero, &p).unwrap(),
            bridge_rectify(&v1, &p).load
        );
        let opposite = v1.scale(-1.0).unwrap();
        let both = bridge_per_source_then_sum(&v1, &opposite, &p).unwrap();
        assert_eq!(both, bridge_rectify(&v1, &p).load.scale(2.0).unwrap());
        assert!(v1.add(&opposite).unwrap().rms() == 0.0);
        assert!(bridge_per_source_then_sum(&v1, &series(&[1.0]), &p).is_err());
    }

    #[test]
    fn params_validation_and_warning() {
        assert!(DiodeBridgeParams::new(0.1, 1.0, 0.0).is_err());
        assert!(DiodeBridgeParams::new(-0.1, 1.0, 8.0).is_err());
        assert!(DiodeBridgeParams::new(0.1, -1.0, 8.0).is_err());
        assert!(DiodeBridgeParams::default().thermal_warning().is_none());
        assert!(DiodeBridgeParams::new(0.01, 1.0, 8.0)
            .unwrap()
            .thermal_warning()
            .is_some());
    }
}
