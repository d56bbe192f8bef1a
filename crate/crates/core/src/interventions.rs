//! Energy-conserving operators on voltage series.
//!
//! Both interventions are orthogonal: the periodic sign flip is a diagonal
//! matrix of `±1` and the delay is a cyclic permutation matrix. Applied
//! directly they cost `O(d)`; [`Intervention::matrix`] materializes the
//! `d × d` form for checking.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::signal::VoltageSeries;

/// Trainable intervention parameters, all in samples.
///
/// Ordering is lexicographic in `(tau, phi, flip_offset)` and is used to
/// break cost ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InterventionParams {
    /// Length of each ON and each OFF block of the flip schedule.
    pub tau: usize,
    /// Cyclic delay applied to the second voltage.
    pub phi: usize,
    /// Start of the flip schedule.
    pub flip_offset: usize,
}

impl InterventionParams {
    pub fn new(tau: usize, phi: usize, flip_offset: usize) -> Result<Self> {
        let p = Self {
            tau,
            phi,
            flip_offset,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::parameter("tau must be at least 1 sample"));
        }
        Ok(())
    }

    /// A schedule that never flips any of the first `horizon` samples, nor
    /// any sample of a continuation within that horizon.
    pub fn idle(horizon: usize, phi: usize) -> Self {
        let tau = horizon.max(1);
        Self {
            tau,
            phi,
            flip_offset: tau,
        }
    }

    /// Parameters that continue the same flip schedule `elapsed` samples
    /// later, e.g. on the test suffix that follows a training prefix.
    pub fn continued(&self, elapsed: usize) -> Self {
        let period = 2 * self.tau.max(1) as i64;
        let offset = (self.flip_offset as i64 - elapsed as i64).rem_euclid(period);
        Self {
            flip_offset: offset as usize,
            ..*self
        }
    }
}

impl std::fmt::Display for InterventionParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "tau={} phi={} offset={}",
            self.tau, self.phi, self.flip_offset
        )
    }
}

/// Sign applied to sample `i`: `-1` on even blocks counted from `offset`.
#[inline]
pub fn flip_sign(i: usize, tau: usize, offset: usize) -> f64 {
    let block = (i as i64 - offset as i64).div_euclid(tau as i64);
    if block % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

pub fn periodic_flip(v: &VoltageSeries, tau: usize, offset: usize) -> Result<VoltageSeries> {
    if tau < 1 {
        return Err(Error::parameter("tau must be at least 1 sample"));
    }
    let samples = v
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &x)| flip_sign(i, tau, offset) * x)
        .collect();
    Ok(VoltageSeries::from_parts(samples, v.sample_rate()))
}

/// `out[i] = v[(i + phi) mod d]`.
pub fn cyclic_shift(v: &VoltageSeries, phi: usize) -> VoltageSeries {
    let mut samples = v.samples().to_vec();
    samples.rotate_left(phi % v.len());
    VoltageSeries::from_parts(samples, v.sample_rate())
}

/// A single orthogonal intervention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intervention {
    Flip { tau: usize, offset: usize },
    Shift { phi: usize },
}

impl Intervention {
    pub fn apply(&self, v: &VoltageSeries) -> Result<VoltageSeries> {
        match *self {
            Intervention::Flip { tau, offset } => periodic_flip(v, tau, offset),
            Intervention::Shift { phi } => Ok(cyclic_shift(v, phi)),
        }
    }

    /// The `d × d` orthogonal matrix `O` with `O v == self.apply(v)`.
    pub fn matrix(&self, d: usize) -> Result<DMatrix<f64>> {
        if d < 1 {
            return Err(Error::parameter("matrix dimension must be at least 1"));
        }
        match *self {
            Intervention::Flip { tau, offset } => {
                if tau < 1 {
                    return Err(Error::parameter("tau must be at least 1 sample"));
                }
                Ok(DMatrix::from_fn(d, d, |r, c| {
                    if r == c {
                        flip_sign(r, tau, offset)
                    } else {
                        0.0
                    }
                }))
            }
            Intervention::Shift { phi } => {
                let phi = phi % d;
                Ok(DMatrix::from_fn(d, d, |r, c| {
                    if c == (r + phi) % d {
                        1.0
                    } else {
                        0.0
                    }
                }))
            }
        }
    }
}

pub fn as_matrix(kind: Intervention, d: usize) -> Result<DMatrix<f64>> {
    kind.matrix(d)
}

/// Single-voltage pipeline: the periodic flip alone.
pub fn intervene_single(v: &VoltageSeries, p: &InterventionParams) -> Result<VoltageSeries> {
    periodic_flip(v, p.tau, p.flip_offset)
}

/// `v1 + cyclic_shift(v2, phi)`, the combined series before the joint flip.
pub fn shifted_sum(v1: &VoltageSeries, v2: &VoltageSeries, phi: usize) -> Result<VoltageSeries> {
    Error::ensure_same_len(v1.len(), v2.len())?;
    let d = v1.len();
    let (a, b) = (v1.samples(), v2.samples());
    let samples = (0..d).map(|i| a[i] + b[(i + phi) % d]).collect();
    VoltageSeries::new(samples, v1.sample_rate())
}

/// Two-voltage pipeline: delay `v2` by `phi`, add to `v1`, then flip the sum.
pub fn intervene_pair(
    v1: &VoltageSeries,
    v2: &VoltageSeries,
    p: &InterventionParams,
) -> Result<VoltageSeries> {
    p.validate()?;
    let combined = shifted_sum(v1, v2, p.phi)?;
    periodic_flip(&combined, p.tau, p.flip_offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(x: &[f64]) -> VoltageSeries {
        VoltageSeries::new(x.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn flip_examples() {
        let v = series(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            periodic_flip(&v, 2, 0).unwrap().samples(),
            &[-1.0, -2.0, 3.0, 4.0]
        );
        assert_eq!(
            periodic_flip(&v, 4, 0).unwrap().samples(),
            &[-1.0, -2.0, -3.0, -4.0]
        );
        assert_eq!(
            periodic_flip(&v, 9, 0).unwrap().samples(),
            &[-1.0, -2.0, -3.0, -4.0]
        );
        // offset shifts the schedule: samples before the offset sit in block -1
        assert_eq!(
            periodic_flip(&v, 2, 1).unwrap().samples(),
            &[1.0, -2.0, -3.0, 4.0]
        );
        assert_eq!(periodic_flip(&v, 4, 4).unwrap().samples(), v.samples());
        assert!(periodic_flip(&v, 0, 0).is_err());
    }

    #[test]
    fn shift_examples() {
        let v = series(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(cyclic_shift(&v, 1).samples(), &[2.0, 3.0, 4.0, 1.0]);
        assert_eq!(cyclic_shift(&v, 0), v);
        assert_eq!(cyclic_shift(&v, 4), v);
        assert_eq!(cyclic_shift(&v, 5), cyclic_shift(&v, 1));
    }

    #[test]
    fn matrix_examples() {
        let m = Intervention::Flip { tau: 5, offset: 0 }.matrix(3).unwrap();
        assert_eq!(m, -DMatrix::<f64>::identity(3, 3));

        let m = Intervention::Shift { phi: 1 }.matrix(3).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 1., 1., 0., 0.]);
        assert_eq!(m, expected);
        assert!(Intervention::Flip { tau: 0, offset: 0 }.matrix(3).is_err());
        assert!(Intervention::Shift { phi: 0 }.matrix(0).is_err());
    }

    #[test]
    fn pair_without_flip_or_shift_is_plain_sum() {
        let v1 = series(&[1.0, -2.0, 0.5]);
        let v2 = series(&[0.5, 0.5, -1.0]);
        let p = InterventionParams::new(3, 0, 3).unwrap();
        assert_eq!(
            intervene_pair(&v1, &v2, &p).unwrap().samples(),
            &[1.5, -1.5, -0.5]
        );
    }

    #[test]
    fn pair_cancellation_is_undone_by_shift() {
        // v2 is minus v1 delayed by one sample; shifting by 1 realigns it so
        // the sum vanishes, whereas phi = 0 leaves a residual.
        let v1 = series(&[1.0, 2.0, -3.0, 0.5]);
        let v2 = series(&[-0.5, -1.0, -2.0, 3.0]);
        let p = InterventionParams::new(100, 1, 100).unwrap();
        let out = intervene_pair(&v1, &v2, &p).unwrap();
        assert!(out.samples().iter().all(|&x| x == 0.0));
        let p0 = InterventionParams { phi: 0, ..p };
        assert!(intervene_pair(&v1, &v2, &p0).unwrap().rms() > 0.0);
    }

    #[test]
    fn pair_phase_alignment_doubles_amplitude() {
        // Closed form: sin(x) + sin(x + delta * 2pi/P) has amplitude
        // 2|cos(pi delta / P)|; the half-period gap cancels at phi = 0.
        let period = 20;
        let gap = 10;
        let d = 200;
        let w = 2.0 * std::f64::consts::PI / period as f64;
        let v1 = VoltageSeries::new((0..d).map(|i| (w * i as f64).sin()).collect(), 1.0).unwrap();
        let v2 = VoltageSeries::new(
            (0..d)
                .map(|i| (w * (i as f64 - gap as f64)).sin())
                .collect(),
            1.0,
        )
        .unwrap();
        let no_flip = |phi| InterventionParams::new(d, phi, d).unwrap();
        let aligned = intervene_pair(&v1, &v2, &no_flip(gap)).unwrap();
        let unshifted = intervene_pair(&v1, &v2, &no_flip(0)).unwrap();
        let peak = aligned.samples().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((peak - 2.0).abs() < 1e-9);
        assert!((aligned.rms() - 2.0 * v1.rms()).abs() < 1e-9);
        assert!(unshifted.rms() < 1e-9);
    }

    #[test]
    fn pair_rejects_mismatched_lengths() {
        let p = InterventionParams::new(1, 0, 0).unwrap();
        assert!(matches!(
            intervene_pair(&series(&[1.0]), &series(&[1.0, 2.0]), &p),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn idle_schedule_never_flips() {
        let v = VoltageSeries::new((0..30).map(|i| i as f64 - 10.0).collect(), 1.0).unwrap();
        let p = InterventionParams::idle(30, 0);
        assert_eq!(intervene_single(&v, &p).unwrap(), v);
        let tail = v.slice(20, 30).unwrap();
        assert_eq!(intervene_single(&tail, &p.continued(20)).unwrap(), tail);
    }

    #[test]
    fn continued_schedule_matches_full_series() {
        let v = VoltageSeries::new((0..37).map(|i| i as f64 + 1.0).collect(), 1.0).unwrap();
        let p = InterventionParams::new(4, 0, 3).unwrap();
        let full = intervene_single(&v, &p).unwrap();
        let n = 29;
        let tail = v.slice(n, v.len()).unwrap();
        let tail_out = intervene_single(&tail, &p.continued(n)).unwrap();
        assert_eq!(tail_out.samples(), &full.samples()[n..]);
    }
}
