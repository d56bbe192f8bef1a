//! End-to-end comparisons of raw output, diode bridge and trained
//! interventions, all scored on the held-out suffix.

use rayon::prelude::*;

use crate::cost::{c_pos, Pipeline};
use crate::diode::DiodeBridgeParams;
use crate::error::{Error, Result};
use crate::interventions::InterventionParams;
use crate::optimize::{fit_and_evaluate, MethodKind, OptimizerReport, SearchSpace};
use crate::signal::{add_noise, SeriesSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub train_fraction: f64,
    pub diode: DiodeBridgeParams,
    pub method: MethodKind,
    pub tau_max: usize,
    pub phi_max: usize,
    pub seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            diode: DiodeBridgeParams::default(),
            method: MethodKind::Ga,
            tau_max: 50,
            phi_max: 100,
            seed: 0,
        }
    }
}

impl CompareConfig {
    pub fn validate(&self) -> Result<()> {
        self.diode.validate()?;
        if self.tau_max < 1 {
            return Err(Error::config("tau_max must be at least 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::config("train fraction must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Raw,
    Bridge,
    Intervention,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::Raw => "raw data",
            Case::Bridge => "DB",
            Case::Intervention => "IEH",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Case::Raw => "raw",
            Case::Bridge => "db",
            Case::Intervention => "ieh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub case: Case,
    pub vrms: f64,
    pub c_pos_per_sample: f64,
    pub c_total: f64,
}

/// Raw / bridge / intervention rows for one input mode, on the test split.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeComparison {
    pub rows: [CompareRow; 3],
    /// Trained parameters as applied to the test split.
    pub test_params: InterventionParams,
    pub report: OptimizerReport,
}

impl ModeComparison {
    pub fn row(&self, case: Case) -> &CompareRow {
        self.rows
            .iter()
            .find(|r| r.case == case)
            .expect("all cases present")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub single: ModeComparison,
    pub pair: Option<ModeComparison>,
}

fn train_on(
    train: &Pipeline,
    test: &Pipeline,
    cfg: &CompareConfig,
    seed: u64,
) -> Result<OptimizerReport> {
    let space = SearchSpace::for_pipeline(train, cfg.tau_max, cfg.phi_max)?;
    let method = cfg.method.configure(space, seed);
    fit_and_evaluate(train, test, &method, train.len())
}

/// Trains on the prefix of `pipeline` and tabulates the three cases on the
/// suffix.
///
/// For two voltages the "raw" row is the delayed sum entering the flip
/// stage, so that the intervention row differs from it only by the flip.
/// The bridge row rectifies each source separately and sums.
pub fn compare_mode(pipeline: &Pipeline, cfg: &CompareConfig) -> Result<ModeComparison> {
    cfg.validate()?;
    let (train, test) = pipeline.split(cfg.train_fraction)?;
    let report = train_on(&train, &test, cfg, cfg.seed)?;
    let test_params = report.best.continued(train.len());

    let raw = test.combined(test_params.phi);
    let ieh = test.cost(&test_params)?;
    let raw_pos = c_pos(&raw);
    let (_, db) = test.bridge(&cfg.diode);
    let len = test.len() as f64;
    let rows = [
        CompareRow {
            case: Case::Raw,
            vrms: raw.rms(),
            c_pos_per_sample: raw_pos / len,
            c_total: raw_pos + ieh.c_vrms,
        },
        CompareRow {
            case: Case::Bridge,
            vrms: db.vrms_out,
            c_pos_per_sample: db.c_pos_per_sample(),
            c_total: db.c_total,
        },
        CompareRow {
            case: Case::Intervention,
            vrms: ieh.vrms_out,
            c_pos_per_sample: ieh.c_pos_per_sample(),
            c_total: ieh.c_total,
        },
    ];
    Ok(ModeComparison {
        rows,
        test_params,
        report,
    })
}

/// Single-voltage comparison on `v1`, plus the two-voltage one when `v2`
/// is present.
pub fn compare(set: &SeriesSet, cfg: &CompareConfig) -> Result<CompareTable> {
    let single = compare_mode(&Pipeline::single(set.v1.clone()), cfg)?;
    let pair = match &set.v2 {
        Some(v2) => Some(compare_mode(
            &Pipeline::pair(set.v1.clone(), v2.clone())?,
            cfg,
        )?),
        None => None,
    };
    Ok(CompareTable { single, pair })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrSweepConfig {
    /// Linear signal-to-noise power ratios.
    pub snrs: Vec<f64>,
    /// Noise realizations averaged per SNR.
    pub realizations: usize,
    pub compare: CompareConfig,
}

impl Default for SnrSweepConfig {
    fn default() -> Self {
        Self {
            snrs: vec![0.5, 1.0, 2.0, 5.0, 10.0, 20.0],
            realizations: 10,
            compare: CompareConfig::default(),
        }
    }
}

/// Averages over the realizations at one SNR. Costs are un-normalized
/// totals on the test split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrRow {
    pub snr: f64,
    pub vrms_ieh: f64,
    pub vrms_db: f64,
    pub c_ieh: f64,
    pub c_db: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for stream `stream` of realization `k` at SNR index `i`.
fn derive_seed(base: u64, i: usize, k: usize, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base ^ i as u64) ^ k as u64) ^ stream)
}

/// Adds noise at each SNR, retrains the intervention on every noisy
/// realization's training prefix, and scores intervention and bridge on its
/// test suffix. Uses two-voltage mode when the set holds two series.
pub fn snr_sweep(set: &SeriesSet, cfg: &SnrSweepConfig) -> Result<Vec<SnrRow>> {
    cfg.compare.validate()?;
    if cfg.snrs.is_empty() {
        return Err(Error::config("SNR list must not be empty"));
    }
    if cfg.realizations < 1 {
        return Err(Error::config(
            "at least one realization per SNR is required",
        ));
    }
    if let Some(bad) = cfg.snrs.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::config(format!(
            "SNR values must be positive, got {bad}"
        )));
    }

    let jobs: Vec<(usize, usize)> = (0..cfg.snrs.len())
        .flat_map(|i| (0..cfg.realizations).map(move |k| (i, k)))
        .collect();
    let base = cfg.compare.seed;
    let outcomes: Vec<[f64; 4]> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let snr = cfg.snrs[i];
            let noisy = SeriesSet {
                v1: add_noise(&set.v1, snr, derive_seed(base, i, k, 1))?,
                v2: set
                    .v2
                    .as_ref()
                    .map(|v2| add_noise(v2, snr, derive_seed(base, i, k, 2)))
                    .transpose()?,
            };
            let pipeline = Pipeline::from_set(&noisy)?;
            let (train, test) = pipeline.split(cfg.compare.train_fraction)?;
            let report = train_on(&train, &test, &cfg.compare, derive_seed(base, i, k, 3))?;
            let ieh = report.test_cost.expect("filled by fit_and_evaluate");
            let (_, db) = test.bridge(&cfg.compare.diode);
            Ok([ieh.vrms_out, db.vrms_out, ieh.c_total, db.c_total])
        })
        .collect::<Result<_>>()?;

    let n = cfg.realizations as f64;
    Ok(cfg
        .snrs
        .iter()
        .enumerate()
        .map(|(i, &snr)| {
            let mut acc = [0.0; 4];
            for o in &outcomes[i * cfg.realizations..(i + 1) * cfg.realizations] {
                for (a, x) in acc.iter_mut().zip(o) {
                    *a += x;
                }
            }
            SnrRow {
                snr,
                vrms_ieh: acc[0] / n,
                vrms_db: acc[1] / n,
                c_ieh: acc[2] / n,
                c_db: acc[3] / n,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::VoltageSeries;

    #[test]
    fn dc_input_stays_positive() {
        let v = VoltageSeries::new(vec![0.8; 100], 100.0).unwrap();
        let cfg = CompareConfig {
            method: MethodKind::Grid,
            tau_max: 5,
            ..Default::default()
        };
        let table = compare(&SeriesSet::single(v), &cfg).unwrap();
        let raw = table.single.row(Case::Raw);
        let ieh = table.single.row(Case::Intervention);
        let db = table.single.row(Case::Bridge);
        assert_eq!(raw.c_pos_per_sample, 0.0);
        assert_eq!(ieh.c_pos_per_sample, 0.0);
        assert_eq!(ieh.vrms, raw.vrms);
        assert!(db.vrms < raw.vrms);
    }

    #[test]
    fn single_snr_gives_one_row() {
        let v = VoltageSeries::new((0..400).map(|i| (i as f64 * 0.314).sin()).collect(), 100.0)
            .unwrap();
        let cfg = SnrSweepConfig {
            snrs: vec![3.0],
            realizations: 2,
            compare: CompareConfig {
                method: MethodKind::Grid,
                tau_max: 12,
                ..Default::default()
            },
        };
        let rows = snr_sweep(&SeriesSet::single(v), &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].snr, 3.0);
        assert!(rows[0].vrms_ieh >= rows[0].vrms_db);
    }

    #[test]
    fn sweep_rejects_bad_config() {
        let v = VoltageSeries::new(vec![1.0, -1.0, 1.0, -1.0, 1.0], 1.0).unwrap();
        let set = SeriesSet::single(v);
        let mut cfg = SnrSweepConfig::default();
        cfg.snrs.clear();
        assert!(snr_sweep(&set, &cfg).is_err());
        let cfg = SnrSweepConfig {
            snrs: vec![-1.0],
            ..Default::default()
        };
        assert!(snr_sweep(&set, &cfg).is_err());
    }

    #[test]
    fn seeds_are_distinct_per_stream() {
        let a = derive_seed(0, 0, 0, 1);
        assert_ne!(a, derive_seed(0, 0, 0, 2));
        assert_ne!(a, derive_seed(0, 0, 1, 1));
        assert_ne!(a, derive_seed(0, 1, 0, 1));
        assert_ne!(a, derive_seed(1, 0, 0, 1));
    }
}
