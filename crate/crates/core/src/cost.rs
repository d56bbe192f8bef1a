//! Positivity and RMS costs.
//!
//! All costs are un-normalized (volts², the factor `d` retained). The total
//! cost is `C = C_VRMS + C_POS` with unit weights; `C_VRMS` measures the gap
//! between the achieved `d V_RMS^2` and the best value reachable by sign
//! flips and permutations, `C_POS` how far the output is from nonnegative.

use crate::diode::{bridge_per_source_then_sum, bridge_rectify, DiodeBridgeParams};
use crate::error::{Error, Result};
use crate::interventions::{
    flip_sign, intervene_pair, intervene_single, shifted_sum, InterventionParams,
};
use crate::signal::{dot_slices, train_len, SeriesSet, VoltageSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub c_pos: f64,
    pub c_vrms: f64,
    pub c_total: f64,
    /// RMS of the evaluated output.
    pub vrms_out: f64,
    /// RMS bound reachable by sign flips and permutations of the inputs.
    pub vrms_max: f64,
    /// Number of samples the costs were summed over.
    pub len: usize,
}

impl CostBreakdown {
    pub fn new(c_pos: f64, c_vrms: f64, vrms_out: f64, vrms_max: f64, len: usize) -> Self {
        Self {
            c_pos,
            c_vrms,
            c_total: c_pos + c_vrms,
            vrms_out,
            vrms_max,
            len,
        }
    }

    /// `C_POS / L` with `L = d`.
    pub fn c_pos_per_sample(&self) -> f64 {
        self.c_pos / self.len as f64
    }

    pub fn total_per_sample(&self) -> f64 {
        self.c_total / self.len as f64
    }
}

#[inline]
fn c_pos_term(x: f64) -> f64 {
    let a = x.abs();
    let tilde = a + x;
    4.0 * a * a - tilde * tilde
}

/// `4 <|V|,|V|> - <Ṽ,Ṽ>` with `Ṽ = |V| + V`, summed sample by sample so that
/// nonnegative samples contribute exactly zero.
pub fn c_pos(v: &VoltageSeries) -> f64 {
    v.samples().iter().map(|&x| c_pos_term(x)).sum()
}

fn sorted_abs_desc(v: &VoltageSeries) -> Vec<f64> {
    let mut a: Vec<f64> = v.samples().iter().map(|x| x.abs()).collect();
    a.sort_unstable_by(|x, y| y.total_cmp(x));
    a
}

/// Largest `<V1'+V2', V1'+V2'>` over sign flips and permutations of each
/// input: `<v1,v1> + <v2,v2> + 2 <|v1|↓, |v2|↓>`.
pub fn rearrangement_bound(v1: &VoltageSeries, v2: &VoltageSeries) -> Result<f64> {
    Error::ensure_same_len(v1.len(), v2.len())?;
    let cross = dot_slices(&sorted_abs_desc(v1), &sorted_abs_desc(v2));
    Ok(v1.energy() + v2.energy() + 2.0 * cross)
}

pub fn c_vrms_pair(
    v1: &VoltageSeries,
    v2: &VoltageSeries,
    combined: &VoltageSeries,
) -> Result<f64> {
    Error::ensure_same_len(v1.len(), combined.len())?;
    Ok(rearrangement_bound(v1, v2)? - combined.energy())
}

/// Single-voltage form; the bound is the input norm itself.
pub fn c_vrms_single(v: &VoltageSeries, transformed: &VoltageSeries) -> Result<f64> {
    Error::ensure_same_len(v.len(), transformed.len())?;
    Ok(v.energy() - transformed.energy())
}

pub fn total_cost_single(v: &VoltageSeries, p: &InterventionParams) -> Result<CostBreakdown> {
    let out = intervene_single(v, p)?;
    Ok(CostBreakdown::new(
        c_pos(&out),
        c_vrms_single(v, &out)?,
        out.rms(),
        v.rms(),
        v.len(),
    ))
}

/// `C_VRMS` is taken on the delayed sum before the joint flip, `C_POS` on
/// the flipped output.
pub fn total_cost_pair(
    v1: &VoltageSeries,
    v2: &VoltageSeries,
    p: &InterventionParams,
) -> Result<CostBreakdown> {
    let out = intervene_pair(v1, v2, p)?;
    let pre_flip = shifted_sum(v1, v2, p.phi)?;
    let bound = rearrangement_bound(v1, v2)?;
    Ok(CostBreakdown::new(
        c_pos(&out),
        c_vrms_pair(v1, v2, &pre_flip)?,
        out.rms(),
        (bound / v1.len() as f64).sqrt(),
        v1.len(),
    ))
}

/// Cost of the diode-bridge output for a single source.
pub fn bridge_cost_single(
    v: &VoltageSeries,
    diode: &DiodeBridgeParams,
) -> (VoltageSeries, CostBreakdown) {
    let load = bridge_rectify(v, diode).load;
    let cost = CostBreakdown::new(
        c_pos(&load),
        v.energy() - load.energy(),
        load.rms(),
        v.rms(),
        v.len(),
    );
    (load, cost)
}

/// Cost of per-source rectification followed by summation.
pub fn bridge_cost_pair(
    v1: &VoltageSeries,
    v2: &VoltageSeries,
    diode: &DiodeBridgeParams,
) -> Result<(VoltageSeries, CostBreakdown)> {
    let load = bridge_per_source_then_sum(v1, v2, diode)?;
    let bound = rearrangement_bound(v1, v2)?;
    let cost = CostBreakdown::new(
        c_pos(&load),
        bound - load.energy(),
        load.rms(),
        (bound / v1.len() as f64).sqrt(),
        v1.len(),
    );
    Ok((load, cost))
}

/// The series an intervention acts on, with the parameter-independent parts
/// of the cost precomputed. Evaluation is a single fused pass.
#[derive(Debug, Clone, PartialEq)]
pub enum Pipeline {
    Single {
        v: VoltageSeries,
    },
    Pair {
        v1: VoltageSeries,
        v2: VoltageSeries,
        bound: f64,
    },
}

impl Pipeline {
    pub fn single(v: VoltageSeries) -> Self {
        Pipeline::Single { v }
    }

    pub fn pair(v1: VoltageSeries, v2: VoltageSeries) -> Result<Self> {
        let bound = rearrangement_bound(&v1, &v2)?;
        Ok(Pipeline::Pair { v1, v2, bound })
    }

    /// Pair pipeline when the set holds two series, single otherwise.
    pub fn from_set(set: &SeriesSet) -> Result<Self> {
        match &set.v2 {
            Some(v2) => Self::pair(set.v1.clone(), v2.clone()),
            None => Ok(Self::single(set.v1.clone())),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Pipeline::Single { v } => v.len(),
            Pipeline::Pair { v1, .. } => v1.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, Pipeline::Pair { .. })
    }

    /// Contiguous train prefix and test suffix of every input.
    pub fn split(&self, fraction: f64) -> Result<(Pipeline, Pipeline)> {
        let n = train_len(self.len(), fraction)?;
        let end = self.len();
        match self {
            Pipeline::Single { v } => Ok((
                Pipeline::single(v.slice(0, n)?),
                Pipeline::single(v.slice(n, end)?),
            )),
            Pipeline::Pair { v1, v2, .. } => Ok((
                Pipeline::pair(v1.slice(0, n)?, v2.slice(0, n)?)?,
                Pipeline::pair(v1.slice(n, end)?, v2.slice(n, end)?)?,
            )),
        }
    }

    /// Series entering the flip stage: the input itself, or the delayed sum.
    pub fn combined(&self, phi: usize) -> VoltageSeries {
        match self {
            Pipeline::Single { v } => v.clone(),
            Pipeline::Pair { v1, v2, .. } => {
                shifted_sum(v1, v2, phi).expect("pair lengths checked at construction")
            }
        }
    }

    /// The rectified output under `p`.
    pub fn apply(&self, p: &InterventionParams) -> Result<VoltageSeries> {
        match self {
            Pipeline::Single { v } => intervene_single(v, p),
            Pipeline::Pair { v1, v2, .. } => intervene_pair(v1, v2, p),
        }
    }

    /// Total cost of `p`; equal to [`total_cost_single`] / [`total_cost_pair`].
    pub fn cost(&self, p: &InterventionParams) -> Result<CostBreakdown> {
        p.validate()?;
        let (tau, offset) = (p.tau, p.flip_offset);
        match self {
            Pipeline::Single { v } => {
                let (mut e_in, mut e_out, mut pos) = (0.0, 0.0, 0.0);
                for (i, &x) in v.samples().iter().enumerate() {
                    let y = flip_sign(i, tau, offset) * x;
                    e_in += x * x;
                    e_out += y * y;
                    pos += c_pos_term(y);
                }
                let d = v.len() as f64;
                Ok(CostBreakdown::new(
                    pos,
                    e_in - e_out,
                    (e_out / d).sqrt(),
                    (e_in / d).sqrt(),
                    v.len(),
                ))
            }
            Pipeline::Pair { v1, v2, bound } => {
                let d = v1.len();
                let (a, b) = (v1.samples(), v2.samples());
                let phi = p.phi % d;
                let (mut e_pre, mut e_out, mut pos) = (0.0, 0.0, 0.0);
                for i in 0..d {
                    let j = if i + phi < d { i + phi } else { i + phi - d };
                    let s = a[i] + b[j];
                    let y = flip_sign(i, tau, offset) * s;
                    e_pre += s * s;
                    e_out += y * y;
                    pos += c_pos_term(y);
                }
                let df = d as f64;
                Ok(CostBreakdown::new(
                    pos,
                    bound - e_pre,
                    (e_out / df).sqrt(),
                    (bound / df).sqrt(),
                    d,
                ))
            }
        }
    }

    /// Diode-bridge baseline on the same inputs.
    pub fn bridge(&self, diode: &DiodeBridgeParams) -> (VoltageSeries, CostBreakdown) {
        match self {
            Pipeline::Single { v } => bridge_cost_single(v, diode),
            Pipeline::Pair { v1, v2, .. } => {
                bridge_cost_pair(v1, v2, diode).expect("pair lengths checked at construction")
            }
        }
    }
}
