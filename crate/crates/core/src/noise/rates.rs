//! Significance thresholds from noise-maxima rate tables.

use serde::{Deserialize, Serialize};

use super::RateTable;
use crate::error::{Error, Result};

/// Fewest simulated maxima above a threshold for it to count as resolved.
const MIN_SUPPORT: u64 = 10;

/// Acceptable false-detection rate at each scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateTarget {
    /// Expected noise maxima per footprint.
    PerFootprint(f64),
    /// Expected noise maxima per series of `length` samples.
    PerSeries { events: f64, length: usize },
}

impl RateTarget {
    /// The target converted to expected maxima per footprint of length `footprint`.
    pub fn per_footprint(&self, footprint: f64) -> f64 {
        match *self {
            RateTarget::PerFootprint(r) => r,
            RateTarget::PerSeries { events, length } => events * footprint / length as f64,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            RateTarget::PerFootprint(r) => r,
            RateTarget::PerSeries { events, .. } => events,
        }
    }
}

/// Per-scale cutoffs in normalized magnitude `w̃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub cutoffs: Vec<f64>,
    pub target: RateTarget,
}

/// Inverts each table's survival function at the target rate.
///
/// Tables must cover scales `1..n_scales-1`; the first and last scales take
/// the cutoffs of their interior neighbours.
pub fn threshold_for_rate(
    tables: &[RateTable],
    n_scales: usize,
    target: RateTarget,
) -> Result<Thresholds> {
    if !(target.value() > 0.0) {
        return Err(Error::Config("target rate must be positive".into()));
    }
    if n_scales < 3 {
        return Err(Error::Config("thresholds need at least three scales".into()));
    }
    let mut cutoffs = vec![f64::NAN; n_scales];
    for j in 1..n_scales - 1 {
        let table = tables.iter().find(|t| t.scale_index == j).ok_or_else(|| {
            Error::Config(format!("no rate table for scale index {j}"))
        })?;
        cutoffs[j] = invert(table, target.per_footprint(table.footprint))?;
    }
    cutoffs[0] = cutoffs[1];
    cutoffs[n_scales - 1] = cutoffs[n_scales - 2];
    Ok(Thresholds { cutoffs, target })
}

fn invert(table: &RateTable, rate: f64) -> Result<f64> {
    let edges: Vec<f64> = table.edges().collect();
    let values: Vec<f64> = table.survival_values().collect();
    if rate >= values[0] {
        return Ok(0.0);
    }
    let i = values.iter().position(|&v| v <= rate).ok_or_else(|| insufficient(table, rate))?;
    if table.support[i - 1] < MIN_SUPPORT {
        return Err(insufficient(table, rate));
    }
    let (v0, v1) = (values[i - 1], values[i]);
    let t = (v0 - rate) / (v0 - v1);
    Ok(edges[i - 1] + t * (edges[i] - edges[i - 1]))
}

fn insufficient(table: &RateTable, rate: f64) -> Error {
    Error::InsufficientSamples(format!(
        "scale index {}: rate {rate:.3e} per footprint is below what {} draws resolve; increase n_realizations",
        table.scale_index, table.n_samples
    ))
}

#[cfg(test)]
mod tests {
    use super::super::simulate::{Histogram, Stratum};
    use super::*;

    fn table(values: &[f64], scale_index: usize) -> RateTable {
        let mut hist = Histogram::new();
        for &v in values {
            hist.record(v);
        }
        RateTable::from_strata(scale_index, 1.0, 1.0, 10.0, &[Stratum { weight: 0.01, hist }], 1000, 0, 0)
    }

    #[test]
    fn total_rate_gives_zero_cutoff() {
        let vals: Vec<f64> = (0..50).map(|i| 0.05 * i as f64).collect();
        let t = table(&vals, 1);
        let th = threshold_for_rate(&[t.clone()], 3, RateTarget::PerFootprint(t.total_rate())).unwrap();
        assert_eq!(th.cutoffs, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn inversion_is_linear_between_edges() {
        // 100 values uniform on [0, 2): survival falls linearly from 1.0 to 0 per footprint.
        let vals: Vec<f64> = (0..100).map(|i| 0.02 * i as f64 + 0.001).collect();
        let t = table(&vals, 1);
        let th = threshold_for_rate(&[t.clone()], 3, RateTarget::PerFootprint(0.5)).unwrap();
        assert!((th.cutoffs[1] - 1.0).abs() < 0.03);
        assert!((t.survival_at(th.cutoffs[1]) - 0.5).abs() < 1e-12);
        assert_eq!(th.cutoffs[0], th.cutoffs[1]);
    }

    #[test]
    fn per_series_conversion() {
        let target = RateTarget::PerSeries { events: 1e-3, length: 12000 };
        assert!((target.per_footprint(120.0) - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn unresolvable_rate_is_an_error() {
        let vals: Vec<f64> = (0..30).map(|i| 0.05 * i as f64).collect();
        let t = table(&vals, 1);
        let err = threshold_for_rate(&[t], 3, RateTarget::PerFootprint(1e-6)).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples(_)));
        assert!(threshold_for_rate(&[], 3, RateTarget::PerFootprint(0.1)).is_err());
    }
}
