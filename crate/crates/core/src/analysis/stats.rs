//! Per-case statistics from spectra or histories and their probability-weighted aggregate.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::fatigue::{combine_del, rainflow_del, spectral_del, spectral_moments, FatigueSettings};
use crate::analysis::spectra::OutputSpectra;
use crate::environment::LoadCase;
use crate::error::{ensure, Error, Result};
use crate::slow::linear::OUTPUTS;
use crate::slow::simulate::{ch, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Freq,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalStats {
    pub mean: f64,
    pub std: f64,
    /// Expected largest value over the case duration.
    pub max: f64,
    /// DEL carrying the case's lifetime share.
    pub del: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStatistics {
    pub design_id: String,
    pub case_id: String,
    pub source: Source,
    pub wind_speed: f64,
    pub hs: f64,
    pub tp: f64,
    pub weight: f64,
    pub signals: BTreeMap<String, SignalStats>,
}

/// One CSV row per case and signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub design_id: String,
    pub case_id: String,
    pub source: Source,
    pub wind_speed: f64,
    pub hs: f64,
    pub tp: f64,
    pub weight: f64,
    pub signal: String,
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub del: f64,
}

impl CaseStatistics {
    pub fn signal(&self, name: &str) -> Result<&SignalStats> {
        self.signals
            .get(name)
            .ok_or_else(|| Error::InvalidParameter(format!("no signal {name} in case {}", self.case_id)))
    }

    pub fn rows(&self) -> Vec<StatRow> {
        self.signals
            .iter()
            .map(|(k, s)| StatRow {
                design_id: self.design_id.clone(),
                case_id: self.case_id.clone(),
                source: self.source,
                wind_speed: self.wind_speed,
                hs: self.hs,
                tp: self.tp,
                weight: self.weight,
                signal: k.clone(),
                mean: s.mean,
                std: s.std,
                max: s.max,
                del: s.del,
            })
            .collect()
    }

    /// Regroup rows into cases, in order of first appearance.
    pub fn from_rows(rows: &[StatRow]) -> Vec<CaseStatistics> {
        let mut out: Vec<CaseStatistics> = Vec::new();
        for r in rows {
            let pos = out
                .iter()
                .position(|c| c.design_id == r.design_id && c.case_id == r.case_id && c.source == r.source);
            let i = match pos {
                Some(i) => i,
                None => {
                    out.push(CaseStatistics {
                        design_id: r.design_id.clone(),
                        case_id: r.case_id.clone(),
                        source: r.source,
                        wind_speed: r.wind_speed,
                        hs: r.hs,
                        tp: r.tp,
                        weight: r.weight,
                        signals: BTreeMap::new(),
                    });
                    out.len() - 1
                }
            };
            out[i].signals.insert(
                r.signal.clone(),
                SignalStats {
                    mean: r.mean,
                    std: r.std,
                    max: r.max,
                    del: r.del,
                },
            );
        }
        out
    }
}

fn header(design_id: &str, case: &LoadCase, source: Source) -> CaseStatistics {
    CaseStatistics {
        design_id: design_id.to_string(),
        case_id: case.id(),
        source,
        wind_speed: case.wind_speed,
        hs: case.hs,
        tp: case.tp,
        weight: case.weight,
        signals: BTreeMap::new(),
    }
}

/// Statistics of the linear response; `means` holds the operating-point outputs.
pub fn spectral_statistics(
    design_id: &str,
    case: &LoadCase,
    means: &[f64],
    spectra: &OutputSpectra,
    fatigue: &FatigueSettings,
) -> Result<CaseStatistics> {
    ensure!(means.len() == OUTPUTS.len(), InvalidParameter, "one mean per output expected");
    let duration = case.duration - case.transient;
    let mut st = header(design_id, case, Source::Freq);
    for (k, name) in OUTPUTS.iter().enumerate() {
        let psd = spectra.total(k);
        let [l0, _, l2, _] = spectral_moments(&spectra.omega, &psd);
        let std = l0.max(0.0).sqrt();
        let crossings = if l0 > 0.0 { (l2 / l0).sqrt() / (2.0 * PI) * duration } else { 0.0 };
        let peak = if crossings > 1.0 { (2.0 * crossings.ln()).sqrt() } else { 0.0 };
        st.signals.insert(
            name.to_string(),
            SignalStats {
                mean: means[k],
                std,
                max: means[k].abs() + peak * std,
                del: spectral_del(&spectra.omega, &psd, case.weight, fatigue)?,
            },
        );
    }
    Ok(st)
}

/// Output names paired with simulation channels.
pub const SERIES_CHANNELS: [(&str, usize); 8] = [
    ("rotor_speed", ch::ROTOR),
    ("tower_deflection", ch::TOWER),
    ("tower_base_moment", ch::MYT),
    ("power", ch::POWER),
    ("tower_top_acceleration", ch::ACC),
    ("platform_pitch", ch::PITCH),
    ("platform_surge", ch::SURGE),
    ("blade_pitch", ch::BLADE),
];

/// Statistics of a simulated history (transient already removed).
pub fn series_statistics(
    design_id: &str,
    case: &LoadCase,
    ts: &TimeSeries,
    fatigue: &FatigueSettings,
) -> Result<CaseStatistics> {
    ensure!(ts.len() >= 2, InvalidParameter, "history too short");
    let duration = ts.len() as f64 * ts.dt;
    let mut st = header(design_id, case, Source::Time);
    for (name, c) in SERIES_CHANNELS {
        let x = &ts.columns[c];
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        st.signals.insert(
            name.to_string(),
            SignalStats {
                mean,
                std,
                max,
                del: rainflow_del(x, duration, case.weight, fatigue)?,
            },
        );
    }
    Ok(st)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSignal {
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub del: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignStatistics {
    pub design_id: String,
    pub source: Source,
    pub cases: usize,
    pub signals: BTreeMap<String, WeightedSignal>,
}

/// Probability-weighted aggregate of one design's cases: STDs as weighted RMS, DELs
/// combined in the Wöhler norm, maxima as the largest case maximum.
pub fn weight_statistics(cases: &[CaseStatistics], fatigue: &FatigueSettings) -> Result<DesignStatistics> {
    ensure!(!cases.is_empty(), InvalidParameter, "no cases to aggregate");
    let first = &cases[0];
    ensure!(
        cases.iter().all(|c| c.design_id == first.design_id && c.source == first.source),
        InvalidParameter,
        "cases from different designs or sources"
    );
    let wsum: f64 = cases.iter().map(|c| c.weight).sum();
    ensure!(wsum > 0.0, InvalidParameter, "case weights sum to zero");
    let mut signals = BTreeMap::new();
    for name in first.signals.keys() {
        let mut mean = 0.0;
        let mut var = 0.0;
        let mut max = 0.0f64;
        let mut dels = Vec::with_capacity(cases.len());
        for c in cases {
            let s = c.signal(name)?;
            mean += c.weight * s.mean;
            var += c.weight * s.std * s.std;
            max = max.max(s.max);
            dels.push(s.del);
        }
        signals.insert(
            name.clone(),
            WeightedSignal {
                mean: mean / wsum,
                std: (var / wsum).sqrt(),
                max,
                del: combine_del(&dels, fatigue.wohler),
            },
        );
    }
    Ok(DesignStatistics {
        design_id: first.design_id.clone(),
        source: first.source,
        cases: cases.len(),
        signals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(id: &str, w: f64, std: f64, del: f64) -> CaseStatistics {
        let mut signals = BTreeMap::new();
        signals.insert(
            "x".to_string(),
            SignalStats {
                mean: 1.0,
                std,
                max: 3.0 * std,
                del,
            },
        );
        CaseStatistics {
            design_id: "d".into(),
            case_id: id.into(),
            source: Source::Freq,
            wind_speed: 10.0,
            hs: 2.0,
            tp: 8.0,
            weight: w,
            signals,
        }
    }

    #[test]
    fn single_case_is_its_own_aggregate() {
        let f = FatigueSettings::default();
        let a = weight_statistics(&[case("a", 1.0, 2.0, 5.0)], &f).unwrap();
        let s = &a.signals["x"];
        assert!((s.std - 2.0).abs() < 1e-12);
        assert!((s.del - 5.0).abs() < 1e-12);
    }

    #[test]
    fn aggregate_ignores_order_and_survives_rows() {
        let f = FatigueSettings::default();
        let cs = vec![case("a", 0.2, 1.0, 3.0), case("b", 0.5, 2.0, 4.0), case("c", 0.3, 0.5, 1.0)];
        let mut rev = cs.clone();
        rev.reverse();
        let a = weight_statistics(&cs, &f).unwrap();
        let b = weight_statistics(&rev, &f).unwrap();
        assert!((a.signals["x"].del - b.signals["x"].del).abs() < 1e-12);
        assert!((a.signals["x"].std - b.signals["x"].std).abs() < 1e-12);
        let rows: Vec<StatRow> = cs.iter().flat_map(|c| c.rows()).collect();
        assert_eq!(CaseStatistics::from_rows(&rows), cs);
    }
}
