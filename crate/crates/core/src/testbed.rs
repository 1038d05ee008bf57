//! Testbed files: a chart, reference points, a word panel and the recorded
//! calibration constants.
//!
//! Three testbeds ship with the crate. `t11` is the once-punctured torus in
//! shear coordinates, `g2` the closed genus-2 surface in Fenchel–Nielsen
//! coordinates, and `onesw` a bare one-switch track for exact tests.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::CurveWord;
use crate::teich::{punctured_torus_chart, word_panel, Calibration, FnChart, ShearChart};
use crate::traintrack::{self, TrainTrack};

pub const FORMAT: &str = "wick-testbed/1";
pub const PANEL_SIZE: usize = 20;
const PANEL_SEED: u64 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestbedChart {
    Shear { chart: ShearChart },
    Fn { chart: FnChart },
    Track { track: TrainTrack },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Testbed {
    pub format: String,
    pub name: String,
    /// Marking convention: the presentation the chart's words refer to.
    pub marking: String,
    pub chart: TestbedChart,
    /// Conjugacy classes are compared through traces of these words.
    pub panel: Vec<CurveWord>,
    /// Reference coordinate vectors: reduced shears, or `(ℓ, τ)`.
    #[serde(with = "crate::serial::real_rows")]
    pub points: Vec<Vec<f64>>,
    pub calibration: Calibration,
}

impl Testbed {
    pub fn t11() -> Self {
        let chart = punctured_torus_chart();
        let w = |xs: &[i64]| CurveWord::from_signed(xs).expect("static word");
        let extra = [w(&[1, 2]), w(&[1, -2]), w(&[1, 2, -1, -2])];
        Self {
            format: FORMAT.into(),
            name: "t11".into(),
            marking: chart.presentation().describe(),
            chart: TestbedChart::Shear { chart },
            panel: word_panel(2, &extra, PANEL_SIZE, PANEL_SEED),
            points: vec![vec![0.3, -0.7], vec![1.1, 0.4], vec![-0.5, -1.2]],
            calibration: Calibration {
                kappa_l: Some(0.5),
                kappa_g: None,
                kappa_gr: Some(1.0),
            },
        }
    }

    pub fn g2() -> Self {
        let chart = FnChart::genus_two();
        let extra: Vec<CurveWord> = chart.curves.iter().map(|c| c.word.clone()).collect();
        Self {
            format: FORMAT.into(),
            name: "g2".into(),
            marking: chart.presentation().expect("genus 2").describe(),
            chart: TestbedChart::Fn { chart },
            panel: word_panel(4, &extra, PANEL_SIZE, PANEL_SEED),
            points: vec![vec![1.3, 0.8, 2.1, 0.4, -0.3, 0.7], vec![2.0, 2.0, 2.0, 0.0, 0.0, 0.0]],
            calibration: Calibration {
                kappa_l: None,
                kappa_g: Some(0.5),
                kappa_gr: Some(0.5),
            },
        }
    }

    pub fn onesw() -> Self {
        Self {
            format: FORMAT.into(),
            name: "onesw".into(),
            marking: "none: bare track fragment".into(),
            chart: TestbedChart::Track {
                track: traintrack::one_switch(),
            },
            panel: Vec::new(),
            points: Vec::new(),
            calibration: Calibration {
                kappa_l: None,
                kappa_g: None,
                kappa_gr: None,
            },
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name.trim_end_matches(".json") {
            "t11" => Some(Self::t11()),
            "g2" => Some(Self::g2()),
            "onesw" => Some(Self::onesw()),
            _ => None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: Testbed = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if t.format != FORMAT {
            return Err(Error::Format(format!("field `format`: expected {FORMAT:?}, got {:?}", t.format)));
        }
        if let TestbedChart::Fn { chart } = &t.chart {
            chart.validate()?;
        }
        let dim = match &t.chart {
            TestbedChart::Shear { chart } => chart.dim(),
            TestbedChart::Fn { chart } => chart.dim(),
            TestbedChart::Track { .. } => 0,
        };
        if let Some(i) = t.points.iter().position(|p| p.len() != dim) {
            return Err(Error::Format(format!("field `points[{i}]`: expected {dim} coordinates")));
        }
        Ok(t)
    }

    /// Reads a file; bare names of shipped testbeds fall back to the
    /// built-in copies.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(s) => Self::from_json(&s),
            Err(e) => path
                .to_str()
                .filter(|p| !p.contains('/'))
                .and_then(Self::builtin)
                .ok_or_else(|| Error::Format(format!("{}: {e}", path.display()))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("testbeds serialize")
    }

    pub fn shear_chart(&self) -> Result<Arc<ShearChart>> {
        match &self.chart {
            TestbedChart::Shear { chart } => Ok(Arc::new(chart.clone())),
            _ => Err(Error::Format(format!("testbed {} has no shear chart", self.name))),
        }
    }

    pub fn fn_chart(&self) -> Result<Arc<FnChart>> {
        match &self.chart {
            TestbedChart::Fn { chart } => Ok(Arc::new(chart.clone())),
            _ => Err(Error::Format(format!("testbed {} has no FN chart", self.name))),
        }
    }

    /// The testbed's train track: the dual track of a shear chart, the
    /// maximal pants track for an FN chart, or the bare track.
    pub fn track(&self) -> TrainTrack {
        match &self.chart {
            TestbedChart::Shear { chart } => crate::teich::CocycleChart::track(chart).clone(),
            TestbedChart::Fn { .. } => traintrack::genus_two_pants().0,
            TestbedChart::Track { track } => track.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_match_constructors() {
        let files = [
            (include_str!("../../../testbeds/t11.json"), Testbed::t11()),
            (include_str!("../../../testbeds/g2.json"), Testbed::g2()),
            (include_str!("../../../testbeds/onesw.json"), Testbed::onesw()),
        ];
        for (text, built) in files {
            assert_eq!(Testbed::from_json(text).unwrap(), built, "{}", built.name);
            assert_eq!(text.trim_end(), built.to_json());
        }
    }

    #[test]
    fn panels_have_twenty_words() {
        assert_eq!(Testbed::t11().panel.len(), PANEL_SIZE);
        assert_eq!(Testbed::g2().panel.len(), PANEL_SIZE);
    }

    #[test]
    fn format_errors_name_the_field() {
        let mut t = Testbed::t11();
        t.format = "other".into();
        let e = Testbed::from_json(&serde_json::to_string(&t).unwrap()).unwrap_err();
        assert!(e.to_string().contains("format"));
        let e = Testbed::from_json("{\n  \"format\": 3\n}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
