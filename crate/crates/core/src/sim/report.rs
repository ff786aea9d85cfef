//! JSON and CSV reports. Both are byte-for-byte reproducible for a given
//! scenario and seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::engine::TrialOutcome;
use super::metrics::{Metrics, RunOutput};
use crate::pattern::Triplet;
use crate::sensor::{RawTriplet, Verdict};

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub actor: String,
    pub legit: bool,
    pub emitted: String,
    pub verdict: String,
    pub label: String,
    pub reason: Option<String>,
    pub pattern_id: Option<u32>,
    pub phy_ok: bool,
    pub app_ok: Option<bool>,
    pub rtt_s: Option<f64>,
    pub transcript: Vec<String>,
    pub raw_transcript: Vec<RawTriplet>,
    pub started_s: f64,
    pub ended_s: f64,
    pub duration_s: f64,
}

impl From<&TrialOutcome> for TrialRecord {
    fn from(o: &TrialOutcome) -> Self {
        let r = &o.result;
        let (reason, pattern_id) = match &r.verdict {
            Verdict::Accepted(id) => (None, Some(id.0)),
            Verdict::Rejected(reason) => (Some(reason.to_string()), None),
            Verdict::TimedOut => (Some("no complete pattern before the watchdog".to_string()), None),
        };
        TrialRecord {
            trial: o.trial,
            actor: o.actor.to_string(),
            legit: o.legit,
            emitted: o.emitted.clone(),
            verdict: r.verdict.kind().to_string(),
            label: r.verdict.label(),
            reason,
            pattern_id,
            phy_ok: r.phy_ok,
            app_ok: r.app_ok,
            rtt_s: r.rtt_s,
            transcript: r.transcript.iter().map(Triplet::to_string).collect(),
            raw_transcript: r.raw_transcript.clone(),
            started_s: r.started_s,
            ended_s: r.ended_s,
            duration_s: r.duration_s(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub metrics: Metrics,
    pub trials: Vec<TrialRecord>,
}

impl Report {
    pub fn new(run: &RunOutput) -> Self {
        Self { metrics: run.metrics.clone(), trials: run.outcomes.iter().map(TrialRecord::from).collect() }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// `trial,actor,verdict,reason,duration_s`; `reason` is the verdict label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,actor,verdict,reason,duration_s\n");
        for t in &self.trials {
            let _ = writeln!(out, "{},{},{},{},{:.6}", t.trial, t.actor, t.verdict, t.label, t.duration_s);
        }
        out
    }

    /// Writes `report.json` and `trials.csv` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> std::io::Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let json = dir.join("report.json");
        let csv = dir.join("trials.csv");
        std::fs::write(&json, self.to_json())?;
        std::fs::write(&csv, self.to_csv())?;
        Ok((json, csv))
    }
}
