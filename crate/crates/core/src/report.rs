//! Machine-readable run reports.
//!
//! One schema serves every subcommand:
//! `{system, parameters, seed, trials, summary, verdict}` with one
//! record per trial. The `timestamp` field is the only part of a
//! report that is not a pure function of the configuration; consumers
//! checking determinism must ignore it. All numbers that are not
//! machine integers are serialized as exact `p/q` strings.

use serde::Serialize;
use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Serialize, Clone, Debug)]
pub struct TrialRecord {
    pub trial_index: usize,
    /// Measured Devron width (width-verification runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    /// Observed step count (conjecture experiments).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<usize>,
    /// Depth at which a singularity was confirmed, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_at: Option<usize>,
    pub discarded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl TrialRecord {
    pub fn value(&self) -> Option<usize> {
        if self.discarded {
            None
        } else {
            self.width.or(self.observed)
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<usize>,
    pub all_equal: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub system: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub timestamp: u64,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub verdict: String,
}

impl Report {
    pub fn new(
        system: impl Into<String>,
        parameters: BTreeMap<String, String>,
        seed: u64,
        trials: Vec<TrialRecord>,
        verdict: impl Into<String>,
    ) -> Report {
        let values: Vec<usize> = trials.iter().filter_map(TrialRecord::value).collect();
        let summary = Summary {
            min: values.iter().min().copied(),
            max: values.iter().max().copied(),
            all_equal: values.windows(2).all(|w| w[0] == w[1]),
        };
        Report {
            system: system.into(),
            parameters,
            seed,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            trials,
            summary,
            verdict: verdict.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != "fail"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// CSV flattening: one row per trial, report-level fields repeated.
    pub fn to_csv(&self) -> String {
        let params = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let mut out =
            String::from("system,parameters,seed,trial_index,width,observed,singular_at,discarded,reason,verdict\n");
        let opt = |o: &Option<usize>| o.map(|v| v.to_string()).unwrap_or_default();
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.system,
                params,
                self.seed,
                t.trial_index,
                opt(&t.width),
                opt(&t.observed),
                opt(&t.singular_at),
                t.discarded,
                t.reason.clone().unwrap_or_default(),
                self.verdict,
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_skips_discarded_trials() {
        let trials = vec![
            TrialRecord {
                trial_index: 0,
                width: Some(3),
                observed: None,
                singular_at: Some(1),
                discarded: false,
                reason: None,
            },
            TrialRecord {
                trial_index: 1,
                width: None,
                observed: None,
                singular_at: None,
                discarded: true,
                reason: Some("degenerate sample".into()),
            },
            TrialRecord {
                trial_index: 2,
                width: Some(3),
                observed: None,
                singular_at: Some(1),
                discarded: false,
                reason: None,
            },
        ];
        let r = Report::new("demo", BTreeMap::new(), 1, trials, "pass");
        assert_eq!(r.summary.min, Some(3));
        assert_eq!(r.summary.max, Some(3));
        assert!(r.summary.all_equal);
        assert!(r.passed());
        let json = r.to_json();
        assert!(json.contains("\"verdict\": \"pass\""));
        assert_eq!(r.to_csv().lines().count(), 4);
    }
}
