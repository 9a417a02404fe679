//! Per-sample test reports: one entry per requested test, rendered as
//! aligned text or JSON with identical numbers.

use serde::Serialize;

use crate::classical::ClassicalTestResult;
use crate::jel::JelTestResult;
use crate::stein::AsymptoticTestResult;

/// One test's contribution to a report.
#[derive(Debug, Clone, Serialize)]
pub struct TestEntry {
    pub test: String,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    /// Critical value, for tests decided by fixed critical points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_value: Option<f64>,
    pub alpha: f64,
    pub reject: bool,
}

/// Report for one input sample.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub alpha: f64,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Vec<TestEntry>,
}

impl Report {
    pub fn new(n: usize, mean: f64, sd: f64, alpha: f64, seed: Option<u64>) -> Self {
        Self {
            n,
            mean,
            sd,
            alpha,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            results: Vec::new(),
        }
    }

    pub fn push_jel(&mut self, r: &JelTestResult) {
        self.results.push(TestEntry {
            test: "jel".into(),
            statistic: r.statistic,
            p_value: Some(r.p_value),
            critical_value: None,
            alpha: r.alpha,
            reject: r.reject,
        });
    }

    pub fn push_asymptotic(&mut self, r: &AsymptoticTestResult) {
        self.results.push(TestEntry {
            test: "asymptotic".into(),
            statistic: r.statistic_z,
            p_value: Some(r.p_value),
            critical_value: None,
            alpha: r.alpha,
            reject: r.reject,
        });
    }

    pub fn push_classical(&mut self, r: &ClassicalTestResult, critical: Option<f64>) {
        self.results.push(TestEntry {
            test: r.name.into(),
            statistic: r.statistic,
            p_value: r.p_value,
            critical_value: critical,
            alpha: r.alpha,
            reject: r.reject,
        });
    }

    pub fn any_rejection(&self) -> bool {
        self.results.iter().any(|e| e.reject)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "n={} mean={:.4} sd={:.4} alpha={:.4}\n",
            self.n, self.mean, self.sd, self.alpha
        ));
        out.push_str(&format!(
            "{:<16} {:>10} {:>10} {:>10} {:>8}\n",
            "test", "statistic", "p-value", "critical", "reject"
        ));
        for e in &self.results {
            let p = e
                .p_value
                .map(|p| format!("{p:.4}"))
                .unwrap_or_else(|| "-".into());
            let c = e
                .critical_value
                .map(|c| format!("{c:.4}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<16} {:>10.4} {:>10} {:>10} {:>8}\n",
                e.test, e.statistic, p, c, e.reject
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
