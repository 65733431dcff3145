use serde::Serialize;

use crate::error::{Error, Result};

use super::SuiteConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

/// One executed check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The mathematical claim the check is about.
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    /// Number of cases examined.
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub(crate) fn new(cfg: &SuiteConfig, checks: Vec<Check>) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary { pass: count(Status::Pass), fail: count(Status::Fail), skip: count(Status::Skip) };
        Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            config: cfg.clone(),
            checks,
            summary,
        }
    }

    /// No failed check.
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks whose name starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["name", "anchor", "status", "max_error", "count", "note"]).map_err(io)?;
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                c.anchor.as_str(),
                c.status.label(),
                &c.max_error.map_or(String::new(), |e| format!("{e:e}")),
                &c.count.to_string(),
                c.note.as_deref().unwrap_or(""),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// One line per check.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{} {}", c.status.label(), c.name));
            if let Some(e) = c.max_error {
                s.push_str(&format!(" max_err={e:.2e}"));
            }
            s.push_str(&format!(" n={}", c.count));
            if let Some(n) = &c.note {
                s.push_str(&format!(" ({n})"));
            }
            if let Some(ms) = c.runtime_ms {
                s.push_str(&format!(" [{ms} ms]"));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "{} passed, {} failed, {} skipped\n",
            self.summary.pass, self.summary.fail, self.summary.skip
        ));
        s
    }
}
