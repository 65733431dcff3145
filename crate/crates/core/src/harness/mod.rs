//! Verification suites. Each suite turns the claims about one layer of the
//! library into named pass/fail/skip records collected in a [`Report`]; the
//! CLI, the C API and the acceptance target all drive [`run_suite`].

mod context;
mod converse;
mod layers;
mod report;
mod twists;
mod weyl_checks;

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::numeric::Tolerances;
use crate::zeta::GammaTable;

pub use context::Context;
pub use report::{Check, Report, Status, Summary};

/// Groups of checks that can be requested separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Groups,
    Weyl,
    Decompose,
    Bessel,
    Zeta,
    Gamma,
    Multone,
    Cells,
    Converse,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Groups,
        Suite::Weyl,
        Suite::Decompose,
        Suite::Bessel,
        Suite::Zeta,
        Suite::Gamma,
        Suite::Multone,
        Suite::Cells,
        Suite::Converse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Groups => "groups",
            Suite::Weyl => "weyl",
            Suite::Decompose => "decompose",
            Suite::Bessel => "bessel",
            Suite::Zeta => "zeta",
            Suite::Gamma => "gamma",
            Suite::Multone => "multone",
            Suite::Cells => "cells",
            Suite::Converse => "converse",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// What to run and how.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub l: usize,
    pub q: u32,
    pub seed: u64,
    pub tol: Tolerances,
    pub slow: bool,
    pub allow_noncuspidal: bool,
    pub suites: Vec<Suite>,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    /// Record wall-clock times. Off by default so reports are reproducible.
    #[serde(skip)]
    pub timings: bool,
    /// Progress lines on stderr.
    #[serde(skip)]
    pub verbose: bool,
}

impl SuiteConfig {
    pub fn new(l: usize, q: u32) -> Self {
        SuiteConfig {
            l,
            q,
            seed: 0x5eed,
            tol: Tolerances::default(),
            slow: false,
            allow_noncuspidal: false,
            suites: Suite::ALL.to_vec(),
            cache_dir: None,
            timings: false,
            verbose: false,
        }
    }

    pub fn with_suites(mut self, suites: &[Suite]) -> Self {
        self.suites = suites.to_vec();
        self
    }

    /// Rank 2 with q <= 7 runs by default; (3, 3) needs the slow flag.
    pub fn validate(&self) -> Result<()> {
        Fq::new(self.q).map_err(|e| Error::Config(e.to_string()))?;
        let tol = &self.tol;
        if !(tol.eq_abs > 0.0 && tol.gamma_rel > 0.0 && tol.eig_gap > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        match (self.l, self.q) {
            (2, q) if q <= 7 => Ok(()),
            (3, 3) if self.slow => Ok(()),
            (3, 3) => Err(Error::Config("(l, q) = (3, 3) is the slow tier; pass --slow".into())),
            (l, q) => Err(Error::Config(format!("(l, q) = ({l}, {q}) is outside the supported budget"))),
        }
    }

    fn runs(&self, s: Suite) -> bool {
        self.suites.contains(&s)
    }
}

/// Outcome of one check before it is stamped with name and time.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Outcome {
    status: Status,
    max_error: Option<f64>,
    count: u64,
    note: Option<String>,
}

impl Outcome {
    pub(crate) fn exact(pass: bool, count: usize) -> Self {
        Outcome {
            status: if pass { Status::Pass } else { Status::Fail },
            max_error: None,
            count: count as u64,
            note: None,
        }
    }

    /// Pass when `max_error < tol`.
    pub(crate) fn within(max_error: f64, tol: f64, count: usize) -> Self {
        Outcome {
            status: if max_error < tol { Status::Pass } else { Status::Fail },
            max_error: Some(max_error),
            count: count as u64,
            note: None,
        }
    }

    pub(crate) fn skip(note: impl Into<String>) -> Self {
        Outcome { status: Status::Skip, max_error: None, count: 0, note: Some(note.into()) }
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub(crate) fn and(mut self, pass: bool) -> Self {
        if !pass && self.status == Status::Pass {
            self.status = Status::Fail;
        }
        self
    }
}

/// Collects checks in execution order.
pub(crate) struct Recorder {
    timings: bool,
    verbose: bool,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(cfg: &SuiteConfig) -> Self {
        Recorder { timings: cfg.timings, verbose: cfg.verbose, checks: Vec::new() }
    }

    /// Run one check. Budget errors become skips, every other error a
    /// failure carrying the message.
    pub(crate) fn run(&mut self, name: impl Into<String>, anchor: &str, f: impl FnOnce() -> Result<Outcome>) {
        let name = name.into();
        let start = Instant::now();
        let out = match f() {
            Ok(o) => o,
            Err(Error::Budget(m)) => Outcome::skip(format!("budget: {m}")),
            Err(e) => Outcome { status: Status::Fail, max_error: None, count: 0, note: Some(e.to_string()) },
        };
        let ms = start.elapsed().as_millis() as u64;
        if self.verbose {
            eprintln!("{:>4} {name} ({ms} ms)", out.status.label());
        }
        self.checks.push(Check {
            name,
            anchor: anchor.to_string(),
            status: out.status,
            max_error: out.max_error,
            count: out.count,
            note: out.note,
            runtime_ms: self.timings.then_some(ms),
        });
    }
}

/// Claims every full run must cover, by anchor.
pub const ANCHORS: &[&str] = &[
    "group-orders",
    "embeddings",
    "special-elements",
    "involution",
    "bruhat",
    "siegel",
    "weyl-support",
    "weyl-partition",
    "weyl-theta",
    "levi-outside-support",
    "top-shape",
    "penultimate-shape",
    "gg-decomposition",
    "hecke-commute",
    "bessel-normalized",
    "bessel-equivariance",
    "bessel-support",
    "central-torus",
    "levi-vanishing",
    "conjugate-bessel",
    "central-character",
    "fv-nonvanishing",
    "intertwined-support",
    "zeta-invariance",
    "zeta-equivariance",
    "gamma-proportionality",
    "gamma-conjugate",
    "multiplicity-one",
    "cell-membership",
    "cell-full",
    "cell-top-conjugate",
    "cell-penultimate",
    "converse-classes",
    "bessel-sum",
    "lower-twist-agreement",
];

/// Run the configured suites. Errors are configuration errors only; every
/// mathematical failure is a failed check in the report.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let ctx = Context::new(cfg);
    let mut rec = Recorder::new(cfg);
    let say = |s: Suite| {
        if cfg.verbose {
            eprintln!("== {}", s.name());
        }
    };
    for s in Suite::ALL {
        if !cfg.runs(s) {
            continue;
        }
        say(s);
        match s {
            Suite::Groups => layers::groups(&ctx, &mut rec),
            Suite::Weyl => weyl_checks::weyl(&ctx, &mut rec),
            Suite::Decompose => layers::decompose(&ctx, &mut rec),
            Suite::Bessel => layers::bessel(&ctx, &mut rec),
            Suite::Zeta => twists::zeta(&ctx, &mut rec),
            Suite::Gamma => twists::gamma(&ctx, &mut rec),
            Suite::Multone => twists::multone(&ctx, &mut rec),
            Suite::Cells => twists::cells(&ctx, &mut rec),
            Suite::Converse => converse::converse(&ctx, &mut rec),
        }
    }
    if Suite::ALL.iter().all(|s| cfg.runs(*s)) {
        let missing: Vec<&str> = ANCHORS
            .iter()
            .copied()
            .filter(|a| !rec.checks.iter().any(|c| c.anchor == *a))
            .collect();
        rec.run("harness.self_audit", "self-audit", || {
            let out = Outcome::exact(missing.is_empty(), ANCHORS.len());
            Ok(if missing.is_empty() { out } else { out.note(format!("no check for {}", missing.join(", "))) })
        });
    }
    Ok(Report::new(cfg, rec.checks))
}

/// Gamma factors of the gamma-eligible pi against every GL(n), n <= l.
pub fn gamma_table(cfg: &SuiteConfig) -> Result<GammaTable> {
    cfg.validate()?;
    let ctx = Context::new(cfg);
    let mut rows = Vec::new();
    for n in 1..=cfg.l {
        rows.extend_from_slice(ctx.gammas(n)?);
    }
    Ok(GammaTable { rows })
}

#[cfg(test)]
mod tests;
