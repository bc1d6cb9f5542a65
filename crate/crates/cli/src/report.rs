//! Suite reports: one row per check, deterministic ordering by check id,
//! text and CSV rendering. CSV numbers use a fixed 17-significant-digit
//! scientific encoding so reports reproduce bit-identically for a fixed
//! seed.

use std::collections::BTreeMap;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// measured <= bound
    AtMost,
    /// measured >= bound
    AtLeast,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
}

/// Options shared by every suite run.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    pub strict: bool,
    /// per-check bound overrides, keyed by check id
    pub tol: BTreeMap<String, f64>,
}

/// Accumulates checks, applying any per-id bound override from the options.
pub struct CheckSet<'a> {
    opts: &'a SuiteOptions,
    checks: Vec<Check>,
}

impl<'a> CheckSet<'a> {
    pub fn new(opts: &'a SuiteOptions) -> Self {
        Self {
            opts,
            checks: Vec::new(),
        }
    }

    fn bound_for(&self, id: &str, default: f64) -> f64 {
        self.opts.tol.get(id).copied().unwrap_or(default)
    }

    pub fn at_most(&mut self, id: &str, measured: f64, default_bound: f64) {
        let bound = self.bound_for(id, default_bound);
        self.checks.push(Check {
            id: id.to_string(),
            pass: measured <= bound,
            measured,
            bound,
            relation: Relation::AtMost,
        });
    }

    pub fn at_least(&mut self, id: &str, measured: f64, default_bound: f64) {
        let bound = self.bound_for(id, default_bound);
        self.checks.push(Check {
            id: id.to_string(),
            pass: measured >= bound,
            measured,
            bound,
            relation: Relation::AtLeast,
        });
    }

    pub fn into_checks(self) -> Vec<Check> {
        self.checks
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub strict: bool,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

/// Fixed 17-significant-digit encoding used in all emitted CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl SuiteReport {
    pub fn new(
        suite: &str,
        seed: u64,
        strict: bool,
        mut checks: Vec<Check>,
        elapsed: Duration,
    ) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        Self {
            suite: suite.to_string(),
            seed,
            strict,
            checks,
            elapsed,
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<44} measured={:<24} bound={} ({})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                fmt_f64(c.measured),
                fmt_f64(c.bound),
                c.relation.as_str()
            ));
        }
        out.push_str(&format!(
            "suite {}: {} ({} checks, seed {}, {:.2}s)\n",
            self.suite,
            if self.pass() { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.seed,
            self.elapsed.as_secs_f64()
        ));
        out
    }

    /// CSV body; timing is deliberately excluded so re-runs are
    /// byte-identical for a fixed seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check_id,status,measured,bound,relation\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.id,
                if c.pass { "pass" } else { "fail" },
                fmt_f64(c.measured),
                fmt_f64(c.bound),
                c.relation.as_str()
            ));
        }
        out
    }
}
