//! Verification reports: one record per check, with failing witnesses.

use std::fmt;

/// Cap on stored witnesses per check; further failures are only counted.
pub const DEFAULT_WITNESS_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    pub witnesses: Vec<String>,
    pub suppressed: usize,
}

/// Outcome of a verification pass over many identities.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
    witness_cap: usize,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            checks: Vec::new(),
            witness_cap: DEFAULT_WITNESS_CAP,
        }
    }

    pub fn with_witness_cap(cap: usize) -> Self {
        VerificationReport {
            checks: Vec::new(),
            witness_cap: cap,
        }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            status: CheckStatus::Pass,
            witnesses: Vec::new(),
            suppressed: 0,
        });
    }

    /// Records a named check as failed with one witness per offending tuple.
    pub fn fail(&mut self, name: impl Into<String>, witnesses: Vec<String>) {
        let cap = self.witness_cap;
        let suppressed = witnesses.len().saturating_sub(cap);
        let mut w = witnesses;
        w.truncate(cap);
        self.checks.push(CheckRecord {
            name: name.into(),
            status: CheckStatus::Fail,
            witnesses: w,
            suppressed,
        });
    }

    /// Convenience: pass when `witnesses` is empty, fail otherwise.
    pub fn record(&mut self, name: impl Into<String>, witnesses: Vec<String>) {
        if witnesses.is_empty() {
            self.pass(name);
        } else {
            self.fail(name, witnesses);
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }

    /// Structured one-record-per-line form: `status<TAB>name<TAB>witness;...`.
    pub fn to_machine_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
            };
            out.push_str(&format!(
                "{status}\t{}\t{}\n",
                c.name,
                c.witnesses.join("; ")
            ));
        }
        out
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match c.status {
                CheckStatus::Pass => writeln!(f, "[PASS] {}", c.name)?,
                CheckStatus::Fail => {
                    writeln!(f, "[FAIL] {}", c.name)?;
                    for w in &c.witnesses {
                        writeln!(f, "       witness: {w}")?;
                    }
                    if c.suppressed > 0 {
                        writeln!(f, "       ... and {} more", c.suppressed)?;
                    }
                }
            }
        }
        Ok(())
    }
}
