use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "not_applicable",
        })
    }
}

/// Outcome of one named check.
///
/// Advisory checks are reported like any other but do not count against
/// [`DiagnosticsReport::passed`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub check: &'static str,
    pub status: CheckStatus,
    pub advisory: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckEntry {
    pub fn pass(check: &'static str) -> Self {
        Self {
            check,
            status: CheckStatus::Pass,
            advisory: false,
            witness: None,
        }
    }

    pub fn fail(check: &'static str, witness: impl Into<String>) -> Self {
        Self {
            check,
            status: CheckStatus::Fail,
            advisory: false,
            witness: Some(witness.into()),
        }
    }

    pub fn not_applicable(check: &'static str) -> Self {
        Self {
            check,
            status: CheckStatus::NotApplicable,
            advisory: false,
            witness: None,
        }
    }

    /// Pass if `ok`, otherwise fail with the lazily built witness.
    pub fn from_bool(check: &'static str, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass(check)
        } else {
            Self::fail(check, witness())
        }
    }

    pub fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DiagnosticsReport {
    entries: Vec<CheckEntry>,
}

impl DiagnosticsReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: DiagnosticsReport) {
        self.entries.extend(other.entries);
    }

    pub fn entries(&self) -> &[CheckEntry] {
        &self.entries
    }

    pub fn entry(&self, check: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.check == check)
    }

    pub fn status(&self, check: &str) -> Option<CheckStatus> {
        self.entry(check).map(|e| e.status)
    }

    /// No non-advisory check failed.
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.advisory || e.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == CheckStatus::Fail)
    }
}

impl FromIterator<CheckEntry> for DiagnosticsReport {
    fn from_iter<I: IntoIterator<Item = CheckEntry>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{}: {}", e.check, e.status)?;
            if e.advisory {
                write!(f, " (advisory)")?;
            }
            if let Some(w) = &e.witness {
                write!(f, " [{w}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
