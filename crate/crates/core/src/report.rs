//! Pass/fail records emitted by verification routines.

use serde::Serialize;

/// One verified identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// The identity or display the check is tied to.
    pub anchor: String,
}

impl Check {
    pub fn new(
        suite: &str,
        name: impl Into<String>,
        pass: bool,
        detail: impl Into<String>,
        anchor: &str,
    ) -> Self {
        Check {
            suite: suite.to_string(),
            name: name.into(),
            pass,
            detail: detail.into(),
            anchor: anchor.to_string(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("check serializes")
    }
}

/// Ordered collection of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&c.to_json_line());
            out.push('\n');
        }
        out
    }
}

impl FromIterator<Check> for Report {
    fn from_iter<I: IntoIterator<Item = Check>>(iter: I) -> Self {
        Report {
            checks: iter.into_iter().collect(),
        }
    }
}
