//! Named pass/fail verdicts produced by the checkers.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not run because a size guard tripped or a prerequisite failed.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Option<String>,
    /// Name of the formal result this check instantiates.
    #[serde(rename = "paper_anchor")]
    pub anchor: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: impl Into<String>, anchor: &str, witness: Option<String>) {
        self.push(name, Status::Pass, witness, anchor);
    }

    pub fn fail(&mut self, name: impl Into<String>, anchor: &str, witness: impl Into<String>) {
        self.push(name, Status::Fail, Some(witness.into()), anchor);
    }

    pub fn skip(&mut self, name: impl Into<String>, anchor: &str, reason: impl Into<String>) {
        self.push(name, Status::Skipped, Some(reason.into()), anchor);
    }

    /// Records `Pass` on `Ok`, `Fail` with the debug-formatted witness on `Err`.
    pub fn record<E: std::fmt::Debug>(&mut self, name: impl Into<String>, anchor: &str, r: Result<(), E>) {
        match r {
            Ok(()) => self.pass(name, anchor, None),
            Err(e) => self.fail(name, anchor, format!("{e:?}")),
        }
    }

    fn push(&mut self, name: impl Into<String>, status: Status, witness: Option<String>, anchor: &str) {
        self.checks.push(Check {
            name: name.into(),
            status,
            witness,
            anchor: anchor.to_string(),
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// True when no check failed. Skipped checks do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
