use serde::Serialize;

/// Outcome of one axiom or theorem check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    /// Holds because the quantifier ranges over nothing.
    Vacuous,
    /// Skipped because a precondition of the check is absent.
    NotApplicable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    pub fn is_ok(self) -> bool {
        !matches!(self, Status::Fails)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn holds(name: &str) -> Check {
        Check { name: name.to_string(), status: Status::Holds, witness: None, note: None }
    }

    pub fn fails(name: &str, witness: Vec<String>) -> Check {
        Check { name: name.to_string(), status: Status::Fails, witness: Some(witness), note: None }
    }

    pub fn vacuous(name: &str, note: &str) -> Check {
        Check {
            name: name.to_string(),
            status: Status::Vacuous,
            witness: None,
            note: Some(note.to_string()),
        }
    }

    pub fn not_applicable(name: &str, note: &str) -> Check {
        Check {
            name: name.to_string(),
            status: Status::NotApplicable,
            witness: None,
            note: Some(note.to_string()),
        }
    }

    /// `Holds` when `witness` is `None`, otherwise `Fails` with it.
    pub fn from_witness(name: &str, witness: Option<Vec<String>>) -> Check {
        match witness {
            None => Check::holds(name),
            Some(w) => Check::fails(name, w),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }
}

/// An ordered list of named checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn status(&self, name: &str) -> Option<Status> {
        self.get(name).map(|c| c.status)
    }

    /// True when no check failed.
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.status.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fails)
    }
}
