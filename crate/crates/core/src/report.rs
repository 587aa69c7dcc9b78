//! Structured validation results shared by schema and graph checks.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Where a violation was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    EntityType { code: String },
    RelationType { verb: String, source: String, target: String },
    Entity { id: String },
    /// `index` is the position in the graph's relation list.
    Relation { index: usize, source: String, verb: String, target: String },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::EntityType { code } => write!(f, "entity type {code}"),
            Location::RelationType { verb, source, target } => {
                write!(f, "relation type {verb}: {source} -> {target}")
            }
            Location::Entity { id } => write!(f, "entity {id:?}"),
            Location::Relation { index, source, verb, target } => {
                write!(f, "relation #{index} {source:?} {verb} {target:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub location: Option<Location>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        severity: Severity,
        code: &str,
        message: impl Into<String>,
        location: Option<Location>,
    ) {
        self.violations.push(Violation {
            severity,
            code: code.to_owned(),
            message: message.into(),
            location,
        });
    }

    pub fn error(&mut self, code: &str, message: impl Into<String>, location: Option<Location>) {
        self.push(Severity::Error, code, message, location);
    }

    pub fn warning(&mut self, code: &str, message: impl Into<String>, location: Option<Location>) {
        self.push(Severity::Warning, code, message, location);
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// A report is valid only when it holds no violations at all, warnings included.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.error_count() > 0
    }

    pub fn error_count(&self) -> usize {
        self.count(Severity::Error)
    }

    pub fn warning_count(&self) -> usize {
        self.count(Severity::Warning)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Warning)
    }

    fn count(&self, severity: Severity) -> usize {
        self.violations.iter().filter(|v| v.severity == severity).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            write!(f, "{}\t{}\t{}", v.severity, v.code, v.message)?;
            if let Some(loc) = &v.location {
                write!(f, "\t{loc}")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{} error(s), {} warning(s)",
            self.error_count(),
            self.warning_count()
        )
    }
}
