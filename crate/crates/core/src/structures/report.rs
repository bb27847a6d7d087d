use serde::Serialize;
use std::collections::BTreeMap;

use super::Kind;

/// One violated axiom together with the events and sets that witness it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub events: Vec<String>,
    pub sets: Vec<Vec<String>>,
    pub detail: String,
}

impl Violation {
    pub fn new(axiom: &str, detail: impl Into<String>) -> Self {
        Violation {
            axiom: axiom.to_string(),
            events: Vec::new(),
            sets: Vec::new(),
            detail: detail.into(),
        }
    }

    pub fn with_events(mut self, events: Vec<String>) -> Self {
        self.events = events;
        self
    }

    pub fn with_sets(mut self, sets: Vec<Vec<String>>) -> Self {
        self.sets = sets;
        self
    }
}

/// Outcome of a validator. Empty `violations` means the input is a valid
/// instance; `properties` carries derived facts such as repleteness or
/// stability.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    pub violations: Vec<Violation>,
    pub properties: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn violations_of<'a>(&'a self, axiom: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }

    pub fn property(&self, name: &str) -> Option<bool> {
        self.properties.get(name).copied()
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub(crate) fn set(&mut self, name: &str, value: bool) {
        self.properties.insert(name.to_string(), value);
    }
}
