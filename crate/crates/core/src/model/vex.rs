//! Vulnerability exploitability statements tied to SBOM components.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VexStatus {
    Affected,
    NotAffected,
    Fixed,
    UnderInvestigation,
}

impl VexStatus {
    /// Whether a finding for this status should be suppressed in monitoring.
    pub fn neutralises(&self) -> bool {
        matches!(self, VexStatus::NotAffected | VexStatus::Fixed)
    }
}

/// The component a VEX entry is about, by (name, version).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VexComponentRef {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VexEntry {
    pub vulnerability_id: String,
    pub component: VexComponentRef,
    pub status: VexStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub justification: Option<String>,
}

/// An empty `entries` list is a valid, explicit "nothing to report".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VexDocument {
    pub entries: Vec<VexEntry>,
}

impl VexDocument {
    pub(crate) fn validate(&self, path: &str) -> Result<(), ModelError> {
        for (i, entry) in self.entries.iter().enumerate() {
            if entry.vulnerability_id.is_empty() {
                return Err(ModelError::invariant(
                    format!("{path}.entries[{i}].vulnerability_id"),
                    "must be non-empty",
                ));
            }
            if entry.component.name.is_empty() {
                return Err(ModelError::invariant(
                    format!("{path}.entries[{i}].component.name"),
                    "must be non-empty",
                ));
            }
        }
        Ok(())
    }
}
