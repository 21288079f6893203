//! Build provenance: who built the subject artifacts, from what inputs,
//! under which pipeline definition and parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::ArtifactRef;
use crate::timestamp::Timestamp;

/// Well-known `external_parameters` key naming the supply-chain step this
/// provenance attests to; layout verification matches attestations to layout
/// steps through it.
pub const PARAM_STEP: &str = "step";
/// Well-known `external_parameters` key carrying the command the step ran.
pub const PARAM_COMMAND: &str = "command";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDocument {
    pub builder_id: String,
    pub pipeline_definition: ArtifactRef,
    pub external_parameters: BTreeMap<String, String>,
    pub resolved_dependencies: Vec<ArtifactRef>,
    pub build_started: Timestamp,
    pub build_finished: Timestamp,
    pub outputs: Vec<ArtifactRef>,
}

impl ProvenanceDocument {
    pub fn step(&self) -> Option<&str> {
        self.external_parameters.get(PARAM_STEP).map(String::as_str)
    }

    pub fn command(&self) -> Option<&str> {
        self.external_parameters.get(PARAM_COMMAND).map(String::as_str)
    }

    pub(crate) fn validate(&self, path: &str) -> Result<(), ModelError> {
        if self.build_started > self.build_finished {
            return Err(ModelError::invariant(
                format!("{path}.build_started"),
                "build_started must not be after build_finished",
            ));
        }
        if self.outputs.is_empty() {
            return Err(ModelError::invariant(
                format!("{path}.outputs"),
                "must be non-empty",
            ));
        }
        Ok(())
    }
}
