//! The statement model: subjects, typed predicates, and the signed envelope
//! around them.

mod envelope;
mod layout;
mod provenance;
mod sbom;
mod vex;

pub use envelope::{Envelope, EnvelopeSignature, STATEMENT_PAYLOAD_TYPE};
pub use layout::{LayoutDocument, LayoutStep};
pub use provenance::ProvenanceDocument;
pub use sbom::{DependencyEdge, SbomComponent, SbomDocument};
pub use vex::{VexDocument, VexEntry, VexStatus};

use serde::{Deserialize, Serialize};

use crate::canonical::to_canonical_json;
use crate::digest::Digest;
use crate::error::ModelError;
use crate::timestamp::Timestamp;

pub const MAX_ARTIFACT_NAME_LEN: usize = 512;

/// An item moving along the supply chain, identified by content digest.
/// The name is carried for diagnostics and policy matching; the digest is
/// the identity (see [`ArtifactRef::same_artifact`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactRef {
    pub name: String,
    pub digest: Digest,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub version: Option<String>,
}

impl ArtifactRef {
    pub fn new(name: impl Into<String>, digest: Digest) -> Self {
        ArtifactRef {
            name: name.into(),
            digest,
            version: None,
        }
    }

    pub fn with_version(mut self, version: impl Into<String>) -> Self {
        self.version = Some(version.into());
        self
    }

    /// Artifact identity is digest equality; names are not tamper-proof.
    pub fn same_artifact(&self, other: &ArtifactRef) -> bool {
        self.digest == other.digest
    }

    fn validate(&self, path: &str) -> Result<(), ModelError> {
        if self.name.is_empty() {
            return Err(ModelError::invariant(format!("{path}.name"), "must be non-empty"));
        }
        if self.name.len() > MAX_ARTIFACT_NAME_LEN {
            return Err(ModelError::invariant(
                format!("{path}.name"),
                format!("longer than {MAX_ARTIFACT_NAME_LEN} chars"),
            ));
        }
        Ok(())
    }
}

/// The four predicate kinds a statement can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredicateType {
    #[serde(rename = "SBOM")]
    Sbom,
    #[serde(rename = "PROVENANCE")]
    Provenance,
    #[serde(rename = "VEX")]
    Vex,
    #[serde(rename = "LAYOUT")]
    Layout,
}

impl PredicateType {
    pub fn as_str(&self) -> &'static str {
        match self {
            PredicateType::Sbom => "SBOM",
            PredicateType::Provenance => "PROVENANCE",
            PredicateType::Vex => "VEX",
            PredicateType::Layout => "LAYOUT",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        match s {
            "SBOM" => Ok(PredicateType::Sbom),
            "PROVENANCE" => Ok(PredicateType::Provenance),
            "VEX" => Ok(PredicateType::Vex),
            "LAYOUT" => Ok(PredicateType::Layout),
            other => Err(ModelError::invariant(
                "predicate_type",
                format!("unknown predicate type {other:?}"),
            )),
        }
    }
}

impl std::fmt::Display for PredicateType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed predicate payload. Serialized untagged; the enclosing statement's
/// `predicate_type` field names the kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Sbom(SbomDocument),
    Provenance(ProvenanceDocument),
    Vex(VexDocument),
    Layout(LayoutDocument),
}

impl Predicate {
    pub fn predicate_type(&self) -> PredicateType {
        match self {
            Predicate::Sbom(_) => PredicateType::Sbom,
            Predicate::Provenance(_) => PredicateType::Provenance,
            Predicate::Vex(_) => PredicateType::Vex,
            Predicate::Layout(_) => PredicateType::Layout,
        }
    }

    pub fn as_sbom(&self) -> Option<&SbomDocument> {
        match self {
            Predicate::Sbom(doc) => Some(doc),
            _ => None,
        }
    }

    pub fn as_provenance(&self) -> Option<&ProvenanceDocument> {
        match self {
            Predicate::Provenance(doc) => Some(doc),
            _ => None,
        }
    }

    pub fn as_vex(&self) -> Option<&VexDocument> {
        match self {
            Predicate::Vex(doc) => Some(doc),
            _ => None,
        }
    }

    pub fn as_layout(&self) -> Option<&LayoutDocument> {
        match self {
            Predicate::Layout(doc) => Some(doc),
            _ => None,
        }
    }
}

impl Serialize for Predicate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Predicate::Sbom(doc) => doc.serialize(serializer),
            Predicate::Provenance(doc) => doc.serialize(serializer),
            Predicate::Vex(doc) => doc.serialize(serializer),
            Predicate::Layout(doc) => doc.serialize(serializer),
        }
    }
}

/// A set of predicates about subject artifacts, authored at a point in time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Statement {
    pub subjects: Vec<ArtifactRef>,
    pub predicate_type: PredicateType,
    pub predicate: Predicate,
    pub created_at: Timestamp,
    pub author: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStatement {
    subjects: Vec<ArtifactRef>,
    predicate_type: PredicateType,
    predicate: serde_json::Value,
    created_at: Timestamp,
    author: String,
}

impl<'de> Deserialize<'de> for Statement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawStatement::deserialize(deserializer)?;
        let predicate = decode_predicate(raw.predicate_type, raw.predicate)
            .map_err(serde::de::Error::custom)?;
        Ok(Statement {
            subjects: raw.subjects,
            predicate_type: raw.predicate_type,
            predicate,
            created_at: raw.created_at,
            author: raw.author,
        })
    }
}

fn decode_predicate(
    declared: PredicateType,
    value: serde_json::Value,
) -> Result<Predicate, ModelError> {
    let attempt = match declared {
        PredicateType::Sbom => {
            serde_json::from_value::<SbomDocument>(value.clone()).map(Predicate::Sbom)
        }
        PredicateType::Provenance => {
            serde_json::from_value::<ProvenanceDocument>(value.clone()).map(Predicate::Provenance)
        }
        PredicateType::Vex => serde_json::from_value::<VexDocument>(value.clone()).map(Predicate::Vex),
        PredicateType::Layout => {
            serde_json::from_value::<LayoutDocument>(value.clone()).map(Predicate::Layout)
        }
    };
    match attempt {
        Ok(predicate) => Ok(predicate),
        Err(primary) => {
            // Distinguish a cross-wired payload from a plain malformed one:
            // if the payload parses strictly as one of the other kinds it was
            // mismatched, not garbage.
            let parses_as_other = [
                serde_json::from_value::<SbomDocument>(value.clone()).is_ok()
                    && declared != PredicateType::Sbom,
                serde_json::from_value::<ProvenanceDocument>(value.clone()).is_ok()
                    && declared != PredicateType::Provenance,
                serde_json::from_value::<VexDocument>(value.clone()).is_ok()
                    && declared != PredicateType::Vex,
                serde_json::from_value::<LayoutDocument>(value).is_ok()
                    && declared != PredicateType::Layout,
            ]
            .into_iter()
            .any(|b| b);
            if parses_as_other {
                Err(ModelError::PredicateTypeMismatch {
                    declared: declared.as_str().to_string(),
                })
            } else {
                Err(ModelError::invariant("predicate", primary.to_string()))
            }
        }
    }
}

impl Statement {
    /// Build and validate in one step.
    pub fn new(
        subjects: Vec<ArtifactRef>,
        predicate: Predicate,
        created_at: Timestamp,
        author: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let statement = Statement {
            predicate_type: predicate.predicate_type(),
            subjects,
            predicate,
            created_at,
            author: author.into(),
        };
        statement.validate()?;
        Ok(statement)
    }

    /// Check every statement-level and payload-level invariant, returning the
    /// first violation with its field path.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.subjects.is_empty() {
            return Err(ModelError::invariant("subjects", "must be non-empty"));
        }
        for (i, subject) in self.subjects.iter().enumerate() {
            subject.validate(&format!("subjects[{i}]"))?;
        }
        if self.predicate.predicate_type() != self.predicate_type {
            return Err(ModelError::PredicateTypeMismatch {
                declared: self.predicate_type.as_str().to_string(),
            });
        }
        if self.author.is_empty() {
            return Err(ModelError::invariant("author", "must be non-empty"));
        }
        match &self.predicate {
            Predicate::Sbom(doc) => doc.validate("predicate")?,
            Predicate::Provenance(doc) => {
                doc.validate("predicate")?;
                for (i, output) in doc.outputs.iter().enumerate() {
                    if !self.subjects.iter().any(|s| s.same_artifact(output)) {
                        return Err(ModelError::invariant(
                            format!("predicate.outputs[{i}]"),
                            "output does not appear among the statement subjects",
                        ));
                    }
                }
            }
            Predicate::Vex(doc) => doc.validate("predicate")?,
            Predicate::Layout(doc) => doc.validate("predicate")?,
        }
        Ok(())
    }
}

/// Deterministic statement bytes; signing and content addressing run over
/// these.
pub fn canonical_serialize(statement: &Statement) -> Result<Vec<u8>, ModelError> {
    statement.validate()?;
    to_canonical_json(statement)
}

/// Parse statement bytes, enforcing every model invariant. The error names
/// the first violated invariant.
pub fn parse_statement(bytes: &[u8]) -> Result<Statement, ModelError> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| ModelError::Encoding(e.to_string()))?;
    let raw: RawStatement =
        serde_json::from_value(value).map_err(|e| ModelError::Encoding(e.to_string()))?;
    let predicate = decode_predicate(raw.predicate_type, raw.predicate)?;
    let statement = Statement {
        subjects: raw.subjects,
        predicate_type: raw.predicate_type,
        predicate,
        created_at: raw.created_at,
        author: raw.author,
    };
    statement.validate()?;
    Ok(statement)
}
