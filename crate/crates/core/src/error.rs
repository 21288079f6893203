//! Error types, one enum per subsystem.

use thiserror::Error;

/// Errors from the domain model: parsing, canonical encoding, invariants.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid digest: {0}")]
    InvalidDigest(String),
    #[error("invalid timestamp: {0}")]
    InvalidTimestamp(String),
    #[error("malformed encoding: {0}")]
    Encoding(String),
    #[error("invariant violation at {path}: {message}")]
    Invariant { path: String, message: String },
    #[error("predicate payload does not match predicate_type {declared}")]
    PredicateTypeMismatch { declared: String },
}

impl ModelError {
    pub fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::Invariant {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Errors from metadata generation and amendment.
#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("event log is missing its header record")]
    MissingHeader,
    #[error("inventory entry {entry:?} depends on unknown entry {reference:?}")]
    DanglingReference { entry: String, reference: String },
    #[error("dependency cycle involving {0:?}")]
    DependencyCycle(String),
    #[error("declared output {0:?} was never produced by any observed event")]
    OutputNotProduced(String),
    #[error("layout expired at {0}")]
    LayoutExpired(String),
    #[error("vex record references component {name}@{version} absent from the sbom")]
    UnknownComponent { name: String, version: String },
    #[error("edit rejected: {0}")]
    InvalidEdit(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from key handling, signing and envelope verification.
#[derive(Debug, Error)]
pub enum SigningError {
    #[error("malformed key material: {0}")]
    InvalidKey(String),
    #[error("key {key_id} lacks required role {role}")]
    WrongRole { key_id: String, role: String },
    #[error("signature by unknown key {0}")]
    UnknownKey(String),
    #[error("signature by {0} does not verify")]
    BadSignature(String),
    #[error("no signature from a trusted producer key")]
    NoTrustedSignature,
    #[error("envelope carries no signatures and unsigned envelopes are not allowed")]
    Unsigned,
    #[error("envelope payload is not a valid statement: {0}")]
    UnparseablePayload(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from the registry and transparency service.
#[derive(Debug, Error)]
pub enum TransparencyError {
    #[error("registration policy rejected the envelope: {0}")]
    PolicyRejection(String),
    #[error("index {index} out of range for tree size {size}")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("size {0} exceeds current tree size {1}")]
    SizeOutOfRange(u64, u64),
    #[error("inconsistent sizes: old {old} > new {new}")]
    SizeOrder { old: u64, new: u64 },
    #[error("receipt does not verify: {0}")]
    InvalidReceipt(String),
    #[error("checkpoint countersignature does not verify: {0}")]
    InvalidCheckpoint(String),
    #[error("log storage: {0}")]
    Storage(String),
    #[error(transparent)]
    Signing(#[from] SigningError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from the repository, policies and the advertisement feed.
#[derive(Debug, Error)]
pub enum SharingError {
    #[error("receipt does not match the stored envelope: {0}")]
    ReceiptMismatch(String),
    #[error("no entry stored at {0}")]
    UnknownAddress(String),
    #[error("supersedes target {0} is not stored")]
    UnknownSupersedes(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("store i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Transparency(#[from] TransparencyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from consumer-side operations.
#[derive(Debug, Error)]
pub enum ConsumptionError {
    #[error("layout expired at {0}")]
    LayoutExpired(String),
    #[error("vex entry references component {name}@{version} absent from the sbom")]
    UnknownComponent { name: String, version: String },
    #[error("cache i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Sharing(#[from] SharingError),
    #[error(transparent)]
    Signing(#[from] SigningError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
