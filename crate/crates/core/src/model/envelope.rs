//! The attestation envelope: canonical statement bytes plus signatures.
//!
//! Wire shape follows the DSSE envelope JSON: `payload` and `sig` values are
//! standard padded base64, field names are `payloadType` and `keyid`.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::canonical::to_canonical_json;
use crate::digest::{content_address, Digest};
use crate::error::ModelError;
use crate::model::{parse_statement, Statement};

/// Payload type identifier for statements in this model.
pub const STATEMENT_PAYLOAD_TYPE: &str = "application/vnd.scm2.statement+json";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeSignature {
    pub key_id: String,
    pub signature: Vec<u8>,
}

/// Canonical statement bytes plus zero or more signatures. An empty
/// signature list is only meaningful in the no-sign profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub payload_type: String,
    pub payload: Vec<u8>,
    pub signatures: Vec<EnvelopeSignature>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureWire {
    keyid: String,
    sig: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeWire {
    payload: String,
    #[serde(rename = "payloadType")]
    payload_type: String,
    signatures: Vec<SignatureWire>,
}

impl Serialize for Envelope {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EnvelopeWire {
            payload: BASE64.encode(&self.payload),
            payload_type: self.payload_type.clone(),
            signatures: self
                .signatures
                .iter()
                .map(|s| SignatureWire {
                    keyid: s.key_id.clone(),
                    sig: BASE64.encode(&s.signature),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Envelope {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = EnvelopeWire::deserialize(deserializer)?;
        let payload = BASE64
            .decode(&wire.payload)
            .map_err(|e| serde::de::Error::custom(format!("payload base64: {e}")))?;
        let signatures = wire
            .signatures
            .into_iter()
            .map(|s| {
                Ok(EnvelopeSignature {
                    key_id: s.keyid,
                    signature: BASE64
                        .decode(&s.sig)
                        .map_err(|e| serde::de::Error::custom(format!("sig base64: {e}")))?,
                })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        Ok(Envelope {
            payload_type: wire.payload_type,
            payload,
            signatures,
        })
    }
}

impl Envelope {
    /// Wrap canonical statement bytes without signing (no-sign profile).
    pub fn unsigned(payload: Vec<u8>) -> Self {
        Envelope {
            payload_type: STATEMENT_PAYLOAD_TYPE.to_string(),
            payload,
            signatures: Vec::new(),
        }
    }

    /// Canonical envelope bytes; the registry leaf and the repository address
    /// are both derived from these.
    pub fn to_wire_bytes(&self) -> Result<Vec<u8>, ModelError> {
        to_canonical_json(self)
    }

    pub fn from_wire_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        serde_json::from_slice(bytes).map_err(|e| ModelError::Encoding(e.to_string()))
    }

    /// Content address of the canonical envelope bytes.
    pub fn address(&self) -> Result<Digest, ModelError> {
        Ok(content_address(&self.to_wire_bytes()?))
    }

    /// Parse the payload back into a validated statement.
    pub fn parse_payload(&self) -> Result<Statement, ModelError> {
        parse_statement(&self.payload)
    }
}
