//! Content addressing. A [`Digest`] is the identity of an immutable blob of
//! bytes; everything in the model that points at an artifact or a stored
//! document does so through one.

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::ModelError;

/// Closed registry of digest algorithms. One entry for now.
pub const DIGEST_ALGORITHM: &str = "sha256";

/// A SHA-256 digest, rendered as lowercase hex on the wire.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; 32]);

impl Digest {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, ModelError> {
        let bytes = hex::decode(s).map_err(|e| ModelError::InvalidDigest(e.to_string()))?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|v: Vec<u8>| ModelError::InvalidDigest(format!("expected 32 bytes, got {}", v.len())))?;
        if s.chars().any(|c| c.is_ascii_uppercase()) {
            return Err(ModelError::InvalidDigest("digest hex must be lowercase".into()));
        }
        Ok(Digest(arr))
    }
}

impl std::fmt::Debug for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Wire form: `{"algorithm":"sha256","value":"<64 lowercase hex>"}`.
#[derive(Serialize, Deserialize)]
struct DigestWire {
    algorithm: String,
    value: String,
}

impl Serialize for Digest {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DigestWire {
            algorithm: DIGEST_ALGORITHM.to_string(),
            value: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = DigestWire::deserialize(deserializer)?;
        if wire.algorithm != DIGEST_ALGORITHM {
            return Err(serde::de::Error::custom(format!(
                "unknown digest algorithm {:?}",
                wire.algorithm
            )));
        }
        Digest::from_hex(&wire.value).map_err(serde::de::Error::custom)
    }
}

/// SHA-256 of arbitrary bytes.
pub fn content_address(bytes: &[u8]) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    Digest(hasher.finalize().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_matches_standard_vector() {
        // SHA-256 of the empty string, from the standard test vectors.
        assert_eq!(
            content_address(b"").to_hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn same_bytes_same_digest() {
        assert_eq!(content_address(b"abc"), content_address(b"abc"));
    }

    #[test]
    fn one_bit_flip_changes_digest() {
        let a = content_address(&[0b0000_0000]);
        let b = content_address(&[0b0000_0001]);
        assert_ne!(a, b);
        // Independently check both against the sha2 crate applied directly.
        let direct = |input: &[u8]| -> [u8; 32] {
            let mut h = Sha256::new();
            h.update(input);
            h.finalize().into()
        };
        assert_eq!(*a.as_bytes(), direct(&[0]));
        assert_eq!(*b.as_bytes(), direct(&[1]));
    }

    #[test]
    fn hex_round_trip() {
        let d = content_address(b"round trip");
        assert_eq!(Digest::from_hex(&d.to_hex()).unwrap(), d);
    }

    #[test]
    fn rejects_uppercase_and_short_hex() {
        assert!(Digest::from_hex("ABCD").is_err());
        assert!(Digest::from_hex("abcd").is_err());
        let upper = content_address(b"x").to_hex().to_uppercase();
        assert!(Digest::from_hex(&upper).is_err());
    }

    #[test]
    fn serde_wire_shape() {
        let d = content_address(b"wire");
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"algorithm\":\"sha256\""));
        let back: Digest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn unknown_algorithm_rejected() {
        let json = format!(
            "{{\"algorithm\":\"sha512\",\"value\":\"{}\"}}",
            content_address(b"x").to_hex()
        );
        assert!(serde_json::from_str::<Digest>(&json).is_err());
    }
}
