//! Key management, envelope signing, and signature verification.
//!
//! Envelopes are signed over the DSSE pre-authentication encoding so the
//! payload type cannot be swapped out from under a signature. Key identity is
//! the truncated content address of the public key bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use ed25519_dalek::{Signer as _, Verifier as _};
use serde::{Deserialize, Serialize};

use crate::digest::content_address;
use crate::error::SigningError;
use crate::model::{Envelope, EnvelopeSignature, Statement, STATEMENT_PAYLOAD_TYPE};

pub const SIGNATURE_SCHEME: &str = "ed25519";
/// key_id = first 16 hex chars of sha256(public key bytes).
pub const KEY_ID_HEX_LEN: usize = 16;

/// What a key is trusted to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Producer,
    TransparencyService,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Role::Producer => f.write_str("producer"),
            Role::TransparencyService => f.write_str("transparency_service"),
        }
    }
}

pub fn key_id_for(public: &[u8; 32]) -> String {
    content_address(public).to_hex()[..KEY_ID_HEX_LEN].to_string()
}

/// An ed25519 keypair. The secret half never serializes implicitly: writing
/// it out requires the explicit secret-file methods.
pub struct KeyPair {
    signing: ed25519_dalek::SigningKey,
    key_id: String,
    role: Role,
}

impl KeyPair {
    pub fn generate(role: Role) -> Self {
        let mut rng = rand::rngs::OsRng;
        Self::from_signing_key(ed25519_dalek::SigningKey::generate(&mut rng), role)
    }

    /// Deterministic generation from a 32-byte seed, for tests and fixtures.
    pub fn from_seed(seed: &[u8; 32], role: Role) -> Self {
        Self::from_signing_key(ed25519_dalek::SigningKey::from_bytes(seed), role)
    }

    fn from_signing_key(signing: ed25519_dalek::SigningKey, role: Role) -> Self {
        let key_id = key_id_for(&signing.verifying_key().to_bytes());
        KeyPair { signing, key_id, role }
    }

    pub fn key_id(&self) -> &str {
        &self.key_id
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn public_bytes(&self) -> [u8; 32] {
        self.signing.verifying_key().to_bytes()
    }

    fn sign_bytes(&self, message: &[u8]) -> Vec<u8> {
        self.signing.sign(message).to_bytes().to_vec()
    }

    /// Key file JSON including the secret. Callers are responsible for file
    /// permissions; [`KeyPair::write_secret_file`] sets mode 0600.
    pub fn secret_file_json(&self) -> Vec<u8> {
        let wire = KeyFileWire {
            scheme: SIGNATURE_SCHEME.to_string(),
            public: BASE64.encode(self.public_bytes()),
            secret: Some(BASE64.encode(self.signing.to_bytes())),
            role: self.role,
        };
        crate::canonical::to_canonical_json(&wire).expect("key file encodes")
    }

    pub fn public_file_json(&self) -> Vec<u8> {
        let wire = KeyFileWire {
            scheme: SIGNATURE_SCHEME.to_string(),
            public: BASE64.encode(self.public_bytes()),
            secret: None,
            role: self.role,
        };
        crate::canonical::to_canonical_json(&wire).expect("key file encodes")
    }

    pub fn write_secret_file(&self, path: &Path) -> Result<(), SigningError> {
        std::fs::write(path, self.secret_file_json())
            .map_err(|e| SigningError::InvalidKey(format!("write {}: {e}", path.display())))?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o600))
                .map_err(|e| SigningError::InvalidKey(format!("chmod {}: {e}", path.display())))?;
        }
        Ok(())
    }

    pub fn load_secret_file(path: &Path) -> Result<Self, SigningError> {
        let bytes = std::fs::read(path)
            .map_err(|e| SigningError::InvalidKey(format!("read {}: {e}", path.display())))?;
        Self::from_secret_file_json(&bytes)
    }

    pub fn from_secret_file_json(bytes: &[u8]) -> Result<Self, SigningError> {
        let wire: KeyFileWire = serde_json::from_slice(bytes)
            .map_err(|e| SigningError::InvalidKey(e.to_string()))?;
        if wire.scheme != SIGNATURE_SCHEME {
            return Err(SigningError::InvalidKey(format!("unknown scheme {:?}", wire.scheme)));
        }
        let secret = wire
            .secret
            .ok_or_else(|| SigningError::InvalidKey("no secret in key file".into()))?;
        let seed: [u8; 32] = BASE64
            .decode(&secret)
            .map_err(|e| SigningError::InvalidKey(format!("secret base64: {e}")))?
            .try_into()
            .map_err(|_| SigningError::InvalidKey("secret must be 32 bytes".into()))?;
        let pair = Self::from_seed(&seed, wire.role);
        let declared_public = BASE64
            .decode(&wire.public)
            .map_err(|e| SigningError::InvalidKey(format!("public base64: {e}")))?;
        if declared_public != pair.public_bytes() {
            return Err(SigningError::InvalidKey(
                "public key does not match secret".into(),
            ));
        }
        Ok(pair)
    }
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair")
            .field("key_id", &self.key_id)
            .field("role", &self.role)
            .finish_non_exhaustive()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyFileWire {
    scheme: String,
    public: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    secret: Option<String>,
    role: Role,
}

/// Verifier-side trust configuration: which public keys are trusted, and for
/// which roles. Immutable once loaded.
#[derive(Clone, Debug, Default)]
pub struct TrustStore {
    entries: BTreeMap<String, TrustEntry>,
}

#[derive(Clone, Debug)]
pub struct TrustEntry {
    pub public: [u8; 32],
    pub roles: BTreeSet<Role>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrustStoreWire {
    entries: BTreeMap<String, TrustEntryWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrustEntryWire {
    public: String,
    roles: BTreeSet<Role>,
}

impl TrustStore {
    pub fn new() -> Self {
        TrustStore::default()
    }

    pub fn add_public(&mut self, public: [u8; 32], roles: impl IntoIterator<Item = Role>) -> String {
        let key_id = key_id_for(&public);
        self.entries.insert(
            key_id.clone(),
            TrustEntry {
                public,
                roles: roles.into_iter().collect(),
            },
        );
        key_id
    }

    pub fn add_key(&mut self, key: &KeyPair) -> String {
        self.add_public(key.public_bytes(), [key.role()])
    }

    pub fn remove(&mut self, key_id: &str) -> bool {
        self.entries.remove(key_id).is_some()
    }

    pub fn get(&self, key_id: &str) -> Option<&TrustEntry> {
        self.entries.get(key_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TrustEntry)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let wire = TrustStoreWire {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| {
                    (
                        k.clone(),
                        TrustEntryWire {
                            public: BASE64.encode(v.public),
                            roles: v.roles.clone(),
                        },
                    )
                })
                .collect(),
        };
        crate::canonical::to_canonical_json(&wire).expect("trust store encodes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SigningError> {
        let wire: TrustStoreWire = serde_json::from_slice(bytes)
            .map_err(|e| SigningError::InvalidKey(format!("trust store: {e}")))?;
        let mut store = TrustStore::new();
        for (key_id, entry) in wire.entries {
            let public: [u8; 32] = BASE64
                .decode(&entry.public)
                .map_err(|e| SigningError::InvalidKey(format!("public base64: {e}")))?
                .try_into()
                .map_err(|_| SigningError::InvalidKey("public key must be 32 bytes".into()))?;
            if key_id_for(&public) != key_id {
                return Err(SigningError::InvalidKey(format!(
                    "key id {key_id} does not match its public key"
                )));
            }
            store.entries.insert(key_id, TrustEntry { public, roles: entry.roles });
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Self, SigningError> {
        let bytes = std::fs::read(path)
            .map_err(|e| SigningError::InvalidKey(format!("read {}: {e}", path.display())))?;
        Self::from_json(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), SigningError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| SigningError::InvalidKey(format!("write {}: {e}", path.display())))
    }
}

/// DSSE pre-authentication encoding:
/// `"DSSEv1" SP len(type) SP type SP len(payload) SP payload` with lengths as
/// decimal ASCII byte counts.
pub fn pre_authentication_encoding(payload_type: &str, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + payload_type.len() + 24);
    out.extend_from_slice(b"DSSEv1 ");
    out.extend_from_slice(payload_type.len().to_string().as_bytes());
    out.push(b' ');
    out.extend_from_slice(payload_type.as_bytes());
    out.push(b' ');
    out.extend_from_slice(payload.len().to_string().as_bytes());
    out.push(b' ');
    out.extend_from_slice(payload);
    out
}

/// Canonically serialize and sign a statement, producing a one-signature
/// envelope. Use [`add_signature`] for multi-signature envelopes.
pub fn sign_statement(statement: &Statement, key: &KeyPair) -> Result<Envelope, SigningError> {
    let payload = crate::model::canonical_serialize(statement)?;
    let mut envelope = Envelope::unsigned(payload);
    add_signature(&mut envelope, key);
    Ok(envelope)
}

/// Append this key's signature over the envelope's PAE.
pub fn add_signature(envelope: &mut Envelope, key: &KeyPair) {
    let pae = pre_authentication_encoding(&envelope.payload_type, &envelope.payload);
    envelope.signatures.push(EnvelopeSignature {
        key_id: key.key_id().to_string(),
        signature: key.sign_bytes(&pae),
    });
}

/// How many trusted producer signatures an envelope needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignatureThreshold {
    /// At least one signature verifies under a trusted producer key.
    #[default]
    AnyTrusted,
    /// Every listed signature must verify under a trusted producer key.
    AllListed,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    pub threshold: SignatureThreshold,
    /// Accept envelopes with an empty signature list (no-sign profile).
    pub allow_unsigned: bool,
}

#[derive(Clone, Debug)]
pub struct VerifiedStatement {
    pub statement: Statement,
    /// Key ids whose signatures verified under trusted producer keys. Empty
    /// only for unsigned envelopes accepted under `allow_unsigned`.
    pub verified_key_ids: Vec<String>,
}

/// Verify an envelope against the trust store and return the parsed
/// statement with the set of verified producer keys.
pub fn verify_envelope(
    envelope: &Envelope,
    trust: &TrustStore,
    options: VerifyOptions,
) -> Result<VerifiedStatement, SigningError> {
    if envelope.signatures.is_empty() {
        if !options.allow_unsigned {
            return Err(SigningError::Unsigned);
        }
        let statement = envelope
            .parse_payload()
            .map_err(|e| SigningError::UnparseablePayload(e.to_string()))?;
        return Ok(VerifiedStatement {
            statement,
            verified_key_ids: Vec::new(),
        });
    }

    let pae = pre_authentication_encoding(&envelope.payload_type, &envelope.payload);
    let mut verified = Vec::new();
    let mut first_failure: Option<SigningError> = None;
    for sig in &envelope.signatures {
        let outcome = check_signature(&pae, sig, trust);
        match outcome {
            Ok(()) => verified.push(sig.key_id.clone()),
            Err(e) => {
                if matches!(options.threshold, SignatureThreshold::AllListed) {
                    return Err(e);
                }
                first_failure.get_or_insert(e);
            }
        }
    }
    if verified.is_empty() {
        return Err(first_failure.unwrap_or(SigningError::NoTrustedSignature));
    }

    if envelope.payload_type != STATEMENT_PAYLOAD_TYPE {
        return Err(SigningError::UnparseablePayload(format!(
            "unsupported payload type {:?}",
            envelope.payload_type
        )));
    }
    let statement = envelope
        .parse_payload()
        .map_err(|e| SigningError::UnparseablePayload(e.to_string()))?;
    Ok(VerifiedStatement {
        statement,
        verified_key_ids: verified,
    })
}

fn check_signature(
    pae: &[u8],
    sig: &EnvelopeSignature,
    trust: &TrustStore,
) -> Result<(), SigningError> {
    let entry = trust
        .get(&sig.key_id)
        .ok_or_else(|| SigningError::UnknownKey(sig.key_id.clone()))?;
    if !entry.roles.contains(&Role::Producer) {
        return Err(SigningError::WrongRole {
            key_id: sig.key_id.clone(),
            role: Role::Producer.to_string(),
        });
    }
    verify_raw(&entry.public, pae, &sig.signature)
        .map_err(|_| SigningError::BadSignature(sig.key_id.clone()))
}

/// Raw ed25519 verification of `message` under a 32-byte public key.
pub fn verify_raw(public: &[u8; 32], message: &[u8], signature: &[u8]) -> Result<(), SigningError> {
    let key = ed25519_dalek::VerifyingKey::from_bytes(public)
        .map_err(|e| SigningError::InvalidKey(e.to_string()))?;
    let sig_bytes: [u8; 64] = signature
        .try_into()
        .map_err(|_| SigningError::BadSignature("signature must be 64 bytes".into()))?;
    key.verify(message, &ed25519_dalek::Signature::from_bytes(&sig_bytes))
        .map_err(|_| SigningError::BadSignature(hex::encode(&signature[..4.min(signature.len())])))
}

/// Sign arbitrary canonical bytes with a transparency-service key. Rejects
/// keys generated for any other role.
pub fn countersign_bytes(bytes: &[u8], key: &KeyPair) -> Result<Vec<u8>, SigningError> {
    if key.role() != Role::TransparencyService {
        return Err(SigningError::WrongRole {
            key_id: key.key_id().to_string(),
            role: Role::TransparencyService.to_string(),
        });
    }
    Ok(key.sign_bytes(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digest::content_address;
    use crate::model::{ArtifactRef, Predicate, SbomDocument, Statement};
    use crate::timestamp::Timestamp;
    use proptest::prelude::*;

    fn fixture_statement() -> Statement {
        Statement::new(
            vec![ArtifactRef::new("app.tar", content_address(b"app"))],
            Predicate::Sbom(SbomDocument::new(vec![], vec![])),
            Timestamp::parse("2024-03-01T08:00:00Z").unwrap(),
            "builder@example",
        )
        .unwrap()
    }

    fn seeded(n: u8, role: Role) -> KeyPair {
        KeyPair::from_seed(&[n; 32], role)
    }

    #[test]
    fn pae_matches_reference_vector() {
        let got = pre_authentication_encoding("application/vnd.in-toto+json", b"hello");
        assert_eq!(got, b"DSSEv1 28 application/vnd.in-toto+json 5 hello".to_vec());
    }

    #[test]
    fn key_id_is_truncated_content_address() {
        let key = seeded(1, Role::Producer);
        let full = content_address(&key.public_bytes()).to_hex();
        assert_eq!(key.key_id(), &full[..KEY_ID_HEX_LEN]);
        assert_eq!(key.key_id().len(), 16);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = seeded(7, Role::Producer);
        let b = seeded(7, Role::Producer);
        assert_eq!(a.public_bytes(), b.public_bytes());
        let x = KeyPair::generate(Role::Producer);
        let y = KeyPair::generate(Role::Producer);
        assert_ne!(x.key_id(), y.key_id());
    }

    #[test]
    fn generated_key_verifies_probe_message() {
        // Oracle: verify with ed25519-dalek's verifier directly rather than
        // through our envelope path.
        let key = seeded(9, Role::Producer);
        let probe = b"probe message";
        let sig = key.sign_bytes(probe);
        let vk = ed25519_dalek::VerifyingKey::from_bytes(&key.public_bytes()).unwrap();
        let arr: [u8; 64] = sig.as_slice().try_into().unwrap();
        vk.verify(probe, &ed25519_dalek::Signature::from_bytes(&arr)).unwrap();
    }

    #[test]
    fn sign_verify_round_trip() {
        let key = seeded(2, Role::Producer);
        let mut trust = TrustStore::new();
        trust.add_key(&key);
        let envelope = sign_statement(&fixture_statement(), &key).unwrap();
        let verified = verify_envelope(&envelope, &trust, VerifyOptions::default()).unwrap();
        assert_eq!(verified.verified_key_ids, vec![key.key_id().to_string()]);
        assert_eq!(verified.statement, fixture_statement());
    }

    #[test]
    fn unknown_key_reported_distinctly() {
        let signer = seeded(3, Role::Producer);
        let other = seeded(4, Role::Producer);
        let mut trust = TrustStore::new();
        trust.add_key(&other);
        let envelope = sign_statement(&fixture_statement(), &signer).unwrap();
        match verify_envelope(&envelope, &trust, VerifyOptions::default()) {
            Err(SigningError::UnknownKey(id)) => assert_eq!(id, signer.key_id()),
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn mixed_trust_pairs_behave_per_threshold() {
        // All four trusted/untrusted pairs for a two-signature envelope.
        let statement = fixture_statement();
        for (trust_a, trust_b) in [(false, false), (false, true), (true, false), (true, true)] {
            let key_a = seeded(10, Role::Producer);
            let key_b = seeded(11, Role::Producer);
            let mut trust = TrustStore::new();
            if trust_a {
                trust.add_key(&key_a);
            }
            if trust_b {
                trust.add_key(&key_b);
            }
            let mut envelope = sign_statement(&statement, &key_a).unwrap();
            add_signature(&mut envelope, &key_b);
            let expect_names: Vec<String> = [(trust_a, &key_a), (trust_b, &key_b)]
                .iter()
                .filter(|(t, _)| *t)
                .map(|(_, k)| k.key_id().to_string())
                .collect();
            let result = verify_envelope(&envelope, &trust, VerifyOptions::default());
            if expect_names.is_empty() {
                assert!(result.is_err());
            } else {
                assert_eq!(result.unwrap().verified_key_ids, expect_names);
            }
            let strict = verify_envelope(
                &envelope,
                &trust,
                VerifyOptions { threshold: SignatureThreshold::AllListed, ..Default::default() },
            );
            assert_eq!(strict.is_ok(), trust_a && trust_b);
        }
    }

    #[test]
    fn unsigned_envelope_needs_explicit_policy() {
        let statement = fixture_statement();
        let payload = crate::model::canonical_serialize(&statement).unwrap();
        let envelope = Envelope::unsigned(payload);
        let trust = TrustStore::new();
        assert!(matches!(
            verify_envelope(&envelope, &trust, VerifyOptions::default()),
            Err(SigningError::Unsigned)
        ));
        let verdict = verify_envelope(
            &envelope,
            &trust,
            VerifyOptions { allow_unsigned: true, ..Default::default() },
        )
        .unwrap();
        assert!(verdict.verified_key_ids.is_empty());
    }

    #[test]
    fn countersign_requires_transparency_role() {
        let producer = seeded(5, Role::Producer);
        let log_key = seeded(6, Role::TransparencyService);
        assert!(matches!(
            countersign_bytes(b"checkpoint", &producer),
            Err(SigningError::WrongRole { .. })
        ));
        let sig = countersign_bytes(b"checkpoint", &log_key).unwrap();
        verify_raw(&log_key.public_bytes(), b"checkpoint", &sig).unwrap();
        assert!(verify_raw(&log_key.public_bytes(), b"tampered", &sig).is_err());
    }

    #[test]
    fn secret_key_file_round_trip_and_mode() {
        let key = seeded(8, Role::TransparencyService);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.key");
        key.write_secret_file(&path).unwrap();
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            let mode = std::fs::metadata(&path).unwrap().permissions().mode();
            assert_eq!(mode & 0o777, 0o600);
        }
        let loaded = KeyPair::load_secret_file(&path).unwrap();
        assert_eq!(loaded.key_id(), key.key_id());
        assert_eq!(loaded.role(), Role::TransparencyService);

        let public_json = key.public_file_json();
        assert!(!String::from_utf8_lossy(&public_json).contains("secret"));
    }

    #[test]
    fn trust_store_round_trip_rejects_mismatched_id() {
        let key = seeded(12, Role::Producer);
        let mut trust = TrustStore::new();
        trust.add_key(&key);
        let json = trust.to_json();
        let loaded = TrustStore::from_json(&json).unwrap();
        assert!(loaded.get(key.key_id()).is_some());

        let tampered = String::from_utf8(json).unwrap().replace(key.key_id(), "deadbeefdeadbeef");
        assert!(TrustStore::from_json(tampered.as_bytes()).is_err());
    }

    #[test]
    fn debug_never_prints_secret() {
        let key = seeded(13, Role::Producer);
        let secret_hex = hex::encode(key.signing.to_bytes());
        let debug = format!("{key:?}");
        assert!(!debug.contains(&secret_hex));
    }

    proptest! {
        // Any single byte flip in payload, payload type, or signature must be
        // rejected.
        #[test]
        fn byte_flips_are_rejected(
            target in 0usize..3,
            pos in any::<prop::sample::Index>(),
            bit in 0u8..8,
        ) {
            let key = seeded(21, Role::Producer);
            let mut trust = TrustStore::new();
            trust.add_key(&key);
            let mut envelope = sign_statement(&fixture_statement(), &key).unwrap();
            match target {
                0 => {
                    let i = pos.index(envelope.payload.len());
                    envelope.payload[i] ^= 1 << bit;
                }
                1 => {
                    // Flip within ASCII printable range so the string stays valid UTF-8.
                    let mut bytes = envelope.payload_type.clone().into_bytes();
                    let i = pos.index(bytes.len());
                    bytes[i] = if bytes[i] == b'x' { b'y' } else { b'x' };
                    envelope.payload_type = String::from_utf8(bytes).unwrap();
                }
                _ => {
                    let i = pos.index(envelope.signatures[0].signature.len());
                    envelope.signatures[0].signature[i] ^= 1 << bit;
                }
            }
            prop_assert!(verify_envelope(&envelope, &trust, VerifyOptions::default()).is_err());
        }
    }
}
