//! Canonical JSON encoding.
//!
//! Signatures and content addresses are computed over these bytes, so the
//! encoding must be a function of the value alone: object keys sorted by code
//! point, no insignificant whitespace, UTF-8, and no floating-point numbers.
//! The writer below owns those guarantees rather than leaning on serializer
//! defaults.

use serde::Serialize;
use serde_json::Value;

use crate::error::ModelError;

/// Serialize any model value to canonical JSON bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>, ModelError> {
    let value = serde_json::to_value(value).map_err(|e| ModelError::Encoding(e.to_string()))?;
    let mut out = Vec::new();
    write_value(&mut out, &value)?;
    Ok(out)
}

/// Check whether `bytes` already are the canonical encoding of the JSON value
/// they contain. Returns false for valid JSON in a non-canonical form.
pub fn is_canonical(bytes: &[u8]) -> Result<bool, ModelError> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| ModelError::Encoding(e.to_string()))?;
    let mut canon = Vec::new();
    write_value(&mut canon, &value)?;
    Ok(canon == bytes)
}

fn write_value(out: &mut Vec<u8>, value: &Value) -> Result<(), ModelError> {
    match value {
        Value::Null => out.extend_from_slice(b"null"),
        Value::Bool(true) => out.extend_from_slice(b"true"),
        Value::Bool(false) => out.extend_from_slice(b"false"),
        Value::Number(n) => {
            if !n.is_i64() && !n.is_u64() {
                return Err(ModelError::Encoding(format!(
                    "non-integer number {n} has no canonical form"
                )));
            }
            out.extend_from_slice(n.to_string().as_bytes());
        }
        Value::String(s) => write_string(out, s),
        Value::Array(items) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_value(out, item)?;
            }
            out.push(b']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort_unstable();
            out.push(b'{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_string(out, key);
                out.push(b':');
                write_value(out, &map[*key])?;
            }
            out.push(b'}');
        }
    }
    Ok(())
}

fn write_string(out: &mut Vec<u8>, s: &str) {
    out.push(b'"');
    for c in s.chars() {
        match c {
            '"' => out.extend_from_slice(b"\\\""),
            '\\' => out.extend_from_slice(b"\\\\"),
            '\x08' => out.extend_from_slice(b"\\b"),
            '\t' => out.extend_from_slice(b"\\t"),
            '\n' => out.extend_from_slice(b"\\n"),
            '\x0c' => out.extend_from_slice(b"\\f"),
            '\r' => out.extend_from_slice(b"\\r"),
            c if (c as u32) < 0x20 => {
                out.extend_from_slice(format!("\\u{:04x}", c as u32).as_bytes());
            }
            c => {
                let mut buf = [0u8; 4];
                out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            }
        }
    }
    out.push(b'"');
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    /// Independent encoder used as the oracle: sorts entries itself and leans
    /// on serde_json's own writer for every scalar.
    fn oracle_encode(value: &Value) -> String {
        match value {
            Value::Object(map) => {
                let mut entries: Vec<(&String, &Value)> = map.iter().collect();
                entries.sort_by(|a, b| a.0.cmp(b.0));
                let body: Vec<String> = entries
                    .into_iter()
                    .map(|(k, v)| {
                        format!("{}:{}", serde_json::to_string(k).unwrap(), oracle_encode(v))
                    })
                    .collect();
                format!("{{{}}}", body.join(","))
            }
            Value::Array(items) => {
                let body: Vec<String> = items.iter().map(oracle_encode).collect();
                format!("[{}]", body.join(","))
            }
            other => serde_json::to_string(other).unwrap(),
        }
    }

    #[test]
    fn sorts_keys_and_strips_whitespace() {
        let raw = r#"{ "zebra": 1, "apple": { "y": [1, 2], "x": null } }"#;
        let value: Value = serde_json::from_str(raw).unwrap();
        let got = String::from_utf8(to_canonical_json(&value).unwrap()).unwrap();
        assert_eq!(got, r#"{"apple":{"x":null,"y":[1,2]},"zebra":1}"#);
        assert_eq!(got, oracle_encode(&value));
    }

    #[test]
    fn escapes_match_serde_json() {
        let value = json!({"s": "quote\" back\\ tab\t nl\n ctl\u{1} café ✓"});
        let got = String::from_utf8(to_canonical_json(&value).unwrap()).unwrap();
        assert_eq!(got, oracle_encode(&value));
    }

    #[test]
    fn refuses_floats() {
        let value = json!({"x": 1.5});
        assert!(to_canonical_json(&value).is_err());
    }

    #[test]
    fn is_canonical_detects_reordered_keys() {
        assert!(is_canonical(br#"{"a":1,"b":2}"#).unwrap());
        assert!(!is_canonical(br#"{"b":2,"a":1}"#).unwrap());
        assert!(!is_canonical(br#"{"a": 1}"#).unwrap());
        assert!(is_canonical(b"not json").is_err());
    }

    fn arb_json(depth: u32) -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            Just(Value::Null),
            any::<bool>().prop_map(Value::Bool),
            any::<i64>().prop_map(|n| Value::Number(n.into())),
            "[a-zA-Z0-9 _\\\\\"\u{00e9}\u{2713}\t\n]{0,12}".prop_map(Value::String),
        ];
        leaf.prop_recursive(depth, 64, 8, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..6).prop_map(Value::Array),
                prop::collection::btree_map("[a-z\u{00e9}]{1,6}", inner, 0..6)
                    .prop_map(|m| Value::Object(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn matches_oracle_on_random_values(value in arb_json(3)) {
            let got = String::from_utf8(to_canonical_json(&value).unwrap()).unwrap();
            prop_assert_eq!(got, oracle_encode(&value));
        }

        #[test]
        fn encode_parse_encode_is_fixed_point(value in arb_json(3)) {
            let first = to_canonical_json(&value).unwrap();
            let reparsed: Value = serde_json::from_slice(&first).unwrap();
            let second = to_canonical_json(&reparsed).unwrap();
            prop_assert_eq!(first, second);
        }
    }
}
