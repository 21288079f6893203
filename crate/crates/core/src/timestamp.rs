//! Second-precision UTC timestamps. The canonical wire form is
//! `YYYY-MM-DDTHH:MM:SSZ`; parsing accepts any RFC 3339 representation and
//! normalises it, so re-serialising is a fixed point.

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    /// Current time, truncated to whole seconds.
    pub fn now() -> Self {
        Timestamp(Utc.timestamp_opt(Utc::now().timestamp(), 0).unwrap())
    }

    pub fn from_unix(secs: i64) -> Result<Self, ModelError> {
        Utc.timestamp_opt(secs, 0)
            .single()
            .map(Timestamp)
            .ok_or_else(|| ModelError::InvalidTimestamp(format!("unix seconds {secs} out of range")))
    }

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        let dt = DateTime::parse_from_rfc3339(s)
            .map_err(|e| ModelError::InvalidTimestamp(format!("{s:?}: {e}")))?;
        Self::from_unix(dt.timestamp())
    }

    pub fn unix_seconds(&self) -> i64 {
        self.0.timestamp()
    }

    /// Seconds elapsed from `self` to `other` (negative if `other` is earlier).
    pub fn seconds_until(&self, other: Timestamp) -> i64 {
        other.unix_seconds() - self.unix_seconds()
    }
}

impl std::fmt::Display for Timestamp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0.to_rfc3339_opts(SecondsFormat::Secs, true))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_seconds_utc_z() {
        let t = Timestamp::parse("2024-05-01T12:30:45Z").unwrap();
        assert_eq!(t.to_string(), "2024-05-01T12:30:45Z");
    }

    #[test]
    fn offset_and_subsecond_inputs_normalise() {
        let a = Timestamp::parse("2024-05-01T14:30:45.123+02:00").unwrap();
        let b = Timestamp::parse("2024-05-01T12:30:45Z").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "2024-05-01T12:30:45Z");
    }

    #[test]
    fn rejects_garbage() {
        assert!(Timestamp::parse("yesterday").is_err());
        assert!(Timestamp::parse("2024-13-01T00:00:00Z").is_err());
    }

    #[test]
    fn ordering_follows_time() {
        let a = Timestamp::parse("2024-01-01T00:00:00Z").unwrap();
        let b = Timestamp::parse("2024-01-01T00:00:01Z").unwrap();
        assert!(a < b);
        assert_eq!(a.seconds_until(b), 1);
    }
}
