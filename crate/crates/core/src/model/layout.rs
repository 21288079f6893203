//! Supply-chain layouts: the ordered steps a product must pass through, who
//! may perform each one, and what each step is expected to consume and
//! produce.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::timestamp::Timestamp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutStep {
    pub step_name: String,
    pub authorized_key_ids: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_command: Option<String>,
    pub expected_materials: Vec<String>,
    pub expected_products: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub steps: Vec<LayoutStep>,
    pub expiry: Timestamp,
}

impl LayoutDocument {
    pub fn is_expired(&self, now: Timestamp) -> bool {
        now > self.expiry
    }

    pub(crate) fn validate(&self, path: &str) -> Result<(), ModelError> {
        if self.steps.is_empty() {
            return Err(ModelError::invariant(format!("{path}.steps"), "must be non-empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for (i, step) in self.steps.iter().enumerate() {
            if step.step_name.is_empty() {
                return Err(ModelError::invariant(
                    format!("{path}.steps[{i}].step_name"),
                    "must be non-empty",
                ));
            }
            if !seen.insert(step.step_name.as_str()) {
                return Err(ModelError::invariant(
                    format!("{path}.steps[{i}].step_name"),
                    format!("duplicate step name {:?}", step.step_name),
                ));
            }
            if step.authorized_key_ids.is_empty() {
                return Err(ModelError::invariant(
                    format!("{path}.steps[{i}].authorized_key_ids"),
                    "must be non-empty",
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(name: &str) -> LayoutStep {
        LayoutStep {
            step_name: name.to_string(),
            authorized_key_ids: vec!["aabbccdd00112233".to_string()],
            expected_command: None,
            expected_materials: vec!["*".to_string()],
            expected_products: vec!["*".to_string()],
        }
    }

    fn layout(steps: Vec<LayoutStep>) -> LayoutDocument {
        LayoutDocument {
            steps,
            expiry: Timestamp::parse("2040-01-01T00:00:00Z").unwrap(),
        }
    }

    #[test]
    fn two_steps_in_order_pass() {
        assert!(layout(vec![step("build"), step("test")]).validate("predicate").is_ok());
    }

    #[test]
    fn rejects_empty_steps() {
        assert!(layout(vec![]).validate("predicate").is_err());
    }

    #[test]
    fn rejects_duplicate_step_name() {
        assert!(layout(vec![step("build"), step("build")]).validate("predicate").is_err());
    }

    #[test]
    fn rejects_step_without_keys() {
        let mut s = step("build");
        s.authorized_key_ids.clear();
        assert!(layout(vec![s]).validate("predicate").is_err());
    }

    #[test]
    fn expiry_comparison() {
        let l = layout(vec![step("build")]);
        assert!(!l.is_expired(Timestamp::parse("2039-12-31T23:59:59Z").unwrap()));
        assert!(l.is_expired(Timestamp::parse("2040-01-01T00:00:01Z").unwrap()));
    }
}
