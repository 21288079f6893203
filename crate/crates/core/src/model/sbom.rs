//! The lite SBOM profile: a flat component inventory plus a directed acyclic
//! dependency graph over component indices.

use serde::{Deserialize, Serialize};

use crate::digest::Digest;
use crate::error::ModelError;

/// Identifier of the only SBOM profile this model speaks.
pub const SBOM_FORMAT_PROFILE: &str = "scm2-cdx-lite/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbomComponent {
    pub name: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub digest: Option<Digest>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub license: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub supplier: Option<String>,
}

/// Directed edge: the component at `from` depends on the component at `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyEdge {
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbomDocument {
    pub components: Vec<SbomComponent>,
    pub dependencies: Vec<DependencyEdge>,
    pub format_profile: String,
}

impl SbomDocument {
    pub fn new(components: Vec<SbomComponent>, dependencies: Vec<DependencyEdge>) -> Self {
        SbomDocument {
            components,
            dependencies,
            format_profile: SBOM_FORMAT_PROFILE.to_string(),
        }
    }

    pub(crate) fn validate(&self, path: &str) -> Result<(), ModelError> {
        if self.format_profile != SBOM_FORMAT_PROFILE {
            return Err(ModelError::invariant(
                format!("{path}.format_profile"),
                format!("must be {SBOM_FORMAT_PROFILE:?}"),
            ));
        }
        let n = self.components.len();
        for (i, edge) in self.dependencies.iter().enumerate() {
            if edge.from >= n || edge.to >= n {
                return Err(ModelError::invariant(
                    format!("{path}.dependencies[{i}]"),
                    format!("edge {}→{} references a component index out of range (components: {n})", edge.from, edge.to),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, c) in self.components.iter().enumerate() {
            if c.name.is_empty() {
                return Err(ModelError::invariant(
                    format!("{path}.components[{i}].name"),
                    "must be non-empty",
                ));
            }
            if !seen.insert((c.name.as_str(), c.version.as_str())) {
                return Err(ModelError::invariant(
                    format!("{path}.components[{i}]"),
                    format!("duplicate component {}@{}", c.name, c.version),
                ));
            }
        }
        if let Some(node) = find_cycle_node(n, &self.dependencies) {
            return Err(ModelError::invariant(
                format!("{path}.dependencies"),
                format!(
                    "dependency graph has a cycle through component {:?}",
                    self.components[node].name
                ),
            ));
        }
        Ok(())
    }
}

/// Kahn's algorithm; returns some node on a cycle if one exists.
pub(crate) fn find_cycle_node(n: usize, edges: &[DependencyEdge]) -> Option<usize> {
    let mut indegree = vec![0usize; n];
    let mut adjacency = vec![Vec::new(); n];
    for edge in edges {
        adjacency[edge.from].push(edge.to);
        indegree[edge.to] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut visited = 0;
    while let Some(node) = queue.pop() {
        visited += 1;
        for &next in &adjacency[node] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                queue.push(next);
            }
        }
    }
    if visited == n {
        None
    } else {
        (0..n).find(|&i| indegree[i] > 0)
    }
}
