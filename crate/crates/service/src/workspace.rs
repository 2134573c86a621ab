//! Self-contained workspace file: every graph with its metadata and layout,
//! user settings and saved views. Measure caches are rebuilt on load.

use std::collections::{BTreeMap, BTreeSet};

use graphvis_core::explore::{FilterChain, TimeWindow};
use graphvis_core::io::{LayoutMap, StyleSpec};
use graphvis_core::Graph;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

pub const WORKSPACE_FORMAT: &str = "graphvis-workspace";
pub const WORKSPACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GraphMeta {
    pub name: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    /// Format name of an uploaded file, or how the graph was derived
    /// (`generated`, `filtered`, `window`, `sample`).
    pub source_format: String,
}

/// A scalar setting value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Setting {
    Bool(bool),
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedView {
    pub name: String,
    #[serde(default)]
    pub style: StyleSpec,
    #[serde(default)]
    pub filters: FilterChain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<TimeWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct StoredGraph {
    pub id: u64,
    #[serde(flatten)]
    pub meta: GraphMeta,
    pub graph: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub style: Option<StyleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WorkspaceFile {
    pub format: String,
    pub version: u32,
    pub next_graph_id: u64,
    pub graphs: Vec<StoredGraph>,
    #[serde(default)]
    pub settings: BTreeMap<String, Setting>,
    #[serde(default)]
    pub views: Vec<SavedView>,
}

impl Default for WorkspaceFile {
    fn default() -> Self {
        Self {
            format: WORKSPACE_FORMAT.into(),
            version: WORKSPACE_VERSION,
            next_graph_id: 1,
            graphs: Vec::new(),
            settings: BTreeMap::new(),
            views: Vec::new(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> ApiError {
    ApiError::bad_request("invalid-workspace", msg)
}

impl WorkspaceFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("workspace serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ApiError> {
        let file: WorkspaceFile = serde_json::from_slice(bytes).map_err(|e| {
            ApiError {
                position: Some((e.line(), e.column())),
                ..invalid(e.to_string())
            }
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<(), ApiError> {
        if self.format != WORKSPACE_FORMAT {
            return Err(invalid(format!("format must be '{WORKSPACE_FORMAT}', got '{}'", self.format)));
        }
        if self.version != WORKSPACE_VERSION {
            return Err(invalid(format!("unsupported workspace version {}", self.version)));
        }
        let mut ids = BTreeSet::new();
        for g in &self.graphs {
            if g.id == 0 || !ids.insert(g.id) {
                return Err(invalid(format!("graph id {} is zero or repeated", g.id)));
            }
            if let Some(style) = &g.style {
                style.validate().map_err(|e| invalid(format!("graph {}: {e}", g.id)))?;
            }
        }
        for v in &self.views {
            v.style.validate().map_err(|e| invalid(format!("view '{}': {e}", v.name)))?;
            if let Some(w) = v.window {
                TimeWindow::new(w.t0, w.t1).map_err(|e| invalid(format!("view '{}': {e}", v.name)))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_workspace_round_trips() {
        let file = WorkspaceFile::default();
        let back = WorkspaceFile::from_bytes(&file.to_bytes()).unwrap();
        assert_eq!(back, file);
        assert!(back.graphs.is_empty());
    }

    #[test]
    fn rejects_foreign_json() {
        let e = WorkspaceFile::from_bytes(br#"{"nodes": []}"#).unwrap_err();
        assert_eq!((e.status, e.code.as_str()), (400, "invalid-workspace"));
        let e = WorkspaceFile::from_bytes(b"{\n  \"format\": ").unwrap_err();
        assert_eq!(e.position, Some((2, 12)));
    }

    #[test]
    fn rejects_repeated_ids() {
        let stored = StoredGraph {
            id: 3,
            meta: GraphMeta {
                name: "a".into(),
                created_at: 0,
                source_format: "json".into(),
            },
            graph: Graph::new(),
            layout: None,
            style: None,
        };
        let file = WorkspaceFile {
            graphs: vec![stored.clone(), stored],
            next_graph_id: 4,
            ..WorkspaceFile::default()
        };
        assert!(WorkspaceFile::from_bytes(&file.to_bytes()).is_err());
    }
}
