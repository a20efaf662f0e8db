use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Group description as it appears in a config document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupConfig {
    Free {
        generators: Vec<String>,
    },
    Finite {
        elements: Vec<String>,
        table: Vec<Vec<u32>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        generators: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexConfig {
    pub name: String,
    #[serde(flatten)]
    pub group: GroupConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub name: String,
    pub o: String,
    pub t: String,
    pub group: GroupConfig,
    pub o_images: Vec<String>,
    pub t_images: Vec<String>,
}

/// A graph-of-groups document. Loading, serializing and loading again
/// yields the same value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GogConfig {
    pub name: String,
    pub vertices: Vec<VertexConfig>,
    #[serde(default)]
    pub edges: Vec<EdgeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spanning_tree: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub metadata: Value,
}

impl GogConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// One of the bundled examples by name.
    pub fn bundled(name: &str) -> Option<Self> {
        let text = match name {
            "free_amalgam_trivial" => include_str!("../../configs/free_amalgam_trivial.json"),
            "double_f2" => include_str!("../../configs/double_f2.json"),
            "hnn_malnormal" => include_str!("../../configs/hnn_malnormal.json"),
            "finite_edge" => include_str!("../../configs/finite_edge.json"),
            _ => return None,
        };
        Some(Self::from_json(text).expect("bundled configs parse"))
    }

    pub const BUNDLED: [&'static str; 4] = ["free_amalgam_trivial", "double_f2", "hnn_malnormal", "finite_edge"];
}
