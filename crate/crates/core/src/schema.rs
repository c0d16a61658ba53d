//! Attribute schemas, the built-in KDD99 layout, and the raw-label →
//! category mapping. Both are loadable from a TOML config file so that
//! non-default schemas and novel test-set labels can be plugged in.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::Category;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    Discrete,
    Continuous,
}

/// Per-attribute metadata. `borders` is empty until the attribute has been
/// discretized; it is strictly increasing afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttrKind,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub borders: Vec<f64>,
}

impl AttributeSchema {
    pub fn new(name: &str, kind: AttrKind, index: usize) -> Self {
        Self {
            name: name.to_string(),
            kind,
            index,
            borders: Vec::new(),
        }
    }
}

/// Raw attack label → category table, plus an optional fallback for labels
/// absent from the table (the published test set contains attack names the
/// training set never sees).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelMap {
    pub entries: BTreeMap<String, Category>,
    pub fallback: Option<Category>,
}

impl LabelMap {
    pub fn new(entries: BTreeMap<String, Category>, fallback: Option<Category>) -> Self {
        Self { entries, fallback }
    }

    /// Maps a lowercase, dot-stripped raw label to its category.
    pub fn map(&self, raw: &str) -> Result<Category> {
        match self.entries.get(raw) {
            Some(c) => Ok(*c),
            None => self.fallback.ok_or_else(|| Error::UnknownLabel {
                label: raw.to_string(),
            }),
        }
    }

    /// The built-in table: "normal" plus the 22 attack names grouped into
    /// the four attack categories. Strict (no fallback).
    pub fn kdd99() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert("normal".to_string(), Category::Normal);
        for name in ["back", "land", "neptune", "pod", "smurf", "teardrop"] {
            entries.insert(name.to_string(), Category::Dos);
        }
        for name in [
            "ftp_write",
            "guess_passwd",
            "imap",
            "multihop",
            "phf",
            "spy",
            "warezclient",
            "warezmaster",
        ] {
            entries.insert(name.to_string(), Category::R2l);
        }
        for name in ["buffer_overflow", "perl", "loadmodule", "rootkit"] {
            entries.insert(name.to_string(), Category::U2r);
        }
        for name in ["ipsweep", "nmap", "portsweep", "satan"] {
            entries.insert(name.to_string(), Category::Probe);
        }
        Self {
            entries,
            fallback: None,
        }
    }
}

/// The 41-attribute KDD99 connection-record schema. Seven attributes are
/// discrete, the rest are continuous counters and rates.
pub fn kdd99_schema() -> Vec<AttributeSchema> {
    const DEF: &[(&str, AttrKind)] = &[
        ("duration", AttrKind::Continuous),
        ("protocol_type", AttrKind::Discrete),
        ("service", AttrKind::Discrete),
        ("flag", AttrKind::Discrete),
        ("src_bytes", AttrKind::Continuous),
        ("dst_bytes", AttrKind::Continuous),
        ("land", AttrKind::Discrete),
        ("wrong_fragment", AttrKind::Continuous),
        ("urgent", AttrKind::Continuous),
        ("hot", AttrKind::Continuous),
        ("num_failed_logins", AttrKind::Continuous),
        ("logged_in", AttrKind::Discrete),
        ("num_compromised", AttrKind::Continuous),
        ("root_shell", AttrKind::Continuous),
        ("su_attempted", AttrKind::Continuous),
        ("num_root", AttrKind::Continuous),
        ("num_file_creations", AttrKind::Continuous),
        ("num_shells", AttrKind::Continuous),
        ("num_access_files", AttrKind::Continuous),
        ("num_outbound_cmds", AttrKind::Continuous),
        ("is_host_login", AttrKind::Discrete),
        ("is_guest_login", AttrKind::Discrete),
        ("count", AttrKind::Continuous),
        ("srv_count", AttrKind::Continuous),
        ("serror_rate", AttrKind::Continuous),
        ("srv_serror_rate", AttrKind::Continuous),
        ("rerror_rate", AttrKind::Continuous),
        ("srv_rerror_rate", AttrKind::Continuous),
        ("same_srv_rate", AttrKind::Continuous),
        ("diff_srv_rate", AttrKind::Continuous),
        ("srv_diff_host_rate", AttrKind::Continuous),
        ("dst_host_count", AttrKind::Continuous),
        ("dst_host_srv_count", AttrKind::Continuous),
        ("dst_host_same_srv_rate", AttrKind::Continuous),
        ("dst_host_diff_srv_rate", AttrKind::Continuous),
        ("dst_host_same_src_port_rate", AttrKind::Continuous),
        ("dst_host_srv_diff_host_rate", AttrKind::Continuous),
        ("dst_host_serror_rate", AttrKind::Continuous),
        ("dst_host_srv_serror_rate", AttrKind::Continuous),
        ("dst_host_rerror_rate", AttrKind::Continuous),
        ("dst_host_srv_rerror_rate", AttrKind::Continuous),
    ];
    DEF.iter()
        .enumerate()
        .map(|(i, (name, kind))| AttributeSchema::new(name, *kind, i))
        .collect()
}

/// On-disk schema/label config.
///
/// ```toml
/// fallback = "r2l"          # optional
///
/// [[attributes]]
/// name = "duration"
/// kind = "continuous"
///
/// [labels]
/// normal = "normal"
/// neptune = "dos"
/// ```
#[derive(Debug, Deserialize)]
pub struct SchemaConfig {
    #[serde(default)]
    pub attributes: Vec<AttributeConfig>,
    #[serde(default)]
    pub labels: BTreeMap<String, Category>,
    #[serde(default)]
    pub fallback: Option<Category>,
}

#[derive(Debug, Deserialize)]
pub struct AttributeConfig {
    pub name: String,
    pub kind: AttrKind,
}

impl SchemaConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds the runtime schema and label map. Empty sections fall back to
    /// the KDD99 defaults.
    pub fn into_parts(self) -> Result<(Vec<AttributeSchema>, LabelMap)> {
        let schema = if self.attributes.is_empty() {
            kdd99_schema()
        } else {
            let mut seen = std::collections::HashSet::new();
            for attr in &self.attributes {
                if !seen.insert(attr.name.clone()) {
                    return Err(Error::Config(format!(
                        "duplicate attribute name `{}`",
                        attr.name
                    )));
                }
            }
            self.attributes
                .iter()
                .enumerate()
                .map(|(i, a)| AttributeSchema::new(&a.name, a.kind, i))
                .collect()
        };
        let map = if self.labels.is_empty() {
            let mut map = LabelMap::kdd99();
            map.fallback = self.fallback.or(map.fallback);
            map
        } else {
            LabelMap::new(self.labels, self.fallback)
        };
        Ok((schema, map))
    }
}
