use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceId {
    MetadataGraph,
    StatementGraph,
    Gazetteer,
}

impl SourceId {
    pub const ALL: [SourceId; 3] = [SourceId::MetadataGraph, SourceId::StatementGraph, SourceId::Gazetteer];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceId::MetadataGraph => "METADATA_GRAPH",
            SourceId::StatementGraph => "STATEMENT_GRAPH",
            SourceId::Gazetteer => "GAZETTEER",
        }
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceId {
    type Err = String;

    fn from_str(s: &str) -> Result<SourceId, String> {
        SourceId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown source `{s}`"))
    }
}

impl Serialize for SourceId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    Graphql,
    Rest,
}

impl SourceKind {
    /// Registry key of the adapter implementation.
    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Graphql => "graphql",
            SourceKind::Rest => "rest",
        }
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<SourceKind, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "graphql" => Ok(SourceKind::Graphql),
            "rest" => Ok(SourceKind::Rest),
            other => Err(format!("unknown source kind `{other}`")),
        }
    }
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const DEFAULT_RETRIES: u32 = 1;

/// Where and how one upstream is reached.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBinding {
    pub source: SourceId,
    pub endpoint: String,
    pub kind: SourceKind,
    pub timeout: Duration,
    pub retries: u32,
    /// Account name some REST services require (GeoNames).
    pub username: Option<String>,
    /// SDL file overriding the bundled schema.
    pub schema: Option<PathBuf>,
}

impl SourceBinding {
    pub fn new(source: SourceId, endpoint: impl Into<String>, kind: SourceKind) -> SourceBinding {
        SourceBinding {
            source,
            endpoint: endpoint.into(),
            kind,
            timeout: DEFAULT_TIMEOUT,
            retries: DEFAULT_RETRIES,
            username: None,
            schema: None,
        }
    }

    pub fn with_retries(mut self, retries: u32) -> SourceBinding {
        self.retries = retries;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> SourceBinding {
        self.timeout = timeout;
        self
    }
}

pub(crate) fn check_endpoint(text: &str) -> Result<(), String> {
    let u = url::Url::parse(text).map_err(|e| format!("endpoint `{text}`: {e}"))?;
    if !matches!(u.scheme(), "http" | "https") || u.host_str().is_none() {
        return Err(format!("endpoint `{text}` must be an http(s) URL with a host"));
    }
    Ok(())
}
