//! Gateway configuration file.
//!
//! One `key = value` pair per line; `#` starts a comment and `${NAME}` in a
//! value expands to the environment variable `NAME`.
//!
//! ```text
//! gateway.listen = 127.0.0.1:4000
//! source.METADATA_GRAPH.endpoint = http://127.0.0.1:4102/graphql
//! source.METADATA_GRAPH.kind = graphql
//! source.GAZETTEER.endpoint = http://127.0.0.1:4103
//! source.GAZETTEER.kind = rest
//! source.GAZETTEER.timeout_ms = 10000
//! source.GAZETTEER.retries = 1
//! source.GAZETTEER.username = ${GEONAMES_USERNAME}
//! link.Work.comparison = key:comparisonDoi, source:STATEMENT_GRAPH, root:comparisonByDoi
//! registry.endpoint = http://127.0.0.1:4102
//! ontology.endpoint = http://127.0.0.1:4104
//! ```
//!
//! Source keys: `endpoint` and `kind` (required), `timeout_ms`, `retries`,
//! `username`, `schema` (path to an SDL file, relative to the config file).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::federation::CrossWalkLink;
use crate::source::{check_endpoint, SourceBinding, SourceId, SourceKind};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GatewayConfig {
    pub listen: Option<String>,
    pub sources: Vec<SourceBinding>,
    pub links: Vec<CrossWalkLink>,
    pub registry_endpoint: Option<String>,
    pub ontology_endpoint: Option<String>,
}

impl GatewayConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<GatewayConfig, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = GatewayConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for s in &mut cfg.sources {
            if let Some(p) = s.schema.as_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<GatewayConfig, ConfigError> {
        let mut cfg = GatewayConfig::default();
        let mut partial: BTreeMap<SourceId, (usize, Partial)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ConfigError::Line { line, message };
            let content = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let key = key.trim();
            let value = expand_env(value.trim()).map_err(err)?;
            let parts: Vec<&str> = key.split('.').collect();
            match parts.as_slice() {
                ["gateway", "listen"] => cfg.listen = Some(value),
                ["registry", "endpoint"] => {
                    check_endpoint(&value).map_err(err)?;
                    cfg.registry_endpoint = Some(value);
                }
                ["ontology", "endpoint"] => {
                    check_endpoint(&value).map_err(err)?;
                    cfg.ontology_endpoint = Some(value);
                }
                ["source", id, field] => {
                    let id: SourceId = id.parse().map_err(err)?;
                    let entry = partial.entry(id).or_insert((line, Partial::default()));
                    entry.1.set(field, value).map_err(err)?;
                }
                ["link", from_type, from_field] => {
                    let link = parse_link(from_type, from_field, &value).map_err(err)?;
                    if cfg.links.iter().any(|l| l.from_type == link.from_type && l.from_field == link.from_field) {
                        return Err(err(format!("link {from_type}.{from_field} declared twice")));
                    }
                    cfg.links.push(link);
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        for (id, (line, p)) in partial {
            cfg.sources.push(p.finish(id).map_err(|message| ConfigError::Line { line, message })?);
        }
        Ok(cfg)
    }

    pub fn source(&self, id: SourceId) -> Option<&SourceBinding> {
        self.sources.iter().find(|s| s.source == id)
    }
}

#[derive(Default)]
struct Partial {
    endpoint: Option<String>,
    kind: Option<SourceKind>,
    timeout_ms: Option<u64>,
    retries: Option<u32>,
    username: Option<String>,
    schema: Option<PathBuf>,
}

impl Partial {
    fn set(&mut self, field: &str, value: String) -> Result<(), String> {
        match field {
            "endpoint" => {
                check_endpoint(&value)?;
                self.endpoint = Some(value);
            }
            "kind" => self.kind = Some(value.parse()?),
            "timeout_ms" => {
                let ms: u64 = value.parse().map_err(|_| format!("timeout_ms `{value}` is not a number"))?;
                if ms == 0 {
                    return Err("timeout_ms must be positive".into());
                }
                self.timeout_ms = Some(ms);
            }
            "retries" => self.retries = Some(value.parse().map_err(|_| format!("retries `{value}` is not a number"))?),
            "username" => self.username = Some(value).filter(|v| !v.is_empty()),
            "schema" => self.schema = Some(PathBuf::from(value)),
            other => return Err(format!("unknown source key `{other}`")),
        }
        Ok(())
    }

    fn finish(self, id: SourceId) -> Result<SourceBinding, String> {
        let endpoint = self.endpoint.ok_or_else(|| format!("source {id} has no endpoint"))?;
        let kind = self.kind.ok_or_else(|| format!("source {id} has no kind"))?;
        let mut b = SourceBinding::new(id, endpoint, kind);
        if let Some(ms) = self.timeout_ms {
            b.timeout = Duration::from_millis(ms);
        }
        if let Some(r) = self.retries {
            b.retries = r;
        }
        b.username = self.username;
        b.schema = self.schema;
        Ok(b)
    }
}

fn expand_env(value: &str) -> Result<String, String> {
    let mut out = String::new();
    let mut rest = value;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let end = rest[start..].find('}').ok_or_else(|| format!("unterminated `${{` in `{value}`"))?;
        let name = &rest[start + 2..start + end];
        out.push_str(&std::env::var(name).unwrap_or_default());
        rest = &rest[start + end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// `key:<field>, source:<id>, root:<field>`
fn parse_link(from_type: &str, from_field: &str, value: &str) -> Result<CrossWalkLink, String> {
    let mut key = None;
    let mut source = None;
    let mut root = None;
    for part in value.split(',') {
        let (k, v) = part.split_once(':').ok_or_else(|| format!("link item `{}` is not `name:value`", part.trim()))?;
        let v = v.trim();
        if v.is_empty() {
            return Err(format!("link item `{}` has no value", k.trim()));
        }
        match k.trim() {
            "key" => key = Some(v.to_string()),
            "source" => source = Some(v.parse::<SourceId>()?),
            "root" => root = Some(v.to_string()),
            other => return Err(format!("unknown link item `{other}`")),
        }
    }
    Ok(CrossWalkLink {
        from_type: from_type.to_string(),
        from_field: from_field.to_string(),
        join_key: key.ok_or("link has no `key`")?,
        target_source: source.ok_or("link has no `source`")?,
        target_root_field: root.ok_or("link has no `root`")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# mock profile
gateway.listen = 127.0.0.1:0
source.METADATA_GRAPH.endpoint = http://127.0.0.1:4102/graphql
source.METADATA_GRAPH.kind = graphql
source.GAZETTEER.endpoint = http://127.0.0.1:4103
source.GAZETTEER.kind = rest
source.GAZETTEER.timeout_ms = 2500
source.GAZETTEER.retries = 0
link.Work.comparison = key:comparisonDoi, source:STATEMENT_GRAPH, root:comparisonByDoi
";

    #[test]
    fn parses_sources_and_links() {
        let cfg = GatewayConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.sources.len(), 2);
        let g = cfg.source(SourceId::Gazetteer).unwrap();
        assert_eq!(g.kind, SourceKind::Rest);
        assert_eq!(g.timeout, Duration::from_millis(2500));
        assert_eq!(g.retries, 0);
        assert_eq!(cfg.source(SourceId::MetadataGraph).unwrap().retries, 1);
        assert_eq!(cfg.links[0].target_root_field, "comparisonByDoi");
    }

    #[test]
    fn bad_link_names_its_line() {
        let text = format!("{SAMPLE}link.Study.location = key:locationGeonameId, source:NOWHERE, root:places\n");
        match GatewayConfig::parse(&text) {
            Err(ConfigError::Line { line, message }) => {
                assert_eq!(line, 10);
                assert!(message.contains("NOWHERE"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(GatewayConfig::parse("source.GAZETTEER.endpoint = ftp//x"), Err(ConfigError::Line { line: 1, .. })));
    }

    #[test]
    fn env_expansion() {
        std::env::set_var("FEDWALK_TEST_USER", "demo");
        assert_eq!(expand_env("u=${FEDWALK_TEST_USER}!").unwrap(), "u=demo!");
        assert_eq!(expand_env("${FEDWALK_UNSET_VAR_X}").unwrap(), "");
    }
}
