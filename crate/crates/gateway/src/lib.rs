//! Federated GraphQL gateway: one endpoint over the statement graph, the
//! metadata graph and a REST gazetteer.

pub mod adapter;
pub mod config;
pub mod federation;
pub mod gazetteer;
pub mod http;
pub mod live;
pub mod ontology;
pub mod publish;
pub mod server;
pub mod source;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use fedwalk_core::graphql::{parse_query, validate, GraphQLError, PathSegment, Schema, SchemaError};
use fedwalk_core::sources::{GAZETTEER_SDL, METADATA_GRAPH_SDL, STATEMENT_GRAPH_SDL};
use serde::Serialize;
use serde_json::{Map, Value as Json};
use thiserror::Error;

pub use adapter::{AdapterError, AdapterFactory, AdapterRegistry, GraphQLAdapter, UpstreamAdapter};
pub use config::{ConfigError, GatewayConfig};
pub use federation::{
    compose, execute_plan, filter_by_membership, plan, CrossWalkLink, FederatedSchema, FederationError, MergedResponse,
    QueryPlan,
};
pub use gazetteer::{GazetteerClient, GazetteerError, RestAdapter};
pub use source::{SourceBinding, SourceId, SourceKind};

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Federation(#[from] FederationError),
    #[error("schema for {source_id}: {error}")]
    Schema { source_id: SourceId, error: SchemaError },
    #[error("no adapter registered for kind `{0}`")]
    UnknownKind(String),
    #[error("source {0} is not configured")]
    MissingSource(SourceId),
}

/// SDL each source is expected to expose when the config names no file.
pub fn bundled_schema(source: SourceId) -> Schema {
    let sdl = match source {
        SourceId::MetadataGraph => METADATA_GRAPH_SDL,
        SourceId::StatementGraph => STATEMENT_GRAPH_SDL,
        SourceId::Gazetteer => GAZETTEER_SDL,
    };
    Schema::parse_sdl(sdl).expect("bundled schemas parse")
}

/// The two cross-walks of the scholarly federation: a work's comparison by
/// DOI, and a study's location by GeoNames id.
pub fn default_links() -> Vec<CrossWalkLink> {
    vec![
        CrossWalkLink {
            from_type: "Work".into(),
            from_field: "comparison".into(),
            join_key: "comparisonDoi".into(),
            target_source: SourceId::StatementGraph,
            target_root_field: "comparisonByDoi".into(),
        },
        CrossWalkLink {
            from_type: "Study".into(),
            from_field: "location".into(),
            join_key: "locationGeonameId".into(),
            target_source: SourceId::Gazetteer,
            target_root_field: "places".into(),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceHealth {
    pub status: &'static str,
    pub endpoint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HealthReport {
    pub status: &'static str,
    pub sources: BTreeMap<SourceId, SourceHealth>,
}

impl HealthReport {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub struct Gateway {
    fed: FederatedSchema,
    adapters: HashMap<SourceId, Arc<dyn UpstreamAdapter>>,
}

impl Gateway {
    pub fn from_config(cfg: &GatewayConfig) -> Result<Gateway, GatewayError> {
        Gateway::with_registry(cfg, &AdapterRegistry::default())
    }

    /// Builds one adapter per configured source through `registry`, keyed by
    /// the source's `kind`. Without link lines the default links apply
    /// wherever both ends are bound.
    pub fn with_registry(cfg: &GatewayConfig, registry: &AdapterRegistry) -> Result<Gateway, GatewayError> {
        let mut adapters = Vec::new();
        for binding in &cfg.sources {
            let schema = match &binding.schema {
                None => bundled_schema(binding.source),
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
                    Schema::parse_sdl(&text).map_err(|error| GatewayError::Schema { source_id: binding.source, error })?
                }
            };
            let adapter = registry
                .build(binding, schema)
                .ok_or_else(|| GatewayError::UnknownKind(binding.kind.as_str().to_string()))?;
            adapters.push(adapter);
        }
        let links = if cfg.links.is_empty() {
            // defaults whose ends are both bound
            default_links()
                .into_iter()
                .filter(|l| {
                    adapters.iter().any(|a| a.binding().source == l.target_source)
                        && adapters.iter().any(|a| a.schema().object(&l.from_type).is_some())
                })
                .collect()
        } else {
            cfg.links.clone()
        };
        Gateway::new(adapters, &links)
    }

    pub fn new(adapters: Vec<Arc<dyn UpstreamAdapter>>, links: &[CrossWalkLink]) -> Result<Gateway, GatewayError> {
        let sources: Vec<_> = adapters.iter().map(|a| (a.binding().clone(), a.schema().clone())).collect();
        let fed = compose(&sources, links)?;
        let adapters = adapters.into_iter().map(|a| (a.binding().source, a)).collect();
        Ok(Gateway { fed, adapters })
    }

    pub fn schema(&self) -> &FederatedSchema {
        &self.fed
    }

    pub fn adapter(&self, source: SourceId) -> Option<&Arc<dyn UpstreamAdapter>> {
        self.adapters.get(&source)
    }

    pub fn plan(&self, query: &str) -> Result<QueryPlan, FederationError> {
        let doc = parse_query(query).map_err(|e| FederationError::InvalidQuery(e.to_string()))?;
        plan(&doc, &self.fed)
    }

    /// Parses, validates, plans and runs one request. Problems before
    /// execution come back as an errors-only response.
    pub fn execute(&self, query: &str, variables: &Map<String, Json>) -> MergedResponse {
        let doc = match parse_query(query) {
            Ok(d) => d,
            Err(e) => return MergedResponse::failure(vec![GraphQLError::new(e.to_string(), Vec::new())]),
        };
        let invalid = validate(&doc, &self.fed.merged);
        if !invalid.is_empty() {
            return MergedResponse::failure(
                invalid
                    .iter()
                    .map(|e| GraphQLError::new(e.message.clone(), e.path.iter().map(|k| PathSegment::Key(k.clone())).collect()))
                    .collect(),
            );
        }
        match plan(&doc, &self.fed) {
            Ok(p) => execute_plan(&p, &self.fed, &self.adapters, variables),
            Err(e) => MergedResponse::failure(vec![GraphQLError::new(e.to_string(), Vec::new())]),
        }
    }

    /// Pings every upstream concurrently.
    pub fn health(&self) -> HealthReport {
        let mut ids: Vec<SourceId> = self.adapters.keys().copied().collect();
        ids.sort();
        let results: Vec<Result<(), AdapterError>> = std::thread::scope(|s| {
            let handles: Vec<_> = ids.iter().map(|id| s.spawn(|| self.adapters[id].ping())).collect();
            handles.into_iter().map(|h| h.join().expect("ping panicked")).collect()
        });
        let mut sources = BTreeMap::new();
        for (id, r) in ids.iter().zip(results) {
            let endpoint = self.adapters[id].binding().endpoint.clone();
            let health = match r {
                Ok(()) => SourceHealth { status: "ok", endpoint, error: None },
                Err(e) => SourceHealth { status: "unreachable", endpoint, error: Some(e.to_string()) },
            };
            sources.insert(*id, health);
        }
        let status = if sources.values().all(|s| s.status == "ok") { "ok" } else { "degraded" };
        HealthReport { status, sources }
    }
}
