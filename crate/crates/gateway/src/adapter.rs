//! Upstream adapters and the registry that builds them by source kind.

use std::collections::BTreeMap;
use std::sync::Arc;

use fedwalk_core::graphql::{print_query, Document, ResponseDocument, Schema};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::http::{HttpClient, Method, TransportError};
use crate::source::SourceBinding;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error(transparent)]
    Unreachable(#[from] TransportError),
    #[error("malformed response from {upstream}: {message}")]
    Malformed { upstream: String, message: String },
}

impl AdapterError {
    pub fn attempts(&self) -> u32 {
        match self {
            AdapterError::Unreachable(t) => t.attempts(),
            AdapterError::Malformed { .. } => 1,
        }
    }
}

/// One federated source. Upstream-side failures come back as error entries
/// or as `AdapterError`, never as panics.
pub trait UpstreamAdapter: Send + Sync {
    fn binding(&self) -> &SourceBinding;
    fn schema(&self) -> &Schema;
    fn fetch(&self, doc: &Document, variables: &Map<String, Json>) -> Result<ResponseDocument, AdapterError>;
    /// Cheapest request that proves the upstream answers.
    fn ping(&self) -> Result<(), AdapterError>;
}

pub struct GraphQLAdapter {
    binding: SourceBinding,
    schema: Schema,
    http: HttpClient,
}

impl GraphQLAdapter {
    pub fn new(binding: SourceBinding, schema: Schema) -> GraphQLAdapter {
        let http = HttpClient::for_binding(&binding);
        GraphQLAdapter { binding, schema, http }
    }

    pub fn post(&self, query: &str, variables: &Map<String, Json>) -> Result<ResponseDocument, AdapterError> {
        let body = json!({"query": query, "variables": variables}).to_string();
        let text = self
            .http
            .send_ok(&Method::Post { content_type: "application/json", body: &body }, &self.binding.endpoint, &[])?;
        let malformed = |message: String| AdapterError::Malformed { upstream: self.binding.source.to_string(), message };
        let value: Json = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        ResponseDocument::from_json(value).map_err(|e| malformed(e.0))
    }
}

impl UpstreamAdapter for GraphQLAdapter {
    fn binding(&self) -> &SourceBinding {
        &self.binding
    }

    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn fetch(&self, doc: &Document, variables: &Map<String, Json>) -> Result<ResponseDocument, AdapterError> {
        self.post(&print_query(doc), variables)
    }

    fn ping(&self) -> Result<(), AdapterError> {
        self.post("{ __typename }", &Map::new()).map(|_| ())
    }
}

/// Builds an adapter for one kind of source.
pub trait AdapterFactory: Send + Sync {
    fn build(&self, binding: &SourceBinding, schema: Schema) -> Arc<dyn UpstreamAdapter>;
}

struct GraphQLFactory;

impl AdapterFactory for GraphQLFactory {
    fn build(&self, binding: &SourceBinding, schema: Schema) -> Arc<dyn UpstreamAdapter> {
        Arc::new(GraphQLAdapter::new(binding.clone(), schema))
    }
}

struct RestFactory;

impl AdapterFactory for RestFactory {
    fn build(&self, binding: &SourceBinding, schema: Schema) -> Arc<dyn UpstreamAdapter> {
        Arc::new(crate::gazetteer::RestAdapter::new(binding.clone(), schema))
    }
}

/// Adapter factories keyed by source kind (`graphql`, `rest`).
pub struct AdapterRegistry {
    factories: BTreeMap<String, Box<dyn AdapterFactory>>,
}

impl Default for AdapterRegistry {
    fn default() -> Self {
        let mut r = AdapterRegistry { factories: BTreeMap::new() };
        r.register("graphql", GraphQLFactory);
        r.register("rest", RestFactory);
        r
    }
}

impl AdapterRegistry {
    pub fn new() -> AdapterRegistry {
        AdapterRegistry::default()
    }

    pub fn register(&mut self, kind: &str, factory: impl AdapterFactory + 'static) {
        self.factories.insert(kind.to_string(), Box::new(factory));
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, binding: &SourceBinding, schema: Schema) -> Option<Arc<dyn UpstreamAdapter>> {
        self.factories.get(binding.kind.as_str()).map(|f| f.build(binding, schema))
    }
}
