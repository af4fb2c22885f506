//! Ontology lookup service client (`GET /search?q=`).

use std::time::Duration;

use fedwalk_core::template::{ClassProvider, ExternalClassRef, ProviderKind, TemplateError};
use serde_json::Value as Json;

use crate::http::{HttpClient, Method};

pub struct OntologyLookup {
    base_url: String,
    http: HttpClient,
}

impl OntologyLookup {
    pub fn new(base_url: impl Into<String>, timeout: Duration, retries: u32) -> OntologyLookup {
        OntologyLookup { base_url: base_url.into(), http: HttpClient::new("ONTOLOGY_LOOKUP", timeout, retries) }
    }
}

impl ClassProvider for OntologyLookup {
    fn kind(&self) -> ProviderKind {
        ProviderKind::OntologyLookup
    }

    fn search(&self, text: &str) -> Result<Vec<ExternalClassRef>, TemplateError> {
        if text.trim().is_empty() {
            return Err(TemplateError::EmptyQuery);
        }
        let url = format!("{}/search", self.base_url.trim_end_matches('/'));
        let body = self
            .http
            .send_ok(&Method::Get, &url, &[("q", text.trim().to_string())])
            .map_err(|e| TemplateError::UpstreamUnreachable(e.to_string()))?;
        let value: Json =
            serde_json::from_str(&body).map_err(|e| TemplateError::UpstreamUnreachable(format!("malformed reply: {e}")))?;
        let docs = value.pointer("/response/docs").and_then(Json::as_array).cloned().unwrap_or_default();
        docs.iter()
            .filter_map(|d| {
                let iri = d.get("iri")?.as_str()?;
                let label = d.get("label").and_then(Json::as_str).unwrap_or_default();
                let prefix = d.get("ontology_prefix").and_then(Json::as_str).map(String::from);
                Some(ExternalClassRef::new(ProviderKind::OntologyLookup, iri, label, prefix))
            })
            .collect()
    }
}
