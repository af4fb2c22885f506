//! Minimal GraphQL-over-HTTP client for talking to a running gateway.

use std::time::Duration;

use fedwalk_gateway::http::{HttpClient, Method, TransportError};
use serde_json::{json, Map, Value as Json};

pub const DEFAULT_ENDPOINT: &str = "http://127.0.0.1:4000/graphql";

pub struct GatewayClient {
    endpoint: String,
    http: HttpClient,
}

impl GatewayClient {
    /// Accepts either the GraphQL URL or the gateway base URL.
    pub fn new(endpoint: &str) -> GatewayClient {
        let trimmed = endpoint.trim_end_matches('/');
        let endpoint = if trimmed.ends_with("/graphql") { trimmed.to_string() } else { format!("{trimmed}/graphql") };
        GatewayClient { endpoint, http: HttpClient::new("GATEWAY", Duration::from_secs(30), 0) }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Sends one request. Any reply with a JSON body counts as an answer,
    /// including 400s carrying an `errors` list.
    pub fn request(&self, query: &str, variables: &Map<String, Json>) -> Result<Json, TransportError> {
        let body = json!({"query": query, "variables": variables}).to_string();
        let reply = self.http.send(&Method::Post { content_type: "application/json", body: &body }, &self.endpoint, &[])?;
        match serde_json::from_str::<Json>(&reply.body) {
            Ok(v) if v.is_object() => Ok(v),
            _ => Err(TransportError::Status { upstream: "GATEWAY".into(), status: reply.status, attempts: 1, body: reply.body }),
        }
    }
}

/// `message` of every entry under `errors`, with its path when present.
pub fn error_lines(response: &Json) -> Vec<String> {
    let Some(errors) = response["errors"].as_array() else { return Vec::new() };
    errors
        .iter()
        .map(|e| {
            let msg = e["message"].as_str().unwrap_or("(no message)");
            let path: Vec<String> = e["path"]
                .as_array()
                .map(|p| p.iter().map(|s| s.as_str().map(String::from).unwrap_or_else(|| s.to_string())).collect())
                .unwrap_or_default();
            if path.is_empty() { msg.to_string() } else { format!("{} (at {})", msg, path.join(".")) }
        })
        .collect()
}
