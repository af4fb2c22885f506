//! Smoke test against the real public endpoints. One read-only request per
//! source, no retries, never fatal.

use std::fmt;

use serde_json::{json, Value as Json};

use crate::config::GatewayConfig;
use crate::http::{HttpClient, Method, TransportError};
use crate::source::{SourceBinding, SourceId, SourceKind};

pub const DATACITE_GRAPHQL: &str = "https://api.datacite.org/graphql";
pub const ORKG_GRAPHQL: &str = "https://www.orkg.org/orkg/graphql";
pub const GEONAMES_REST: &str = "http://api.geonames.org";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiveStatus {
    Ok,
    Unreachable,
    Error,
}

impl LiveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LiveStatus::Ok => "OK",
            LiveStatus::Unreachable => "UNREACHABLE",
            LiveStatus::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveCheck {
    pub source: SourceId,
    pub endpoint: String,
    pub status: LiveStatus,
    pub detail: String,
    /// Expected fields the upstream no longer answers.
    pub drift: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiveReport {
    pub checks: Vec<LiveCheck>,
    pub requests: usize,
}

impl fmt::Display for LiveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:<16} {:<12} {}", c.source.as_str(), c.status.as_str(), c.endpoint)?;
            if !c.detail.is_empty() {
                write!(f, "  ({})", c.detail)?;
            }
            writeln!(f)?;
            for d in &c.drift {
                writeln!(f, "  warning: schema drift, field `{d}` missing")?;
            }
        }
        write!(f, "{} request(s) sent", self.requests)
    }
}

/// The public endpoints, GeoNames with the given account.
pub fn live_config(geonames_username: Option<String>) -> GatewayConfig {
    let mut gazetteer = SourceBinding::new(SourceId::Gazetteer, GEONAMES_REST, SourceKind::Rest);
    gazetteer.username = geonames_username;
    GatewayConfig {
        sources: vec![
            SourceBinding::new(SourceId::MetadataGraph, DATACITE_GRAPHQL, SourceKind::Graphql),
            SourceBinding::new(SourceId::StatementGraph, ORKG_GRAPHQL, SourceKind::Graphql),
            gazetteer,
        ],
        ..GatewayConfig::default()
    }
}

const METADATA_PROBE: (&str, &[&str]) = (
    r#"{ work(id: "10.1101/2020.03.08.20030643") { doi citationCount publicationYear } }"#,
    &["doi", "citationCount", "publicationYear"],
);
const STATEMENT_PROBE: (&str, &[&str]) =
    (r#"{ comparisonByDoi(doi: "10.48366/r44930") { id title } }"#, &["id", "title"]);
const GAZETTEER_EXPECTED: &[&str] = &["geonameId", "name", "fcl"];

pub fn live_smoke(cfg: &GatewayConfig) -> LiveReport {
    let mut report = LiveReport::default();
    for id in SourceId::ALL {
        let Some(binding) = cfg.source(id) else { continue };
        let client = HttpClient::new(id.as_str(), binding.timeout, 0);
        let check = match id {
            SourceId::MetadataGraph => graphql_probe(&client, binding, METADATA_PROBE, &mut report.requests),
            SourceId::StatementGraph => graphql_probe(&client, binding, STATEMENT_PROBE, &mut report.requests),
            SourceId::Gazetteer => gazetteer_probe(&client, binding, &mut report.requests),
        };
        report.checks.push(check);
    }
    report
}

fn check(binding: &SourceBinding, status: LiveStatus, detail: impl Into<String>, drift: Vec<String>) -> LiveCheck {
    LiveCheck { source: binding.source, endpoint: binding.endpoint.clone(), status, detail: detail.into(), drift }
}

fn transport(binding: &SourceBinding, e: TransportError) -> LiveCheck {
    match e {
        TransportError::Unreachable { message, .. } => check(binding, LiveStatus::Unreachable, message, Vec::new()),
        TransportError::Status { status, .. } => check(binding, LiveStatus::Error, format!("HTTP {status}"), Vec::new()),
    }
}

fn graphql_probe(client: &HttpClient, binding: &SourceBinding, probe: (&str, &[&str]), requests: &mut usize) -> LiveCheck {
    let (query, expected) = probe;
    let body = json!({"query": query}).to_string();
    *requests += 1;
    let reply = match client.send(&Method::Post { content_type: "application/json", body: &body }, &binding.endpoint, &[]) {
        Ok(r) => r,
        Err(e) => return transport(binding, e),
    };
    let value: Json = match serde_json::from_str(&reply.body) {
        Ok(v) => v,
        Err(_) => return check(binding, LiveStatus::Error, format!("HTTP {}, body is not JSON", reply.status), Vec::new()),
    };
    let messages: Vec<String> = value["errors"]
        .as_array()
        .map(|es| es.iter().filter_map(|e| e["message"].as_str().map(String::from)).collect())
        .unwrap_or_default();
    let object = value["data"].as_object().and_then(|d| d.values().next()).and_then(Json::as_object);
    let drift = drift(expected, object, &messages);
    let status = if (200..300).contains(&reply.status) || value.get("data").is_some() { LiveStatus::Ok } else { LiveStatus::Error };
    let detail = if messages.is_empty() { String::new() } else { messages.join("; ") };
    check(binding, status, detail, drift)
}

fn gazetteer_probe(client: &HttpClient, binding: &SourceBinding, requests: &mut usize) -> LiveCheck {
    let Some(user) = binding.username.as_deref().filter(|u| !u.is_empty()) else {
        return check(binding, LiveStatus::Error, "no GeoNames username configured", Vec::new());
    };
    let url = format!("{}/getJSON", binding.endpoint.trim_end_matches('/'));
    let query = [("geonameId", fedwalk_core::sources::EARTH_GEONAME_ID.to_string()), ("username", user.to_string())];
    *requests += 1;
    let body = match client.send_ok(&Method::Get, &url, &query) {
        Ok(b) => b,
        Err(e) => return transport(binding, e),
    };
    let value: Json = match serde_json::from_str(&body) {
        Ok(v) => v,
        Err(_) => return check(binding, LiveStatus::Error, "body is not JSON", Vec::new()),
    };
    if let Some(msg) = value["status"]["message"].as_str() {
        return check(binding, LiveStatus::Error, msg, Vec::new());
    }
    check(binding, LiveStatus::Ok, "", drift(GAZETTEER_EXPECTED, value.as_object(), &[]))
}

/// Expected fields absent from the answer or named in an error message.
fn drift(expected: &[&str], object: Option<&serde_json::Map<String, Json>>, messages: &[String]) -> Vec<String> {
    expected
        .iter()
        .filter(|f| {
            let missing = object.is_some_and(|o| !o.contains_key(**f));
            let blamed = messages.iter().any(|m| m.contains(&format!("\"{f}\"")) || m.contains(&format!("`{f}`")) || m.contains(&format!("'{f}'")));
            missing || blamed
        })
        .map(|f| f.to_string())
        .collect()
}
