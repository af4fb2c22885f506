//! Client of the DataCite-style DOI registry.

use std::time::Duration;

use fedwalk_core::doi::{serialize_kernel4, DataCiteRecord, DoiState, RegistrationState};
use fedwalk_core::Pid;
use serde_json::Value as Json;
use thiserror::Error;

use crate::http::{HttpClient, Method, Reply, TransportError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegisterError {
    #[error(transparent)]
    Unreachable(#[from] TransportError),
    #[error("DOI {doi} is already registered for another comparison ({message})")]
    DoiConflict { doi: String, message: String },
    #[error("registry rejected the request with HTTP {status}: {message}")]
    Rejected { status: u16, message: String },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
}

pub struct RegistryClient {
    base_url: String,
    http: HttpClient,
}

fn reply_message(reply: &Reply) -> String {
    serde_json::from_str::<Json>(&reply.body)
        .ok()
        .and_then(|v| v.pointer("/errors/0/title").and_then(Json::as_str).map(String::from))
        .unwrap_or_else(|| reply.body.clone())
}

impl RegistryClient {
    pub fn new(base_url: impl Into<String>, timeout: Duration, retries: u32) -> RegistryClient {
        RegistryClient { base_url: base_url.into(), http: HttpClient::new("DOI_REGISTRY", timeout, retries) }
    }

    /// Registers or updates `record` for the landing page `url`. A DOI that
    /// exists for the same URL is updated in place.
    pub fn register(&self, record: &DataCiteRecord, url: &str, publish_now: bool) -> Result<RegistrationState, RegisterError> {
        record.check().map_err(|e| RegisterError::InvalidRecord(e.to_string()))?;
        let xml = serialize_kernel4(record);
        let base = self.base_url.trim_end_matches('/');
        let mut query = vec![("url", url.to_string())];
        if publish_now {
            query.push(("event", "publish".to_string()));
        }
        let body = Method::Post { content_type: "application/vnd.datacite.datacite+xml", body: &xml };
        let mut reply = self.http.send(&body, &format!("{base}/dois"), &query)?;
        if reply.status == 422 {
            let put = Method::Put { content_type: "application/vnd.datacite.datacite+xml", body: &xml };
            reply = self.http.send(&put, &format!("{base}/dois/{}", record.identifier.value()), &query)?;
        }
        match reply.status {
            200 | 201 => self.state_of(&reply, &record.identifier),
            409 => Err(RegisterError::DoiConflict { doi: record.identifier.value().into(), message: reply_message(&reply) }),
            status => Err(RegisterError::Rejected { status, message: reply_message(&reply) }),
        }
    }

    fn state_of(&self, reply: &Reply, doi: &Pid) -> Result<RegistrationState, RegisterError> {
        let value: Json = serde_json::from_str(&reply.body)
            .map_err(|e| RegisterError::Rejected { status: reply.status, message: format!("unreadable reply: {e}") })?;
        let state = value
            .pointer("/data/attributes/state")
            .and_then(Json::as_str)
            .and_then(DoiState::parse)
            .ok_or_else(|| RegisterError::Rejected { status: reply.status, message: "reply names no state".into() })?;
        Ok(RegistrationState { doi: doi.clone(), state, registered_at: chrono::Utc::now().to_rfc3339() })
    }
}
