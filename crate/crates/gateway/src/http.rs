//! Blocking HTTP with a retry budget: transport failures and 5xx answers
//! are retried, 4xx answers are not.

use std::time::Duration;

use thiserror::Error;
use ureq::Agent;

use crate::source::SourceBinding;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("{upstream} unreachable after {attempts} attempt(s): {message}")]
    Unreachable { upstream: String, attempts: u32, message: String },
    #[error("{upstream} answered HTTP {status} after {attempts} attempt(s)")]
    Status { upstream: String, status: u16, attempts: u32, body: String },
}

impl TransportError {
    pub fn attempts(&self) -> u32 {
        match self {
            TransportError::Unreachable { attempts, .. } | TransportError::Status { attempts, .. } => *attempts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone)]
pub struct HttpClient {
    agent: Agent,
    retries: u32,
    upstream: String,
}

pub enum Method<'a> {
    Get,
    Post { content_type: &'a str, body: &'a str },
    Put { content_type: &'a str, body: &'a str },
}

impl HttpClient {
    pub fn new(upstream: impl Into<String>, timeout: Duration, retries: u32) -> HttpClient {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent("fedwalk-gateway")
            .build()
            .into();
        HttpClient { agent, retries, upstream: upstream.into() }
    }

    pub fn for_binding(binding: &SourceBinding) -> HttpClient {
        HttpClient::new(binding.source.as_str(), binding.timeout, binding.retries)
    }

    pub fn retries(&self) -> u32 {
        self.retries
    }

    /// One logical request. Returns any reply below 500; 4xx replies are the
    /// caller's to interpret.
    pub fn send(&self, method: &Method<'_>, url: &str, query: &[(&str, String)]) -> Result<Reply, TransportError> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            let outcome = self.once(method, url, query);
            let retry = attempts <= self.retries;
            match outcome {
                Ok(reply) if reply.status < 500 => return Ok(reply),
                Ok(reply) if !retry => {
                    return Err(TransportError::Status {
                        upstream: self.upstream.clone(),
                        status: reply.status,
                        attempts,
                        body: reply.body,
                    })
                }
                Err(message) if !retry => {
                    return Err(TransportError::Unreachable { upstream: self.upstream.clone(), attempts, message })
                }
                _ => continue,
            }
        }
    }

    /// Like `send`, but any non-2xx reply is an error.
    pub fn send_ok(&self, method: &Method<'_>, url: &str, query: &[(&str, String)]) -> Result<String, TransportError> {
        let reply = self.send(method, url, query)?;
        if (200..300).contains(&reply.status) {
            Ok(reply.body)
        } else {
            Err(TransportError::Status { upstream: self.upstream.clone(), status: reply.status, attempts: 1, body: reply.body })
        }
    }

    fn once(&self, method: &Method<'_>, url: &str, query: &[(&str, String)]) -> Result<Reply, String> {
        let pairs = query.iter().map(|(k, v)| (*k, v.as_str()));
        let result = match method {
            Method::Get => self.agent.get(url).query_pairs(pairs).call(),
            Method::Post { content_type, body } => {
                self.agent.post(url).query_pairs(pairs).header("content-type", *content_type).send(*body)
            }
            Method::Put { content_type, body } => {
                self.agent.put(url).query_pairs(pairs).header("content-type", *content_type).send(*body)
            }
        };
        let mut resp = result.map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(Reply { status, body })
    }
}
