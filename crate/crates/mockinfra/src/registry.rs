//! DataCite-like DOI registry. Registered metadata is copied into the
//! metadata graph so the federation sees fresh comparisons.

use std::sync::{Arc, RwLock};

use fedwalk_core::doi::{parse_kernel4, DataCiteRecord, DoiState};
use fedwalk_core::Pid;
use indexmap::IndexMap;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::metadata::MetadataGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("{0}")]
    BadRequest(String),
    #[error("DOI {0} does not exist")]
    NotFound(String),
    #[error("this DOI has already been taken")]
    Taken,
    #[error("DOI {doi} is registered for {existing}")]
    Conflict { doi: String, existing: String },
}

impl Rejection {
    pub fn status(&self) -> u16 {
        match self {
            Rejection::BadRequest(_) => 400,
            Rejection::NotFound(_) => 404,
            Rejection::Taken => 422,
            Rejection::Conflict { .. } => 409,
        }
    }

    pub fn to_json(&self) -> Json {
        json!({"errors": [{"status": self.status().to_string(), "title": self.to_string()}]})
    }
}

#[derive(Debug, Clone)]
struct Entry {
    url: String,
    state: DoiState,
    record: DataCiteRecord,
}

#[derive(Debug)]
pub struct DoiRegistry {
    entries: IndexMap<Pid, Entry>,
    metadata: Arc<RwLock<MetadataGraph>>,
}

fn requested_state(event: Option<&str>) -> DoiState {
    match event {
        Some("publish") => DoiState::Findable,
        _ => DoiState::Draft,
    }
}

fn parse_body(xml: &str) -> Result<DataCiteRecord, Rejection> {
    let parsed = parse_kernel4(xml).map_err(|e| Rejection::BadRequest(e.to_string()))?;
    parsed.record.check().map_err(|e| Rejection::BadRequest(e.to_string()))?;
    Ok(parsed.record)
}

impl DoiRegistry {
    pub fn new(metadata: Arc<RwLock<MetadataGraph>>) -> DoiRegistry {
        DoiRegistry { entries: IndexMap::new(), metadata }
    }

    /// `POST /dois`: new DOIs only.
    pub fn create(&mut self, xml: &str, url: Option<&str>, event: Option<&str>) -> Result<Json, Rejection> {
        let record = parse_body(xml)?;
        let url = url.filter(|u| !u.is_empty()).ok_or_else(|| Rejection::BadRequest("`url` is required".into()))?;
        if let Some(e) = self.entries.get(&record.identifier) {
            return Err(if e.url == url {
                Rejection::Taken
            } else {
                Rejection::Conflict { doi: record.identifier.value().into(), existing: e.url.clone() }
            });
        }
        let doi = record.identifier.clone();
        self.store(doi.clone(), Entry { url: url.into(), state: requested_state(event), record });
        Ok(self.describe(&doi))
    }

    /// `PUT /dois/{doi}`: updates metadata of a DOI registered for the same URL.
    pub fn update(&mut self, doi: &str, xml: &str, url: Option<&str>, event: Option<&str>) -> Result<Json, Rejection> {
        let doi = Pid::doi(doi).map_err(|e| Rejection::BadRequest(e.to_string()))?;
        let record = parse_body(xml)?;
        if record.identifier != doi {
            return Err(Rejection::BadRequest(format!("body describes {}, path names {doi}", record.identifier)));
        }
        let existing = self.entries.get(&doi).ok_or_else(|| Rejection::NotFound(doi.value().into()))?;
        let url = url.filter(|u| !u.is_empty()).unwrap_or(&existing.url).to_string();
        if url != existing.url {
            return Err(Rejection::Conflict { doi: doi.value().into(), existing: existing.url.clone() });
        }
        // findable DOIs stay findable
        let state = match (existing.state, requested_state(event)) {
            (DoiState::Findable, _) | (_, DoiState::Findable) => DoiState::Findable,
            _ => DoiState::Draft,
        };
        self.store(doi.clone(), Entry { url, state, record });
        Ok(self.describe(&doi))
    }

    pub fn get(&self, doi: &str) -> Result<Json, Rejection> {
        let doi = Pid::doi(doi).map_err(|e| Rejection::BadRequest(e.to_string()))?;
        if !self.entries.contains_key(&doi) {
            return Err(Rejection::NotFound(doi.value().into()));
        }
        Ok(self.describe(&doi))
    }

    fn store(&mut self, doi: Pid, entry: Entry) {
        self.metadata.write().expect("metadata graph lock").upsert_registered(&entry.record);
        self.entries.insert(doi, entry);
    }

    fn describe(&self, doi: &Pid) -> Json {
        let e = &self.entries[doi];
        json!({
            "data": {
                "id": doi.value(),
                "type": "dois",
                "attributes": {
                    "doi": doi.value(),
                    "state": e.state.as_str(),
                    "url": e.url,
                    "titles": e.record.titles.iter().map(|t| json!({"title": t.text})).collect::<Vec<_>>(),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fedwalk_core::doi::{LangText, NameType, RecordCreator, ResourceType, serialize_kernel4};

    fn record(title: &str) -> DataCiteRecord {
        DataCiteRecord {
            identifier: Pid::doi("10.48366/r9").unwrap(),
            creators: vec![RecordCreator { name: "A".into(), name_type: NameType::Personal, orcid: None }],
            titles: vec![LangText::en(title)],
            publisher: LangText::en("P"),
            publication_year: 2020,
            subjects: vec![],
            language: "en".into(),
            resource_type: ResourceType::comparison(),
            related_identifiers: vec![],
            descriptions: vec![],
        }
    }

    #[test]
    fn lifecycle() {
        let graph = Arc::new(RwLock::new(MetadataGraph::default()));
        let mut reg = DoiRegistry::new(graph.clone());
        let xml = serialize_kernel4(&record("first"));
        let made = reg.create(&xml, Some("https://x/c/R9"), None).unwrap();
        assert_eq!(made["data"]["attributes"]["state"], "draft");
        assert_eq!(reg.create(&xml, Some("https://x/c/R9"), None), Err(Rejection::Taken));
        assert!(matches!(reg.create(&xml, Some("https://x/c/R8"), None), Err(Rejection::Conflict { .. })));
        reg.update("10.48366/R9", &xml, Some("https://x/c/R9"), Some("publish")).unwrap();
        let edited = serialize_kernel4(&record("second"));
        let after = reg.update("10.48366/r9", &edited, None, None).unwrap();
        assert_eq!(after["data"]["attributes"]["state"], "findable");
        let doi = Pid::doi("10.48366/r9").unwrap();
        assert_eq!(graph.read().unwrap().get(&doi).unwrap().title, "second");
    }
}
