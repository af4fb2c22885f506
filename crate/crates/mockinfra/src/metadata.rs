//! The scholarly-works graph: works, citation counts and the links between
//! papers and the comparisons that reference them.

use std::sync::{Arc, RwLock};

use fedwalk_core::doi::DataCiteRecord;
use fedwalk_core::graphql::{FieldError, ResolveInfo, Resolvers, Schema};
use fedwalk_core::sources::metadata_graph_schema;
use fedwalk_core::Pid;
use indexmap::IndexMap;
use serde_json::{json, Value as Json};

use crate::fixtures::{WorkCreator, WorkRecord};

#[derive(Debug, Clone, Default)]
pub struct MetadataGraph {
    works: IndexMap<Pid, WorkRecord>,
}

impl MetadataGraph {
    /// Works whose DOI does not parse are skipped; fixtures are checked at load.
    pub fn new(works: &[WorkRecord]) -> MetadataGraph {
        let works = works
            .iter()
            .filter_map(|w| Pid::doi(&w.doi).ok().map(|d| (d, w.clone())))
            .collect();
        MetadataGraph { works }
    }

    pub fn get(&self, doi: &Pid) -> Option<&WorkRecord> {
        self.works.get(doi)
    }

    pub fn len(&self) -> usize {
        self.works.len()
    }

    pub fn is_empty(&self) -> bool {
        self.works.is_empty()
    }

    fn referencing(&self, doi: &Pid) -> impl Iterator<Item = (&Pid, &WorkRecord)> + '_ {
        let doi = doi.clone();
        self.works
            .iter()
            .filter(move |(_, w)| w.references.iter().any(|r| Pid::doi(r).ok().as_ref() == Some(&doi)))
    }

    /// DOIs of the works that reference `doi`, in fixture order.
    pub fn referenced_by(&self, doi: &Pid) -> Vec<Pid> {
        self.referencing(doi).map(|(d, _)| d.clone()).collect()
    }

    /// The first comparison that references `doi`.
    pub fn comparison_of(&self, doi: &Pid) -> Option<Pid> {
        self.referencing(doi).find(|(_, w)| w.is_comparison()).map(|(d, _)| d.clone())
    }

    pub fn work_json(&self, doi: &Pid) -> Option<Json> {
        let w = self.works.get(doi)?;
        Some(json!({
            "id": doi.to_url(),
            "doi": doi.value(),
            "title": w.title,
            "publisher": w.publisher,
            "publicationYear": w.publication_year,
            "resourceTypeGeneral": w.resource_type_general,
            "resourceType": w.resource_type,
            "citationCount": w.citation_count,
            "creators": w.creators.iter().map(|c| json!({"name": c.name, "orcid": c.orcid})).collect::<Vec<_>>(),
            "references": w.references.iter().map(|r| Pid::doi(r).map(|p| p.value().to_string()).unwrap_or_else(|_| r.clone())).collect::<Vec<_>>(),
            "referencedBy": self.referenced_by(doi).iter().map(|p| p.value().to_string()).collect::<Vec<_>>(),
            "comparisonDoi": self.comparison_of(doi).map(|p| p.value().to_string()),
        }))
    }

    /// Records registered metadata, keeping the citation count of a work
    /// that is already known.
    pub fn upsert_registered(&mut self, record: &DataCiteRecord) {
        let citations = self.works.get(&record.identifier).and_then(|w| w.citation_count).unwrap_or(0);
        let work = WorkRecord {
            doi: record.identifier.value().to_string(),
            title: record.titles.first().map(|t| t.text.clone()).unwrap_or_default(),
            publisher: record.publisher.text.clone(),
            publication_year: Some(record.publication_year as i64),
            citation_count: Some(citations),
            resource_type_general: Some(record.resource_type.general.clone()),
            resource_type: Some(record.resource_type.value.clone()),
            creators: record
                .creators
                .iter()
                .map(|c| WorkCreator { name: c.name.clone(), orcid: c.orcid.as_ref().map(|o| o.value().to_string()) })
                .collect(),
            references: record
                .related_identifiers
                .iter()
                .filter(|r| r.relation_type == "References")
                .map(|r| r.pid.value().to_string())
                .collect(),
        };
        self.works.insert(record.identifier.clone(), work);
    }
}

fn doi_arg(raw: Option<String>) -> Result<Pid, FieldError> {
    let raw = raw.ok_or_else(|| FieldError::new("argument `id` is required"))?;
    Pid::doi(&raw).map_err(|e| FieldError::new(e.to_string()))
}

/// Schema and resolvers answering `work(id)` and `works(ids)`.
pub fn serve_metadata_graph(graph: Arc<RwLock<MetadataGraph>>) -> (Schema, Resolvers) {
    let mut r = Resolvers::new();
    let g = graph.clone();
    r.insert("Query", "work", move |info: &ResolveInfo<'_>| {
        let doi = doi_arg(info.arg_str("id"))?;
        let graph = g.read().expect("metadata graph lock");
        graph.work_json(&doi).ok_or_else(|| FieldError::new(format!("no work with DOI {doi}")))
    });
    let g = graph;
    r.insert("Query", "works", move |info: &ResolveInfo<'_>| {
        let graph = g.read().expect("metadata graph lock");
        let ids = match info.arg("ids") {
            Some(Json::Array(items)) => items.clone(),
            Some(single) => vec![single.clone()],
            None => Vec::new(),
        };
        Ok(Json::Array(
            ids.iter()
                .map(|v| {
                    let text = match v {
                        Json::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    Pid::doi(&text).ok().and_then(|d| graph.work_json(&d)).unwrap_or(Json::Null)
                })
                .collect(),
        ))
    });
    (metadata_graph_schema(), r)
}
